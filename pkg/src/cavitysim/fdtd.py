"""Finite-difference oracle for the wave equation with moving Robin boundaries.

Each initial mode function is evolved on a uniform grid with a leapfrog
scheme. The Robin conditions ``phi - d_l phi_x = 0`` (x = 0) and
``phi + d_r phi_x = 0`` (x = L_cav) enter through ghost points with centred
differences, so the scheme is second order in space and time. At the end
the evolved fields are projected onto the static basis of the final
boundary values with the Klein-Gordon product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bogoliubov import BogoliubovTransform
from .robin import ModeBasis, mode_basis

_BLOWUP = 1e3


class FDTDConfigError(ValueError):
    """Grid or time step violates the stability requirements."""


class FDTDInstabilityError(RuntimeError):
    """The field grew without bound, usually from a stiff boundary stencil."""


@dataclass(frozen=True, eq=False)
class FDTDResult:
    transform: BogoliubovTransform
    final_basis: ModeBasis
    n_steps: int
    dx: float
    dt: float


def _trapezoid_weights(n_cells: int, dx: float) -> np.ndarray:
    w = np.full(n_cells + 1, dx)
    w[0] = w[-1] = dx / 2
    return w


def _laplacian(phi, d_left: float, d_right: float, dx: float):
    """Second difference with Robin ghost points; rows are independent fields."""
    lap = np.empty_like(phi)
    lap[:, 1:-1] = phi[:, 2:] - 2 * phi[:, 1:-1] + phi[:, :-2]
    if d_left > 0:
        ghost = phi[:, 1] - 2 * dx * phi[:, 0] / d_left
        lap[:, 0] = phi[:, 1] - 2 * phi[:, 0] + ghost
    else:
        lap[:, 0] = 0.0
    if d_right > 0:
        ghost = phi[:, -2] - 2 * dx * phi[:, -1] / d_right
        lap[:, -1] = ghost - 2 * phi[:, -1] + phi[:, -2]
    else:
        lap[:, -1] = 0.0
    return lap


def _project(basis: ModeBasis, x, weights, field, dfield):
    """alpha and beta columns of evolved fields in ``basis``; derivatives are d/dx0."""
    V = basis.profiles(x) * weights
    dV = -1j * basis.k[:, None] * V
    # (f, g) = -i int (f conj(dg) - conj(g) df) is antilinear in g:
    # alpha_mn = (v_m, U_n), beta_mn = -(v_m, conj(U_n))
    alpha = -1j * (V @ dfield.conj().T - dV @ field.conj().T)
    beta = 1j * (V @ dfield.T - dV @ field.T)
    return alpha, beta


def fdtd_oracle(
    L_cav: float,
    d_l,
    d_r,
    duration: float,
    n_modes: int = 6,
    n_cells: int = 400,
    cfl: float = 0.5,
    c: float = 1.0,
) -> FDTDResult:
    """Evolve the first ``n_modes`` Robin modes through a boundary drive by finite differences.

    ``d_l`` and ``d_r`` are callables of time returning the effective lengths.
    The returned transform follows the same convention as
    :func:`cavitysim.robin.evolve_robin`.
    """
    if not 0 < cfl <= 1:
        raise FDTDConfigError(f"CFL number must lie in (0, 1], got {cfl}")
    if n_cells < 8 or duration <= 0 or L_cav <= 0:
        raise FDTDConfigError("need n_cells >= 8, positive duration and length")
    dx = L_cav / n_cells
    n_steps = max(2, math.ceil(duration * c / (cfl * dx)))
    dt = duration / n_steps
    lam2 = (c * dt / dx) ** 2
    x = np.linspace(0.0, L_cav, n_cells + 1)
    w = _trapezoid_weights(n_cells, dx)

    start = mode_basis(L_cav, float(d_l(0.0)), float(d_r(0.0)), n_modes)
    prev = start.profiles(x).astype(complex)
    velocity = -1j * c * start.k[:, None] * prev
    scale = np.max(np.abs(prev))
    cur = prev + dt * velocity + 0.5 * lam2 * _laplacian(prev, float(d_l(0.0)), float(d_r(0.0)), dx)

    for step in range(1, n_steps + 1):
        t = step * dt
        dl, dr = float(d_l(t)), float(d_r(t))
        nxt = 2 * cur - prev + lam2 * _laplacian(cur, dl, dr, dx)
        prev, cur = cur, nxt
        if step % 64 == 0 and np.max(np.abs(cur)) > _BLOWUP * scale:
            raise FDTDInstabilityError(
                f"field blew up at t = {t:.4g}; boundary stencil stiffness 2dx/d = "
                f"{2 * dx / max(min(dl, dr), 1e-300):.3g}, refine the grid"
            )
    # prev is the field at t = duration, cur one step later
    before = _step_back(prev, cur, lam2, float(d_l(duration)), float(d_r(duration)), dx)
    field = prev
    dfield = (cur - before) / (2 * c * dt)
    final = mode_basis(L_cav, float(d_l(duration)), float(d_r(duration)), n_modes)
    alpha, beta = _project(final, x, w, field, dfield)
    return FDTDResult(BogoliubovTransform(alpha, beta), final, n_steps, dx, dt)


def _step_back(field, after, lam2, dl, dr, dx):
    """Field one step before ``field`` given the step after (leapfrog is time-reversible)."""
    return 2 * field - after + lam2 * _laplacian(field, dl, dr, dx)
