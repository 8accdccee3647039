"""Minkowski/Rindler Dirichlet cavities and the exact round-trip transform.

Positions inside the cavity are written as ``u = (x - x_l)/L`` in [0, 1] on
the t = 0 slice. The Rindler coordinate of the same point, as a fraction of
the Rindler length, is

    s(u) = log(1 + h u / g_-) / log(g_+ / g_-),

and the chart Jacobian ``dxi/dx`` becomes ``s'(u) L / L'``. All overlap
integrals are evaluated by Gauss-Legendre quadrature in ``u``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .bogoliubov import (
    BogoliubovTransform,
    PhaseRecord,
    compose_all,
    free_evolution,
    inverse,
)
from .trajectories import (
    RigidityError,
    TrajectoryPlan,
    proper_time_round_trip,
    rindler_length_ratio,
    rindler_segment_duration,
)


class QuadratureError(RuntimeError):
    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (achieved {estimate:.3e})")
        self.estimate = estimate


@dataclass(frozen=True)
class DirichletBasis:
    L: float
    n_modes: int
    c: float

    @cached_property
    def frequencies(self) -> np.ndarray:
        return np.pi * self.c * np.arange(1, self.n_modes + 1) / self.L


@dataclass(frozen=True)
class RindlerBasis:
    L: float
    h: float
    n_modes: int
    c: float

    @property
    def L_prime(self) -> float:
        return self.L * rindler_length_ratio(self.h)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Frequencies conjugate to Rindler time."""
        return np.pi * self.c * np.arange(1, self.n_modes + 1) / self.L_prime


def default_work_modes(n_modes: int) -> int:
    return 2 * n_modes


def _rindler_fraction(h: float, u: np.ndarray):
    """s(u) and ds/du for the cavity at parameter h."""
    g_minus = 1 - h / 2
    ratio = rindler_length_ratio(h)  # L'/L = log(g+/g-)/h
    if h == 0:
        return u.copy(), np.ones_like(u)
    s = np.log1p(h * u / g_minus) / (h * ratio)
    ds = 1.0 / ((g_minus + h * u) * ratio)
    return s, ds


def _overlaps(h: float, n_out: int, n_in: int, n_nodes: int):
    """(alpha, beta) between Rindler output modes and Minkowski input modes."""
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    u = 0.5 * (x + 1)
    w = 0.5 * w
    s, ds = _rindler_fraction(h, u)
    m = np.arange(1, n_out + 1)
    n = np.arange(1, n_in + 1)
    Sm = np.sin(np.pi * np.outer(m, s))
    Un = np.sin(np.pi * np.outer(n, u))
    A1 = (Sm * w) @ Un.T
    A2 = (Sm * (w * ds)) @ Un.T
    norm = np.sqrt(np.outer(m, n))
    alpha = (n[None, :] * A1 + m[:, None] * A2) / norm
    beta = (n[None, :] * A1 - m[:, None] * A2) / norm
    return alpha, beta


def _nodes_for(n_modes: int) -> int:
    return 2 * n_modes + 48


def overlap_matrices(h: float, n_modes: int, tol: float = 1e-10, n_nodes: int | None = None):
    """Converged overlap matrices; the node count doubles until two passes agree to ``tol``."""
    if not 0 <= h < 2:
        raise RigidityError(f"h must lie in [0, 2), got {h}")
    q = n_nodes or _nodes_for(n_modes)
    alpha, beta = _overlaps(h, n_modes, n_modes, q)
    for _ in range(6):
        q *= 2
        a2, b2 = _overlaps(h, n_modes, n_modes, q)
        err = max(np.max(np.abs(a2 - alpha)), np.max(np.abs(b2 - beta)))
        alpha, beta = a2, b2
        if err < tol:
            return alpha, beta
    raise QuadratureError("overlap quadrature did not converge", err)


def kg_inner_product(f, g, df_dt, dg_dt, x, weights):
    """Klein-Gordon product ``-i int (f conj(dg/dx0) - conj(g) df/dx0) dx`` on a t = const slice.

    Arguments are samples of the two fields and their derivatives with
    respect to ``x0 = c t`` at nodes ``x`` with quadrature ``weights``.
    """
    integrand = f * np.conj(dg_dt) - np.conj(g) * df_dt
    return complex(-1j * np.sum(weights * integrand))


def _parity(n_modes: int) -> np.ndarray:
    return np.where(np.arange(n_modes) % 2 == 0, 1.0, -1.0)


_cache: dict = {}
_cache_lock = threading.Lock()


def segment_transform(h: float, n_modes: int, reflected: bool = False) -> BogoliubovTransform:
    """Minkowski-to-Rindler basis change at the onset of uniform acceleration.

    ``reflected`` selects acceleration towards -x, obtained by conjugating
    with the mode parity ``(-1)^(n+1)``.
    """
    key = (float(h), int(n_modes), bool(reflected))
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    alpha, beta = overlap_matrices(h, n_modes)
    if reflected:
        p = _parity(n_modes)
        alpha = p[:, None] * alpha * p[None, :]
        beta = p[:, None] * beta * p[None, :]
    t = BogoliubovTransform(alpha.astype(complex), beta.astype(complex))
    with _cache_lock:
        _cache.setdefault(key, t)
    return t


def trip_transform_full(plan: TrajectoryPlan, n_work: int) -> BogoliubovTransform:
    """Round-trip transform in an ``n_work``-mode basis (no truncation)."""
    mink = DirichletBasis(plan.L, n_work, plan.c)
    if plan.stationary:
        return free_evolution(mink.frequencies, plan.duration)
    rind = RindlerBasis(plan.L, plan.h, n_work, plan.c)
    eta = rindler_segment_duration(plan, plan.t_a)
    S = segment_transform(plan.h, n_work)
    Sr = segment_transform(plan.h, n_work, reflected=True)
    S_inv = inverse(S, check=False)
    Sr_inv = inverse(Sr, check=False)
    return compose_all(
        [
            S,
            free_evolution(rind.frequencies, eta),
            S_inv,
            Sr,
            free_evolution(rind.frequencies, 2 * eta),
            Sr_inv,
            S,
            free_evolution(rind.frequencies, eta),
            S_inv,
        ]
    )


def trip_transform(plan: TrajectoryPlan, n_modes: int = 20, n_work: int | None = None) -> BogoliubovTransform:
    """Exact round-trip transform of the Dirichlet cavity, in the original Minkowski basis."""
    n_work = n_work or default_work_modes(n_modes)
    if n_work < n_modes:
        raise ValueError("n_work must be at least n_modes")
    return trip_transform_full(plan, n_work).truncate(n_modes)


def clock_frequency(plan: TrajectoryPlan) -> float:
    """Clock-mode frequency pi c / L of the static Dirichlet reference cavity."""
    return math.pi * plan.c / plan.L


def trip_phase(plan: TrajectoryPlan, n_modes: int = 20, n_work: int | None = None) -> PhaseRecord:
    t = trip_transform(plan, n_modes, n_work)
    return PhaseRecord.from_transform(t, clock_frequency(plan), plan.duration)


def single_mode_phase(plan: TrajectoryPlan) -> float:
    """Relative clock phase with mode mixing and particle creation switched off.

    Mode 1 accumulates ``Omega_1 * 4 eta_a`` while the static reference
    accumulates ``omega_1 * 4 t_a``.
    """
    if plan.stationary:
        return 0.0
    w1 = clock_frequency(plan)
    ratio = rindler_length_ratio(plan.h)
    x = plan.rapidity
    dilation = math.asinh(x) / x  # eta_a / t_a
    return w1 * plan.duration * (1 - dilation / ratio)


def ideal_clock_phase(plan: TrajectoryPlan, omega_ref: float | None = None) -> float:
    """Relative phase of a point-like clock, omega_ref * (4 t_a - tau)."""
    if omega_ref is None:
        omega_ref = clock_frequency(plan)
    if plan.stationary:
        return 0.0
    return omega_ref * (plan.duration - proper_time_round_trip(plan))
