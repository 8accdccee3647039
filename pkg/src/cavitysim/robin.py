"""SQUID-terminated waveguide: Robin cavity modes and their time evolution.

Mode functions are ``u_n(t, x) = N_n sin(k_n x + delta_n) exp(-i c k_n t)`` on
``[0, L_cav]`` with boundary conditions ``phi - d_l phi' = 0`` at ``x = 0``
and ``phi + d_r phi' = 0`` at ``x = L_cav``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bogoliubov import BogoliubovTransform, PhaseRecord
from .constants import PhysicalConstants
from .trajectories import TrajectoryPlan, mirror_displacements

class FluxDivergenceError(ValueError):
    """cos(pi Phi / Phi0) = 0: the SQUID effective length is unbounded."""


class UnreachableLengthError(ValueError):
    """Requested effective length is below the unbiased-SQUID minimum."""


class RootFindingError(RuntimeError):
    pass


class StepConvergenceError(RuntimeError):
    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (estimate {estimate:.3e} rad); reduce dt")
        self.estimate = estimate


def delta_L_eff(flux, constants: PhysicalConstants = PhysicalConstants()):
    """Extra effective length of a flux-biased SQUID, ``delta_L_min / |cos(pi Phi/Phi0)|``."""
    cos = np.abs(np.cos(np.pi * np.asarray(flux, dtype=float) / constants.Phi0))
    if np.any(cos < 1e-12):
        raise FluxDivergenceError("flux at a half-integer multiple of Phi0")
    out = constants.delta_L_min / cos
    return float(out) if np.ndim(out) == 0 else out


def delta_L_eff_derivative(flux, constants: PhysicalConstants = PhysicalConstants()):
    """d(delta_L_eff)/dPhi within the principal lobe |Phi| < Phi0/2."""
    x = np.pi * np.asarray(flux, dtype=float) / constants.Phi0
    return constants.delta_L_min * np.pi / constants.Phi0 * np.sin(x) / np.cos(x) ** 2


def flux_for_length(target, constants: PhysicalConstants = PhysicalConstants()):
    """Flux in [0, Phi0/2) at which the SQUID adds ``target`` of effective length."""
    target = np.asarray(target, dtype=float)
    dmin = constants.delta_L_min
    if np.any(target < dmin * (1 - 1e-12)):
        raise UnreachableLengthError(
            f"effective length {np.min(target):.6g} m below minimum {dmin:.6g} m"
        )
    out = constants.Phi0 / np.pi * np.arccos(np.minimum(dmin / target, 1.0))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RobinCavityConfig:
    """Physical cavity of length ``L_cav`` with SQUID effective lengths ``d_l``, ``d_r``.

    When ``constants`` is given the effective lengths must be reachable,
    i.e. at least ``constants.delta_L_min``.
    """

    L_cav: float
    d_l: float
    d_r: float
    constants: PhysicalConstants | None = None

    def __post_init__(self):
        if self.L_cav <= 0:
            raise ValueError("L_cav must be positive")
        if self.d_l < 0 or self.d_r < 0:
            raise ValueError("effective lengths must be non-negative")
        if self.constants is not None:
            dmin = self.constants.delta_L_min
            if min(self.d_l, self.d_r) < dmin * (1 - 1e-12):
                raise UnreachableLengthError(
                    f"effective lengths ({self.d_l:.6g}, {self.d_r:.6g}) below minimum {dmin:.6g} m"
                )


@dataclass(frozen=True, eq=False)
class ModeBasis:
    L_cav: float
    d_l: float
    d_r: float
    k: np.ndarray
    delta: np.ndarray = field(repr=False)
    norm: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.k.size

    def frequencies(self, c: float) -> np.ndarray:
        return c * self.k

    def profiles(self, x) -> np.ndarray:
        """Spatial mode shapes ``N_n sin(k_n x + delta_n)``, shape (n_modes, len(x))."""
        x = np.asarray(x, dtype=float)
        return self.norm[:, None] * np.sin(np.outer(self.k, x) + self.delta[:, None])


def _solve_k(L_cav, d_l, d_r, n_modes: int):
    """Wavenumbers for arrays of (d_l, d_r); returns shape (..., n_modes).

    Solves the monotone form ``k L + atan(d_l k) + atan(d_r k) = n pi``,
    equivalent to ``tan(k L) = -k (d_l + d_r) / (1 - d_l d_r k^2)`` on the
    n-th branch. The left side is increasing and concave in k, so Newton
    iteration started from a lower bound converges monotonically.
    """
    d_l = np.asarray(d_l, dtype=float)[..., None]
    d_r = np.asarray(d_r, dtype=float)[..., None]
    n = np.arange(1, n_modes + 1, dtype=float)
    target = n * np.pi
    k = np.maximum(target / (L_cav + d_l + d_r), (n - 1) * np.pi / L_cav)
    for _ in range(100):
        g = k * L_cav + np.arctan(d_l * k) + np.arctan(d_r * k) - target
        dg = L_cav + d_l / (1 + (d_l * k) ** 2) + d_r / (1 + (d_r * k) ** 2)
        step = g / dg
        k = k - step
        if np.all(np.abs(step) <= 2e-15 * k):
            break
    else:
        if np.all(np.abs(step) <= 1e-12 * k):
            return k
        raise RootFindingError(
            f"wavenumber iteration stalled, max step {np.max(np.abs(step)):.3e}, "
            f"bracket [(n-1)pi/L, n pi/L] with L = {L_cav:.6g}"
        )
    return k


def cleared_residual(L_cav: float, d_l: float, d_r: float, k) -> np.ndarray:
    """Scaled residual of ``sin(kL)(1 - d_l d_r k^2) + k(d_l + d_r) cos(kL)``."""
    k = np.asarray(k, dtype=float)
    f = np.sin(k * L_cav) * (1 - d_l * d_r * k * k) + k * (d_l + d_r) * np.cos(k * L_cav)
    scale = np.abs(1 - d_l * d_r * k * k) + k * (d_l + d_r)
    return np.abs(f) / scale


def _phases_norms(L_cav, d_l, d_r, k):
    delta = np.arctan(np.asarray(d_l, dtype=float)[..., None] * k)
    norm = 1.0 / np.sqrt(k * L_cav + 0.5 * (np.sin(2 * delta) - np.sin(2 * (k * L_cav + delta))))
    return delta, norm


def mode_basis(L_cav: float, d_l: float, d_r: float, n_modes: int) -> ModeBasis:
    if L_cav <= 0 or d_l < 0 or d_r < 0:
        raise ValueError("need L_cav > 0 and non-negative effective lengths")
    k = _solve_k(L_cav, d_l, d_r, n_modes)
    delta, norm = _phases_norms(L_cav, d_l, d_r, k)
    return ModeBasis(L_cav, float(d_l), float(d_r), k, delta, norm)


def solve_wavenumbers(config: RobinCavityConfig, n_modes: int) -> ModeBasis:
    """Lowest ``n_modes`` Robin modes of a static cavity."""
    return mode_basis(config.L_cav, config.d_l, config.d_r, n_modes)


def _overlap_matrices(kn, dn, Nn, km, dm, Nm, L):
    """alpha, beta between new modes (rows, primed) and old modes (columns)."""
    kp = km[:, None]
    k = kn[None, :]
    A = dm[:, None] - dn[None, :]
    B = dm[:, None] + dn[None, :]
    eps = kp - k
    sig = kp + k
    # int_0^L cos(eps x + A) dx = L cos(A + eps L/2) sinc(eps L/2), stable as eps -> 0
    c_minus = L * np.cos(A + eps * L / 2) * np.sinc(eps * L / (2 * np.pi))
    c_plus = L * np.cos(B + sig * L / 2) * np.sinc(sig * L / (2 * np.pi))
    overlap = 0.5 * Nm[:, None] * Nn[None, :] * (c_minus - c_plus)
    return sig * overlap, (k - kp) * overlap


def instantaneous_bogoliubov(old: ModeBasis, new: ModeBasis) -> BogoliubovTransform:
    """Sudden change of boundary conditions from ``old`` to ``new``.

    ``alpha_mn = (u'_m, u_n)`` and ``beta_mn = -(u'_m, u_n^*)``.
    """
    if old.L_cav != new.L_cav:
        raise ValueError("bases must share the same physical length")
    if old.n_modes != new.n_modes:
        raise ValueError("bases must have the same number of modes")
    a, b = _overlap_matrices(old.k, old.delta, old.norm, new.k, new.delta, new.norm, old.L_cav)
    return BogoliubovTransform(a.astype(complex), b.astype(complex))


@dataclass(frozen=True, eq=False)
class RobinEvolution:
    """Result of :func:`evolve_robin`."""

    transform: BogoliubovTransform
    initial_basis: ModeBasis
    final_basis: ModeBasis
    n_steps: int
    convergence: float | None = None  # |phase(dt) - phase(dt/2)| in rad


def default_dt(duration: float, w1: float) -> float:
    """(1/200) of the shorter of the clock period and the drive duration."""
    return min(2 * math.pi / w1, duration) / 200


def _evolve(L_cav, d_l, d_r, duration, n_steps, n_work, c):
    dt = duration / n_steps
    t_mid = (np.arange(n_steps) + 0.5) * dt
    dl_all = np.concatenate([[d_l(0.0)], np.asarray(d_l(t_mid), float), [d_l(duration)]])
    dr_all = np.concatenate([[d_r(0.0)], np.asarray(d_r(t_mid), float), [d_r(duration)]])
    k_all = _solve_k(L_cav, dl_all, dr_all, n_work)
    delta_all, norm_all = _phases_norms(L_cav, dl_all, dr_all, k_all)

    alpha = np.eye(n_work, dtype=complex)
    beta = np.zeros((n_work, n_work), dtype=complex)
    for j in range(n_steps + 1):
        a, b = _overlap_matrices(
            k_all[j], delta_all[j], norm_all[j], k_all[j + 1], delta_all[j + 1], norm_all[j + 1], L_cav
        )
        alpha, beta = a @ alpha + b @ beta.conj(), a @ beta + b @ alpha.conj()
        if j < n_steps:
            phase = np.exp(1j * c * k_all[j + 1] * dt)[:, None]
            alpha = phase * alpha
            beta = phase * beta

    def basis(i):
        return ModeBasis(L_cav, float(dl_all[i]), float(dr_all[i]), k_all[i], delta_all[i], norm_all[i])

    return BogoliubovTransform(alpha, beta), basis(0), basis(-1)


def evolve_robin(
    L_cav: float,
    d_l,
    d_r,
    duration: float,
    n_modes: int = 20,
    dt: float | None = None,
    c: float = PhysicalConstants().c,
    n_work: int | None = None,
    tol: float | None = None,
    check_convergence: bool = True,
    min_length: float = 0.0,
) -> RobinEvolution:
    """Compose sudden boundary updates and free evolution over ``[0, duration]``.

    ``d_l`` and ``d_r`` are vectorised callables of time (s) returning
    effective lengths (m). The boundary is held at its midpoint value over
    each step of length ``dt``. With ``check_convergence`` the evolution is
    repeated at ``dt/2`` and the change in the clock phase is reported;
    if ``tol`` is given and exceeded, :class:`StepConvergenceError` is raised.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    n_work = n_work or 2 * n_modes
    probe = np.linspace(0.0, duration, 257)
    for name, fn in (("d_l", d_l), ("d_r", d_r)):
        values = np.asarray(fn(probe), float)
        if np.any(values < min_length * (1 - 1e-12)) or np.any(values < 0):
            raise UnreachableLengthError(f"{name}(t) drops below {min_length:.6g} m")
    w1 = c * mode_basis(L_cav, float(d_l(0.0)), float(d_r(0.0)), 1).k[0]
    if dt is None:
        dt = default_dt(duration, w1)
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = max(1, math.ceil(duration / dt - 1e-9))
    T, b0, b1 = _evolve(L_cav, d_l, d_r, duration, n_steps, n_work, c)
    estimate = None
    if check_convergence:
        T2, _, _ = _evolve(L_cav, d_l, d_r, duration, 2 * n_steps, n_work, c)
        z1 = T.alpha[0, 0] - T.beta[0, 0]
        z2 = T2.alpha[0, 0] - T2.beta[0, 0]
        estimate = abs(math.remainder(np.angle(z2) - np.angle(z1), 2 * math.pi))
        T = T2
        n_steps *= 2
        if tol is not None and estimate > tol:
            raise StepConvergenceError("clock phase not converged in dt", estimate)
    return RobinEvolution(T.truncate(n_modes), b0, b1, n_steps, estimate)


@dataclass(frozen=True)
class SquidDrive:
    """Effective-length schedule that makes the SQUIDs mimic a rigid round trip."""

    plan: TrajectoryPlan
    delta_L_min: float

    @property
    def delta_L_max(self) -> float:
        return self.delta_L_min + self.plan.d_cav

    @property
    def L_cav(self) -> float:
        return self.plan.L - self.delta_L_min - self.delta_L_max

    def d_l(self, t):
        dl, _ = mirror_displacements(self.plan, t)
        # the mirror excursion can exceed d_cav by rounding error
        return np.maximum(self.delta_L_max - dl, self.delta_L_min)

    def d_r(self, t):
        _, dr = mirror_displacements(self.plan, t)
        return np.maximum(self.delta_L_min + dr, self.delta_L_min)

    def fluxes(self, t, constants: PhysicalConstants):
        return flux_for_length(self.d_l(t), constants), flux_for_length(self.d_r(t), constants)


@dataclass(frozen=True, eq=False)
class RobinTrip:
    evolution: RobinEvolution
    phase: PhaseRecord
    drive: SquidDrive

    @property
    def transform(self) -> BogoliubovTransform:
        return self.evolution.transform


def simulate_trip_robin(
    plan: TrajectoryPlan,
    constants: PhysicalConstants | None = None,
    dt: float | None = None,
    n_modes: int = 20,
    n_work: int | None = None,
    tol: float | None = None,
) -> RobinTrip:
    """Robin-cavity simulation of the rigid round trip described by ``plan``.

    The left SQUID starts at ``delta_L_max = delta_L_min + d_cav`` and the
    right one at ``delta_L_min``; both then follow the mirror displacements.
    The clock phase is referenced to a static Dirichlet cavity of proper
    length ``plan.L``.
    """
    if constants is None:
        constants = PhysicalConstants(c=plan.c)
    if not math.isclose(constants.c, plan.c, rel_tol=1e-12):
        raise ValueError("plan and constants disagree on the wave speed")
    drive = SquidDrive(plan, constants.delta_L_min)
    if drive.L_cav <= 0:
        raise ValueError(
            f"proper length {plan.L:.6g} m too short for SQUID lengths "
            f"{drive.delta_L_min:.3g} + {drive.delta_L_max:.3g} m"
        )
    if drive.delta_L_max / drive.L_cav > 0.1:
        warnings.warn(
            f"delta_L_max / L_cav = {drive.delta_L_max / drive.L_cav:.3f}; "
            "the SQUID no longer behaves like a displaced mirror",
            stacklevel=2,
        )
    evo = evolve_robin(
        drive.L_cav,
        drive.d_l,
        drive.d_r,
        plan.duration,
        n_modes=n_modes,
        dt=dt,
        c=plan.c,
        n_work=n_work,
        tol=tol,
        min_length=constants.delta_L_min,
    )
    w_ref = math.pi * plan.c / plan.L
    phase = PhaseRecord.from_transform(evo.transform, w_ref, plan.duration)
    return RobinTrip(evo, phase, drive)


def static_offset_phase(drive: SquidDrive, c: float, elapsed: float) -> float:
    """Relative phase a motionless Robin cavity picks up against the Dirichlet reference."""
    k1 = mode_basis(drive.L_cav, drive.delta_L_max, drive.delta_L_min, 1).k[0]
    return (math.pi / drive.plan.L - k1) * c * elapsed


def static_frequency_ratio(L: float, d_cav: float, delta_L_min: float) -> float:
    """Clock-mode frequency of the parked SQUID cavity over that of a Dirichlet cavity of length L.

    The Robin cavity has physical length ``L - 2 delta_L_min - d_cav`` with
    SQUID lengths ``delta_L_min + d_cav`` (left) and ``delta_L_min`` (right).
    """
    L_cav = L - 2 * delta_L_min - d_cav
    if L_cav <= 0:
        raise ValueError("SQUID lengths exceed the proper length")
    k1 = mode_basis(L_cav, delta_L_min + d_cav, delta_L_min, 1).k[0]
    return k1 * L / math.pi


def extrapolated_trip_phase(
    plan: TrajectoryPlan,
    constants: PhysicalConstants | None = None,
    n_modes: int = 20,
    n_work: int = 160,
    dt: float | None = None,
):
    """Robin clock phase extrapolated in the working basis size.

    The truncation error of the relative phase falls off roughly as
    ``1/n_work`` (the boundary motion couples the clock mode to a slowly
    decaying tail of high modes), so ``2 R(2n) - R(n)`` removes the leading
    term. Returns ``(extrapolated, R(n), R(2n))`` in radians.
    """
    coarse = simulate_trip_robin(plan, constants, dt=dt, n_modes=n_modes, n_work=n_work)
    fine = simulate_trip_robin(plan, constants, dt=dt, n_modes=n_modes, n_work=2 * n_work)
    r1, r2 = coarse.phase.theta_rel, fine.phase.theta_rel
    return 2 * r2 - r1, r1, r2
