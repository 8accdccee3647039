"""Band-limited flux drives: truncated Fourier fits to the ideal SQUID flux.

A drive of period ``T = 4 t_a`` is written as

    Phi(t) = Phi_0 + sum_n a_n cos(2 pi n t / T + delta_n),  n = 1..N,

and fitted so that the effective length ``delta_L_eff(Phi(t))`` follows the
ideal one in the least-squares sense on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from .bogoliubov import PhaseRecord
from .constants import PhysicalConstants
from .robin import SquidDrive, delta_L_eff, evolve_robin, flux_for_length
from .trajectories import TrajectoryPlan

DEFAULT_SAMPLES = 2048
SAMPLES_PER_HARMONIC = 64
# keep |Phi| away from the divergence at Phi0/2 while the optimiser explores
_FLUX_CAP = 0.4999


class ConstrainedFitError(RuntimeError):
    """The fitted flux reaches the delta_L_eff divergence at |Phi| = Phi0/2."""


@dataclass(frozen=True, eq=False)
class FourierFlux:
    offset: float
    amplitudes: np.ndarray
    phases: np.ndarray
    period: float

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float)
        phases = np.array(self.phases, dtype=float)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("need at least one harmonic")
        if phases.shape != amps.shape:
            raise ValueError("amplitudes and phases must have the same length")
        if self.period <= 0:
            raise ValueError("period must be positive")
        amps.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phases", phases)

    @property
    def n_harmonics(self) -> int:
        return self.amplitudes.size

    @classmethod
    def from_coefficients(cls, coeffs, period: float) -> "FourierFlux":
        """Build from ``[c0, cos_1..cos_N, sin_1..sin_N]`` coefficients."""
        coeffs = np.asarray(coeffs, dtype=float)
        n = (coeffs.size - 1) // 2
        cos, sin = coeffs[1 : n + 1], coeffs[n + 1 :]
        # a cos(wt + d) = a cos(d) cos(wt) - a sin(d) sin(wt)
        return cls(float(coeffs[0]), np.hypot(cos, sin), np.arctan2(-sin, cos), period)

    def coefficients(self) -> np.ndarray:
        return np.concatenate(
            [[self.offset], self.amplitudes * np.cos(self.phases), -self.amplitudes * np.sin(self.phases)]
        )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = np.arange(1, self.n_harmonics + 1)
        arg = 2 * np.pi * np.multiply.outer(t, n) / self.period + self.phases
        return self.offset + np.cos(arg) @ self.amplitudes

    def lengths(self, t, constants: PhysicalConstants):
        return delta_L_eff(self(t), constants)


@dataclass(frozen=True, eq=False)
class FluxFit:
    flux: FourierFlux
    residual: float  # RMS of delta_L_eff mismatch over the grid (m)
    initial_residual: float
    n_samples: int
    converged: bool = field(default=True)


def harmonic_budget(t_a: float, n_harmonics: int) -> float:
    """Highest drive frequency (Hz) of an N-harmonic waveform with period 4 t_a."""
    if t_a <= 0:
        raise ValueError("t_a must be positive")
    return n_harmonics / (4 * t_a)


def sample_times(period: float, n_samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    return np.arange(n_samples) * (period / n_samples)


def _design(t, period, n_harmonics):
    w = 2 * np.pi * np.multiply.outer(t, np.arange(1, n_harmonics + 1)) / period
    return np.hstack([np.ones((t.size, 1)), np.cos(w), np.sin(w)])


def _pad(coeffs, n_harmonics):
    """Embed lower-order coefficients into an N-harmonic vector."""
    n_old = (coeffs.size - 1) // 2
    out = np.zeros(2 * n_harmonics + 1)
    out[0] = coeffs[0]
    out[1 : n_old + 1] = coeffs[1 : n_old + 1]
    out[n_harmonics + 1 : n_harmonics + 1 + n_old] = coeffs[n_old + 1 :]
    return out


def fit_flux(
    target_flux,
    n_harmonics: int,
    period: float,
    constants: PhysicalConstants = PhysicalConstants(),
    warm_start: FourierFlux | None = None,
) -> FluxFit:
    """Fit an ``n_harmonics`` Fourier drive to flux samples on a uniform grid over one period.

    Starts from a linear least-squares fit of the flux itself, then refines
    with Levenberg-Marquardt on the effective-length residual. The fitted
    flux may turn negative: ``delta_L_eff`` is even, and crossing zero lets
    a smooth waveform follow the cusp of the ideal flux at its minimum.
    ``warm_start`` (a fit with fewer harmonics) is tried as a second
    starting point, which makes nested fits non-increasing in residual.
    """
    phi = np.asarray(target_flux, dtype=float)
    if n_harmonics < 1:
        raise ValueError("need at least one harmonic")
    if phi.ndim != 1 or phi.size < SAMPLES_PER_HARMONIC * n_harmonics:
        raise ValueError(
            f"need at least {SAMPLES_PER_HARMONIC * n_harmonics} samples for {n_harmonics} harmonics"
        )
    half = constants.Phi0 / 2
    if np.any(phi < 0) or np.any(phi >= half):
        raise ValueError("target flux must lie in [0, Phi0/2)")

    t = sample_times(period, phi.size)
    X = _design(t, period, n_harmonics)
    target = delta_L_eff(phi, constants)
    scale = constants.delta_L_min
    cap = _FLUX_CAP * constants.Phi0

    def residual(p):
        return (delta_L_eff(np.clip(X @ p, -cap, cap), constants) - target) / scale

    starts = [np.linalg.lstsq(X, phi, rcond=None)[0]]
    if warm_start is not None:
        if warm_start.n_harmonics > n_harmonics:
            raise ValueError("warm start has more harmonics than the fit")
        starts.append(_pad(warm_start.coefficients(), n_harmonics))

    best = None
    for p0 in starts:
        sol = least_squares(residual, p0, method="lm", x_scale="jac", xtol=1e-12, ftol=1e-12)
        if best is None or sol.cost < best[0].cost:
            best = (sol, p0)
    sol, p0 = best
    fitted = X @ sol.x
    if np.any(np.abs(fitted) >= cap):
        raise ConstrainedFitError(
            f"fitted flux reaches {np.max(np.abs(fitted)) / constants.Phi0:.4f} Phi0; "
            "effective length diverges"
        )
    rms = lambda r: float(np.sqrt(np.mean(r * r)) * scale)
    return FluxFit(
        FourierFlux.from_coefficients(sol.x, period),
        residual=rms(sol.fun),
        initial_residual=rms(residual(starts[0])),
        n_samples=phi.size,
        converged=bool(sol.success),
    )


def fit_flux_family(target_flux, harmonics, period, constants=PhysicalConstants()):
    """Nested fits for increasing harmonic counts, each warm-started from the previous one."""
    fits = {}
    prev = None
    for n in sorted(harmonics):
        fit = fit_flux(target_flux, n, period, constants, warm_start=prev)
        fits[n] = fit
        prev = fit.flux
    return fits


@dataclass(frozen=True, eq=False)
class FourierDrive:
    """Fitted drives for both SQUIDs of a rigid trip."""

    drive: SquidDrive
    left: FluxFit
    right: FluxFit
    constants: PhysicalConstants

    @property
    def n_harmonics(self) -> int:
        return self.left.flux.n_harmonics

    def d_l(self, t):
        return self.left.flux.lengths(t, self.constants)

    def d_r(self, t):
        return self.right.flux.lengths(t, self.constants)


def ideal_fluxes(drive: SquidDrive, constants: PhysicalConstants, n_samples: int = DEFAULT_SAMPLES):
    """Flux samples of the exact drive for both SQUIDs on the standard grid."""
    t = sample_times(drive.plan.duration, n_samples)
    return flux_for_length(drive.d_l(t), constants), flux_for_length(drive.d_r(t), constants)


def fit_drive(
    plan: TrajectoryPlan,
    n_harmonics: int,
    constants: PhysicalConstants,
    n_samples: int = DEFAULT_SAMPLES,
) -> FourierDrive:
    drive = SquidDrive(plan, constants.delta_L_min)
    phi_l, phi_r = ideal_fluxes(drive, constants, n_samples)
    left = fit_flux(phi_l, n_harmonics, plan.duration, constants)
    right = fit_flux(phi_r, n_harmonics, plan.duration, constants)
    return FourierDrive(drive, left, right, constants)


def fit_drive_family(plan, harmonics, constants, n_samples: int = DEFAULT_SAMPLES):
    drive = SquidDrive(plan, constants.delta_L_min)
    phi_l, phi_r = ideal_fluxes(drive, constants, n_samples)
    lefts = fit_flux_family(phi_l, harmonics, plan.duration, constants)
    rights = fit_flux_family(phi_r, harmonics, plan.duration, constants)
    return {n: FourierDrive(drive, lefts[n], rights[n], constants) for n in sorted(harmonics)}


def simulate_trip_fourier(
    fdrive: FourierDrive,
    n_modes: int = 20,
    dt: float | None = None,
    n_work: int | None = None,
) -> PhaseRecord:
    """Robin clock phase when both SQUIDs follow their fitted Fourier drives."""
    plan = fdrive.drive.plan
    evo = evolve_robin(
        fdrive.drive.L_cav,
        fdrive.d_l,
        fdrive.d_r,
        plan.duration,
        n_modes=n_modes,
        dt=dt,
        c=plan.c,
        n_work=n_work,
        min_length=fdrive.constants.delta_L_min,
    )
    return PhaseRecord.from_transform(evo.transform, math.pi * plan.c / plan.L, plan.duration)


def write_waveform(path, fit: FluxFit, n_samples: int | None = None) -> Path:
    """Two-column time/flux table (s, Wb) with the period, harmonic count and residual in the header."""
    path = Path(path)
    flux = fit.flux
    n = n_samples or fit.n_samples
    t = sample_times(flux.period, n)
    header = "\n".join(
        [
            f"T = {flux.period:.12g} s",
            f"N = {flux.n_harmonics}",
            f"residual = {fit.residual:.6e} m",
            "time_s flux_Wb",
        ]
    )
    np.savetxt(path, np.column_stack([t, flux(t)]), fmt="%.12e", header=header)
    return path
