"""Truncated Bogoliubov transformations and clock-phase extraction.

A transform ``(alpha, beta)`` maps an input set of annihilation operators
``a`` to an output set ``b`` through

    b_m = sum_n (conj(alpha_mn) a_n - conj(beta_mn) a_n^dagger),

so that ``alpha_mn = (v_m, u_n)`` and ``beta_mn = -(v_m, u_n^*)`` for output
modes ``v`` and input modes ``u``. All matrices are dense and complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class BogoliubovError(ValueError):
    """A transform violates the Bogoliubov identities beyond tolerance."""

    def __init__(self, message: str, defect: float):
        super().__init__(f"{message} (defect {defect:.3e})")
        self.defect = defect


class UndefinedPhaseError(ArithmeticError):
    """The clock-mode amplitude alpha_11 - beta_11 vanishes."""


def default_tolerance(n_modes: int) -> float:
    return 1e-8 * n_modes


@dataclass(frozen=True, eq=False)
class BogoliubovTransform:
    alpha: np.ndarray
    beta: np.ndarray
    physical: bool = field(default=True)

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=complex)
        beta = np.array(self.beta, dtype=complex)
        if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
            raise ValueError(f"alpha must be square, got shape {alpha.shape}")
        if beta.shape != alpha.shape:
            raise ValueError(f"beta shape {beta.shape} does not match alpha {alpha.shape}")
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n_modes(self) -> int:
        return self.alpha.shape[0]

    @classmethod
    def identity(cls, n_modes: int) -> "BogoliubovTransform":
        return cls(np.eye(n_modes, dtype=complex), np.zeros((n_modes, n_modes), dtype=complex))

    def truncate(self, n_modes: int) -> "BogoliubovTransform":
        """Keep the leading ``n_modes`` block."""
        if n_modes > self.n_modes:
            raise ValueError(f"cannot truncate {self.n_modes} modes to {n_modes}")
        return BogoliubovTransform(
            self.alpha[:n_modes, :n_modes], self.beta[:n_modes, :n_modes], self.physical
        )

    def __matmul__(self, other: "BogoliubovTransform") -> "BogoliubovTransform":
        # Operator-style product: (S @ T) applies T first, then S.
        return compose(other, self, check=False)


def unitarity_defect(t: BogoliubovTransform, block: int | None = None) -> float:
    """Max-norm of ``alpha alpha^dagger - beta beta^dagger - I`` on the leading block.

    Truncation error in the identities is concentrated in the highest modes
    of a basis, so by default the check covers the leading half of the modes.
    """
    k = _block_size(t, block)
    a, b = t.alpha[:k], t.beta[:k]
    g = a @ a.conj().T - b @ b.conj().T - np.eye(k)
    return float(np.max(np.abs(g)))


def symplectic_defect(t: BogoliubovTransform, block: int | None = None) -> float:
    """Max-norm of ``alpha beta^T - beta alpha^T`` on the leading block."""
    k = _block_size(t, block)
    a, b = t.alpha[:k], t.beta[:k]
    g = a @ b.T - b @ a.T
    return float(np.max(np.abs(g)))


def _block_size(t: BogoliubovTransform, block: int | None) -> int:
    if block is None:
        return max(1, t.n_modes // 2)
    if not 1 <= block <= t.n_modes:
        raise ValueError(f"block must lie in [1, {t.n_modes}], got {block}")
    return block


def check_identities(t: BogoliubovTransform, tol: float | None = None, block: int | None = None):
    """Raise :class:`BogoliubovError` if either identity defect exceeds ``tol``."""
    if tol is None:
        tol = default_tolerance(t.n_modes)
    defect = max(unitarity_defect(t, block), symplectic_defect(t, block))
    if defect > tol:
        raise BogoliubovError("Bogoliubov identities violated", defect)
    return defect


def compose(
    first: BogoliubovTransform,
    second: BogoliubovTransform,
    check: bool = False,
    tol: float | None = None,
) -> BogoliubovTransform:
    """Transform equivalent to applying ``first`` and then ``second``.

    With ``second = (A, B)`` the result is ``(A alpha + B conj(beta),
    A beta + B conj(alpha))``.
    """
    if first.n_modes != second.n_modes:
        raise ValueError(f"mode count mismatch: {first.n_modes} vs {second.n_modes}")
    if check:
        check_identities(first, tol)
        check_identities(second, tol)
    A, B = second.alpha, second.beta
    alpha = A @ first.alpha + B @ first.beta.conj()
    beta = A @ first.beta + B @ first.alpha.conj()
    return BogoliubovTransform(alpha, beta, first.physical and second.physical)


def compose_all(transforms) -> BogoliubovTransform:
    """Compose a time-ordered sequence of transforms."""
    it = iter(transforms)
    try:
        total = next(it)
    except StopIteration:
        raise ValueError("need at least one transform") from None
    for t in it:
        total = compose(total, t)
    return total


def inverse(t: BogoliubovTransform, check: bool = True, tol: float | None = None) -> BogoliubovTransform:
    """Symplectic inverse ``(alpha^dagger, -beta^T)``.

    Exact for transforms satisfying the Bogoliubov identities; for truncated
    transforms the error is the identity defect.
    """
    if check:
        if tol is None:
            tol = max(1e-3, default_tolerance(t.n_modes))
        check_identities(t, tol)
    return BogoliubovTransform(t.alpha.conj().T, -t.beta.T, t.physical)


def free_evolution(frequencies, duration: float) -> BogoliubovTransform:
    """Free evolution over ``duration``: ``b_n = exp(-i w_n duration) a_n``."""
    w = np.asarray(frequencies, dtype=float)
    if np.any(w <= 0):
        raise ValueError("frequencies must be positive")
    phase = np.exp(1j * w * duration)
    n = w.size
    return BogoliubovTransform(np.diag(phase), np.zeros((n, n), dtype=complex))


def strip_particle_creation(t: BogoliubovTransform) -> BogoliubovTransform:
    """Drop the beta block. The result is flagged as non-physical."""
    if not np.any(t.beta):
        return t
    return BogoliubovTransform(t.alpha, np.zeros_like(t.beta), physical=False)


def power(t: BogoliubovTransform, count: int) -> BogoliubovTransform:
    """``count``-fold composition of ``t`` by repeated squaring."""
    if count < 0:
        raise ValueError("count must be non-negative")
    result = BogoliubovTransform.identity(t.n_modes)
    base = t
    while count:
        if count & 1:
            result = compose(result, base)
        count >>= 1
        if count:
            base = compose(base, base)
    return BogoliubovTransform(result.alpha, result.beta, t.physical)


def clock_amplitude(t: BogoliubovTransform) -> complex:
    return complex(t.alpha[0, 0] - t.beta[0, 0])


def clock_phase(t: BogoliubovTransform) -> float:
    """Phase shift of the first mode, ``atan2(-Im z, Re z)`` with ``z = alpha_11 - beta_11``.

    The result lies in (-pi, pi]; unwrapping across a sweep is left to the caller.
    """
    z = clock_amplitude(t)
    if z == 0:
        raise UndefinedPhaseError("alpha_11 - beta_11 = 0, clock phase undefined")
    return math.atan2(-z.imag, z.real)


def relative_clock_phase(t: BogoliubovTransform, reference_frequency: float, elapsed: float) -> float:
    """Clock phase measured against a static cavity of clock frequency ``reference_frequency``.

    The static phase ``-reference_frequency * elapsed`` is removed before the
    branch cut is applied, so the result is exact whenever its magnitude is
    below pi.
    """
    z = clock_amplitude(t)
    if z == 0:
        raise UndefinedPhaseError("alpha_11 - beta_11 = 0, clock phase undefined")
    z = z * np.exp(-1j * math.fmod(reference_frequency * elapsed, 2 * math.pi))
    return math.atan2(-z.imag, z.real)


@dataclass(frozen=True)
class PhaseRecord:
    """Clock phase of an evolution and its static-cavity reference (radians)."""

    theta_static: float
    theta_rel: float

    @property
    def theta_raw(self) -> float:
        return self.theta_static + self.theta_rel

    @classmethod
    def from_transform(cls, t: BogoliubovTransform, reference_frequency: float, elapsed: float):
        return cls(
            theta_static=-reference_frequency * elapsed,
            theta_rel=relative_clock_phase(t, reference_frequency, elapsed),
        )

    @property
    def theta_rel_deg(self) -> float:
        return math.degrees(self.theta_rel)
