"""Rigid-cavity round trips built from four hyperbolic segments.

The centre of the cavity accelerates with proper acceleration ``a`` for a
lab time ``t_a``, decelerates for ``2 t_a`` (turning round at ``2 t_a``) and
accelerates again for ``t_a`` to come to rest at its starting point. The two
mirrors follow the hyperbolae that keep the proper length ``L`` fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import DEFAULT_C

_SMALL_H = 1e-6


class RigidityError(ValueError):
    """h = aL/c^2 must lie in (0, 2) for a rigid cavity."""


@dataclass(frozen=True)
class TrajectoryPlan:
    a: float
    t_a: float
    L: float
    c: float = DEFAULT_C

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"acceleration must be non-negative, got {self.a}")
        if self.t_a <= 0 or self.L <= 0 or self.c <= 0:
            raise ValueError("t_a, L and c must be positive")
        if self.h >= 2:
            raise RigidityError(f"h = aL/c^2 = {self.h:.4g} >= 2, cavity cannot stay rigid")

    @classmethod
    def from_h(cls, h: float, t_a: float, L: float, c: float = DEFAULT_C) -> "TrajectoryPlan":
        return cls(a=h * c * c / L, t_a=t_a, L=L, c=c)

    @property
    def h(self) -> float:
        return self.a * self.L / self.c**2

    @property
    def g_plus(self) -> float:
        return 1 + self.h / 2

    @property
    def g_minus(self) -> float:
        return 1 - self.h / 2

    @property
    def duration(self) -> float:
        return 4 * self.t_a

    @property
    def rapidity(self) -> float:
        """a t_a / c, the sinh of the rapidity reached at the end of segment 1."""
        return self.a * self.t_a / self.c

    @property
    def d_cav(self) -> float:
        """Maximum displacement 2 sqrt(c^2 t_a^2 + c^4/a^2) - 2c^2/a."""
        if self.a == 0:
            return 0.0
        x = self.rapidity
        # 2 (c^2/a)(sqrt(1 + x^2) - 1), written without cancellation
        return 2 * (self.c**2 / self.a) * x * x / (math.sqrt(1 + x * x) + 1)

    @property
    def stationary(self) -> bool:
        return self.a == 0


def _check_time(plan: TrajectoryPlan, t):
    t = np.asarray(t, dtype=float)
    tol = 1e-12 * plan.duration
    if np.any(t < -tol) or np.any(t > plan.duration + tol):
        raise ValueError(f"time outside [0, {plan.duration:.6g}] s")
    return np.clip(t, 0.0, plan.duration)


def _excursion(plan: TrajectoryPlan, t, g_start: float, g_turn: float):
    """Displacement x(t) - x(0) of the hyperbolic worldline with scale factors g.

    ``g_start`` scales the hyperbolae of the outer (first and last) segments,
    ``g_turn`` the turning hyperbola. The segment switch times are
    ``g_start t_a`` and ``(2 + g_turn) t_a``.
    """
    c, a, t_a = plan.c, plan.a, plan.t_a
    R = c * c / a  # radius of the centre hyperbola
    S = math.hypot(c * t_a, R)
    t1 = g_start * t_a
    t3 = (2 + g_turn) * t_a
    x0 = g_start * R

    # sqrt(c^2 t^2 + (gR)^2) - gR = c^2 t^2 / (sqrt(...) + gR) keeps precision for small a.
    def rise(dt, g):
        q = np.hypot(c * dt, g * R)
        return (c * dt) ** 2 / (q + g * R)

    out = np.empty_like(t)
    seg1 = t <= t1
    seg3 = t >= t3
    seg2 = ~(seg1 | seg3)
    out[seg1] = rise(t[seg1], g_start)
    out[seg3] = rise(t[seg3] - 4 * t_a, g_start)
    # 2S - sqrt(c^2 (t - 2t_a)^2 + (g_turn R)^2) - g_start R
    # = (2S - 2R) + (g_turn R - sqrt(...)) + (2 - g_start - g_turn) R
    d_cav = 2 * (c * t_a) ** 2 / (S + R)
    out[seg2] = d_cav - rise(t[seg2] - 2 * t_a, g_turn) + (2 - g_start - g_turn) * R
    return out, x0


def center_position(plan: TrajectoryPlan, t):
    """Lab-frame position of the cavity centre (origin at the Rindler horizon)."""
    t_arr = _check_time(plan, t)
    if plan.stationary:
        raise ValueError("centre position is referenced to the horizon; undefined for a = 0")
    dx, x0 = _excursion(plan, np.atleast_1d(t_arr), 1.0, 1.0)
    out = x0 + dx
    return out if np.ndim(t) else float(out[0])


def center_displacement(plan: TrajectoryPlan, t):
    """x(t) - x(0) for the centre; well defined for a = 0."""
    t_arr = np.atleast_1d(_check_time(plan, t))
    if plan.stationary:
        out = np.zeros_like(t_arr)
    else:
        out, _ = _excursion(plan, t_arr, 1.0, 1.0)
    return out if np.ndim(t) else float(out[0])


def mirror_displacements(plan: TrajectoryPlan, t):
    """``(x_l(t) - x_l(0), x_r(t) - x_r(0))`` for the two mirrors."""
    t_arr = np.atleast_1d(_check_time(plan, t))
    if plan.stationary:
        z = np.zeros_like(t_arr)
        dl, dr = z, z.copy()
    else:
        dl, _ = _excursion(plan, t_arr, plan.g_minus, plan.g_plus)
        dr, _ = _excursion(plan, t_arr, plan.g_plus, plan.g_minus)
    if np.ndim(t):
        return dl, dr
    return float(dl[0]), float(dr[0])


def mirror_positions(plan: TrajectoryPlan, t):
    """Lab-frame positions ``(x_l(t), x_r(t))`` of the rear and front mirrors."""
    if plan.stationary:
        raise ValueError("mirror positions are referenced to the horizon; undefined for a = 0")
    R = plan.c**2 / plan.a
    dl, dr = mirror_displacements(plan, t)
    if np.ndim(t):
        return plan.g_minus * R + dl, plan.g_plus * R + dr
    return plan.g_minus * R + dl, plan.g_plus * R + dr


def rindler_segment_duration(plan: TrajectoryPlan, segment_lab_time: float) -> float:
    """Rindler time (c/a) asinh(a t / c) elapsed on the centre worldline."""
    if segment_lab_time <= 0:
        raise ValueError("segment_lab_time must be positive")
    if plan.stationary:
        return segment_lab_time
    x = plan.a * segment_lab_time / plan.c
    return segment_lab_time * math.asinh(x) / x


def proper_time_round_trip(plan: TrajectoryPlan) -> float:
    """Proper time of the cavity centre over the full round trip."""
    return 4 * rindler_segment_duration(plan, plan.t_a)


def rindler_length_ratio(h: float) -> float:
    """L'/L = artanh(h/2)/(h/2)."""
    if not 0 <= h < 2:
        raise RigidityError(f"h must lie in [0, 2), got {h}")
    x = h / 2
    if h < _SMALL_H:
        return 1 + x * x / 3 + x**4 / 5
    return math.atanh(x) / x


def rindler_length(plan: TrajectoryPlan) -> float:
    return plan.L * rindler_length_ratio(plan.h)
