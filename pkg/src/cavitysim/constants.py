"""Physical constants and default circuit parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

#: Magnetic flux quantum h / 2e (Wb), CODATA 2018 exact value.
FLUX_QUANTUM = 2.067833848e-15

#: Default wave speed in the coplanar waveguide (m/s). Chosen so that the
#: particle-creation resonance length 2 c t_a equals 2.38 cm at t_a = 0.1 ns.
DEFAULT_C = 1.19e8

DEFAULT_L0 = 0.44e-6  # H/m
DEFAULT_IC = 0.5e-6  # A


@dataclass(frozen=True)
class PhysicalConstants:
    """Wave speed, flux quantum and SQUID/waveguide parameters.

    Only ``c`` enters the Dirichlet side; ``Phi0``, ``L0`` and ``Ic`` fix the
    SQUID effective length.
    """

    c: float = DEFAULT_C
    Phi0: float = FLUX_QUANTUM
    L0: float = DEFAULT_L0
    Ic: float = DEFAULT_IC

    def __post_init__(self):
        for name in ("c", "Phi0", "L0", "Ic"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def delta_L_min(self) -> float:
        """Effective length of an unbiased SQUID, Phi0 / (4 pi L0 Ic)."""
        return self.Phi0 / (2 * math.pi) / (2 * self.L0 * self.Ic)

    def with_delta_L_min(self, delta_L_min: float) -> "PhysicalConstants":
        """Return a copy whose critical current yields the requested minimum length."""
        if delta_L_min <= 0:
            raise ValueError("delta_L_min must be positive")
        Ic = self.Phi0 / (4 * math.pi * self.L0 * delta_L_min)
        return replace(self, Ic=Ic)
