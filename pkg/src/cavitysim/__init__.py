"""Moving Dirichlet cavities and their SQUID (Robin) circuit analogue.

The Dirichlet side builds exact Bogoliubov transforms of rigidly moving
cavities from Rindler mode overlaps; the Robin side evolves the modes of a
waveguide terminated by flux-tuned SQUIDs. Both report the clock-mode phase
relative to a static cavity.
"""

from .bogoliubov import (
    BogoliubovError,
    BogoliubovTransform,
    PhaseRecord,
    UndefinedPhaseError,
    check_identities,
    clock_phase,
    compose,
    free_evolution,
    inverse,
    power,
    relative_clock_phase,
    strip_particle_creation,
    symplectic_defect,
    unitarity_defect,
)
from .constants import DEFAULT_C, FLUX_QUANTUM, PhysicalConstants
from .fdtd import fdtd_oracle
from .fourier import FourierFlux, fit_flux, harmonic_budget
from .rindler import ideal_clock_phase, single_mode_phase, trip_phase, trip_transform
from .robin import (
    RobinCavityConfig,
    delta_L_eff,
    evolve_robin,
    flux_for_length,
    instantaneous_bogoliubov,
    simulate_trip_robin,
    solve_wavenumbers,
    static_frequency_ratio,
)
from .scenarios import Scenario, ScenarioResult, repeat_trips, reproduce_figure, resonance_scan, run
from .trajectories import RigidityError, TrajectoryPlan

__all__ = [
    "BogoliubovError",
    "BogoliubovTransform",
    "PhaseRecord",
    "UndefinedPhaseError",
    "check_identities",
    "clock_phase",
    "compose",
    "free_evolution",
    "inverse",
    "power",
    "relative_clock_phase",
    "strip_particle_creation",
    "symplectic_defect",
    "unitarity_defect",
    "DEFAULT_C",
    "FLUX_QUANTUM",
    "PhysicalConstants",
    "fdtd_oracle",
    "FourierFlux",
    "fit_flux",
    "harmonic_budget",
    "ideal_clock_phase",
    "single_mode_phase",
    "trip_phase",
    "trip_transform",
    "RobinCavityConfig",
    "delta_L_eff",
    "evolve_robin",
    "flux_for_length",
    "instantaneous_bogoliubov",
    "simulate_trip_robin",
    "solve_wavenumbers",
    "static_frequency_ratio",
    "Scenario",
    "ScenarioResult",
    "repeat_trips",
    "reproduce_figure",
    "resonance_scan",
    "run",
    "RigidityError",
    "TrajectoryPlan",
]
