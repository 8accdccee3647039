"""Scenario definitions, sweeps and figure runners.

Every scenario is a frozen parameter bundle; running it is deterministic and
produces a :class:`ScenarioResult` whose rows can be written as CSV. Angles
in results are in degrees, lengths in metres unless a column name says
otherwise.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import re
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .bogoliubov import (
    BogoliubovTransform,
    clock_amplitude,
    power,
    relative_clock_phase,
    strip_particle_creation,
)
from .constants import DEFAULT_C, PhysicalConstants
from .fourier import fit_drive_family, simulate_trip_fourier, write_waveform
from .rindler import (
    clock_frequency,
    ideal_clock_phase,
    single_mode_phase,
    trip_phase,
    trip_transform,
)
from .robin import RobinEvolution, RobinTrip, simulate_trip_robin
from .trajectories import TrajectoryPlan

KINDS = ("dirichlet-sweep", "robin-trip", "fourier-compare", "resonance-scan", "repeat-trips")
FIGURES = ("fig1", "fig4", "fig5", "fig6", "fig7", "fig8")

#: Relative errors are only formed where the Dirichlet phase exceeds this (rad).
EPSILON_FLOOR = 1e-6


class ConfigError(ValueError):
    pass


class BasisMismatchError(ValueError):
    """A trip transform whose start and end bases differ cannot be repeated."""


class ScenarioError(RuntimeError):
    pass


def _wrap(x: float) -> float:
    return math.remainder(x, 2 * math.pi)


@dataclass(frozen=True)
class Scenario:
    """Parameters of one computational experiment (SI units).

    ``h_values`` is the sweep axis of single-trip scenarios. Resonance scans
    run over ``L_range = (start, stop, step)`` with either ``h`` or ``a``
    held fixed. ``repeat-trips`` uses the single plan ``(h or a, t_a, L)``.
    """

    kind: str
    t_a: float
    L: float | None = None
    h_values: tuple = ()
    h: float | None = None
    a: float | None = None
    L_range: tuple | None = None
    delta_L_min: float = 0.0075e-3
    c: float = DEFAULT_C
    n_modes: int = 20
    n_work: int | None = None
    dt: float | None = None
    trips: int = 1
    strip_beta: bool = False
    harmonics: tuple = (2, 4, 6, 10)
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.t_a <= 0:
            raise ConfigError("t_a must be positive")
        if self.n_modes < 1 or self.trips < 1:
            raise ConfigError("n_modes and trips must be positive")
        object.__setattr__(self, "h_values", tuple(float(h) for h in self.h_values))
        object.__setattr__(self, "harmonics", tuple(int(n) for n in self.harmonics))
        if self.kind == "resonance-scan":
            if self.L_range is None or len(self.L_range) != 3:
                raise ConfigError("resonance-scan needs L_range = start, stop, step")
            if (self.h is None) == (self.a is None):
                raise ConfigError("resonance-scan needs exactly one of h or a")
            object.__setattr__(self, "L_range", tuple(float(v) for v in self.L_range))
        elif self.kind == "repeat-trips":
            if self.L is None or (self.h is None) == (self.a is None):
                raise ConfigError("repeat-trips needs L and exactly one of h or a")
        else:
            if self.L is None or not self.h_values:
                raise ConfigError(f"{self.kind} needs L and a non-empty h_values list")

    @property
    def constants(self) -> PhysicalConstants:
        return PhysicalConstants(c=self.c).with_delta_L_min(self.delta_L_min)

    def plan(self, h: float | None = None, L: float | None = None) -> TrajectoryPlan:
        L = self.L if L is None else L
        if h is None and self.a is not None:
            return TrajectoryPlan(self.a, self.t_a, L, self.c)
        return TrajectoryPlan.from_h(self.h if h is None else h, self.t_a, L, self.c)

    def scan_lengths(self) -> np.ndarray:
        start, stop, step = self.L_range
        if step <= 0 or stop < start:
            raise ConfigError("L_range must satisfy start <= stop and step > 0")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(count), 12)


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)
    # in-memory by-products (fitted drives etc.), not written to disk
    extras: dict = field(default_factory=dict, repr=False)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)

    def write_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_fmt(v) for v in row])
        return path

    def write_metadata(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.metadata, indent=2, sort_keys=True, default=_json_default) + "\n")
        return path


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else format(float(value), ".12g")
    return str(value)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def epsilon(theta_D: float, theta_R: float) -> float:
    """Relative Robin error ``(D - R)/D``; NaN where ``|D|`` is below the floor."""
    if abs(theta_D) <= EPSILON_FLOOR:
        return float("nan")
    return (theta_D - theta_R) / theta_D


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- repeated trips ---------------------------------------------------------


def repeat_trips(single, count: int, strip_beta: bool = False) -> BogoliubovTransform:
    """``count``-fold composition of a single-trip transform.

    ``single`` may be a :class:`BogoliubovTransform`, or a Robin evolution or
    trip, in which case its start and end bases must coincide.
    """
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise ValueError(f"trip count must be a positive integer, got {count!r}")
    if isinstance(single, RobinTrip):
        single = single.evolution
    if isinstance(single, RobinEvolution):
        k0, k1 = single.initial_basis.k, single.final_basis.k
        if k0.shape != k1.shape or not np.allclose(k0, k1, rtol=1e-9, atol=0):
            raise BasisMismatchError("trip does not return the boundaries to their initial values")
        single = single.transform
    if not isinstance(single, BogoliubovTransform):
        raise TypeError("expected a BogoliubovTransform, RobinEvolution or RobinTrip")
    if strip_beta:
        single = strip_particle_creation(single)
    return power(single, int(count))


def repeated_phase(single: BogoliubovTransform, plan: TrajectoryPlan, count: int, strip_beta=False) -> float:
    total = repeat_trips(single, count, strip_beta)
    return relative_clock_phase(total, clock_frequency(plan), count * plan.duration)


# -- single-trip sweeps -----------------------------------------------------


def _single_trip_row(scn: Scenario, h: float, with_robin: bool):
    plan = scn.plan(h=h)
    D = trip_phase(plan, scn.n_modes, scn.n_work).theta_rel
    row = {
        "h": h,
        "dtheta_D_deg": math.degrees(D),
        "dtheta_single_deg": math.degrees(single_mode_phase(plan)),
        "dtheta_ideal_deg": math.degrees(ideal_clock_phase(plan)),
    }
    diag = {}
    if with_robin:
        trip = simulate_trip_robin(plan, scn.constants, dt=scn.dt, n_modes=scn.n_modes, n_work=scn.n_work)
        R = trip.phase.theta_rel
        row["dtheta_R_deg"] = math.degrees(R)
        row["epsilon"] = epsilon(D, R)
        diag["dt_estimate_rad"] = trip.evolution.convergence
        diag["delta_L_max_over_L_cav"] = trip.drive.delta_L_max / trip.drive.L_cav
    return row, diag


def _run_sweep(scn: Scenario, workers: int) -> ScenarioResult:
    with_robin = scn.kind == "robin-trip"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = _map(lambda h: _single_trip_row(scn, h, with_robin), scn.h_values, workers)
    columns = tuple(out[0][0])
    rows = [tuple(r[c] for c in columns) for r, _ in out]
    meta = _base_metadata(scn)
    meta["sweep_axis"] = "h at fixed L and t_a"
    if with_robin:
        D = np.array([r["dtheta_D_deg"] for r, _ in out])
        i = int(np.argmax(np.abs(D)))
        meta["peak_h"] = scn.h_values[i]
        meta["epsilon_at_peak"] = out[i][0]["epsilon"]
        meta["max_dt_estimate_rad"] = max(d["dt_estimate_rad"] or 0.0 for _, d in out)
        meta["max_delta_L_max_over_L_cav"] = max(d["delta_L_max_over_L_cav"] for _, d in out)
    meta["warnings"] = sorted({str(w.message) for w in caught})
    return ScenarioResult(columns, rows, meta)


def _run_fourier(scn: Scenario, workers: int) -> ScenarioResult:
    const = scn.constants

    def point(h):
        plan = scn.plan(h=h)
        exact = simulate_trip_robin(plan, const, dt=scn.dt, n_modes=scn.n_modes, n_work=scn.n_work)
        fam = fit_drive_family(plan, scn.harmonics, const)
        approx = {
            n: simulate_trip_fourier(fd, scn.n_modes, scn.dt, scn.n_work).theta_rel for n, fd in fam.items()
        }
        D = trip_phase(plan, scn.n_modes, scn.n_work).theta_rel
        return D, exact.phase.theta_rel, approx, fam

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = _map(point, scn.h_values, workers)
    ns = sorted(scn.harmonics)
    columns = ("h", "dtheta_D_deg", "dtheta_R_deg") + tuple(f"dtheta_R_N{n}_deg" for n in ns)
    rows = [
        (h, math.degrees(D), math.degrees(R)) + tuple(math.degrees(ap[n]) for n in ns)
        for h, (D, R, ap, _) in zip(scn.h_values, out)
    ]
    R = np.array([o[1] for o in out])
    # the Robin curve turns over at large h; its peak is the signed maximum
    i = int(np.argmax(R))
    meta = _base_metadata(scn)
    meta["sweep_axis"] = "h at fixed L and t_a"
    meta["peak_h"] = scn.h_values[i]
    meta["relative_error_at_peak"] = {str(n): (out[i][2][n] - R[i]) / R[i] for n in ns}
    meta["fit_residual_m_at_peak"] = {
        str(n): [out[i][3][n].left.residual, out[i][3][n].right.residual] for n in ns
    }
    meta["warnings"] = sorted({str(w.message) for w in caught})
    return ScenarioResult(columns, rows, meta, extras={"peak_drives": out[i][3]})


# -- resonance scans --------------------------------------------------------


def resonance_lengths(t_a: float, c: float = DEFAULT_C) -> float:
    """Proper length 2 c t_a at which the drive is resonant with 2 omega_1."""
    return 2 * c * t_a


def _scan_point(scn: Scenario, L: float):
    plan = scn.plan(L=L)
    single = trip_transform(plan, scn.n_modes, scn.n_work)
    n = scn.trips
    full = repeat_trips(single, n)
    stripped = repeat_trips(single, n, strip_beta=True)
    w = clock_frequency(plan)
    theta_full = relative_clock_phase(full, w, n * plan.duration)
    theta_single = _wrap(n * single_mode_phase(plan))
    z_full, z_strip = clock_amplitude(full), clock_amplitude(stripped)
    # the phase of z enters with a minus sign, see clock_phase
    diff_beta = -math.atan2((z_full / z_strip).imag, (z_full / z_strip).real)
    return {
        "L_cm": L * 100,
        "h": plan.h,
        "dtheta_full_deg": math.degrees(theta_full),
        "dtheta_single_deg": math.degrees(theta_single),
        "nonadiabatic_deg": math.degrees(_wrap(theta_full - theta_single)),
        "beta_contribution_deg": math.degrees(diff_beta),
        "clock_amplitude": abs(z_full),
    }


def resonance_scan(scn: Scenario, workers: int = 1) -> ScenarioResult:
    """Phase differences after ``scn.trips`` trips across the proper-length grid.

    ``nonadiabatic_deg`` is full minus single-mode; ``beta_contribution_deg``
    is full minus the evolution with every beta block removed. The peak of
    each is the grid point of largest magnitude.
    """
    if scn.kind != "resonance-scan":
        raise ScenarioError("resonance_scan needs a resonance-scan scenario")
    lengths = scn.scan_lengths()
    out = _map(lambda L: _scan_point(scn, float(L)), lengths, workers)
    columns = tuple(out[0])
    rows = [tuple(r[c] for c in columns) for r in out]
    res = ScenarioResult(columns, rows, _base_metadata(scn))
    L_res = resonance_lengths(scn.t_a, scn.c)
    step = scn.L_range[2]
    meta = res.metadata
    meta["L_res_cm"] = L_res * 100
    meta["grid_step_cm"] = step * 100
    for name in ("nonadiabatic_deg", "beta_contribution_deg"):
        i = int(np.argmax(np.abs(res.column(name))))
        meta[f"peak_{name}_L_cm"] = float(lengths[i] * 100)
        meta[f"peak_{name}_value"] = float(res.column(name)[i])
    meta["min_clock_amplitude_L_cm"] = float(lengths[int(np.argmin(res.column("clock_amplitude")))] * 100)
    return res


def peak_offset_steps(result: ScenarioResult, name: str) -> float:
    """Distance of a scan peak from L_res in units of the grid step."""
    meta = result.metadata
    return abs(meta[f"peak_{name}_L_cm"] - meta["L_res_cm"]) / meta["grid_step_cm"]


def resonance_epsilon(plan: TrajectoryPlan, constants: PhysicalConstants, n_modes=20, n_work=None, dt=None):
    """Single-trip Robin error ``(D - R)/D`` for ``plan`` (used at L = L_res)."""
    D = trip_phase(plan, n_modes).theta_rel
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        R = simulate_trip_robin(plan, constants, dt=dt, n_modes=n_modes, n_work=n_work).phase.theta_rel
    return D, R, epsilon(D, R)


# -- repeated trips scenario ------------------------------------------------


def _trip_counts(trips: int):
    counts = {1, trips}
    k = 10
    while k < trips:
        counts.add(k)
        k *= 10
    return sorted(counts)


def _run_repeat(scn: Scenario) -> ScenarioResult:
    plan = scn.plan()
    single = trip_transform(plan, scn.n_modes, scn.n_work)
    one = relative_clock_phase(single, clock_frequency(plan), plan.duration)
    rows = []
    for n in _trip_counts(scn.trips):
        theta = repeated_phase(single, plan, n, scn.strip_beta)
        rows.append((n, n * plan.duration, math.degrees(theta), math.degrees(_wrap(n * one))))
    meta = _base_metadata(scn)
    meta["h"] = plan.h
    meta["single_trip_phase_rad"] = one
    return ScenarioResult(("trips", "travel_time_s", "dtheta_composed_deg", "dtheta_multiplied_deg"), rows, meta)


def _base_metadata(scn: Scenario) -> dict:
    meta = {k: v for k, v in asdict(scn).items()}
    meta["n_work"] = scn.n_work or 2 * scn.n_modes
    meta["constants"] = asdict(scn.constants)
    meta["delta_L_min_m"] = scn.constants.delta_L_min
    return meta


def run_scenario(scn: Scenario, workers: int = 1) -> ScenarioResult:
    if scn.kind in ("dirichlet-sweep", "robin-trip"):
        return _run_sweep(scn, workers)
    if scn.kind == "fourier-compare":
        return _run_fourier(scn, workers)
    if scn.kind == "resonance-scan":
        return resonance_scan(scn, workers)
    return _run_repeat(scn)


# -- figures ----------------------------------------------------------------


def _grid(start, stop, step):
    return tuple(np.round(np.arange(start, stop + step / 2, step), 12))


def figure_scenario(fig: str, n_modes: int = 20, n_work=None, dt=None, c: float | None = None) -> Scenario:
    """Caption parameters for each reproduced figure; the h axis is an assumption where not stated."""
    base = dict(n_modes=n_modes, n_work=n_work, dt=dt)
    if c is not None:
        base["c"] = c
    if fig == "fig1":
        scn = Scenario("dirichlet-sweep", t_a=1e-9, L=0.011, h_values=_grid(1e-4, 1e-3, 1e-4), **base)
    elif fig == "fig4":
        scn = Scenario("robin-trip", t_a=1e-9, L=0.122, h_values=_grid(1e-4, 1e-3, 1e-4), **base)
    elif fig == "fig5":
        scn = Scenario("robin-trip", t_a=1e-10, L=0.095, h_values=_grid(5e-3, 5e-2, 5e-3), **base)
    elif fig == "fig6":
        scn = Scenario("fourier-compare", t_a=1e-10, L=0.0238, h_values=_grid(0.05, 0.5, 0.05), **base)
    elif fig == "fig7":
        scn = Scenario("resonance-scan", t_a=1e-10, h=0.0085, L_range=(0.0228, 0.0248, 0.0001), trips=200, **base)
    elif fig == "fig8":
        scn = Scenario("resonance-scan", t_a=1e-10, a=2e16, L_range=(0.0228, 0.0248, 0.0001), trips=500, **base)
    else:
        raise ValueError(f"unknown figure {fig!r}; expected one of {', '.join(FIGURES)}")
    return replace(scn, label=fig)


#: Alternative reading of the fig8 caption, h fixed instead of a.
FIG8_CAPTION_H = 0.34e-2


def reproduce_figure(
    fig: str,
    out_dir=".",
    n_modes: int = 20,
    n_work=None,
    dt=None,
    c: float | None = None,
    workers: int = 1,
    plot: bool = True,
) -> ScenarioResult:
    """Run a figure scenario and write ``<fig>.csv``, ``<fig>.json`` and ``<fig>.svg`` to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scn = figure_scenario(fig, n_modes, n_work, dt, c)
    result = run_scenario(scn, workers)
    meta = result.metadata
    if fig in ("fig7", "fig8"):
        L_res = resonance_lengths(scn.t_a, scn.c)
        D, R, eps = resonance_epsilon(scn.plan(L=L_res), scn.constants, n_modes, n_work, dt)
        meta.update(resonance_theta_D_rad=D, resonance_theta_R_rad=R, resonance_epsilon=eps)
    if fig == "fig8":
        alt = resonance_scan(replace(scn, a=None, h=FIG8_CAPTION_H), workers)
        i = alt.columns.index("beta_contribution_deg")
        extra = [row[i] for row in alt.rows]
        result = ScenarioResult(
            result.columns + ("beta_contribution_fixed_h_deg",),
            [row + (v,) for row, v in zip(result.rows, extra)],
            meta,
        )
        meta["fixed_h_reading"] = FIG8_CAPTION_H
        meta["peak_beta_contribution_fixed_h_L_cm"] = alt.metadata["peak_beta_contribution_deg_L_cm"]
    if fig == "fig4":
        plan = scn.plan(h=meta["peak_h"])
        single = trip_transform(plan, n_modes, n_work)
        meta["trips_5000_phase_deg"] = math.degrees(repeated_phase(single, plan, 5000))
        meta["trips_5000_travel_time_s"] = 5000 * plan.duration
    if fig == "fig6":
        drives = result.extras["peak_drives"]
        top = max(drives)
        write_waveform(out / f"{fig}_waveform_left_N{top}.txt", drives[top].left)
        write_waveform(out / f"{fig}_waveform_right_N{top}.txt", drives[top].right)
    result.write_csv(out / f"{fig}.csv")
    result.write_metadata(out / f"{fig}.json")
    if plot:
        plot_result(result, fig, out / f"{fig}.svg")
    return result


def plot_result(result: ScenarioResult, title: str, path) -> Path:
    """Static vector plot of every angle column against the first column."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x = result.column(result.columns[0])
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in result.columns[1:]:
        if name.endswith("_deg"):
            style = "--" if "single" in name or "ideal" in name else "-"
            ax.plot(x, result.column(name), style, label=name.replace("_deg", ""))
    ax.set_xlabel(result.columns[0])
    ax.set_ylabel("phase (deg)")
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return Path(path)


# -- config files -----------------------------------------------------------

_FIELD_NAMES = {f.name for f in fields(Scenario)}
_TUPLE_FIELDS = {"h_values": float, "L_range": float, "harmonics": int}
_INT_FIELDS = {"n_modes", "n_work", "trips"}
_FLOAT_FIELDS = {"t_a", "L", "h", "a", "delta_L_min", "c", "dt"}


def _key_lines(text: str) -> dict:
    lines = {}
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*([A-Za-z_][\w-]*)\s*[=:]", line)
        if m:
            lines.setdefault(m.group(1).lower(), i)
    return lines


def parse_config(text: str, source: str = "<config>") -> Scenario:
    """Parse a ``[scenario]`` key/value file into a :class:`Scenario`.

    Lists are comma-separated. Unknown keys and malformed values raise
    :class:`ConfigError` with the offending line.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if parser.sections() != ["scenario"]:
        raise ConfigError(f"{source}: expected exactly one [scenario] section, got {parser.sections()}")
    lines = _key_lines(text)
    kwargs = {}
    for key, raw in parser["scenario"].items():
        where = f"{source}:{lines.get(key.lower(), '?')}"
        if key not in _FIELD_NAMES:
            raise ConfigError(f"{where}: unknown key {key!r}")
        try:
            kwargs[key] = _parse_value(key, raw)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {raw!r} ({exc})") from exc
    for required in ("kind", "t_a"):
        if required not in kwargs:
            raise ConfigError(f"{source}: missing required key {required!r}")
    try:
        return Scenario(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _TUPLE_FIELDS:
        conv = _TUPLE_FIELDS[key]
        return tuple(conv(v) for v in raw.split(",") if v.strip())
    if key in _INT_FIELDS:
        return int(raw)
    if key in _FLOAT_FIELDS:
        return float(raw)
    if key == "strip_beta":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected a boolean")
    return raw


def load_config(path) -> Scenario:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def run(config_path, out_dir=".", workers: int = 1, plot: bool = True) -> ScenarioResult:
    """Run the scenario in ``config_path`` and write ``<stem>.csv`` and ``<stem>.json``."""
    scn = load_config(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = scn.label or Path(config_path).stem
    try:
        result = run_scenario(scn, workers)
    except (ValueError, RuntimeError) as exc:
        raise ScenarioError(f"scenario {stem!r} ({scn.kind}) failed: {exc}") from exc
    result.write_csv(out / f"{stem}.csv")
    result.write_metadata(out / f"{stem}.json")
    if plot:
        plot_result(result, stem, out / f"{stem}.svg")
    return result
