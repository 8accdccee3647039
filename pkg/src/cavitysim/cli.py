"""Command-line entry point: ``cavitysim <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from .constants import DEFAULT_C, PhysicalConstants
from .fourier import fit_drive, harmonic_budget, write_waveform
from .rindler import ideal_clock_phase, single_mode_phase, trip_phase
from .robin import simulate_trip_robin
from .scenarios import (
    FIGURES,
    ConfigError,
    Scenario,
    ScenarioError,
    epsilon,
    plot_result,
    reproduce_figure,
    resonance_scan,
    run,
)
from .trajectories import TrajectoryPlan


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n-modes", type=int, default=20, help="modes kept in the result (default 20)")
    p.add_argument("--n-work", type=int, default=None, help="working basis size (default 2 * n-modes)")
    p.add_argument("--dt", type=float, default=None, help="Robin time step in s (default automatic)")
    p.add_argument("--c", type=float, default=None, help=f"wave speed in m/s (default {DEFAULT_C:g})")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def _plan_args(p: argparse.ArgumentParser):
    p.add_argument("--L", type=float, required=True, help="proper length (m)")
    p.add_argument("--t-a", type=float, required=True, help="acceleration time t_a (s)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--h", type=float, help="dimensionless acceleration aL/c^2")
    g.add_argument("--a", type=float, help="proper acceleration (m/s^2)")


def _plan(args) -> TrajectoryPlan:
    c = args.c or DEFAULT_C
    if args.h is not None:
        return TrajectoryPlan.from_h(args.h, args.t_a, args.L, c)
    return TrajectoryPlan(args.a, args.t_a, args.L, c)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavitysim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", help="regenerate the data and plot of one figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--workers", type=int, default=1)
    _common(p)

    p = sub.add_parser("run", help="run a scenario config file")
    p.add_argument("config", type=Path)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Path("out"))

    p = sub.add_parser("scan-resonance", help="phase differences after repeated trips versus L")
    p.add_argument("--t-a", type=float, default=1e-10)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--h", type=float, default=None)
    g.add_argument("--a", type=float, default=None)
    p.add_argument("--L-start", type=float, default=0.0228)
    p.add_argument("--L-stop", type=float, default=0.0248)
    p.add_argument("--L-step", type=float, default=0.0001)
    p.add_argument("--trips", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    _common(p)

    p = sub.add_parser("fit-flux", help="fit N-harmonic flux drives and write waveform tables")
    _plan_args(p)
    p.add_argument("--delta-L-min", type=float, default=0.0075e-3, help="unbiased SQUID length (m)")
    p.add_argument("--harmonics", type=int, default=10)
    p.add_argument("--samples", type=int, default=2048)
    _common(p)

    p = sub.add_parser("simulate-dirichlet", help="single-trip Dirichlet clock phase")
    _plan_args(p)
    _common(p)

    p = sub.add_parser("simulate-robin", help="single-trip Robin (SQUID) clock phase")
    _plan_args(p)
    p.add_argument("--delta-L-min", type=float, default=0.0075e-3, help="unbiased SQUID length (m)")
    p.add_argument("--tol", type=float, default=None, help="fail if the dt estimate exceeds this (rad)")
    _common(p)
    return parser


def _cmd_reproduce(args):
    res = reproduce_figure(args.figure, args.out, args.n_modes, args.n_work, args.dt, args.c, args.workers)
    print(f"{args.figure}: {len(res.rows)} rows -> {args.out / (args.figure + '.csv')}")
    for key in sorted(res.metadata):
        if key.startswith(("peak", "epsilon", "resonance", "trips_5000", "relative", "max_", "min_")):
            print(f"  {key} = {res.metadata[key]}")


def _cmd_run(args):
    res = run(args.config, args.out, args.workers)
    print(f"{args.config}: {len(res.rows)} rows written to {args.out}")
    for w in res.metadata.get("warnings", []):
        print(f"  warning: {w}")


def _cmd_scan(args):
    c = args.c or DEFAULT_C
    h = args.h
    if h is None and args.a is None:
        h = 0.0085
    scn = Scenario(
        "resonance-scan",
        t_a=args.t_a,
        h=h,
        a=args.a,
        L_range=(args.L_start, args.L_stop, args.L_step),
        c=c,
        n_modes=args.n_modes,
        n_work=args.n_work,
        trips=args.trips,
        label="scan",
    )
    res = resonance_scan(scn, args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    res.write_csv(args.out / "scan.csv")
    res.write_metadata(args.out / "scan.json")
    plot_result(res, "resonance scan", args.out / "scan.svg")
    m = res.metadata
    print(f"L_res = {m['L_res_cm']:.4f} cm, grid step {m['grid_step_cm']:.4f} cm")
    print(f"non-adiabatic peak at {m['peak_nonadiabatic_deg_L_cm']:.4f} cm ({m['peak_nonadiabatic_deg_value']:.4g} deg)")
    print(f"beta peak at {m['peak_beta_contribution_deg_L_cm']:.4f} cm ({m['peak_beta_contribution_deg_value']:.4g} deg)")


def _cmd_fit(args):
    plan = _plan(args)
    const = PhysicalConstants(c=plan.c).with_delta_L_min(args.delta_L_min)
    fd = fit_drive(plan, args.harmonics, const, args.samples)
    args.out.mkdir(parents=True, exist_ok=True)
    for side, fit in (("left", fd.left), ("right", fd.right)):
        path = write_waveform(args.out / f"waveform_{side}_N{args.harmonics}.txt", fit)
        print(f"{side}: residual {fit.residual:.3e} m -> {path}")
    print(f"max drive frequency {harmonic_budget(plan.t_a, args.harmonics) / 1e9:.4g} GHz")


def _cmd_dirichlet(args):
    plan = _plan(args)
    rec = trip_phase(plan, args.n_modes, args.n_work)
    print(f"h = {plan.h:.6g}, d_cav = {plan.d_cav:.6g} m")
    print(f"dtheta_D      = {rec.theta_rel:.9e} rad ({rec.theta_rel_deg:.6g} deg)")
    print(f"dtheta_single = {single_mode_phase(plan):.9e} rad")
    print(f"dtheta_ideal  = {ideal_clock_phase(plan):.9e} rad")


def _cmd_robin(args):
    plan = _plan(args)
    const = PhysicalConstants(c=plan.c).with_delta_L_min(args.delta_L_min)
    trip = simulate_trip_robin(plan, const, args.dt, args.n_modes, args.n_work, args.tol)
    D = trip_phase(plan, args.n_modes).theta_rel
    R = trip.phase.theta_rel
    print(f"h = {plan.h:.6g}, L_cav = {trip.drive.L_cav:.6g} m, delta_L_max = {trip.drive.delta_L_max:.6g} m")
    print(f"dtheta_R = {R:.9e} rad, dtheta_D = {D:.9e} rad, epsilon = {epsilon(D, R):.4g}")
    print(f"steps {trip.evolution.n_steps}, dt estimate {trip.evolution.convergence:.3e} rad")


_COMMANDS = {
    "reproduce": _cmd_reproduce,
    "run": _cmd_run,
    "scan-resonance": _cmd_scan,
    "fit-flux": _cmd_fit,
    "simulate-dirichlet": _cmd_dirichlet,
    "simulate-robin": _cmd_robin,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if not args.verbose:
        warnings.simplefilter("ignore", UserWarning)
    try:
        _COMMANDS[args.command](args)
    except (ConfigError, ScenarioError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
