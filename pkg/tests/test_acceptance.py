"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``CRITERION n: PASS|FAIL ...`` line before its
assertion, so ``pytest -s`` or a plain ``python tests/test_acceptance.py``
gives a compact summary. Criteria that cannot be met are left failing; the
numbers they print are the ones the implementation actually produces.
"""

import math
import sys
import warnings

import numpy as np
import pytest

from cavitysim.bogoliubov import (
    BogoliubovTransform,
    compose,
    inverse,
    symplectic_defect,
    unitarity_defect,
)
from cavitysim.constants import PhysicalConstants
from cavitysim.fdtd import fdtd_oracle
from cavitysim.fourier import harmonic_budget
from cavitysim.rindler import overlap_matrices, trip_phase, trip_transform
from cavitysim.robin import (
    delta_L_eff,
    evolve_robin,
    extrapolated_trip_phase,
    flux_for_length,
    instantaneous_bogoliubov,
    mode_basis,
    simulate_trip_robin,
    static_frequency_ratio,
)
from cavitysim.scenarios import (
    epsilon,
    figure_scenario,
    peak_offset_steps,
    repeated_phase,
    resonance_lengths,
    resonance_scan,
    run_scenario,
)
from cavitysim.trajectories import TrajectoryPlan
from oracles import random_bogoliubov, rindler_overlap, robin_overlap

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")

C = 1.19e8
SQUID = PhysicalConstants(c=C).with_delta_L_min(0.0075e-3)
_capsys = None


@pytest.fixture(autouse=True)
def _capture(capsys):
    global _capsys
    _capsys = capsys
    yield
    _capsys = None


def report(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    if _capsys is None:
        print(line)
    else:
        with _capsys.disabled():
            print("\n" + line)
    return ok


def test_criterion_1_squid_length():
    dL = delta_L_eff(0.0, PhysicalConstants())
    ok = abs(dL - 0.75e-3) <= 0.01 * 0.75e-3
    report(1, ok, f"delta_L_eff(0) = {dL * 1e3:.4f} mm (target 0.75 mm +- 1%)")
    assert ok


def test_criterion_2_frequency_ratio():
    # both the stated d_cav and the one implied by the default wave speed
    d_paper = 1.68e-3
    d_model = TrajectoryPlan.from_h(1e-3, 1e-9, 0.011, C).d_cav
    cases = [(0.75e-3, 1.56), (0.0075e-3, 1.48)]
    rows = []
    ok = True
    for dmin, target in cases:
        r_paper = static_frequency_ratio(0.011, d_paper, dmin)
        r_model = static_frequency_ratio(0.011, d_model, dmin)
        ok &= abs(r_paper - target) <= 0.02 and abs(r_model - target) <= 0.02
        rows.append(f"dmin={dmin * 1e3:g}mm: {r_paper:.4f} (d_cav=1.68mm), {r_model:.4f} "
                    f"(d_cav={d_model * 1e3:.2f}mm) vs {target}")
    report(2, ok, "omega_R/omega_D " + "; ".join(rows))
    assert ok


def test_criterion_3_resonance_location():
    fig7 = resonance_scan(figure_scenario("fig7"))
    fig8 = resonance_scan(figure_scenario("fig8"))
    off7 = peak_offset_steps(fig7, "nonadiabatic_deg")
    off8 = peak_offset_steps(fig8, "beta_contribution_deg")
    ok = off7 <= 1 + 1e-9 and off8 <= 1 + 1e-9
    m7, m8 = fig7.metadata, fig8.metadata
    report(
        3,
        ok,
        f"L_res = {m7['L_res_cm']:.2f} cm; non-adiabatic peak {m7['peak_nonadiabatic_deg_L_cm']:.2f} cm "
        f"({off7:.0f} step), beta peak {m8['peak_beta_contribution_deg_L_cm']:.2f} cm ({off8:.0f} step)",
    )
    assert ok


def _eps_extrapolated(plan):
    D = trip_phase(plan, 20).theta_rel
    R, _, _ = extrapolated_trip_phase(plan, SQUID, n_modes=20, n_work=160)
    return epsilon(D, R)


def test_criterion_4_relative_error():
    fig4 = figure_scenario("fig4")
    fig5 = figure_scenario("fig5")
    # sweep peaks: the largest Dirichlet phase on each h axis
    h4 = max(fig4.h_values, key=lambda h: abs(trip_phase(fig4.plan(h=h), 20).theta_rel))
    h5 = max(fig5.h_values, key=lambda h: abs(trip_phase(fig5.plan(h=h), 20).theta_rel))
    L_res = resonance_lengths(1e-10, C)
    checks = {
        "fig4": (_eps_extrapolated(fig4.plan(h=h4)), lambda e: 0.005 <= e <= 0.08, "[0.5%, 8%]"),
        "fig5": (_eps_extrapolated(fig5.plan(h=h5)), lambda e: 0.0002 / 3 <= e <= 0.0002 * 3, "0.02% x/÷ 3"),
        "fig7": (_eps_extrapolated(figure_scenario("fig7").plan(L=L_res)),
                 lambda e: abs(e - 0.046) <= 0.02, "4.6% +- 2pp"),
        "fig8": (_eps_extrapolated(figure_scenario("fig8").plan(L=L_res)),
                 lambda e: abs(e - 0.071) <= 0.02, "7.1% +- 2pp"),
    }
    results = {k: bool(test(e)) for k, (e, test, _) in checks.items()}
    ok = all(results.values())
    detail = "; ".join(
        f"{k}: eps = {e * 100:.3f}% ({'ok' if results[k] else 'out'} of {band})" for k, (e, _, band) in checks.items()
    )
    report(4, ok, detail)
    assert ok


def test_criterion_5_accumulated_phase():
    scn = figure_scenario("fig4")
    plan = scn.plan(h=1e-3)
    single = trip_transform(plan, 20)
    total = math.degrees(repeated_phase(single, plan, 5000))
    travel = 5000 * plan.duration
    ok = math.isclose(travel, 20e-6, rel_tol=1e-12) and 0.2 <= abs(total) <= 5.0
    report(5, ok, f"travel time {travel * 1e6:.6f} us, phase after 5000 trips {total:.4f} deg (accept 0.2-5)")
    assert ok


def _criterion_6_checks():
    out = {}
    # defects of every scenario transform at N = 32
    plans = {
        "fig1": TrajectoryPlan.from_h(1e-3, 1e-9, 0.011, C),
        "fig4": TrajectoryPlan.from_h(1e-3, 1e-9, 0.122, C),
        "fig5": TrajectoryPlan.from_h(0.05, 1e-10, 0.095, C),
        "fig6": TrajectoryPlan.from_h(0.25, 1e-10, 0.0238, C),
        "fig7": TrajectoryPlan.from_h(0.0085, 1e-10, 0.0238, C),
        "fig8": TrajectoryPlan(2e16, 1e-10, 0.0238, C),
    }
    worst = 0.0
    for plan in plans.values():
        T = trip_transform(plan, 32, n_work=128)
        R = simulate_trip_robin(plan, SQUID, n_modes=32, n_work=128).transform
        worst = max(worst, unitarity_defect(T), symplectic_defect(T), unitarity_defect(R), symplectic_defect(R))
    out["defects_N32"] = (worst, worst < 1e-6)

    alpha, beta, _ = random_bogoliubov(32, 0.2, seed=5)
    t = BogoliubovTransform(alpha, beta)
    back = compose(t, inverse(t))
    closure = max(np.max(np.abs(back.alpha - np.eye(32))), np.max(np.abs(back.beta)))
    out["compose_inverse"] = (closure, closure < 1e-10)

    phases = [trip_phase(TrajectoryPlan.from_h(h, 1e-9, 0.011, C), 20).theta_rel for h in (1e-4, 1e-3)]
    slope = math.log(phases[1] / phases[0]) / math.log(10)
    out["h2_slope"] = (slope, abs(slope - 2) <= 0.05)

    k = mode_basis(0.0238, 0.0, 0.0, 32).k
    dirichlet = np.max(np.abs(k * 0.0238 / np.pi - np.arange(1, 33)))
    out["dirichlet_limit"] = (dirichlet, dirichlet < 1e-12)

    targets = SQUID.delta_L_min * np.linspace(1.0, 200.0, 1001)
    rt = np.max(np.abs(delta_L_eff(flux_for_length(targets, SQUID), SQUID) - targets) / targets)
    out["flux_round_trip"] = (rt, rt < 1e-12)

    ramp = lambda t: 0.05 + 0.01 * np.sin(np.pi * np.asarray(t, float) / 2) ** 2
    flat = lambda t: 0.03 + 0 * np.asarray(t, float)
    a = [complex(evolve_robin(1.0, ramp, flat, 2.0, n_modes=6, n_work=60, c=1.0, dt=dt,
                              check_convergence=False).transform.alpha[0, 0]) for dt in (0.02, 0.01, 0.005)]
    order = math.log2(abs(a[0] - a[1]) / abs(a[1] - a[2]))
    out["dt_order"] = (order, order >= 1)

    old, new = mode_basis(1.0, 0.05, 0.03, 6), mode_basis(1.0, 0.06, 0.03, 6)
    T = instantaneous_bogoliubov(old, new)
    err = max(
        max(abs(T.alpha[m, n].real - ref[0]), abs(T.beta[m, n].real - ref[1]))
        for m in range(6) for n in range(6) for ref in [robin_overlap(old, new, m, n)]
    )
    a_r, b_r = overlap_matrices(0.3, 4)
    for m in range(1, 5):
        for n in range(1, 5):
            ra, rb = rindler_overlap(0.3, m, n)
            err = max(err, abs(a_r[m - 1, n - 1] - ra), abs(b_r[m - 1, n - 1] - rb))
    out["overlap_oracle"] = (err, err < 1e-9)

    ref = evolve_robin(1.0, ramp, flat, 2.0, n_modes=6, n_work=120, c=1.0, dt=2.0 / 4000).transform
    fd = fdtd_oracle(1.0, ramp, flat, 2.0, n_modes=6, n_cells=400).transform
    fdtd_err = np.max(np.abs(fd.alpha[:4, :4] - ref.alpha[:4, :4]))
    # second-order scheme with dx = 1/400: expected error a few 1e-4
    out["fdtd_agreement"] = (fdtd_err, fdtd_err < 1e-3)
    return out


def test_criterion_6_property_suite():
    checks = _criterion_6_checks()
    ok = all(passed for _, passed in checks.values())
    detail = ", ".join(f"{k}={v:.3g}{'' if passed else '(!)'}" for k, (v, passed) in checks.items())
    report(6, ok, detail)
    assert ok


def test_criterion_7_fourier_fidelity():
    scn = figure_scenario("fig6")
    res = run_scenario(scn)
    rel = res.metadata["relative_error_at_peak"]
    errs = [abs(rel[str(n)]) for n in (2, 4, 6, 10)]
    monotone = all(b <= a for a, b in zip(errs, errs[1:]))
    budget = (harmonic_budget(1e-9, 10), harmonic_budget(0.1e-9, 10))
    budget_ok = budget == (2.5e9, 2.5e10)
    ok = errs[-1] <= 0.10 and monotone and budget_ok
    report(
        7,
        ok,
        f"peak h = {res.metadata['peak_h']}, |rel err| N=2,4,6,10: "
        + ", ".join(f"{e * 100:.2f}%" for e in errs)
        + f"; budget {budget[0] / 1e9:g} GHz / {budget[1] / 1e9:g} GHz",
    )
    assert ok


if __name__ == "__main__":
    warnings.simplefilter("ignore", UserWarning)
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
