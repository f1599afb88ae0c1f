"""End-to-end acceptance checks for the oscillatory boundary value solver.

Each test prints one PASS/FAIL line with the measured quantities so the
whole gate can be audited from the test log.
"""

import json
import math
import time

import numpy as np

from homog1d import funcspec as fs
from homog1d.averaging import ErrorVariant, corrector_vanishes, sup_error
from homog1d.cli import main as cli_main
from homog1d.convergence import DEFAULT_EPS_LADDER, sweep
from homog1d.fk import (
    PathParams,
    bootstrap_bound,
    cell_mass_check,
    contraction_constant,
    delta_estimate,
    fk_estimate_u_eps,
    heat_propagate,
)
from homog1d.homsolver import (
    ExactSolution,
    HomogenizedSolution,
    ProblemInstance,
    c_eps,
    c_eps_asymptotic,
    fd_oracle,
    harmonic_mean,
    make_field,
    moment_m1,
    moment_m2,
)


def check(num: int, name: str, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} {num:02d} {name}: {detail}")
    assert ok, f"{num:02d} {name}: {detail}"


def test_01_raw_rate_is_linear(model_coefficient, sine_source):
    t0 = time.perf_counter()
    report = sweep(model_coefficient, sine_source,
                   variants=(ErrorVariant.raw(),))
    elapsed = time.perf_counter() - t0
    rate = report.result_for("raw").fit.rate
    ok = 0.85 <= rate <= 1.15 and elapsed < 10.0
    check(1, "raw error decays linearly", ok,
          f"rate={rate:.4f} in [0.85, 1.15], {elapsed:.2f}s < 10s")


def test_02_corrected_rate_is_quadratic(model_coefficient, sine_source):
    t0 = time.perf_counter()
    report = sweep(model_coefficient, sine_source,
                   variants=(ErrorVariant.raw(), ErrorVariant.corrected()))
    elapsed = time.perf_counter() - t0
    rate = report.result_for("corrected").fit.rate
    raw_pts = dict(report.result_for("raw").points)
    cor_pts = dict(report.result_for("corrected").points)
    improvement = raw_pts[1 / 64] / cor_pts[1 / 64]
    ok = (rate >= 1.85 and report.corrected_sign is not None
          and improvement >= 10.0 and elapsed < 30.0)
    check(2, "corrected error decays quadratically", ok,
          f"rate={rate:.4f} >= 1.85, sign={report.corrected_sign}, "
          f"eps=1/64 improvement {improvement:.1f}x >= 10x, "
          f"{elapsed:.2f}s < 30s")


def test_03_symmetric_coefficient_needs_no_correction(symmetric_coefficient,
                                                      sine_source):
    m1 = moment_m1(symmetric_coefficient)
    m2 = moment_m2(symmetric_coefficient)
    report = sweep(symmetric_coefficient, sine_source,
                   variants=(ErrorVariant.averaged(),))
    rate = report.result_for("averaged").fit.rate
    ok = abs(m1) <= 1e-12 and abs(m2) <= 1e-12 and rate >= 1.85
    check(3, "symmetric reciprocal profile has zero offsets", ok,
          f"|m1|={abs(m1):.2e} <= 1e-12, |m2|={abs(m2):.2e} <= 1e-12, "
          f"averaged rate={rate:.4f} >= 1.85")


def test_04_balanced_source_needs_no_correction(model_coefficient,
                                                balanced_source):
    vanishes = corrector_vanishes(model_coefficient, balanced_source)
    ladder = [1 / 32, 1 / 64, 1 / 128, 1 / 256, 1 / 512]
    report = sweep(model_coefficient, balanced_source, eps_list=ladder,
                   variants=(ErrorVariant.averaged(),))
    rate = report.result_for("averaged").fit.rate
    ok = vanishes and rate >= 1.85
    check(4, "zero-mean zero-sweep source kills the corrector", ok,
          f"corrector_vanishes={vanishes}, averaged rate={rate:.4f} >= 1.85")


def test_05_unit_problem_quadratic_defect_is_exact(unit_coefficient, one):
    worst = 0.0
    for eps in DEFAULT_EPS_LADDER:
        p = ProblemInstance(unit_coefficient, one, eps)
        measured = sup_error(p, ErrorVariant.averaged())
        worst = max(worst, abs(measured - eps * eps / 24.0))
    ok = worst <= 1e-10
    check(5, "window-averaged defect equals eps^2/24", ok,
          f"max deviation over ladder {worst:.2e} <= 1e-10")


def test_06_flux_constant_closed_form(model_coefficient, one):
    worst = 0.0
    for eps in (1 / 4, 1 / 8, 1 / 16):
        val = c_eps(ProblemInstance(model_coefficient, one, eps))
        worst = max(worst, abs(val - (0.5 - eps / (4.0 * math.pi))))
    c0, c1 = c_eps_asymptotic(model_coefficient, one)
    dev0 = abs(c0 - 0.5)
    dev1 = abs(c1 + 1.0 / (4.0 * math.pi))
    ok = worst <= 1e-10 and dev0 <= 1e-12 and dev1 <= 1e-12
    check(6, "flux constant matches its closed form", ok,
          f"max closed-form deviation {worst:.2e} <= 1e-10, "
          f"asymptotic devs ({dev0:.2e}, {dev1:.2e}) <= 1e-12")


def test_07_exact_route_agrees_with_difference_scheme(model_coefficient,
                                                      sine_source):
    p = ProblemInstance(model_coefficient, sine_source, 1 / 16)
    exact = ExactSolution(p)
    diffs = []
    for n in (20000, 40000):
        fld = fd_oracle(p, n)
        diffs.append(float(np.max(np.abs(exact(fld.x) - fld.values))))
    ratio = diffs[0] / diffs[1]
    ok = diffs[0] <= 1e-6 and 3.0 <= ratio <= 5.5
    check(7, "independent difference scheme agrees", ok,
          f"sup diff at n=2e4 {diffs[0]:.2e} <= 1e-6, "
          f"halving h shrinks it {ratio:.2f}x (expect ~4x)")


def test_08_path_ensemble_reproduces_solution(model_coefficient, sine_source):
    t0 = time.perf_counter()
    p = ProblemInstance(model_coefficient, sine_source, 1 / 8)
    exact = ExactSolution(p)
    params = PathParams(x0=0.5, horizon=0.25, dt=1e-5, paths=100000, seed=0)
    est = fk_estimate_u_eps(p, 0.5, 0.25, params, exact=exact)
    elapsed = time.perf_counter() - t0
    dev = abs(est.mean - float(exact(0.5)))
    ok = dev <= 4.0 * est.stderr and elapsed < 300.0
    check(8, "ensemble average reproduces the solution", ok,
          f"|mc - u_eps(0.5)| = {dev:.2e} <= 4*stderr = {4 * est.stderr:.2e}, "
          f"{elapsed:.1f}s < 300s")


def test_09_cell_masses_match_averaged_kernel(model_coefficient,
                                              unit_coefficient):
    params = PathParams(x0=0.5, horizon=0.05, dt=5e-6, paths=100000, seed=1234)
    rep = cell_mass_check(model_coefficient, 1 / 32, 0.5, 0.05, params)
    const_params = PathParams(x0=0.5, horizon=0.05, dt=2e-4, paths=20000,
                              seed=777)
    const_rep = cell_mass_check(unit_coefficient, 1 / 8, 0.5, 0.05,
                                const_params)
    # for a constant profile the reciprocal average IS the coefficient, so
    # the comparison kernel is the exact law and the only discrepancy is
    # statistical
    algebraic_zero = harmonic_mean(unit_coefficient) == 1.0
    ok = (rep.max_abs_z <= 4.0 and const_rep.max_abs_z <= 4.0
          and algebraic_zero)
    check(9, "per-cell occupation masses match", ok,
          f"main instance max|z|={rep.max_abs_z:.2f} <= 4 "
          f"({len(rep.rows)} cells), constant profile "
          f"max|z|={const_rep.max_abs_z:.2f} <= 4 with exact reference law")


def test_10_one_step_bound_machinery(model_coefficient, sine_source):
    fld = make_field(lambda x: x * (1 - x) * (0.5 + np.sin(7 * x)), 512, "t")
    two = heat_propagate(heat_propagate(fld, 1.0, 0.25), 1.0, 0.35)
    one_step = heat_propagate(fld, 1.0, 0.6)
    semigroup_dev = float(np.max(np.abs(two.values - one_step.values)))

    c_dev = abs(contraction_constant(1.0, 1.0)
                - (1.0 - (4.0 / math.pi) * math.exp(-math.pi ** 2)))

    p = ProblemInstance(model_coefficient, sine_source, 1 / 16)
    params = PathParams(x0=0.5, horizon=1.0, dt=1e-4, paths=2500, seed=2026)
    de = delta_estimate(p, 1.0, params)
    exact = ExactSolution(p)
    hom = HomogenizedSolution(model_coefficient, sine_source)
    phi = make_field(lambda x: np.abs(exact(x) - hom(x)), 2048, "abs-diff")
    res = bootstrap_bound(phi, de.measured, 1.0, harmonic_mean(model_coefficient))

    ok = semigroup_dev <= 1e-10 and c_dev <= 1e-8 and res.verified
    check(10, "one-step inequality implies the sup bound", ok,
          f"semigroup dev {semigroup_dev:.2e} <= 1e-10, contraction dev "
          f"{c_dev:.2e} <= 1e-8, measured delta {de.measured:.3e} gives "
          f"bound {res.implied_bound:.3e} >= sup {res.sup_phi:.3e} "
          f"(verified={res.verified})")


def test_11_fixed_seed_runs_are_byte_identical(tmp_path):
    doc = {
        "coefficient": {"profile": {"type": "trig", "mean": 2.0,
                                    "cos": [0.0], "sin": [1.0]},
                        "reciprocal": True},
        "source": {"type": "trig", "mean": 0.0, "cos": [], "sin": [1.0],
                   "base_frequency": math.pi},
        "eps": [1 / 8, 1 / 16, 1 / 32],
        "variants": ["raw", "averaged"],
        "svg": False,
        "mc": {"x": 0.5, "horizon": 0.25, "dt": 2e-4, "paths": 500,
               "seed": 7},
    }
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps(doc))

    snapshots = []
    for run in ("first", "second"):
        out = tmp_path / run
        assert cli_main(["converge", str(cfg), "--out", str(out)]) == 0
        assert cli_main(["fk-verify", str(cfg), "--out", str(out)]) == 0
        snapshots.append({f.name: f.read_bytes()
                          for f in sorted(out.glob("*.csv"))})
    same = snapshots[0] == snapshots[1]
    names = ", ".join(sorted(snapshots[0]))
    ok = same and len(snapshots[0]) == 3
    check(11, "repeated runs are byte-identical", ok,
          f"{names} identical across runs = {same}")
