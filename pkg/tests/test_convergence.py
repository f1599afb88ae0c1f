import numpy as np
import pytest

from homog1d import funcspec as fs
from homog1d.averaging import ErrorVariant
from homog1d.convergence import (
    DEFAULT_EPS_LADDER,
    ConvergenceReport,
    VariantResult,
    calibrate_sign,
    fit_rate,
    sweep,
)
from homog1d.errors import ConfigError, DegenerateFitError, EpsilonError


def test_fit_rate_exact_quadratic():
    pts = [(e, 3.0 * e * e) for e in (1 / 8, 1 / 16, 1 / 32)]
    rate, intercept, resid = fit_rate(pts)
    assert rate == pytest.approx(2.0, abs=1e-12)
    assert intercept == pytest.approx(np.log(3.0), abs=1e-12)
    assert resid < 1e-12


def test_fit_rate_exact_linear():
    rate, _, _ = fit_rate([(e, 5.0 * e) for e in (1 / 8, 1 / 16, 1 / 32)])
    assert rate == pytest.approx(1.0, abs=1e-12)


def test_fit_rate_mixed_orders():
    rate, _, _ = fit_rate([(e, e + e * e) for e in (1 / 8, 1 / 16, 1 / 32, 1 / 64)])
    assert 1.0 < rate < 1.1


def test_fit_rate_scale_invariance():
    pts = [(e, 3.0 * e * e) for e in (1 / 8, 1 / 16, 1 / 32)]
    scaled = [(e, 7.25 * err) for e, err in pts]
    assert fit_rate(pts)[0] == pytest.approx(fit_rate(scaled)[0], abs=1e-12)


def test_fit_rate_robust_to_dropping_largest_eps():
    pts = [(e, 3.0 * e * e) for e in (1 / 8, 1 / 16, 1 / 32, 1 / 64)]
    assert fit_rate(pts)[0] == pytest.approx(fit_rate(pts[1:])[0], abs=1e-10)


def test_fit_rate_excludes_exact_points_and_degenerates():
    with pytest.raises(DegenerateFitError):
        fit_rate([(1 / 8, 1e-16), (1 / 16, 1e-16), (1 / 32, 1e-16)])
    with pytest.raises(DegenerateFitError):
        fit_rate([(1 / 8, 0.1), (1 / 16, 1e-16), (1 / 32, 1e-16)])
    with pytest.raises(ConfigError):
        fit_rate([(-1.0, 0.1), (1 / 16, 0.1), (1 / 32, 0.1)])


def test_sweep_unit_raw_is_exact(unit_coefficient, one):
    report = sweep(unit_coefficient, one, variants=(ErrorVariant.raw(),))
    r = report.result_for("raw")
    assert r.exact and r.fit is None
    assert r.rate_label == "exact"
    assert all(err <= 1e-12 for _, err in r.points)


def test_sweep_unit_averaged_rate_two(unit_coefficient, one):
    report = sweep(unit_coefficient, one,
                   eps_list=[1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128],
                   variants=(ErrorVariant.averaged(),))
    fit = report.result_for("averaged").fit
    assert fit.rate == pytest.approx(2.0, abs=0.01)


def test_sweep_model_rates(model_coefficient, sine_source):
    report = sweep(model_coefficient, sine_source,
                   variants=(ErrorVariant.raw(), ErrorVariant.corrected()))
    raw = report.result_for("raw").fit.rate
    corrected = report.result_for("corrected").fit.rate
    assert 0.85 <= raw <= 1.15
    assert corrected >= 1.85
    assert report.corrected_sign == -1


def test_sweep_orders_descending_and_dedupes(model_coefficient, one):
    report = sweep(model_coefficient, one, eps_list=[1 / 32, 1 / 8, 1 / 16, 1 / 8],
                   variants=(ErrorVariant.raw(),))
    eps = [e for e, _ in report.result_for("raw").points]
    assert eps == [1 / 8, 1 / 16, 1 / 32]


def test_sweep_propagates_solver_errors_with_eps(model_coefficient, one):
    with pytest.raises(EpsilonError, match="0.3"):
        sweep(model_coefficient, one, eps_list=[1 / 8, 0.3],
              variants=(ErrorVariant.raw(),))


def test_sweep_validates_inputs(model_coefficient, one):
    with pytest.raises(ConfigError):
        sweep(model_coefficient, one, eps_list=[])
    with pytest.raises(ConfigError):
        sweep(model_coefficient, one, variants=())


def test_calibrate_sign(model_coefficient, sine_source):
    sign = calibrate_sign(model_coefficient, sine_source,
                          eps_list=[1 / 8, 1 / 16, 1 / 32, 1 / 64])
    assert sign == -1


def test_report_rows(model_coefficient, sine_source):
    report = sweep(model_coefficient, sine_source,
                   eps_list=[1 / 8, 1 / 16, 1 / 32],
                   variants=(ErrorVariant.raw(), ErrorVariant.corrected(-1)))
    rows = report.error_rows()
    assert len(rows) == 6
    assert rows[0][0] == "raw" and rows[0][1] == 1 / 8
    summary = report.summary_rows()
    assert summary[0][0] == "raw" and summary[0][4] == ""
    assert summary[1][0] == "corrected(-1)" and summary[1][4] == -1


def test_report_validates_invariants():
    bad = VariantResult(ErrorVariant.raw(), ((1 / 16, 0.1), (1 / 8, 0.2)),
                        None, True)
    with pytest.raises(ConfigError):
        ConvergenceReport("x", (bad,), None)
    bad2 = VariantResult(ErrorVariant.raw(), ((0.3, 0.1),), None, True)
    with pytest.raises(ConfigError):
        ConvergenceReport("x", (bad2,), None)
    bad3 = VariantResult(ErrorVariant.raw(), ((1 / 8, -0.1),), None, True)
    with pytest.raises(ConfigError):
        ConvergenceReport("x", (bad3,), None)


def test_default_ladder():
    assert DEFAULT_EPS_LADDER == (1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128, 1 / 256)
