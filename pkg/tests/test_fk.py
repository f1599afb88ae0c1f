import math

import numpy as np
import pytest

from homog1d import funcspec as fs
from homog1d._kernels import _raw_stream, path_normals
from homog1d.errors import (
    ConfigError,
    DomainError,
    HypothesisViolationError,
    TimestepError,
)
from homog1d.fk import (
    PathParams,
    bootstrap_bound,
    cell_mass_check,
    contraction_constant,
    delta_estimate,
    dirichlet_interval_mass,
    fk_estimate_u_eps,
    heat_propagate,
    simulate_path,
    simulate_paths,
)
from homog1d.homsolver import ExactSolution, ProblemInstance, make_field


# ---------------------------------------------------------------------------
# parameters and random stream


def test_path_params_validation():
    with pytest.raises(DomainError):
        PathParams(x0=0.0, horizon=1.0, dt=1e-3, paths=10)
    with pytest.raises(ConfigError):
        PathParams(x0=0.5, horizon=-1.0, dt=1e-3, paths=10)
    with pytest.raises(ConfigError):
        PathParams(x0=0.5, horizon=1.0, dt=0.0, paths=10)
    with pytest.raises(ConfigError):
        PathParams(x0=0.5, horizon=1.0, dt=1e-3, paths=0)
    with pytest.raises(ConfigError):
        PathParams(x0=0.5, horizon=1.0, dt=1e-3, paths=10, seed=-1)


def test_horizon_must_be_step_multiple():
    assert PathParams(x0=0.5, horizon=0.25, dt=1e-3, paths=1).steps() == 250
    with pytest.raises(TimestepError):
        PathParams(x0=0.5, horizon=0.25, dt=3e-4, paths=1).steps()


def test_raw_stream_matches_reference_generator():
    for seed, path in ((0, 0), (12345, 7), (2**63, 2**64 - 1)):
        mine = _raw_stream(np.uint64(seed), np.uint64(path), 12)
        ref = np.random.Generator(
            np.random.Philox(key=np.array([seed, path], dtype=np.uint64))
        ).bit_generator.random_raw(12)
        assert np.array_equal(mine, ref)


def test_path_normals_statistics():
    z = path_normals(np.uint64(3), np.uint64(0), 200000)
    assert abs(np.mean(z)) < 0.01
    assert abs(np.var(z) - 1.0) < 0.01
    z2 = path_normals(np.uint64(3), np.uint64(1), 1000)
    assert not np.array_equal(z[:1000], z2)


# ---------------------------------------------------------------------------
# path simulation


def test_single_path_matches_ensemble_member(model_coefficient, one):
    pp = PathParams(x0=0.5, horizon=0.01, dt=1e-4, paths=32, seed=99)
    ens = simulate_paths(model_coefficient, 1 / 8, pp, source=one)
    single = simulate_path(model_coefficient, 1 / 8, pp, path_index=17,
                           source=one)
    assert single.position == ens.positions[17]
    assert single.source_integral == ens.source_integral[17]


def test_zero_noise_constant_coefficient_is_fixed_point(unit_coefficient, one):
    pp = PathParams(x0=0.3, horizon=0.02, dt=1e-4, paths=4, seed=0)
    ens = simulate_paths(unit_coefficient, 1 / 8, pp, source=one,
                         zero_noise=True)
    assert np.all(ens.positions == 0.3)
    assert ens.interior_fraction == 1.0
    assert ens.source_integral[0] == pytest.approx(0.02, rel=1e-12)


def test_mass_accounting(unit_coefficient):
    pp = PathParams(x0=0.5, horizon=0.05, dt=2e-4, paths=2000, seed=21)
    ens = simulate_paths(unit_coefficient, 1 / 8, pp)
    total = ens.absorbed_lo + ens.absorbed_hi + ens.interior_fraction
    assert total == pytest.approx(1.0, abs=1e-15)
    assert 0.0 < ens.interior_fraction < 1.0


def test_timestep_guard(unit_coefficient):
    pp = PathParams(x0=0.5, horizon=0.25, dt=1e-3, paths=10)
    with pytest.raises(TimestepError):
        simulate_paths(unit_coefficient, 1 / 32, pp)


def test_ensemble_deterministic(unit_coefficient, one):
    pp = PathParams(x0=0.5, horizon=0.05, dt=2e-4, paths=500, seed=8)
    a = simulate_paths(unit_coefficient, 1 / 8, pp, source=one)
    b = simulate_paths(unit_coefficient, 1 / 8, pp, source=one)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.source_integral, b.source_integral)


# ---------------------------------------------------------------------------
# reproducing identity by Monte Carlo


def test_mc_identity_constant_coefficient(unit_coefficient, one):
    p = ProblemInstance(unit_coefficient, one, 1 / 8)
    pp = PathParams(x0=0.5, horizon=0.25, dt=1e-5, paths=4000, seed=5)
    est = fk_estimate_u_eps(p, 0.5, 0.25, pp)
    z = (est.mean - 0.125) / est.stderr
    assert abs(z) <= 4.0
    assert est.paths == 4000
    assert est.stderr < 5e-3


def test_mc_identity_oscillatory(model_coefficient, one):
    p = ProblemInstance(model_coefficient, one, 1 / 8)
    exact = ExactSolution(p)
    pp = PathParams(x0=0.5, horizon=0.25, dt=1e-4, paths=4000, seed=19)
    est = fk_estimate_u_eps(p, 0.5, 0.25, pp, exact=exact)
    z = (est.mean - float(exact(0.5))) / est.stderr
    assert abs(z) <= 4.0


def test_mean_exit_time(unit_coefficient):
    # started at 0.25 with unit coefficient the exact mean exit time is
    # x0 (1 - x0) / 2 = 0.09375; the cap covers three standard errors
    # plus the O(sqrt(dt)) late-detection bias of discrete-time absorption
    pp = PathParams(x0=0.25, horizon=1.5, dt=8e-6, paths=20000, seed=7)
    ens = simulate_paths(unit_coefficient, 1 / 8, pp)
    assert ens.interior_fraction == 0.0
    assert abs(ens.mean_exit_time() - 0.09375) <= 2.5e-3


def test_absorbed_fractions(unit_coefficient):
    # P(absorbed at 0) = 1 - x0 = 0.75 for the unit coefficient
    pp = PathParams(x0=0.25, horizon=1.5, dt=5e-5, paths=20000, seed=13)
    ens = simulate_paths(unit_coefficient, 1 / 8, pp)
    se = math.sqrt(0.75 * 0.25 / pp.paths)
    assert abs(ens.absorbed_lo - 0.75) <= 4.0 * se
    assert abs(ens.absorbed_hi - 0.25) <= 4.0 * se


# ---------------------------------------------------------------------------
# heat propagator


def test_heat_eigenfunction_decay():
    fld = make_field(lambda x: np.sin(np.pi * x), 512, "test")
    out = heat_propagate(fld, 0.5, 0.3)
    expect = math.exp(-0.5 * math.pi**2 * 0.3) * np.sin(np.pi * fld.x)
    assert np.max(np.abs(out.values - expect)) < 1e-14
    assert out.provenance == "heat-semigroup"


def test_heat_zero_time_round_trip():
    fld = make_field(lambda x: x * (1.0 - x) * np.cos(3.0 * x), 400, "test")
    out = heat_propagate(fld, 1.0, 0.0)
    assert np.max(np.abs(out.values - fld.values)) < 1e-12


def test_heat_semigroup_property():
    fld = make_field(lambda x: x * (1.0 - x) * (0.5 + np.sin(7 * x)), 512,
                     "test")
    two_step = heat_propagate(heat_propagate(fld, 1.0, 0.25), 1.0, 0.35)
    one_step = heat_propagate(fld, 1.0, 0.6)
    assert np.max(np.abs(two_step.values - one_step.values)) <= 1e-10


def test_heat_max_principle():
    fld = make_field(lambda x: np.sin(np.pi * x) ** 3, 256, "test")
    out = heat_propagate(fld, 2.0, 0.1)
    assert np.max(np.abs(out.values)) <= np.max(np.abs(fld.values)) + 1e-14


def test_heat_grid_validation():
    x = np.array([0.0, 0.3, 1.0])
    with pytest.raises(ConfigError):
        heat_propagate(make_field(np.sin, 2, "t"), -1.0, 0.1)
    from homog1d.homsolver import SolutionField
    bad = SolutionField(x, np.array([0.0, 1.0, 0.0]), "t")
    with pytest.raises(ConfigError, match="uniform"):
        heat_propagate(bad, 1.0, 0.1)
    bad2 = SolutionField(np.linspace(0, 1, 5), np.ones(5), "t")
    with pytest.raises(ConfigError, match="endpoint"):
        heat_propagate(bad2, 1.0, 0.1)


def test_contraction_constant_closed_form():
    c = contraction_constant(1.0, 1.0)
    assert abs(c - (1.0 - (4.0 / math.pi) * math.exp(-math.pi**2))) < 1e-8
    assert 0.0 < contraction_constant(0.5, 1.0) < 1.0


# ---------------------------------------------------------------------------
# absorbed kernel interval masses


def image_mass(x0, lo, hi, abar, t):
    """Method-of-images oracle for the absorbed kernel mass."""
    s = math.sqrt(2.0 * abar * t)
    total = 0.0
    for m in range(-8, 9):
        for sign, c in ((1.0, 2 * m + x0), (-1.0, 2 * m - x0)):
            total += sign * 0.5 * (math.erf((hi - c) / (s * math.sqrt(2)))
                                   - math.erf((lo - c) / (s * math.sqrt(2))))
    return total


def test_interval_mass_against_image_oracle():
    cases = ((0.5, 0.375, 0.5, 1.0, 0.05),
             (0.3, 0.0, 1.0, 0.5, 0.1),
             (0.7, 0.1, 0.2, 2.0, 0.02))
    for x0, lo, hi, ab, t in cases:
        series_val = dirichlet_interval_mass(x0, lo, hi, ab, t)
        assert series_val == pytest.approx(image_mass(x0, lo, hi, ab, t),
                                           abs=1e-12)


def test_interval_mass_additive():
    a = dirichlet_interval_mass(0.4, 0.2, 0.5, 1.0, 0.06)
    b = dirichlet_interval_mass(0.4, 0.5, 0.8, 1.0, 0.06)
    c = dirichlet_interval_mass(0.4, 0.2, 0.8, 1.0, 0.06)
    assert a + b == pytest.approx(c, abs=1e-14)


def test_interval_mass_short_time_locality():
    far = dirichlet_interval_mass(0.5, 0.9, 1.0, 1.0, 1e-3)
    near = dirichlet_interval_mass(0.5, 0.35, 0.65, 1.0, 1e-3)
    assert abs(far) < 1e-15
    assert near > 0.999
    survival = dirichlet_interval_mass(0.5, 0.0, 1.0, 1.0, 1e-3)
    assert survival == pytest.approx(1.0, abs=1e-12)


def test_interval_mass_domain_errors():
    with pytest.raises(DomainError):
        dirichlet_interval_mass(0.5, -0.1, 0.5, 1.0, 0.1)
    with pytest.raises(DomainError):
        dirichlet_interval_mass(1.5, 0.1, 0.5, 1.0, 0.1)
    with pytest.raises(DomainError):
        dirichlet_interval_mass(0.5, 0.1, 0.5, 1.0, 0.0)


# ---------------------------------------------------------------------------
# cell-mass comparison


def test_cell_mass_constant_coefficient(unit_coefficient):
    pp = PathParams(x0=0.5, horizon=0.05, dt=2e-4, paths=5000, seed=777)
    rep = cell_mass_check(unit_coefficient, 1 / 8, 0.5, 0.05, pp)
    assert rep.max_abs_z <= 4.0
    assert rep.paths == 5000
    assert len(rep.rows) == 6
    for row in rep.rows:
        assert row.hi - row.lo == pytest.approx(1 / 8, abs=1e-15)
        assert 0.0 <= row.expected <= 1.0
    # observed cell masses plus boundary absorption account for all paths
    covered = sum(r.observed for r in rep.rows)
    assert covered <= rep.interior_fraction + 1e-12


def test_cell_mass_needs_interior_cell(unit_coefficient):
    pp = PathParams(x0=0.5, horizon=0.05, dt=2e-3, paths=10, seed=0)
    with pytest.raises(DomainError):
        cell_mass_check(unit_coefficient, 1.0, 0.5, 0.05, pp)


# ---------------------------------------------------------------------------
# one-step defect and bootstrap


def test_delta_estimate_constant_coefficient(unit_coefficient, one):
    # with the unit coefficient the oscillatory process and the averaged
    # flow coincide, so the measured defect is pure simulation noise
    p = ProblemInstance(unit_coefficient, one, 1 / 8)
    pp = PathParams(x0=0.5, horizon=0.25, dt=2.5e-5, paths=2000, seed=3)
    de = delta_estimate(p, 0.25, pp)
    assert len(de.rows) == 17
    assert de.measured <= max(4.0 * de.stderr_at_max, 0.01)
    assert de.measured <= de.analytic_bound
    for row in de.rows:
        assert row.defect >= 0.0


def test_bootstrap_on_decaying_mode():
    alpha = 0.02
    phi = make_field(lambda x: alpha * np.sin(np.pi * x), 512, "test")
    delta = alpha * (1.0 - math.exp(-math.pi**2))
    res = bootstrap_bound(phi, delta, 1.0, 1.0)
    assert res.verified
    assert res.iterations == 1
    assert res.sup_phi == pytest.approx(alpha, abs=1e-12)
    assert res.implied_bound >= res.sup_phi
    assert res.implied_bound == pytest.approx(delta / res.contraction,
                                              rel=1e-12)


def test_bootstrap_iteration_count():
    phi = make_field(lambda x: 0.01 * np.sin(np.pi * x), 256, "test")
    delta = 0.01 * (1.0 - math.exp(-math.pi**2 * 0.3))
    res = bootstrap_bound(phi, delta, 0.3, 1.0)
    assert res.iterations == 4
    assert res.total_time == pytest.approx(1.2, abs=1e-12)
    assert res.verified


def test_bootstrap_detects_violated_hypothesis():
    phi = make_field(lambda x: np.sin(np.pi * x), 256, "test")
    with pytest.raises(HypothesisViolationError) as err:
        bootstrap_bound(phi, 0.0, 1.0, 1.0)
    assert err.value.x == pytest.approx(0.5, abs=0.01)
    assert err.value.gap > 0.0


def test_bootstrap_validation():
    phi = make_field(lambda x: np.sin(np.pi * x), 64, "test")
    with pytest.raises(ConfigError):
        bootstrap_bound(phi, 0.1, 1.5, 1.0)
    with pytest.raises(ConfigError):
        bootstrap_bound(phi, -0.1, 1.0, 1.0)
    neg = make_field(lambda x: -np.sin(np.pi * x), 64, "test")
    with pytest.raises(ConfigError):
        bootstrap_bound(neg, 0.1, 1.0, 1.0)
