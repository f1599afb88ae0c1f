"""Stochastic cross-checks of the two-scale elliptic solver.

The oscillatory equation has a probabilistic reading: its solution is
the expected running cost of a diffusion with drift a'(x/eps)/eps and
noise amplitude sqrt(2 a(x/eps)), absorbed at the interval endpoints.
This module simulates that diffusion (Euler-Maruyama, per-path
counter-based random streams), and provides the constant-coefficient
heat propagator plus the contraction / bootstrap machinery that turns
a one-step evolution inequality into a sup-norm error bound.

Everything here is a verification route that is independent of the
quadrature-based solver: agreement between the two is evidence, not
construction.
"""

import math
from dataclasses import dataclass, replace

import numba
import numpy as np
import scipy.fft

from . import _kernels
from .errors import (
    ConfigError,
    DomainError,
    HypothesisViolationError,
    NumericalError,
    TimestepError,
)
from .funcspec import FunctionSpec, PeriodicCoefficient
from .homsolver import (
    ExactSolution,
    HomogenizedSolution,
    ProblemInstance,
    SolutionField,
    harmonic_mean,
    make_field,
)
from .runtime import worker_count

PROV_HEAT = "heat-semigroup"
PROV_MC = "monte-carlo"

_TABLE_BASE = 32768
_TABLE_CAP = 1 << 20


# ---------------------------------------------------------------------------
# path simulation


@dataclass(frozen=True)
class PathParams:
    """Simulation request: start point, horizon, step, ensemble size, seed."""

    x0: float
    horizon: float
    dt: float
    paths: int
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.x0 < 1.0):
            raise DomainError(f"x0 must lie in (0, 1), got {self.x0}")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise ConfigError(f"horizon must be positive, got {self.horizon}")
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.paths < 1:
            raise ConfigError(f"path count must be >= 1, got {self.paths}")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def steps(self) -> int:
        n = int(round(self.horizon / self.dt))
        if n < 1 or abs(n * self.dt - self.horizon) > 1e-9 * max(1.0, self.horizon):
            raise TimestepError(
                f"horizon {self.horizon} is not an integer multiple of dt {self.dt}")
        return n


@dataclass(frozen=True)
class EnsembleResult:
    """Final state of a simulated ensemble.

    positions are clamped to the endpoint for absorbed paths;
    exit_time is NaN for paths still interior at the horizon;
    source_integral holds each path's accumulated running cost
    (zero if no source was supplied).
    """

    positions: np.ndarray
    source_integral: np.ndarray
    exit_time: np.ndarray
    params: PathParams

    @property
    def paths(self) -> int:
        return self.positions.size

    @property
    def absorbed_lo(self) -> float:
        exited = np.isfinite(self.exit_time)
        return float(np.mean(exited & (self.positions == 0.0)))

    @property
    def absorbed_hi(self) -> float:
        exited = np.isfinite(self.exit_time)
        return float(np.mean(exited & (self.positions == 1.0)))

    @property
    def interior_fraction(self) -> float:
        return float(np.mean(~np.isfinite(self.exit_time)))

    def mean_exit_time(self) -> float:
        """Mean exit time, counting still-interior paths at the horizon."""
        tau = np.where(np.isfinite(self.exit_time), self.exit_time,
                       self.params.horizon)
        return float(np.mean(tau))


@dataclass(frozen=True)
class PathResult:
    """One path's final state; exit_time is None if never absorbed."""

    position: float
    source_integral: float
    exit_time: float | None


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo value with its statistical error and exit bookkeeping."""

    mean: float
    stderr: float
    paths: int
    absorbed_lo: float
    absorbed_hi: float


def _cell_tables(a: PeriodicCoefficient):
    """Drift and noise-amplitude tables over one period.

    Linear interpolation on these grids keeps the table error orders of
    magnitude below Monte Carlo noise for the smooth profiles the SDE
    route accepts; piecewise profiles are rejected by a.derivative.
    """
    k = max(1, a.max_harmonic())
    n = min(_TABLE_BASE * (1 << max(0, (k - 1)).bit_length()), _TABLE_CAP)
    u = np.linspace(0.0, 1.0, n + 1)
    avals = a.value(u)
    aprime = a.derivative(u)
    return aprime, np.sqrt(2.0 * avals)


def _source_table(f: FunctionSpec | None):
    if f is None:
        return np.zeros(2)
    xg = np.linspace(0.0, 1.0, _TABLE_BASE + 1)
    return np.asarray(f(xg), dtype=float)


def _launch(a, eps, params, source, zero_noise, path_offset, n_paths):
    if not (0.0 < eps <= 1.0):
        raise DomainError(f"eps must lie in (0, 1], got {eps}")
    cap = eps * eps / 10.0
    if params.dt > cap * (1.0 + 1e-12):
        raise TimestepError(
            f"dt={params.dt:g} too coarse for the stiff drift; "
            f"need dt <= eps^2/10 = {cap:g}")
    n_steps = params.steps()
    drift_tab, sigma_tab = _cell_tables(a)
    f_tab = _source_table(source)
    numba.set_num_threads(min(worker_count(), numba.config.NUMBA_NUM_THREADS))
    xs, acc, exit_step = _kernels.simulate(
        float(params.x0), int(n_paths), int(n_steps), float(params.dt),
        1.0 / float(eps), np.uint64(params.seed), int(path_offset),
        drift_tab, sigma_tab, f_tab,
        0.0 if zero_noise else 1.0)
    exit_time = np.where(exit_step >= 0, exit_step * params.dt, np.nan)
    return xs, acc, exit_time


def simulate_paths(a: PeriodicCoefficient, eps: float, params: PathParams,
                   source: FunctionSpec | None = None,
                   zero_noise: bool = False) -> EnsembleResult:
    """Simulate the absorbed ensemble for the eps-problem coefficient.

    Path i draws from a counter-based stream keyed (seed, i), so the
    ensemble is reproducible bit for bit and independent of worker
    count.  zero_noise forces dW = 0 (a test hook).
    """
    xs, acc, exit_time = _launch(a, eps, params, source, zero_noise, 0,
                                 params.paths)
    return EnsembleResult(xs, acc, exit_time, params)


def simulate_path(a: PeriodicCoefficient, eps: float, params: PathParams,
                  path_index: int = 0,
                  source: FunctionSpec | None = None,
                  zero_noise: bool = False) -> PathResult:
    """One path of the ensemble, addressed by its index.

    Identical to path path_index of simulate_paths with the same seed,
    because streams are keyed per path.
    """
    if path_index < 0:
        raise ConfigError(f"path_index must be >= 0, got {path_index}")
    xs, acc, exit_time = _launch(a, eps, params, source, zero_noise,
                                 path_index, 1)
    et = float(exit_time[0])
    return PathResult(float(xs[0]), float(acc[0]),
                      None if math.isnan(et) else et)


def fk_estimate_u_eps(p: ProblemInstance, x: float, t: float,
                      params: PathParams,
                      exact: ExactSolution | None = None) -> MCEstimate:
    """Right-hand side of the reproducing identity, by Monte Carlo.

    Estimates E[u_eps(X_t)] + E[integral of f along the path up to
    absorption] for the ensemble started at x and run to horizon t.
    If the simulation is faithful this equals u_eps(x) itself, which
    makes the estimate a solver-independent check on the exact route
    (up to statistical error; the means use numpy's fixed-order
    pairwise reduction over path index, so results are deterministic).
    """
    eff = replace(params, x0=float(x), horizon=float(t))
    ens = simulate_paths(p.a, p.eps, eff, source=p.f)
    if exact is None:
        exact = ExactSolution(p)
    samples = exact(ens.positions) + ens.source_integral
    mean = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / math.sqrt(samples.size)) \
        if samples.size > 1 else 0.0
    return MCEstimate(mean, stderr, ens.paths, ens.absorbed_lo, ens.absorbed_hi)


# ---------------------------------------------------------------------------
# constant-coefficient heat propagator


def _check_dirichlet_grid(field: SolutionField):
    x = field.x
    if x.size < 3:
        raise ConfigError("field needs at least one interior point")
    if abs(x[0]) > 1e-12 or abs(x[-1] - 1.0) > 1e-12:
        raise ConfigError("heat propagation expects a grid spanning [0, 1]")
    dx = np.diff(x)
    if not np.allclose(dx, dx[0], rtol=1e-9, atol=1e-12):
        raise ConfigError("heat propagation expects a uniform grid")
    scale = max(1.0, float(np.max(np.abs(field.values))))
    if abs(field.values[0]) > 1e-9 * scale or abs(field.values[-1]) > 1e-9 * scale:
        raise ConfigError("heat propagation expects zero endpoint values")


def heat_propagate(field: SolutionField, abar: float, t: float) -> SolutionField:
    """Evolve a zero-boundary grid function by the constant-coefficient
    heat flow with diffusivity abar for time t.

    Spectral: sine-transform the interior values, damp mode k by
    exp(-abar (k pi)^2 t), transform back.  Exact for each grid sine
    mode, so the semigroup property holds to round-off.
    """
    if not (abar > 0.0 and math.isfinite(abar)):
        raise ConfigError(f"diffusivity must be positive, got {abar}")
    if not (t >= 0.0 and math.isfinite(t)):
        raise ConfigError(f"time must be >= 0, got {t}")
    _check_dirichlet_grid(field)
    n = field.x.size - 1
    coeffs = scipy.fft.dst(field.values[1:-1], type=1)
    k = np.arange(1, n)
    coeffs *= np.exp(-abar * (k * np.pi) ** 2 * t)
    interior = scipy.fft.idst(coeffs, type=1)
    out = np.empty(n + 1)
    out[0] = 0.0
    out[-1] = 0.0
    out[1:-1] = interior
    return SolutionField(field.x, out, PROV_HEAT)


def contraction_constant(abar: float, t: float, n: int = 4096) -> float:
    """Sup-norm loss of the heat flow on the constant-one profile.

    c = 1 - sup e^{t L} 1; positive for t > 0, and for t of order one
    it is the constant that turns the one-step inequality into a bound.
    Meaningful for t in [1, 2]; other t are allowed and simply reported.
    """
    ones = make_field(lambda x: np.ones_like(x), n, PROV_HEAT)
    prop = heat_propagate(ones, abar, t)
    return 1.0 - float(np.max(prop.values))


def dirichlet_interval_mass(x0: float, lo: float, hi: float,
                            abar: float, t: float) -> float:
    """Exact probability mass over [lo, hi] of the absorbed heat kernel
    started at x0, diffusivity abar, after time t.

    Sine-series integral: sum_k 2 e^{-abar k^2 pi^2 t} sin(k pi x0)
    (cos(k pi lo) - cos(k pi hi)) / (k pi), truncated when the damping
    factor is below 1e-18.
    """
    if not (0.0 <= lo <= hi <= 1.0):
        raise DomainError(f"interval [{lo}, {hi}] must sit inside [0, 1]")
    if not (0.0 < x0 < 1.0):
        raise DomainError(f"x0 must lie in (0, 1), got {x0}")
    if not (t > 0.0 and abar > 0.0):
        raise DomainError("needs t > 0 and abar > 0")
    kmax = int(math.ceil(math.sqrt(41.5 / (abar * math.pi**2 * t)))) + 8
    if kmax > 1_000_000:
        raise NumericalError(
            f"time {t:g} too small for the spectral mass series (needs "
            f"{kmax} modes)")
    k = np.arange(1, kmax + 1)
    damp = np.exp(-abar * (k * np.pi) ** 2 * t)
    terms = 2.0 * damp * np.sin(k * np.pi * x0) \
        * (np.cos(k * np.pi * lo) - np.cos(k * np.pi * hi)) / (k * np.pi)
    return float(np.sum(terms))


# ---------------------------------------------------------------------------
# cell-mass equality test


@dataclass(frozen=True)
class CellMassRow:
    cell_index: int
    lo: float
    hi: float
    observed: float
    expected: float
    z: float


@dataclass(frozen=True)
class CellMassReport:
    rows: tuple
    max_abs_z: float
    paths: int
    absorbed_lo: float
    absorbed_hi: float
    interior_fraction: float


def cell_mass_check(a: PeriodicCoefficient, eps: float, x: float, t: float,
                    params: PathParams) -> CellMassReport:
    """Occupation mass per lattice cell, empirical vs constant-coefficient.

    The cells are the eps-cells anchored at x that sit strictly inside
    (0, 1).  The empirical side comes from the oscillatory ensemble;
    the expected side is the absorbed heat kernel with the reciprocal-
    average diffusivity, whose cell masses the oscillatory process is
    claimed to match exactly.  Per-cell z-scores quantify agreement.
    """
    eff = replace(params, x0=float(x), horizon=float(t))
    ens = simulate_paths(a, eps, eff)
    abar = harmonic_mean(a)
    n = ens.paths
    rows = []
    kmin = -int(math.floor(x / eps + 1e-9))
    kmax = int(math.floor((1.0 - x) / eps + 1e-9))
    for kk in range(kmin, kmax + 1):
        lo = x + kk * eps
        hi = lo + eps
        if lo < 1e-12 or hi > 1.0 - 1e-12:
            continue
        observed = float(np.mean((ens.positions >= lo) & (ens.positions < hi)))
        expected = dirichlet_interval_mass(x, lo, hi, abar, t)
        se = math.sqrt(max(expected * (1.0 - expected), 1e-300) / n)
        rows.append(CellMassRow(kk, lo, hi, observed, expected,
                                (observed - expected) / se))
    if not rows:
        raise DomainError("no eps-cell anchored at x fits strictly inside (0, 1)")
    maxz = max(abs(r.z) for r in rows)
    return CellMassReport(tuple(rows), maxz, n,
                          ens.absorbed_lo, ens.absorbed_hi,
                          ens.interior_fraction)


# ---------------------------------------------------------------------------
# bootstrap: one-step inequality -> sup-norm bound


@dataclass(frozen=True)
class BootstrapResult:
    verified: bool
    implied_bound: float
    sup_phi: float
    iterations: int
    total_time: float
    contraction: float
    hypothesis_gap: float


def bootstrap_bound(phi: SolutionField, delta: float, t: float,
                    abar: float) -> BootstrapResult:
    """Turn "phi <= delta + (heat flow over t applied to phi)" into a bound.

    First checks that inequality on the grid (raising with the worst
    point if it fails), then composes the flow k = ceil(1/t) times so
    the total time lands in [1, 2), where the flow contracts the sup
    by a definite factor c.  Chaining the inequality k times gives
    sup phi <= k delta + (1 - c) sup phi, i.e. sup phi <= k delta / c.
    """
    if not (0.0 < t <= 1.0):
        raise ConfigError(f"step time must lie in (0, 1], got {t}")
    if delta < 0.0:
        raise ConfigError(f"delta must be >= 0, got {delta}")
    if not (abar > 0.0):
        raise ConfigError(f"diffusivity must be positive, got {abar}")
    _check_dirichlet_grid(phi)
    vals = phi.values
    scale = max(1.0, float(np.max(np.abs(vals))), delta)
    if float(np.min(vals)) < -1e-9 * scale:
        raise ConfigError("phi must be nonnegative")

    one_step = heat_propagate(phi, abar, t)
    gap = vals - delta - one_step.values
    worst = int(np.argmax(gap))
    max_gap = float(gap[worst])
    if max_gap > 1e-9 * scale:
        raise HypothesisViolationError(float(phi.x[worst]), max_gap)

    k = int(math.ceil(1.0 / t - 1e-12))
    flowed = phi
    ones = make_field(lambda x: np.ones_like(x), phi.x.size - 1, PROV_HEAT)
    for _ in range(k):
        flowed = heat_propagate(flowed, abar, t)
        ones = heat_propagate(ones, abar, t)
    c = 1.0 - float(np.max(ones.values))
    if not (c > 0.0):
        raise NumericalError(f"contraction constant is not positive: {c:g}")
    sup_phi = float(np.max(vals))
    implied = k * delta / c
    verified = sup_phi <= implied * (1.0 + 1e-12) + 1e-300
    return BootstrapResult(verified, implied, sup_phi, k, k * t, c, max_gap)


# ---------------------------------------------------------------------------
# measuring the one-step defect delta


@dataclass(frozen=True)
class DeltaRow:
    x: float
    source_term_mc: float
    source_term_spectral: float
    source_term_stderr: float
    endpoint_term_mc: float
    endpoint_term_spectral: float
    endpoint_term_stderr: float
    defect: float


@dataclass(frozen=True)
class DeltaEstimate:
    measured: float
    stderr_at_max: float
    analytic_bound: float
    rows: tuple
    t: float
    paths: int


def _sine_coefficients(values_interior: np.ndarray, n: int) -> np.ndarray:
    """Coefficients b_k of the discrete sine interpolant through the
    n-1 interior samples: v_j = sum_k b_k sin(pi j k / n)."""
    return scipy.fft.dst(values_interior, type=1) / n


def delta_estimate(p: ProblemInstance, t: float, params: PathParams,
                   x_points: np.ndarray | None = None) -> DeltaEstimate:
    """Measure how far the oscillatory process is from the averaged
    heat flow over horizon t, in the two terms of the reproducing
    identity, maximized over a coarse x-grid.

    Per point x: the Monte Carlo running-cost term is compared with
    the spectral value of the time-integrated averaged flow applied to
    the source, and the Monte Carlo endpoint term with the averaged
    flow applied to the oscillatory solution itself.  The sum of the
    two absolute gaps, maximized over x, estimates the defect that the
    bootstrap argument consumes.  Also returns the a priori bound
    eps (sup|f| + sup|f'|) + eps (sup|u'| + sup|u_eps'|).
    """
    if x_points is None:
        x_points = np.linspace(0.1, 0.9, 17)
    x_points = np.asarray(x_points, dtype=float)
    abar = harmonic_mean(p.a)
    exact = ExactSolution(p)
    hom = HomogenizedSolution(p.a, p.f)

    n = max(4096, 32 * p.cell_count())
    n = min(n, 65536)
    xg = np.arange(n + 1) / n
    f_hat = _sine_coefficients(np.asarray(p.f(xg[1:-1]), dtype=float), n)
    u_hat = _sine_coefficients(np.asarray(exact(xg[1:-1]), dtype=float), n)
    k = np.arange(1, n)
    lam = abar * (k * np.pi) ** 2
    sines = np.sin(np.pi * np.outer(x_points, k))
    t1_spec = sines @ (f_hat * (1.0 - np.exp(-lam * t)) / lam)
    t2_spec = sines @ (u_hat * np.exp(-lam * t))

    rows = []
    for i, xi in enumerate(x_points):
        eff = replace(params, x0=float(xi), horizon=float(t))
        ens = simulate_paths(p.a, p.eps, eff, source=p.f)
        m = ens.paths
        t1_mc = float(np.mean(ens.source_integral))
        se1 = float(np.std(ens.source_integral, ddof=1) / math.sqrt(m))
        evals = exact(ens.positions)
        t2_mc = float(np.mean(evals))
        se2 = float(np.std(evals, ddof=1) / math.sqrt(m))
        defect = abs(t1_mc - t1_spec[i]) + abs(t2_mc - t2_spec[i])
        rows.append(DeltaRow(float(xi), t1_mc, float(t1_spec[i]), se1,
                             t2_mc, float(t2_spec[i]), se2, defect))

    worst = max(range(len(rows)), key=lambda j: rows[j].defect)
    measured = rows[worst].defect
    se_max = rows[worst].source_term_stderr + rows[worst].endpoint_term_stderr

    dense = np.linspace(0.0, 1.0, 20001)
    sup_f = float(np.max(np.abs(p.f(dense))))
    sup_fp = float(np.max(np.abs(p.f.derivative()._eval(dense))))
    sup_up = float(np.max(np.abs(hom.derivative(dense))))
    sup_uep = float(np.max(np.abs(exact.derivative(dense))))
    bound = p.eps * (sup_f + sup_fp) + p.eps * (sup_up + sup_uep)

    return DeltaEstimate(measured, se_max, bound, tuple(rows),
                         float(t), params.paths)
