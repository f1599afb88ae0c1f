"""Epsilon-sweep harness and log-log rate estimation.

Runs one problem instance per ladder value of eps, collects sup-errors for
each requested comparison variant, and fits error ~ C * eps^rate by least
squares in log-log coordinates.  Sweeps also settle the corrector sign
empirically: both signs are measured and the one reaching the quadratic
rate is recorded in the report and used for the corrected entry.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .averaging import KIND_CORRECTED, ErrorProbe, ErrorVariant
from .errors import ConfigError, DegenerateFitError, Homog1dError
from .funcspec import FunctionSpec, PeriodicCoefficient
from .homsolver import ProblemInstance
from .runtime import worker_count

DEFAULT_EPS_LADDER = (1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128, 1 / 256)
EXACT_FLOOR = 1e-13
RATE_TARGET = 1.85


@dataclass(frozen=True)
class RateFit:
    """Least-squares power law: log(error) = rate * log(eps) + intercept."""

    rate: float
    intercept: float
    max_residual: float


def fit_rate(points) -> tuple[float, float, float]:
    """Fit (eps, error) pairs to a power law; returns (rate, intercept, residual).

    Points with error <= 1e-13 carry no rate information (the variant is
    exact there) and are dropped before fitting; fewer than three positive
    points left is a degenerate fit.
    """
    pts = [(float(e), float(err)) for e, err in points]
    for e, err in pts:
        if e <= 0.0:
            raise ConfigError(f"eps values must be positive, got {e}")
        if err < 0.0:
            raise ConfigError(f"errors must be >= 0, got {err}")
    kept = [(e, err) for e, err in pts if err > EXACT_FLOOR]
    if len(kept) < 3:
        raise DegenerateFitError(
            f"rate fit needs >= 3 points with error > {EXACT_FLOOR:g}; "
            f"have {len(kept)} of {len(pts)}")
    log_e = np.log([e for e, _ in kept])
    log_err = np.log([err for _, err in kept])
    design = np.column_stack((log_e, np.ones_like(log_e)))
    coef, *_ = np.linalg.lstsq(design, log_err, rcond=None)
    rate, intercept = float(coef[0]), float(coef[1])
    residual = float(np.max(np.abs(log_err - design @ coef)))
    return rate, intercept, residual


@dataclass(frozen=True)
class VariantResult:
    """Sweep outcome for one comparison variant."""

    variant: ErrorVariant
    points: tuple  # ((eps, sup_error), ...) with eps strictly decreasing
    fit: RateFit | None  # None when the variant is exact on the whole ladder
    exact: bool

    @property
    def rate_label(self) -> str:
        return "exact" if self.exact else f"{self.fit.rate:.6g}"


@dataclass(frozen=True)
class ConvergenceReport:
    """All variants of one instance measured over one eps ladder."""

    instance: str
    results: tuple  # (VariantResult, ...)
    corrected_sign: int | None

    def __post_init__(self):
        for r in self.results:
            eps = [e for e, _ in r.points]
            if any(b >= a for a, b in zip(eps, eps[1:])):
                raise ConfigError("eps values must be strictly decreasing")
            for e in eps:
                if abs(round(1.0 / e) - 1.0 / e) > 1e-9:
                    raise ConfigError(f"1/eps must be an integer, got eps={e}")
            if any(err < 0.0 for _, err in r.points):
                raise ConfigError("sup-errors must be >= 0")

    def result_for(self, kind: str) -> VariantResult:
        for r in self.results:
            if r.variant.kind == kind:
                return r
        raise KeyError(f"no {kind!r} variant in this report")

    def error_rows(self):
        """(variant, eps, sup_error) rows, variants in sweep order."""
        rows = []
        for r in self.results:
            for e, err in r.points:
                rows.append((str(r.variant), e, err))
        return rows

    def summary_rows(self):
        """(variant, rate, intercept, residual, sign) rows."""
        rows = []
        for r in self.results:
            sign = r.variant.sign if r.variant.kind == KIND_CORRECTED else ""
            if r.exact:
                rows.append((str(r.variant), "exact", "", "", sign))
            else:
                rows.append((str(r.variant), r.fit.rate, r.fit.intercept,
                             r.fit.max_residual, sign))
        return rows


def _probe_for_eps(a, f, eps):
    try:
        p = ProblemInstance(a, f, eps)
        return ErrorProbe(p, round(8.0 / eps))
    except Homog1dError as exc:
        raise type(exc)(f"sweep instance eps={eps}: {exc}") from exc


def _fit_or_exact(points):
    if all(err <= EXACT_FLOOR for _, err in points):
        return None, True
    rate, intercept, residual = fit_rate(points)
    return RateFit(rate, intercept, residual), False


def sweep(a: PeriodicCoefficient, f: FunctionSpec, eps_list=DEFAULT_EPS_LADDER,
          variants=(ErrorVariant.raw(),)) -> ConvergenceReport:
    """Measure sup-errors over the eps ladder and fit per-variant rates.

    Instances run concurrently (bounded by the worker budget); the report
    is assembled in decreasing-eps order regardless of completion order.
    A corrected variant with sign None is calibrated here: both signs are
    fitted and the one reaching rate >= 1.85 (the better one on a tie) is
    reported.
    """
    eps_ladder = sorted({float(e) for e in eps_list}, reverse=True)
    if not eps_ladder:
        raise ConfigError("eps_list must be nonempty")
    variants = tuple(variants)
    if not variants:
        raise ConfigError("variants must be nonempty")

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        probes = list(pool.map(lambda e: _probe_for_eps(a, f, e), eps_ladder))

    results = []
    corrected_sign = None
    for variant in variants:
        if variant.kind == KIND_CORRECTED and variant.sign is None:
            candidates = []
            for sign in (-1, 1):
                signed = ErrorVariant.corrected(sign)
                pts = tuple((e, pr.sup(signed)) for e, pr in zip(eps_ladder, probes))
                fit, exact = _fit_or_exact(pts)
                rate = np.inf if exact else fit.rate
                candidates.append((signed, pts, fit, exact, rate))
            hits = [c for c in candidates if c[4] >= RATE_TARGET]
            best = max(hits or candidates, key=lambda c: c[4])
            signed, pts, fit, exact, _ = best
            corrected_sign = signed.sign
            results.append(VariantResult(signed, pts, fit, exact))
            continue
        pts = tuple((e, pr.sup(variant)) for e, pr in zip(eps_ladder, probes))
        fit, exact = _fit_or_exact(pts)
        if variant.kind == KIND_CORRECTED:
            corrected_sign = variant.sign
        results.append(VariantResult(variant, pts, fit, exact))

    instance = f"a: {a!r}, f: {f!r}"
    return ConvergenceReport(instance, tuple(results), corrected_sign)


def calibrate_sign(a: PeriodicCoefficient, f: FunctionSpec,
                   eps_list=DEFAULT_EPS_LADDER) -> int:
    """Corrector sign reaching the quadratic rate for this coefficient/source."""
    report = sweep(a, f, eps_list, (ErrorVariant.corrected(),))
    return report.corrected_sign
