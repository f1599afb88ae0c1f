"""Moving-average operator, affine corrector, and sup-norm error metrics.

The window average (1/eps) int_{x-eps/2}^{x+eps/2} u(y) dy kills the O(eps)
oscillation of u_eps; what survives is an affine function of x (built from
the first reciprocal moments of the coefficient) plus an O(eps^2) tail.
This module provides the operator, the affine corrector with both sign
choices, the predicate for when the corrector vanishes identically, and
grid sup-errors for the raw / averaged / corrected comparison variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, DomainError
from .funcspec import FunctionSpec, PeriodicCoefficient
from .homsolver import (
    ExactSolution,
    HomogenizedSolution,
    ProblemInstance,
    default_grid_size,
    moment_m1,
    moment_m2,
)
from .quadrature import DEFAULT_ORDER, PrefixIntegral, eps_cell_edges, integrate_edges

VANISH_TOL = 1e-12

KIND_RAW = "raw"
KIND_AVERAGED = "averaged"
KIND_CORRECTED = "corrected"
_KINDS = (KIND_RAW, KIND_AVERAGED, KIND_CORRECTED)


@dataclass(frozen=True)
class ErrorVariant:
    """One way of comparing the oscillatory solution with its limit.

    kind "raw" measures |u_eps - u|, "averaged" measures the window-averaged
    difference, and "corrected" additionally adds sign * corrector.  Only the
    corrected kind carries a sign; sign None means "calibrate during a sweep".
    """

    kind: str
    sign: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown error variant kind {self.kind!r}")
        if self.kind == KIND_CORRECTED:
            if self.sign not in (None, 1, -1):
                raise ConfigError("corrected variant sign must be +1, -1, or None")
        elif self.sign is not None:
            raise ConfigError(f"{self.kind} variant does not take a sign")

    @classmethod
    def raw(cls) -> "ErrorVariant":
        return cls(KIND_RAW)

    @classmethod
    def averaged(cls) -> "ErrorVariant":
        return cls(KIND_AVERAGED)

    @classmethod
    def corrected(cls, sign: int | None = None) -> "ErrorVariant":
        return cls(KIND_CORRECTED, sign)

    @property
    def label(self) -> str:
        return self.kind

    def __str__(self):
        if self.kind == KIND_CORRECTED and self.sign is not None:
            return f"corrected({self.sign:+d})"
        return self.kind


def _window_edges(x: float, eps: float, breakpoints) -> np.ndarray:
    # split the window at cell boundaries and half-cells (plus any profile
    # breakpoints, scaled), so each Gauss piece sees a smooth integrand
    marks = np.concatenate((np.atleast_1d(np.asarray(breakpoints, dtype=float)), [0.5]))
    return eps_cell_edges(eps, x - eps / 2.0, x + eps / 2.0, marks)


def moving_average(u, x: float, eps: float, *, breakpoints=(),
                   order: int = DEFAULT_ORDER) -> float:
    """Window average (1/eps) int_{x-eps/2}^{x+eps/2} u(y) dy.

    The window must sit inside [0, 1]; pass the coefficient's scaled
    breakpoints when u is only piecewise smooth.
    """
    if eps <= 0.0:
        raise ConfigError("eps must be positive")
    tol = 1e-12
    if x < eps / 2.0 - tol or x > 1.0 - eps / 2.0 + tol:
        raise DomainError(
            f"window around x={x} leaves [0, 1]; need eps/2 <= x <= 1 - eps/2")
    x = min(max(x, eps / 2.0), 1.0 - eps / 2.0)
    return integrate_edges(u, _window_edges(x, eps, breakpoints), order) / eps


def corrector_coefficients(a: PeriodicCoefficient, f: FunctionSpec) -> tuple[float, float]:
    """(slope, offset) with corrector(x) = eps * (slope * x + offset).

    slope = (int_0^1 f) * M1 and offset = (int_0^1 int_0^y f) * M2, where
    M1, M2 are the reciprocal moments of the coefficient; both are
    eps-independent, which is why the corrector scales linearly in eps.
    """
    F = f.antiderivative()
    F2 = F.antiderivative()
    int_f = f.definite_integral(0.0, 1.0)
    double_f = (F2(1.0) - F2(0.0)) - F(0.0)
    return int_f * moment_m1(a), double_f * moment_m2(a)


def corrector(a: PeriodicCoefficient, f: FunctionSpec, eps: float, x) -> float:
    """Affine corrector at x for the given coefficient / source / eps."""
    if eps <= 0.0:
        raise ConfigError("eps must be positive")
    slope, offset = corrector_coefficients(a, f)
    xs = np.asarray(x, dtype=float)
    out = eps * (slope * xs + offset)
    return float(out) if np.ndim(x) == 0 else out


def corrector_vanishes(a: PeriodicCoefficient, f: FunctionSpec) -> bool:
    """True when both affine coefficients of the corrector are ~zero.

    Holds for any f when the coefficient is symmetric (both reciprocal
    moments vanish) and for sources with int f = 0 and int int f = 0
    (two linear constraints), whatever the coefficient.
    """
    slope, offset = corrector_coefficients(a, f)
    return abs(slope) <= VANISH_TOL and abs(offset) <= VANISH_TOL


class ErrorProbe:
    """Pointwise error variants for one instance on one uniform grid.

    Solves the instance once, window-averages once, and serves every
    variant from the cached arrays; the sup grid is the uniform N-grid
    restricted to [eps, 1 - eps] (the estimates exclude the boundary
    layer).
    """

    def __init__(self, p: ProblemInstance, n: int, order: int = DEFAULT_ORDER):
        n = int(n)
        if n < round(8.0 / p.eps):
            raise ConfigError(
                f"grid size {n} does not resolve eps={p.eps}; need N >= 8/eps")
        self.problem = p
        self.n = n
        self.order = order
        grid = np.linspace(0.0, 1.0, n + 1)
        tol = 1e-12
        keep = (grid >= p.eps - tol) & (grid <= 1.0 - p.eps + tol)
        self.x = grid[keep]
        self._exact = ExactSolution(p, order)
        self._hom = HomogenizedSolution(p.a, p.f)

    @cached_property
    def u_eps(self) -> np.ndarray:
        return self._exact(self.x)

    @cached_property
    def u_hom(self) -> np.ndarray:
        return self._hom(self.x)

    @cached_property
    def averaged(self) -> np.ndarray:
        """Window average of u_eps at every grid point, via one prefix table."""
        p = self.problem
        marks = np.concatenate((p.a.profile_breakpoints(), [0.5]))
        edges = eps_cell_edges(p.eps, 0.0, 1.0, marks, p.a.panels_per_cell())
        table = PrefixIntegral(self._exact, edges, self.order)
        half = p.eps / 2.0
        return (table(self.x + half) - table(self.x - half)) / p.eps

    @cached_property
    def corrector_values(self) -> np.ndarray:
        p = self.problem
        slope, offset = corrector_coefficients(p.a, p.f)
        return p.eps * (slope * self.x + offset)

    def errors(self, variant: ErrorVariant) -> np.ndarray:
        if variant.kind == KIND_RAW:
            return np.abs(self.u_eps - self.u_hom)
        if variant.kind == KIND_AVERAGED:
            return np.abs(self.averaged - self.u_hom)
        if variant.sign is None:
            raise ConfigError("corrected variant needs a resolved sign here; "
                              "use a sweep to calibrate it")
        return np.abs(self.averaged + variant.sign * self.corrector_values - self.u_hom)

    def sup(self, variant: ErrorVariant) -> float:
        return float(np.max(self.errors(variant)))


def sup_error(p: ProblemInstance, variant: ErrorVariant,
              n: int | None = None) -> float:
    """Max pointwise error of the variant over the N-grid inside [eps, 1-eps].

    n defaults to the solver's resolution choice for p.eps.
    """
    if n is None:
        n = default_grid_size(p.eps)
    return ErrorProbe(p, n).sup(variant)
