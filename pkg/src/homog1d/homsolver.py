"""Two-point Dirichlet problem -(a(x/eps) u')' = f on (0, 1) in closed form.

Integrating the equation once gives the constant flux
a(x/eps) u'(x) + int_0^x f = c_eps, so

    u_eps(x) = int_0^x (1/a)(y/eps) (c_eps - F(y)) dy,
    c_eps    = abar * int_0^1 (1/a)(x/eps) F(x) dx,      F(y) = int_0^y f,

with abar = (int_0^1 1/a)^(-1) the harmonic mean; u_eps(1) = 0 follows from
the choice of c_eps.  The homogenized limit solves the same problem with the
constant abar:  u(x) = (c0 x - F2(x)) / abar, c0 = F2(1), F2' = F.

Everything here is quadrature over eps-aligned cells plus the exact
antiderivatives of f; the independent check is a conservative
finite-difference scheme with harmonic-mean face coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import EpsilonError, NumericalError
from .funcspec import FunctionSpec, PeriodicCoefficient, PiecewiseConstant, PiecewisePolynomial
from .quadrature import (
    DEFAULT_ORDER,
    PrefixIntegral,
    eps_cell_edges,
    integrate_edges,
)

PROV_EXACT = "exact-formula"
PROV_HOM = "homogenized"
PROV_FD = "finite-difference"
PROV_AVG = "moving-average"


def default_grid_size(eps: float) -> int:
    """Default sampling resolution: at least 8 points per cell, at least 1000."""
    return max(1000, int(round(8.0 / eps)))


@dataclass(frozen=True)
class SolutionField:
    """Values on a grid, tagged with how they were produced."""

    x: np.ndarray
    values: np.ndarray
    provenance: str

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.shape != v.shape or x.ndim != 1:
            raise NumericalError("grid and values must be 1-d arrays of equal length")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)


def make_field(fn, n: int, provenance: str, zero_endpoints: bool = True) -> SolutionField:
    """Sample a callable on the uniform grid i/n; Dirichlet fields get their
    endpoint values pinned to exactly zero."""
    x = np.arange(n + 1, dtype=float) / n
    v = np.asarray(fn(x), dtype=float).copy()
    if zero_endpoints:
        v[0] = 0.0
        v[-1] = 0.0
    return SolutionField(x, v, provenance)


class ProblemInstance:
    """One oscillatory problem: coefficient, datum, and cell width eps.

    1/eps must be a positive integer (the lattice fits the unit interval);
    relaxed=True admits other eps but tags the instance as outside the
    convergence hypotheses.  hypothesis_notes collects such tags.
    """

    def __init__(self, a: PeriodicCoefficient, f: FunctionSpec, eps: float,
                 relaxed: bool = False):
        if not (0.0 < eps <= 1.0):
            raise EpsilonError(f"eps must lie in (0, 1], got {eps}")
        inv = 1.0 / eps
        notes = []
        if abs(inv - round(inv)) > 1e-9:
            if not relaxed:
                raise EpsilonError(
                    f"1/eps = {inv:.6g} is not an integer; pass relaxed=True to force")
            notes.append("eps is not an inverse integer: convergence guarantees "
                         "do not apply")
        if isinstance(a.profile, (PiecewiseConstant, PiecewisePolynomial)):
            notes.append("piecewise coefficient profile: outside smoothness hypotheses")
        self.a = a
        self.f = f
        self.eps = float(eps)
        self.relaxed = bool(relaxed)
        self.hypothesis_notes = tuple(notes)

    def cell_count(self) -> int:
        return int(round(1.0 / self.eps))

    def __repr__(self):
        return f"ProblemInstance(eps={self.eps!r}, notes={self.hypothesis_notes!r})"


# ---------------------------------------------------------------------------
# coefficient functionals


def _reciprocal_edges(a: PeriodicCoefficient, lo: float, hi: float) -> np.ndarray:
    return eps_cell_edges(1.0, lo, hi, a.profile_breakpoints(), a.panels_per_cell())


def harmonic_mean(a: PeriodicCoefficient) -> float:
    """abar = (int_0^1 1/a)^(-1); exact when 1/a has a closed form."""
    rp = a.reciprocal_profile()
    if rp is not None:
        return 1.0 / rp.definite_integral(0.0, 1.0)
    return 1.0 / integrate_edges(a.reciprocal, _reciprocal_edges(a, 0.0, 1.0))


def moment_m1(a: PeriodicCoefficient) -> float:
    """M1 = int_0^1 (1/a)(y) (y - 1/2) dy, the first reciprocal moment."""
    return integrate_edges(lambda y: a.reciprocal(y) * (y - 0.5),
                           _reciprocal_edges(a, 0.0, 1.0))


def reciprocal_prefix(a: PeriodicCoefficient, y):
    """int_0^y (1/a)(z) dz with 1/a extended 1-periodically, any real y."""
    ys = np.asarray(y, dtype=float)
    rp = a.reciprocal_profile()
    if rp is not None:
        anti = rp.antiderivative()
        total = anti(1.0)
        n = np.floor(ys)
        out = n * total + anti(ys - n)
    else:
        lo = float(min(np.min(ys), 0.0)) - 1e-12
        hi = float(max(np.max(ys), 0.0)) + 1e-12
        table = PrefixIntegral(a.reciprocal, _reciprocal_edges(a, lo, hi))
        base = table(0.0)
        out = table(ys) - base
    return float(out) if np.ndim(y) == 0 else out


def moment_m2(a: PeriodicCoefficient) -> float:
    """M2 = int_{-1/2}^{1/2} int_0^y (1/a)(z) dz dy (periodic extension)."""
    rp = a.reciprocal_profile()
    if rp is not None:
        inner = lambda y: reciprocal_prefix(a, y)
    else:
        table = PrefixIntegral(a.reciprocal, _reciprocal_edges(a, -0.5 - 1e-12, 0.5 + 1e-12))
        base = table(0.0)
        inner = lambda y: table(y) - base
    edges = eps_cell_edges(1.0, -0.5, 0.5,
                           np.concatenate((a.profile_breakpoints(), [0.0])),
                           a.panels_per_cell())
    return integrate_edges(inner, edges)


# ---------------------------------------------------------------------------
# solutions


def _aligned_edges(p: ProblemInstance, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    return eps_cell_edges(p.eps, lo, hi, p.a.profile_breakpoints(),
                          p.a.panels_per_cell())


def c_eps(p: ProblemInstance) -> float:
    """Flux constant: abar * int_0^1 (1/a)(x/eps) F(x) dx."""
    F = p.f.antiderivative()
    abar = harmonic_mean(p.a)
    val = integrate_edges(lambda x: p.a.scaled_reciprocal(x, p.eps) * F._eval(x),
                          _aligned_edges(p))
    return abar * val


def c_eps_asymptotic(a: PeriodicCoefficient, f: FunctionSpec) -> tuple[float, float]:
    """(c0, c1) in c_eps = c0 + eps c1 + O(eps^2):
    c0 = int_0^1 F, c1 = abar * M1 * int_0^1 f."""
    F2 = f.antiderivative().antiderivative()
    c0 = F2(1.0)
    c1 = harmonic_mean(a) * moment_m1(a) * f.definite_integral(0.0, 1.0)
    return c0, c1


class HomogenizedSolution:
    """u(x) = (c0 x - F2(x)) / abar, the constant-coefficient limit."""

    def __init__(self, a, f: FunctionSpec):
        self.abar = a if isinstance(a, (int, float)) else harmonic_mean(a)
        self.f = f
        self._F = f.antiderivative()
        self._F2 = self._F.antiderivative()
        self.c0 = self._F2(1.0)

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        out = (self.c0 * xs - self._F2._eval(xs)) / self.abar
        return float(out) if np.ndim(x) == 0 else out

    def derivative(self, x):
        xs = np.asarray(x, dtype=float)
        out = (self.c0 - self._F._eval(xs)) / self.abar
        return float(out) if np.ndim(x) == 0 else out


class ExactSolution:
    """u_eps via prefix tables of (1/a)(y/eps)(c_eps - F(y)) over the lattice."""

    def __init__(self, p: ProblemInstance, order: int = DEFAULT_ORDER):
        self.problem = p
        self.abar = harmonic_mean(p.a)
        self._F = p.f.antiderivative()
        self.c = c_eps(p)
        self.edges = _aligned_edges(p)
        integrand = lambda y: p.a.scaled_reciprocal(y, p.eps) * (self.c - self._F._eval(y))
        self._table = PrefixIntegral(integrand, self.edges, order)

    def __call__(self, x):
        return self._table(x)

    def derivative(self, x):
        """u_eps'(x) = (1/a)(x/eps) (c_eps - F(x)), exact."""
        xs = np.asarray(x, dtype=float)
        out = self.problem.a.scaled_reciprocal(xs, self.problem.eps) \
            * (self.c - self._F._eval(xs))
        return float(out) if np.ndim(x) == 0 else out

    def flux(self, x):
        """a(x/eps) u_eps'(x) + F(x); constant = c_eps when all is well."""
        xs = np.asarray(x, dtype=float)
        out = self.problem.a.scaled_value(xs, self.problem.eps) * self.derivative(xs) \
            + self._F._eval(xs)
        return float(out) if np.ndim(x) == 0 else out


def u_eps(p: ProblemInstance, x):
    """Exact oscillatory solution at x (scalar or array)."""
    return ExactSolution(p)(x)


def u_hom(a, f: FunctionSpec, x):
    """Homogenized solution at x; `a` is a PeriodicCoefficient or abar itself."""
    return HomogenizedSolution(a, f)(x)


def solution_fields(p: ProblemInstance, n: int | None = None):
    """(u_eps, u_hom) sampled on the default uniform grid."""
    if n is None:
        n = default_grid_size(p.eps)
    ex = ExactSolution(p)
    hom = HomogenizedSolution(p.a, p.f)
    return (make_field(ex, n, PROV_EXACT), make_field(hom, n, PROV_HOM))


# ---------------------------------------------------------------------------
# independent oracle


def fd_oracle(p: ProblemInstance, n: int) -> SolutionField:
    """Conservative second-order scheme on the uniform n-cell grid.

    Face coefficients are harmonic means of a(x/eps) over each inter-node
    interval (computed by aligned quadrature), which keeps the scheme
    second-order for oscillatory coefficients; the tridiagonal system is
    solved by banded LU.
    """
    if n < 2:
        raise NumericalError("fd_oracle needs at least two cells")
    x = np.arange(n + 1, dtype=float) / n
    h = 1.0 / n
    table = PrefixIntegral(lambda y: p.a.scaled_reciprocal(y, p.eps),
                           _aligned_edges(p))
    prefix = table(x)
    a_face = h / np.diff(prefix)  # harmonic mean over [x_i, x_{i+1}]
    rhs = p.f(x[1:-1])
    if np.ndim(rhs) == 0:
        rhs = np.full(n - 1, float(rhs))
    diag = (a_face[:-1] + a_face[1:]) / (h * h)
    off = -a_face[1:-1] / (h * h)
    ab = np.zeros((3, n - 1))
    ab[0, 1:] = off
    ab[1, :] = diag
    ab[2, :-1] = off
    try:
        interior = scipy.linalg.solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - a > 0 forbids this
        raise NumericalError(f"singular finite-difference system: {exc}") from exc
    v = np.concatenate(([0.0], interior, [0.0]))
    return SolutionField(x, v, PROV_FD)
