"""Closed-form scalar functions on [0, 1] and 1-periodic coefficients.

Every function the solvers touch (the right-hand side f, the coefficient
profile, their antiderivatives) is one of a small set of variants with exact
calculus:

    Constant(c)
    Polynomial(c0 + c1 x + ...)
    TrigSeries(mean + sum_k a_k cos(k w x) + b_k sin(k w x)), w = 2 pi default
    PiecewiseConstant(values on [b_i, b_{i+1}))

The set is closed under antidifferentiation: a trig series with nonzero mean
antidifferentiates to PolyTrig (linear part + pure oscillation), a piecewise
constant to PiecewisePolynomial.  Antiderivatives are normalized to vanish at
x = 0, so definite integrals are exact evaluations, never quadrature.

PeriodicCoefficient wraps a profile into the 1-periodic diffusion coefficient
a(x); evaluation at any real x uses x mod 1.  Because 1/a is what enters every
solution formula, the profile may describe either a itself or 1/a directly
(profile_is_reciprocal=True keeps reciprocal moments closed-form).  Admission
requires a certified positive lower bound on a.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    NonDifferentiableProfileError,
    NonPositiveBoundError,
)

TWO_PI = 2.0 * math.pi

# grid size for the certified-extremum scan; the returned bound is
# grid_min - M2 h^2 / 8 with M2 a coefficient bound on |g''|, so the bound is
# tight to ~1e-13 * M2 (interior minima are critical points, endpoints are
# grid points).
_EXTREMUM_GRID = 1_000_000


def _ro(a):
    out = np.asarray(a, dtype=float)
    out.setflags(write=False)
    return out


class FunctionSpec:
    """Base class; subclasses implement exact evaluation and calculus."""

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        out = self._eval(xs)
        return float(out) if np.ndim(x) == 0 else out

    def _eval(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def antiderivative(self) -> "FunctionSpec":
        """Antiderivative F with F(0) = 0, in a variant of this module."""
        raise NotImplementedError

    def derivative(self) -> "FunctionSpec":
        raise NotImplementedError

    def definite_integral(self, lo: float, hi: float) -> float:
        """Exact integral over [lo, hi] via the closed-form antiderivative."""
        if lo > hi:
            raise DomainError(f"integration bounds reversed: [{lo}, {hi}]")
        f = self.antiderivative()
        return f(hi) - f(lo)


class Constant(FunctionSpec):
    def __init__(self, value: float):
        self.value = float(value)

    def _eval(self, xs):
        return np.full_like(xs, self.value)

    def antiderivative(self):
        return Polynomial([0.0, self.value])

    def derivative(self):
        return Constant(0.0)

    def __repr__(self):
        return f"Constant({self.value!r})"


class Polynomial(FunctionSpec):
    """Coefficients ascending: coeffs[k] multiplies x**k."""

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ConfigError("polynomial needs a non-empty 1-d coefficient list")
        self.coeffs = _ro(c)

    def _eval(self, xs):
        return np.polynomial.polynomial.polyval(xs, self.coeffs)

    def antiderivative(self):
        k = np.arange(1, self.coeffs.size + 1, dtype=float)
        return Polynomial(np.concatenate(([0.0], self.coeffs / k)))

    def derivative(self):
        if self.coeffs.size == 1:
            return Constant(0.0)
        k = np.arange(1, self.coeffs.size, dtype=float)
        return Polynomial(self.coeffs[1:] * k)

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()!r})"


class TrigSeries(FunctionSpec):
    """mean + sum_k cos_coeffs[k-1] cos(k w x) + sin_coeffs[k-1] sin(k w x).

    Base frequency w defaults to 2 pi (period 1, the right lattice for
    coefficient profiles); data such as sin(pi x) use base_frequency=pi.
    """

    def __init__(self, mean: float, cos_coeffs=(), sin_coeffs=(), base_frequency: float = TWO_PI):
        self.mean = float(mean)
        cos = np.asarray(cos_coeffs, dtype=float).reshape(-1)
        sin = np.asarray(sin_coeffs, dtype=float).reshape(-1)
        # keep the two harmonics lists the same length (zero-padded)
        n = max(cos.size, sin.size)
        self.cos_coeffs = _ro(np.concatenate((cos, np.zeros(n - cos.size))))
        self.sin_coeffs = _ro(np.concatenate((sin, np.zeros(n - sin.size))))
        self.base_frequency = float(base_frequency)
        if self.base_frequency <= 0.0:
            raise ConfigError("base frequency must be positive")

    @property
    def max_harmonic(self) -> int:
        return max(self.cos_coeffs.size, self.sin_coeffs.size)

    def _eval(self, xs):
        w = self.base_frequency
        out = np.full_like(xs, self.mean)
        for k, a in enumerate(self.cos_coeffs, start=1):
            if a != 0.0:
                out += a * np.cos(k * w * xs)
        for k, b in enumerate(self.sin_coeffs, start=1):
            if b != 0.0:
                out += b * np.sin(k * w * xs)
        return out

    def antiderivative(self):
        w = self.base_frequency
        n = self.max_harmonic
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.cos_coeffs.size] = self.cos_coeffs
        b[: self.sin_coeffs.size] = self.sin_coeffs
        k = np.arange(1, n + 1, dtype=float)
        # int a cos = a sin/(kw); int b sin = b (1 - cos)/(kw)
        new_sin = a / (k * w) if n else a
        new_cos = -b / (k * w) if n else b
        const = float(np.sum(b / (k * w))) if n else 0.0
        pure = TrigSeries(const, new_cos, new_sin, w)
        if self.mean == 0.0:
            return pure
        return PolyTrig(Polynomial([const, self.mean]),
                        TrigSeries(0.0, new_cos, new_sin, w))

    def derivative(self):
        w = self.base_frequency
        n = self.max_harmonic
        if n == 0:
            return TrigSeries(0.0, (), (), w)
        a = np.zeros(n)
        b = np.zeros(n)
        a[: self.cos_coeffs.size] = self.cos_coeffs
        b[: self.sin_coeffs.size] = self.sin_coeffs
        k = np.arange(1, n + 1, dtype=float)
        return TrigSeries(0.0, b * k * w, -a * k * w, w)

    def __repr__(self):
        return (f"TrigSeries(mean={self.mean!r}, cos={self.cos_coeffs.tolist()!r}, "
                f"sin={self.sin_coeffs.tolist()!r}, w={self.base_frequency!r})")


class PolyTrig(FunctionSpec):
    """Polynomial part plus zero-mean trig part; closed under calculus.

    Produced by antidifferentiating a trig series with nonzero mean; not a
    public configuration variant.
    """

    def __init__(self, poly: Polynomial, trig: TrigSeries):
        if trig.mean != 0.0:
            poly = Polynomial(np.concatenate(([poly.coeffs[0] + trig.mean],
                                              poly.coeffs[1:])))
            trig = TrigSeries(0.0, trig.cos_coeffs, trig.sin_coeffs,
                              trig.base_frequency)
        self.poly = poly
        self.trig = trig

    def _eval(self, xs):
        return self.poly._eval(xs) + self.trig._eval(xs)

    def antiderivative(self):
        pa = self.poly.antiderivative()
        ta = self.trig.antiderivative()  # TrigSeries, mean = const
        return PolyTrig(pa, ta)

    def derivative(self):
        return PolyTrig(_as_polynomial(self.poly.derivative()), self.trig.derivative())

    def __repr__(self):
        return f"PolyTrig({self.poly!r}, {self.trig!r})"


def _as_polynomial(g: FunctionSpec) -> Polynomial:
    if isinstance(g, Polynomial):
        return g
    if isinstance(g, Constant):
        return Polynomial([g.value])
    raise TypeError(f"expected polynomial-like, got {type(g).__name__}")


class PiecewiseConstant(FunctionSpec):
    """values[i] on [breakpoints[i], breakpoints[i+1]); breakpoints span [0, 1]."""

    def __init__(self, breakpoints, values):
        b = np.asarray(breakpoints, dtype=float)
        v = np.asarray(values, dtype=float)
        if b.ndim != 1 or v.ndim != 1 or b.size != v.size + 1:
            raise ConfigError("need len(breakpoints) == len(values) + 1")
        if not np.all(np.diff(b) > 0):
            raise ConfigError("breakpoints must be strictly ascending")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise ConfigError("breakpoints must start at 0 and end at 1")
        self.breakpoints = _ro(b)
        self.values = _ro(v)

    def _eval(self, xs):
        idx = np.searchsorted(self.breakpoints, xs, side="right") - 1
        idx = np.clip(idx, 0, self.values.size - 1)
        return self.values[idx]

    def antiderivative(self):
        widths = np.diff(self.breakpoints)
        acc = np.concatenate(([0.0], np.cumsum(self.values * widths)))[:-1]
        pieces = [Polynomial([acc[i] - self.values[i] * self.breakpoints[i], self.values[i]])
                  for i in range(self.values.size)]
        return PiecewisePolynomial(self.breakpoints, pieces)

    def derivative(self):
        raise NonDifferentiableProfileError(
            "piecewise-constant profile has no pointwise derivative")

    def __repr__(self):
        return (f"PiecewiseConstant({self.breakpoints.tolist()!r}, "
                f"{self.values.tolist()!r})")


class PiecewisePolynomial(FunctionSpec):
    """One Polynomial per piece, in the global coordinate; internal variant."""

    def __init__(self, breakpoints, pieces):
        b = np.asarray(breakpoints, dtype=float)
        if b.size != len(pieces) + 1 or not np.all(np.diff(b) > 0):
            raise ConfigError("breakpoints do not match pieces")
        self.breakpoints = _ro(b)
        self.pieces = list(pieces)

    def _eval(self, xs):
        idx = np.searchsorted(self.breakpoints, xs, side="right") - 1
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        out = np.empty_like(xs)
        for i, p in enumerate(self.pieces):
            m = idx == i
            if np.any(m):
                out[m] = p._eval(xs[m])
        return out

    def antiderivative(self):
        acc = 0.0
        pieces = []
        for i, p in enumerate(self.pieces):
            pa = p.antiderivative()
            shift = acc - pa(self.breakpoints[i])
            pieces.append(Polynomial(np.concatenate(([pa.coeffs[0] + shift],
                                                     pa.coeffs[1:]))))
            acc = pieces[-1](self.breakpoints[i + 1])
        return PiecewisePolynomial(self.breakpoints, pieces)

    def derivative(self):
        return PiecewisePolynomial(self.breakpoints,
                                   [_as_polynomial(p.derivative()) for p in self.pieces])

    def __repr__(self):
        return f"PiecewisePolynomial({self.breakpoints.tolist()!r}, {self.pieces!r})"


def definite_integral(g: FunctionSpec, lo: float, hi: float) -> float:
    """Exact integral of g over [lo, hi]."""
    return g.definite_integral(lo, hi)


# ---------------------------------------------------------------------------
# certified extrema


def _second_derivative_sup(g: FunctionSpec) -> float:
    """Coefficient-sum bound on sup |g''| over [0, 1]."""
    if isinstance(g, (Constant, PiecewiseConstant)):
        return 0.0
    if isinstance(g, Polynomial):
        if g.coeffs.size <= 2:
            return 0.0
        k = np.arange(g.coeffs.size, dtype=float)
        return float(np.sum(np.abs(g.coeffs * k * (k - 1.0))))
    if isinstance(g, TrigSeries):
        w = g.base_frequency
        n = g.max_harmonic
        if n == 0:
            return 0.0
        a = np.zeros(n)
        b = np.zeros(n)
        a[: g.cos_coeffs.size] = np.abs(g.cos_coeffs)
        b[: g.sin_coeffs.size] = np.abs(g.sin_coeffs)
        k = np.arange(1, n + 1, dtype=float)
        return float(np.sum((k * w) ** 2 * (a + b)))
    if isinstance(g, PolyTrig):
        return _second_derivative_sup(g.poly) + _second_derivative_sup(g.trig)
    raise TypeError(f"no curvature bound for {type(g).__name__}")


def _scan_extremum(g, lo, hi, sign, n=_EXTREMUM_GRID):
    xs = np.linspace(lo, hi, n + 1)
    vals = g._eval(xs)
    h = (hi - lo) / n
    slack = _second_derivative_sup(g) * h * h / 8.0
    if sign > 0:
        return float(np.max(vals)) + slack
    return float(np.min(vals)) - slack


def lower_bound(g: FunctionSpec) -> float:
    """Certified m with g >= m on [0, 1]; tight to ~1e-9 for moderate profiles."""
    if isinstance(g, Constant):
        return g.value
    if isinstance(g, PiecewiseConstant):
        return float(np.min(g.values))
    if isinstance(g, PiecewisePolynomial):
        return min(_scan_extremum(p, g.breakpoints[i], g.breakpoints[i + 1], -1, 100_000)
                   for i, p in enumerate(g.pieces))
    return _scan_extremum(g, 0.0, 1.0, -1)


def upper_bound(g: FunctionSpec) -> float:
    """Certified M with g <= M on [0, 1]."""
    if isinstance(g, Constant):
        return g.value
    if isinstance(g, PiecewiseConstant):
        return float(np.max(g.values))
    if isinstance(g, PiecewisePolynomial):
        return max(_scan_extremum(p, g.breakpoints[i], g.breakpoints[i + 1], +1, 100_000)
                   for i, p in enumerate(g.pieces))
    return _scan_extremum(g, 0.0, 1.0, +1)


def certified_minimum(g: FunctionSpec) -> float:
    """Certified positive lower bound of g on [0, 1].

    Raises NonPositiveBoundError (carrying the bound) when the bound is not
    positive; this is the admission gate for coefficient profiles.
    """
    m = lower_bound(g)
    if m <= 0.0:
        raise NonPositiveBoundError(m)
    return m


# ---------------------------------------------------------------------------
# periodic coefficient


class PeriodicCoefficient:
    """1-periodic diffusion coefficient defined by a profile on [0, 1].

    With profile_is_reciprocal=True the profile describes 1/a, the quantity
    the explicit solution formulas integrate, so reciprocal moments stay
    closed-form.  Either way `value` returns a, `reciprocal` returns 1/a,
    and `lower_bound` is a certified positive bound for a.
    """

    def __init__(self, profile: FunctionSpec, profile_is_reciprocal: bool = False):
        self.profile = profile
        self.profile_is_reciprocal = bool(profile_is_reciprocal)
        if self.profile_is_reciprocal:
            # 1/a positive and bounded requires the profile itself positive
            m = certified_minimum(profile)
            self.lower_bound = 1.0 / upper_bound(profile)
            self.reciprocal_upper_bound = 1.0 / m
        else:
            self.lower_bound = certified_minimum(profile)
            self.reciprocal_upper_bound = 1.0 / self.lower_bound

    # -- evaluation -------------------------------------------------------

    def _fold(self, x):
        return np.mod(np.asarray(x, dtype=float), 1.0)

    def value(self, x):
        """a(x mod 1) for any real x."""
        p = self.profile._eval(self._fold(x))
        out = 1.0 / p if self.profile_is_reciprocal else p
        return float(out) if np.ndim(x) == 0 else out

    def reciprocal(self, x):
        """(1/a)(x mod 1) for any real x."""
        p = self.profile._eval(self._fold(x))
        out = p if self.profile_is_reciprocal else 1.0 / p
        return float(out) if np.ndim(x) == 0 else out

    def derivative(self, x):
        """a'(x mod 1); rejects piecewise profiles."""
        if isinstance(self.profile, (PiecewiseConstant, PiecewisePolynomial)):
            raise NonDifferentiableProfileError(
                "piecewise profile: coefficient derivative undefined at breakpoints")
        u = self._fold(x)
        dp = self.profile.derivative()._eval(u)
        if self.profile_is_reciprocal:
            p = self.profile._eval(u)
            out = -dp / (p * p)
        else:
            out = dp
        return float(out) if np.ndim(x) == 0 else out

    def scaled_value(self, x, eps: float):
        """a(x/eps), the coefficient of the oscillatory problem."""
        return self.value(np.asarray(x, dtype=float) / float(eps))

    def scaled_reciprocal(self, x, eps: float):
        return self.reciprocal(np.asarray(x, dtype=float) / float(eps))

    def scaled_derivative(self, x, eps: float):
        """a'(x/eps) without the chain-rule 1/eps factor."""
        return self.derivative(np.asarray(x, dtype=float) / float(eps))

    # -- closed-form access and quadrature planning ------------------------

    def reciprocal_profile(self) -> FunctionSpec | None:
        """FunctionSpec for 1/a on [0, 1] when available in closed form."""
        if self.profile_is_reciprocal:
            return self.profile
        if isinstance(self.profile, Constant):
            return Constant(1.0 / self.profile.value)
        if isinstance(self.profile, PiecewiseConstant):
            return PiecewiseConstant(self.profile.breakpoints, 1.0 / self.profile.values)
        return None

    def profile_breakpoints(self) -> np.ndarray:
        """Interior smoothness breakpoints of the profile in (0, 1)."""
        p = self.profile
        if isinstance(p, (PiecewiseConstant, PiecewisePolynomial)):
            return p.breakpoints[1:-1].copy()
        return np.empty(0)

    def max_harmonic(self) -> int:
        p = self.profile
        if isinstance(p, TrigSeries):
            return p.max_harmonic
        if isinstance(p, PolyTrig):
            return p.trig.max_harmonic
        return 0

    def panels_per_cell(self) -> int:
        """Gauss panels per unit period that keep reciprocal integrals at
        machine precision (more when 1/profile must be integrated, since the
        reciprocal of an oscillation is analytic but not band-limited)."""
        k = self.max_harmonic()
        if self.reciprocal_profile() is not None:
            if isinstance(self.profile, (Constant, PiecewiseConstant)):
                return 1
            return max(2, math.ceil(k / 2))
        if isinstance(self.profile, Polynomial):
            return max(4, self.profile.coeffs.size)
        return max(4, 2 * k)


# ---------------------------------------------------------------------------
# JSON codec for the public variants


def spec_to_dict(g: FunctionSpec) -> dict:
    if isinstance(g, Constant):
        return {"type": "constant", "value": g.value}
    if isinstance(g, Polynomial):
        return {"type": "poly", "coeffs": g.coeffs.tolist()}
    if isinstance(g, TrigSeries):
        d = {"type": "trig", "mean": g.mean, "cos": g.cos_coeffs.tolist(),
             "sin": g.sin_coeffs.tolist()}
        if g.base_frequency != TWO_PI:
            d["base_frequency"] = g.base_frequency
        return d
    if isinstance(g, PiecewiseConstant):
        return {"type": "piecewise", "breakpoints": g.breakpoints.tolist(),
                "values": g.values.tolist()}
    raise ConfigError(f"{type(g).__name__} has no serialized form")


def spec_from_dict(d: dict, where: str = "function") -> FunctionSpec:
    """Build a FunctionSpec from its tagged-dict form; errors name the path."""
    if not isinstance(d, dict) or "type" not in d:
        raise ConfigError(f"{where}: expected an object with a 'type' key")
    kind = d["type"]
    try:
        if kind == "constant":
            return Constant(_num(d, "value", where))
        if kind == "poly":
            return Polynomial(_numlist(d, "coeffs", where))
        if kind == "trig":
            return TrigSeries(_num(d, "mean", where),
                              _numlist(d, "cos", where, default=()),
                              _numlist(d, "sin", where, default=()),
                              base_frequency=float(d.get("base_frequency", TWO_PI)))
        if kind == "piecewise":
            return PiecewiseConstant(_numlist(d, "breakpoints", where),
                                     _numlist(d, "values", where))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}.type: unknown variant {kind!r}")


def _num(d, key, where):
    v = d.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{where}.{key}: expected a number, got {v!r}")
    return float(v)


def _numlist(d, key, where, default=None):
    v = d.get(key, default)
    if v is None:
        raise ConfigError(f"{where}.{key}: missing")
    if not isinstance(v, (list, tuple)) or any(
            not isinstance(t, (int, float)) or isinstance(t, bool) for t in v):
        raise ConfigError(f"{where}.{key}: expected a list of numbers")
    return [float(t) for t in v]
