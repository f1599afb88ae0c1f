"""Composite Gauss-Legendre quadrature with eps-cell alignment.

The oscillatory coefficient a(x/eps) is smooth inside each cell
[k eps, (k+1) eps] and only kinks at the cell boundaries, so every integral
is split there (plus at scaled profile breakpoints for piecewise profiles)
and a fixed-order Gauss rule is applied per piece.  Rules are generated at
import time by Newton iteration on the Legendre recurrence, never hard-coded
tables.  Nested integrals reuse cumulative prefix tables over the same edges
so a full solution evaluation costs one partial-cell correction per query.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DomainError

DEFAULT_ORDER = 16
_NEWTON_TOL = 1e-15


def _legendre_with_derivative(n: int, x: np.ndarray):
    # upward recurrence  k P_k = (2k-1) x P_{k-1} - (k-1) P_{k-2}
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on the reference interval [-1, 1]."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    """Nodes/weights of the `order`-point Gauss-Legendre rule.

    Newton iteration from the Chebyshev-based initial guess, converged to
    1e-15 in the node positions; weights 2 / ((1 - x^2) P_n'(x)^2).
    """
    if order < 1:
        raise ConfigError("quadrature order must be >= 1")
    n = int(order)
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_with_derivative(n, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    else:  # pragma: no cover - Newton converges in < 10 sweeps
        raise ConfigError(f"Legendre Newton iteration failed for order {n}")
    _, dp = _legendre_with_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # enforce the exact symmetry of the rule
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    idx = np.argsort(x)
    x = x[idx]
    w = w[idx]
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(n, x, w)


def _rule(order_or_rule) -> QuadratureRule:
    if isinstance(order_or_rule, QuadratureRule):
        return order_or_rule
    return gauss_legendre(int(order_or_rule))


def integrate(g, lo: float, hi: float, cells: int = 1, rule=DEFAULT_ORDER) -> float:
    """Composite Gauss integral of g over [lo, hi] with equal cells."""
    if lo > hi:
        raise DomainError(f"integration bounds reversed: [{lo}, {hi}]")
    if cells < 1:
        raise ConfigError("cells must be >= 1")
    if lo == hi:
        return 0.0
    r = _rule(rule)
    h = (hi - lo) / cells
    starts = lo + h * np.arange(cells)
    pts = starts[:, None] + (r.nodes[None, :] + 1.0) * (h / 2.0)
    vals = np.asarray(g(pts.ravel()), dtype=float).reshape(cells, r.order)
    return float(np.sum(vals @ r.weights) * (h / 2.0))


def integrate_edges(g, edges: np.ndarray, rule=DEFAULT_ORDER) -> float:
    """Gauss integral over each [edges[j], edges[j+1]] piece, summed in order."""
    e = np.asarray(edges, dtype=float)
    if e.size < 2:
        return 0.0
    r = _rule(rule)
    h = np.diff(e)
    pts = e[:-1, None] + (r.nodes[None, :] + 1.0) * (h[:, None] / 2.0)
    vals = np.asarray(g(pts.ravel()), dtype=float).reshape(h.size, r.order)
    return float(np.sum((vals @ r.weights) * (h / 2.0)))


def eps_cell_edges(eps: float, lo: float = 0.0, hi: float = 1.0,
                   breakpoints=(), panels: int = 1) -> np.ndarray:
    """Integration edges for [lo, hi] aligned with the eps-cell lattice.

    Includes every multiple of eps in (lo, hi), every scaled profile
    breakpoint (k + b) eps, and subdivides each resulting piece into
    `panels` equal panels.
    """
    if eps <= 0:
        raise ConfigError("eps must be positive")
    if lo > hi:
        raise DomainError(f"interval reversed: [{lo}, {hi}]")
    k_lo = int(np.floor(lo / eps)) - 1
    k_hi = int(np.ceil(hi / eps)) + 1
    marks = [np.arange(k_lo, k_hi + 1, dtype=float) * eps]
    for b in np.atleast_1d(np.asarray(breakpoints, dtype=float)):
        marks.append((np.arange(k_lo, k_hi + 1, dtype=float) + b) * eps)
    e = np.concatenate(marks)
    e = e[(e > lo) & (e < hi)]
    e = np.unique(np.concatenate(([lo, hi], e)))
    # drop pieces of negligible width produced by near-coincident marks
    keep = np.concatenate(([True], np.diff(e) > 1e-14 * max(1.0, abs(hi), abs(lo))))
    e = e[keep]
    if e[-1] != hi:
        e[-1] = hi
    if panels > 1:
        t = np.arange(1, panels, dtype=float) / panels
        inner = e[:-1, None] + np.diff(e)[:, None] * t[None, :]
        e = np.unique(np.concatenate((e, inner.ravel())))
    return e


def integrate_eps_aligned(g, eps: float, lo: float = 0.0, hi: float = 1.0,
                          order: int = DEFAULT_ORDER, breakpoints=(),
                          panels: int = 1) -> float:
    """Integral of g over [lo, hi] split at the eps-cell lattice."""
    if lo == hi:
        return 0.0
    return integrate_edges(g, eps_cell_edges(eps, lo, hi, breakpoints, panels), order)


class PrefixIntegral:
    """Cumulative integral F(x) = int_{edges[0]}^{x} g over fixed edges.

    Cell integrals are precomputed once; a query adds a partial-cell Gauss
    tail, so evaluating F at many points is O(order) work per point and
    bit-deterministic (fixed summation order).
    """

    def __init__(self, g, edges, rule=DEFAULT_ORDER):
        self.g = g
        self.edges = np.asarray(edges, dtype=float)
        if self.edges.size < 2 or np.any(np.diff(self.edges) <= 0):
            raise ConfigError("edges must be ascending with at least one piece")
        r = _rule(rule)
        self.rule = r
        h = np.diff(self.edges)
        pts = self.edges[:-1, None] + (r.nodes[None, :] + 1.0) * (h[:, None] / 2.0)
        vals = np.asarray(g(pts.ravel()), dtype=float).reshape(h.size, r.order)
        cell = (vals @ r.weights) * (h / 2.0)
        self.prefix = np.concatenate(([0.0], np.cumsum(cell)))

    @property
    def total(self) -> float:
        return float(self.prefix[-1])

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        flat = np.atleast_1d(xs).astype(float).ravel()
        lo, hi = self.edges[0], self.edges[-1]
        span = max(1.0, hi - lo)
        if np.any(flat < lo - 1e-10 * span) or np.any(flat > hi + 1e-10 * span):
            raise DomainError("prefix-integral query outside the table domain")
        flat = np.clip(flat, lo, hi)
        j = np.clip(np.searchsorted(self.edges, flat, side="right") - 1,
                    0, self.edges.size - 2)
        start = self.edges[j]
        h = flat - start
        r = self.rule
        pts = start[:, None] + (r.nodes[None, :] + 1.0) * (h[:, None] / 2.0)
        vals = np.asarray(self.g(pts.ravel()), dtype=float).reshape(flat.size, r.order)
        tail = (vals @ r.weights) * (h / 2.0)
        out = self.prefix[j] + tail
        if np.ndim(x) == 0:
            return float(out[0])
        return out.reshape(xs.shape)
