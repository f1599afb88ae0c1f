"""Deterministic CSV writers and hand-rolled SVG figures.

Floats are printed with 17 significant digits so that parsing the text
reproduces the binary double exactly, making repeated runs with the same
seed byte-identical.  Figures are plain SVG 1.1 with no external assets:
log-log scatter plus fitted lines for convergence reports, linear
polylines for solution overlays.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .convergence import ConvergenceReport
from .errors import ConfigError
from .fk import CellMassReport, DeltaEstimate
from .homsolver import SolutionField


def format_value(v) -> str:
    """Round-trip text for one CSV cell."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path, header, rows) -> Path:
    """Header line then one comma-joined line per row, LF endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")
    return path


def emit_fields_csv(path, fields) -> Path:
    """Stacked samples of one or more solution fields: x,value,provenance."""
    rows = []
    for fld in fields:
        for x, v in zip(fld.x, fld.values):
            rows.append((x, v, fld.provenance))
    return write_csv(path, ("x", "value", "provenance"), rows)


def emit_convergence_csv(path, report: ConvergenceReport) -> Path:
    return write_csv(path, ("variant", "eps", "sup_error"), report.error_rows())


def emit_convergence_summary_csv(path, report: ConvergenceReport) -> Path:
    return write_csv(path, ("variant", "rate", "intercept", "residual", "sign"),
                     report.summary_rows())


def emit_cell_mass_csv(path, report: CellMassReport) -> Path:
    rows = [(r.cell_index, r.lo, r.hi, r.observed, r.expected, r.z)
            for r in report.rows]
    return write_csv(path, ("cell_index", "cell_lo", "cell_hi",
                            "mc_mass", "exact_mass", "z"), rows)


def emit_delta_csv(path, estimate: DeltaEstimate) -> Path:
    rows = [(r.x, r.source_term_mc, r.source_term_spectral, r.source_term_stderr,
             r.endpoint_term_mc, r.endpoint_term_spectral, r.endpoint_term_stderr,
             r.defect)
            for r in estimate.rows]
    return write_csv(path, ("x", "source_term_mc", "source_term_spectral",
                            "source_term_stderr", "endpoint_term_mc",
                            "endpoint_term_spectral", "endpoint_term_stderr",
                            "defect"), rows)


# ---------------------------------------------------------------------------
# SVG figures


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 34, 48


def _axis_ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, n)
    return [float(t) for t in raw]


def _svg_header(title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" font-family="sans-serif" font-size="14" '
        f'text-anchor="middle">{title}</text>',
    ]


def _frame(parts, x_lo, x_hi, y_lo, y_hi, xlabel, ylabel, tick_fmt):
    def sx(u):
        return _ML + (u - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="#444"/>')
    for t in _axis_ticks(x_lo, x_hi):
        px = sx(t)
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _MB}" x2="{px:.2f}" '
                     f'y2="{_H - _MB + 5}" stroke="#444"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _MB + 18}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="middle">{tick_fmt(t)}</text>')
    for t in _axis_ticks(y_lo, y_hi):
        py = sy(t)
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.2f}" x2="{_ML}" '
                     f'y2="{py:.2f}" stroke="#444"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.2f}" font-family="sans-serif" '
                     f'font-size="11" text-anchor="end">{tick_fmt(t)}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 10}" '
                 f'font-family="sans-serif" font-size="12" text-anchor="middle">'
                 f'{xlabel}</text>')
    parts.append(f'<text x="16" y="{(_MT + _H - _MB) / 2:.1f}" '
                 f'font-family="sans-serif" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.1f})">{ylabel}</text>')
    return sx, sy


def _legend(parts, labels):
    x0 = _W - _MR - 170
    y0 = _MT + 10
    for i, label in enumerate(labels):
        color = _PALETTE[i % len(_PALETTE)]
        y = y0 + 16 * i
        parts.append(f'<line x1="{x0}" y1="{y}" x2="{x0 + 18}" y2="{y}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{x0 + 24}" y="{y + 4}" font-family="sans-serif" '
                     f'font-size="11">{label}</text>')


def svg_loglog(series, title="", xlabel="eps", ylabel="sup error") -> str:
    """Log-log scatter with optional fitted lines.

    series: iterable of (label, points, fit) with points a list of (x, y)
    pairs (x, y > 0) and fit either None or (rate, intercept) in natural-log
    coordinates, i.e. log(y) = rate * log(x) + intercept.
    """
    series = [s for s in series if len(s[1]) > 0]
    if not series:
        raise ConfigError("svg figure needs at least one nonempty series")
    pts = [(x, y) for _, p, _ in series for x, y in p if y > 0.0]
    if not pts:
        raise ConfigError("log-log figure needs positive values")
    lx = [math.log10(x) for x, _ in pts]
    ly = [math.log10(y) for _, y in pts]
    pad = 0.3
    x_lo, x_hi = min(lx) - pad, max(lx) + pad
    y_lo, y_hi = min(ly) - pad, max(ly) + pad
    parts = _svg_header(title)
    sx, sy = _frame(parts, x_lo, x_hi, y_lo, y_hi, xlabel, ylabel,
                    lambda t: f"1e{t:.1f}")
    for i, (label, points, fit) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        if fit is not None:
            rate, intercept = fit
            ln10 = math.log(10.0)
            ya = (rate * x_lo * ln10 + intercept) / ln10
            yb = (rate * x_hi * ln10 + intercept) / ln10
            parts.append(f'<line x1="{sx(x_lo):.2f}" y1="{sy(ya):.2f}" '
                         f'x2="{sx(x_hi):.2f}" y2="{sy(yb):.2f}" '
                         f'stroke="{color}" stroke-width="1" stroke-dasharray="4 3"/>')
        for x, y in points:
            if y <= 0.0:
                continue
            parts.append(f'<circle cx="{sx(math.log10(x)):.2f}" '
                         f'cy="{sy(math.log10(y)):.2f}" r="4" fill="{color}"/>')
    _legend(parts, [s[0] for s in series])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_lines(series, title="", xlabel="x", ylabel="value") -> str:
    """Linear plot of one polyline per series; series = (label, xs, ys)."""
    series = [s for s in series if len(s[1]) > 0]
    if not series:
        raise ConfigError("svg figure needs at least one nonempty series")
    x_lo = min(float(np.min(s[1])) for s in series)
    x_hi = max(float(np.max(s[1])) for s in series)
    y_lo = min(float(np.min(s[2])) for s in series)
    y_hi = max(float(np.max(s[2])) for s in series)
    span = (y_hi - y_lo) or 1.0
    y_lo -= 0.05 * span
    y_hi += 0.05 * span
    parts = _svg_header(title)
    sx, sy = _frame(parts, x_lo, x_hi, y_lo, y_hi, xlabel, ylabel,
                    lambda t: f"{t:.3g}")
    for i, (label, xs, ys) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                          for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
    _legend(parts, [s[0] for s in series])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_convergence_svg(path, report: ConvergenceReport) -> Path:
    series = []
    for r in report.results:
        fit = None if r.exact else (r.fit.rate, r.fit.intercept)
        series.append((str(r.variant), [(e, err) for e, err in r.points], fit))
    return write_svg(path, svg_loglog(series, title="sup-error vs eps"))


def emit_fields_svg(path, fields, title="solutions") -> Path:
    series = [(fld.provenance, fld.x, fld.values) for fld in fields]
    return write_svg(path, svg_lines(series, title=title))


def write_svg(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="ascii", newline="\n")
    return path
