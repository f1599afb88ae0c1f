"""Config-driven command line front end.

One JSON document describes the experiment (coefficient, source, eps
ladder, variants, Monte Carlo parameters, output directory); the verb
picks the pipeline.  Results land as deterministic CSV files plus
optional SVG figures.  Exit codes: 0 success, 2 config problem,
3 numerical-precondition or solver failure.

Verbs:
  solve      sample u_eps and the homogenized limit on a grid
  average    window-averaged solution next to the raw and limit curves
  corrector  reciprocal moments, affine corrector samples, vanishing test
  converge   eps sweep with rate fits per variant
  fk-verify  Monte Carlo estimate of u_eps(x) against the exact value
  cell-mass  per-cell occupation masses of stopped paths vs the averaged flow
  bootstrap  measured defect + iterated-contraction bound on |u_eps - u|
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import output
from .averaging import ErrorProbe, ErrorVariant, corrector_coefficients, corrector_vanishes
from .convergence import DEFAULT_EPS_LADDER, sweep
from .errors import ConfigError, Homog1dError
from .fk import (
    PathParams,
    bootstrap_bound,
    cell_mass_check,
    delta_estimate,
    fk_estimate_u_eps,
)
from .funcspec import FunctionSpec, PeriodicCoefficient, spec_from_dict
from .homsolver import (
    PROV_AVG,
    PROV_EXACT,
    PROV_HOM,
    ExactSolution,
    HomogenizedSolution,
    ProblemInstance,
    SolutionField,
    default_grid_size,
    harmonic_mean,
    make_field,
    moment_m1,
    moment_m2,
    solution_fields,
)

VERBS = ("solve", "average", "corrector", "converge", "fk-verify",
         "cell-mass", "bootstrap")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated contents of one experiment JSON document."""

    coefficient: PeriodicCoefficient
    source: FunctionSpec
    eps_list: tuple
    variants: tuple
    grid: int | None
    mc: PathParams
    mc_x: float
    out: Path
    svg: bool
    relaxed: bool

    @property
    def eps(self) -> float:
        return self.eps_list[0]


def _variant_from_entry(entry, where: str) -> ErrorVariant:
    if isinstance(entry, str):
        name = entry
        sign = None
    elif isinstance(entry, dict):
        name = entry.get("kind")
        sign = entry.get("sign")
    else:
        raise ConfigError(f"{where}: expected a variant name or object")
    try:
        if name == "raw":
            return ErrorVariant.raw()
        if name == "averaged":
            return ErrorVariant.averaged()
        if name == "corrected":
            return ErrorVariant.corrected(sign)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown variant {name!r}")


def load_config(path, *, eps=None, seed=None, paths=None, out=None) -> ExperimentConfig:
    """Parse and validate the experiment JSON; keyword args override scalars."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config root must be a JSON object")

    coeff_doc = doc.get("coefficient")
    if not isinstance(coeff_doc, dict) or "profile" not in coeff_doc:
        raise ConfigError("coefficient: need an object with a 'profile' entry")
    profile = spec_from_dict(coeff_doc["profile"], "coefficient.profile")
    reciprocal = bool(coeff_doc.get("reciprocal", False))
    try:
        coefficient = PeriodicCoefficient(profile, profile_is_reciprocal=reciprocal)
    except Homog1dError as exc:
        raise ConfigError(f"coefficient: {exc}") from exc

    if "source" not in doc:
        raise ConfigError("source: missing")
    source = spec_from_dict(doc["source"], "source")

    raw_eps = doc.get("eps", list(DEFAULT_EPS_LADDER))
    if eps is not None:
        raw_eps = eps
    if isinstance(raw_eps, (int, float)):
        raw_eps = [raw_eps]
    if (not isinstance(raw_eps, list) or not raw_eps
            or any(not isinstance(e, (int, float)) or isinstance(e, bool)
                   for e in raw_eps)):
        raise ConfigError("eps: expected a number or nonempty list of numbers")
    eps_list = tuple(float(e) for e in raw_eps)
    relaxed = bool(doc.get("relaxed", False))
    for e in eps_list:
        if not 0.0 < e < 1.0:
            raise ConfigError(f"eps: {e} outside (0, 1)")
        if not relaxed and abs(round(1.0 / e) - 1.0 / e) > 1e-9:
            raise ConfigError(f"eps: 1/{e} is not an integer (set relaxed "
                              "to true to allow it)")

    variants = tuple(_variant_from_entry(v, f"variants[{i}]")
                     for i, v in enumerate(doc.get("variants", ["raw"])))
    if not variants:
        raise ConfigError("variants: must be nonempty")

    grid = doc.get("grid")
    if grid is not None:
        if not isinstance(grid, int) or isinstance(grid, bool) or grid < 2:
            raise ConfigError("grid: expected an integer >= 2")

    mc_doc = doc.get("mc", {})
    if not isinstance(mc_doc, dict):
        raise ConfigError("mc: expected an object")
    mc_x = mc_doc.get("x", 0.5)
    if not isinstance(mc_x, (int, float)) or not 0.0 < float(mc_x) < 1.0:
        raise ConfigError("mc.x: expected a number in (0, 1)")
    try:
        mc = PathParams(
            x0=float(mc_x),
            horizon=float(mc_doc.get("horizon", 0.25)),
            dt=float(mc_doc.get("dt", 1e-5)),
            paths=int(paths if paths is not None else mc_doc.get("paths", 10000)),
            seed=int(seed if seed is not None else mc_doc.get("seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"mc: {exc}") from exc
    except Homog1dError as exc:
        raise ConfigError(f"mc: {exc}") from exc

    out_dir = Path(out if out is not None else doc.get("out", "results"))
    svg = bool(doc.get("svg", True))
    return ExperimentConfig(coefficient, source, eps_list, variants, grid,
                            mc, float(mc_x), out_dir, svg, relaxed)


# ---------------------------------------------------------------------------
# verb pipelines


def _instance(cfg: ExperimentConfig, eps=None) -> ProblemInstance:
    return ProblemInstance(cfg.coefficient, cfg.source,
                           eps if eps is not None else cfg.eps,
                           relaxed=cfg.relaxed)


def _grid_size(cfg: ExperimentConfig, eps: float) -> int:
    return cfg.grid if cfg.grid is not None else default_grid_size(eps)


def _run_solve(cfg: ExperimentConfig):
    p = _instance(cfg)
    exact, hom = solution_fields(p, _grid_size(cfg, p.eps))
    csv = output.write_csv(cfg.out / "solve.csv", ("x", "u_eps", "u_hom"),
                           zip(exact.x, exact.values, hom.values))
    print(f"wrote {csv}")
    if cfg.svg:
        fig = output.emit_fields_svg(cfg.out / "solve.svg", (exact, hom))
        print(f"wrote {fig}")
    gap = float(np.max(np.abs(exact.values - hom.values)))
    print(f"eps={p.eps:g} max|u_eps - u_hom| = {gap:.6e}")
    return 0


def _run_average(cfg: ExperimentConfig):
    p = _instance(cfg)
    n = _grid_size(cfg, p.eps)
    probe = ErrorProbe(p, n)
    csv = output.write_csv(
        cfg.out / "average.csv", ("x", "u_eps", "u_hom", "averaged"),
        zip(probe.x, probe.u_eps, probe.u_hom, probe.averaged))
    print(f"wrote {csv}")
    if cfg.svg:
        series = ((PROV_EXACT, probe.x, probe.u_eps),
                  (PROV_HOM, probe.x, probe.u_hom),
                  (PROV_AVG, probe.x, probe.averaged))
        fig = output.write_svg(cfg.out / "average.svg",
                               output.svg_lines(series, title="window average"))
        print(f"wrote {fig}")
    print(f"eps={p.eps:g} sup averaged error = "
          f"{probe.sup(ErrorVariant.averaged()):.6e}")
    return 0


def _run_corrector(cfg: ExperimentConfig):
    a, f = cfg.coefficient, cfg.source
    m1, m2 = moment_m1(a), moment_m2(a)
    slope, offset = corrector_coefficients(a, f)
    vanishes = corrector_vanishes(a, f)
    eps = cfg.eps
    xs = np.linspace(0.0, 1.0, 201)
    values = eps * (slope * xs + offset)
    field = SolutionField(xs, values, "corrector")
    csv = output.emit_fields_csv(cfg.out / "corrector.csv", (field,))
    print(f"wrote {csv}")
    summary = output.write_csv(
        cfg.out / "corrector_summary.csv",
        ("m1", "m2", "slope", "offset", "eps", "vanishes"),
        [(m1, m2, slope, offset, eps, vanishes)])
    print(f"wrote {summary}")
    print(f"m1={m1:.12e} m2={m2:.12e} vanishes={vanishes}")
    return 0


def _run_converge(cfg: ExperimentConfig):
    report = sweep(cfg.coefficient, cfg.source, cfg.eps_list, cfg.variants)
    csv = output.emit_convergence_csv(cfg.out / "converge.csv", report)
    summary = output.emit_convergence_summary_csv(
        cfg.out / "converge_summary.csv", report)
    print(f"wrote {csv}")
    print(f"wrote {summary}")
    if cfg.svg:
        fig = output.emit_convergence_svg(cfg.out / "converge.svg", report)
        print(f"wrote {fig}")
    for r in report.results:
        print(f"variant {r.variant}: rate {r.rate_label}")
    return 0


def _run_fk_verify(cfg: ExperimentConfig):
    p = _instance(cfg)
    exact = ExactSolution(p)
    t = cfg.mc.horizon
    est = fk_estimate_u_eps(p, cfg.mc_x, t, cfg.mc, exact=exact)
    ref = float(exact(cfg.mc_x))
    z = (est.mean - ref) / est.stderr if est.stderr > 0.0 else 0.0
    csv = output.write_csv(
        cfg.out / "fk_verify.csv",
        ("x", "t", "paths", "dt", "seed", "mc_mean", "mc_stderr",
         "reference", "z"),
        [(cfg.mc_x, t, cfg.mc.paths, cfg.mc.dt, cfg.mc.seed,
          est.mean, est.stderr, ref, z)])
    print(f"wrote {csv}")
    print(f"u_eps({cfg.mc_x:g}) = {ref:.8f}  mc = {est.mean:.8f} "
          f"+- {est.stderr:.2e}  z = {z:+.2f}")
    return 0


def _run_cell_mass(cfg: ExperimentConfig):
    p = _instance(cfg)
    report = cell_mass_check(cfg.coefficient, p.eps, cfg.mc_x,
                             cfg.mc.horizon, cfg.mc)
    csv = output.emit_cell_mass_csv(cfg.out / "cell_mass.csv", report)
    print(f"wrote {csv}")
    print(f"cells={len(report.rows)} paths={report.paths} "
          f"max|z| = {report.max_abs_z:.3f}")
    return 0


def _run_bootstrap(cfg: ExperimentConfig):
    p = _instance(cfg)
    t = cfg.mc.horizon
    abar = harmonic_mean(cfg.coefficient)
    de = delta_estimate(p, t, cfg.mc)
    csv = output.emit_delta_csv(cfg.out / "bootstrap_delta.csv", de)
    print(f"wrote {csv}")
    exact = ExactSolution(p)
    hom = HomogenizedSolution(cfg.coefficient, cfg.source)
    n = _grid_size(cfg, p.eps)
    phi = make_field(lambda x: np.abs(exact(x) - hom(x)), n,
                     "abs-difference")
    res = bootstrap_bound(phi, de.measured, t, abar)
    summary = output.write_csv(
        cfg.out / "bootstrap_summary.csv",
        ("delta_measured", "delta_stderr", "delta_analytic_bound",
         "sup_phi", "implied_bound", "iterations", "contraction", "verified"),
        [(de.measured, de.stderr_at_max, de.analytic_bound,
          res.sup_phi, res.implied_bound, res.iterations,
          res.contraction, res.verified)])
    print(f"wrote {summary}")
    print(f"delta = {de.measured:.6e}  sup|u_eps - u| = {res.sup_phi:.6e}  "
          f"implied bound = {res.implied_bound:.6e}  verified = {res.verified}")
    return 0


_RUNNERS = {
    "solve": _run_solve,
    "average": _run_average,
    "corrector": _run_corrector,
    "converge": _run_converge,
    "fk-verify": _run_fk_verify,
    "cell-mass": _run_cell_mass,
    "bootstrap": _run_bootstrap,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homog1d",
        description="Oscillatory two-point boundary value experiments "
                    "driven by a JSON config.")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        sp = sub.add_parser(verb, help=f"run the {verb} pipeline")
        sp.add_argument("config", help="path to the experiment JSON document")
        sp.add_argument("--eps", type=float, default=None,
                        help="override the eps value/ladder with one value")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the Monte Carlo seed")
        sp.add_argument("--paths", type=int, default=None,
                        help="override the Monte Carlo path count")
        sp.add_argument("--out", default=None,
                        help="override the output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, eps=args.eps, seed=args.seed,
                          paths=args.paths, out=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _RUNNERS[args.verb](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Homog1dError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
