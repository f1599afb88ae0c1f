"""Stochastic verification of the exact solver, three ways.

1. Reproducing identity: the solution value u_eps(x) equals the
   expected value of u_eps at the stopped diffusion endpoint plus the
   expected source integral along the path.  A path ensemble estimates
   the right side; the exact solver provides the left.

2. Cell masses: after a short time the oscillatory diffusion occupies
   each eps-cell with (very nearly) the same probability as the
   constant-coefficient diffusion whose diffusivity is the reciprocal
   average of the profile.  Per-cell z-scores quantify the match.

3. One-step bound: measuring how far the oscillatory process is from
   the averaged heat flow over one macroscopic time step, then chaining
   the contraction of the flow, yields a certified sup-norm bound on
   |u_eps - u| that the directly computed difference must satisfy.

Sized to finish in roughly twenty seconds.

Run from the repository root:  python3 demos/stochastic_check.py
"""

import time

import numpy as np

from homog1d import (
    ExactSolution,
    HomogenizedSolution,
    PathParams,
    PeriodicCoefficient,
    ProblemInstance,
    TrigSeries,
    bootstrap_bound,
    cell_mass_check,
    delta_estimate,
    fk_estimate_u_eps,
    harmonic_mean,
    make_field,
)


def main():
    coefficient = PeriodicCoefficient(TrigSeries(2.0, [0.0], [1.0]),
                                      profile_is_reciprocal=True)
    source = TrigSeries(0.0, [], [1.0], base_frequency=np.pi)

    print("1. reproducing identity at x = 0.5, eps = 1/8")
    t0 = time.time()
    p = ProblemInstance(coefficient, source, 1 / 8)
    exact = ExactSolution(p)
    params = PathParams(x0=0.5, horizon=0.25, dt=1e-4, paths=20000, seed=42)
    est = fk_estimate_u_eps(p, 0.5, 0.25, params, exact=exact)
    ref = float(exact(0.5))
    print(f"   exact     u_eps(0.5) = {ref:.6f}")
    print(f"   ensemble  estimate   = {est.mean:.6f} +- {est.stderr:.1e} "
          f"({est.paths} paths, {time.time() - t0:.1f}s)")
    print(f"   deviation / stderr   = {(est.mean - ref) / est.stderr:+.2f}")

    print("\n2. eps-cell occupation masses at t = 0.05, eps = 1/16")
    t0 = time.time()
    params = PathParams(x0=0.5, horizon=0.05, dt=2e-5, paths=20000, seed=3)
    rep = cell_mass_check(coefficient, 1 / 16, 0.5, 0.05, params)
    print(f"   {'cell':>6} {'interval':>18} {'observed':>9} "
          f"{'expected':>9} {'z':>6}")
    for row in rep.rows:
        print(f"   {row.cell_index:>+6d} [{row.lo:.4f}, {row.hi:.4f})"
              f"   {row.observed:9.4f} {row.expected:9.4f} {row.z:>+6.2f}")
    print(f"   max |z| = {rep.max_abs_z:.2f} over {len(rep.rows)} cells "
          f"({time.time() - t0:.1f}s)")

    print("\n3. measured one-step defect -> certified sup bound, eps = 1/16")
    t0 = time.time()
    p16 = ProblemInstance(coefficient, source, 1 / 16)
    params = PathParams(x0=0.5, horizon=1.0, dt=1e-4, paths=1000, seed=5)
    de = delta_estimate(p16, 1.0, params)
    exact16 = ExactSolution(p16)
    hom = HomogenizedSolution(coefficient, source)
    phi = make_field(lambda x: np.abs(exact16(x) - hom(x)), 2048, "abs-diff")
    res = bootstrap_bound(phi, de.measured, 1.0, harmonic_mean(coefficient))
    print(f"   measured defect delta   = {de.measured:.3e} "
          f"(+- {de.stderr_at_max:.1e} at the worst point)")
    print(f"   contraction over t = 1  = {res.contraction:.6f}")
    print(f"   implied sup bound       = {res.implied_bound:.3e}")
    print(f"   actual sup |u_eps - u|  = {res.sup_phi:.3e}")
    print(f"   bound holds: {res.verified} ({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
