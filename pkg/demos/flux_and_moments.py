"""Closed-form structure behind the corrected convergence.

Three short exhibits:

1. The flux constant of the oscillatory solution (the constant value of
   a(x/eps) u_eps'(x) for f = 1) expands as c0 + c1 eps + O(eps^2); the
   two leading coefficients come out of quadrature exactly.

2. The affine corrector is built from two moments of the reciprocal
   profile.  For any profile symmetric about 1/2 both moments vanish,
   so no correction is needed.

3. For a fixed asymmetric profile, sources with zero mean and zero
   sweep (integral of the antiderivative) also kill the corrector.

Run from the repository root:  python3 demos/flux_and_moments.py
"""

import numpy as np

from homog1d import (
    Constant,
    PeriodicCoefficient,
    Polynomial,
    ProblemInstance,
    TrigSeries,
    c_eps,
    c_eps_asymptotic,
    corrector_coefficients,
    corrector_vanishes,
    moment_m1,
    moment_m2,
)


def main():
    model = PeriodicCoefficient(TrigSeries(2.0, [0.0], [1.0]),
                                profile_is_reciprocal=True)
    one = Constant(1.0)

    print("flux constant vs its two-term expansion (f = 1)")
    c0, c1 = c_eps_asymptotic(model, one)
    print(f"  c0 = {c0:.15f}   c1 = {c1:.15f}")
    print(f"  (1/2 = {0.5}, -1/(4 pi) = {-1 / (4 * np.pi):.15f})")
    for k in (2, 3, 4, 5, 6):
        eps = 0.5 ** k
        exact = c_eps(ProblemInstance(model, one, eps))
        model_val = c0 + c1 * eps
        print(f"  eps=1/{2 ** k:<3d} c_eps = {exact:.12f}   "
              f"c0 + c1 eps = {model_val:.12f}   "
              f"residual = {exact - model_val:+.2e}")

    print("\nreciprocal-profile moments decide whether a corrector is needed")
    profiles = (("2 + sin 2 pi x (asymmetric)",
                 PeriodicCoefficient(TrigSeries(2.0, [0.0], [1.0]),
                                     profile_is_reciprocal=True)),
                ("2 + cos 2 pi x (symmetric) ",
                 PeriodicCoefficient(TrigSeries(2.0, [1.0], [0.0]),
                                     profile_is_reciprocal=True)),
                ("constant 1                 ",
                 PeriodicCoefficient(Constant(1.0))))
    for label, a in profiles:
        print(f"  {label}: m1 = {moment_m1(a):+.3e}  m2 = {moment_m2(a):+.3e}")

    print("\nsources that need no correction even for the asymmetric profile")
    sources = (("f = 1            ", Constant(1.0)),
               ("f = sin pi x     ", TrigSeries(0.0, [], [1.0],
                                                base_frequency=np.pi)),
               ("f = x^2 - x + 1/6", Polynomial([1 / 6, -1.0, 1.0])))
    for label, f in sources:
        slope, offset = corrector_coefficients(model, f)
        print(f"  {label}: slope = {slope:+.3e}  offset = {offset:+.3e}  "
              f"corrector vanishes: {corrector_vanishes(model, f)}")


if __name__ == "__main__":
    main()
