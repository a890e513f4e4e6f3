"""Fitted decay exponents of curvature operators against their predicted orders.

Usage: python scripts/order_fits.py [--cutoff 512]
"""

import argparse

from weightedtrace import loop_geometry as lg
from weightedtrace.lie_core import LoopElement, su2


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cutoff", type=int, default=512)
    args = parser.parse_args()
    alg = su2()
    x = LoopElement.monomial(alg, 1, 0) + LoopElement.monomial(alg, -1, 0)
    y = x + LoopElement.monomial(alg, 2, 1) + LoopElement.monomial(alg, -2, 1)
    print(f"{'operator':<28}{'s':>6}{'fitted':>10}{'target':>10}")
    for s in (0.25, 0.5, 0.75):
        cfg = lg.GeometryConfig(alg, s)
        r = lg.riemann_operator(x, y, cfg)
        target = f"{-1.0:>10.4f}" if s == 0.5 else f"{'':>10}"
        print(f"{'R(X,Y)':<28}{s:>6}{lg.fit_order(r, args.cutoff):>10.4f}{target}")
        print(f"{'tr_Lie R(X,Y)':<28}{s:>6}{lg.fit_order(r, args.cutoff, traced=True):>10.4f}"
              f"{-2 * min(1.0, 2 * s):>10.4f}")
    cfg = lg.GeometryConfig(alg, 0.5)
    xp = LoopElement.monomial(alg, 1, 0) + LoopElement.monomial(alg, 2, 1)
    ym = LoopElement.monomial(alg, -1, 0) + LoopElement.monomial(alg, -1, 2)
    omega = lg.complex_curvature(xp, ym, cfg)
    print(f"{'Omega(X,Ybar)':<28}{0.5:>6}{lg.fit_order(omega, args.cutoff):>10.4f}{-1.0:>10.4f}")
    print(f"{'tr_Lie Omega(X,Ybar)':<28}{0.5:>6}{lg.fit_order(omega, args.cutoff, traced=True):>10.4f}{-2.0:>10.4f}")


if __name__ == "__main__":
    main()
