"""Weighted Ricci values across Sobolev indices and trace weights, with the truncation path.

Usage: python scripts/ricci_weights.py
"""

from weightedtrace import loop_geometry as lg
from weightedtrace.lie_core import LoopElement, su2
from weightedtrace.mode_ops import laplacian_plus_one_weight, laplacian_weight, shifted_square_weight


def real_mono(alg, k, i):
    return LoopElement.monomial(alg, k, i) + LoopElement.monomial(alg, -k, i)


def main() -> None:
    alg = su2()
    pairs = {
        "2cos(t) e1, 2cos(t) e1": (real_mono(alg, 1, 0), real_mono(alg, 1, 0)),
        "2cos(t) e1, 2cos(2t) e1 + 2cos(t) e2": (real_mono(alg, 1, 0), real_mono(alg, 2, 0) + real_mono(alg, 1, 1)),
    }
    weights = [laplacian_weight(), laplacian_plus_one_weight(), shifted_square_weight()]
    header = "".join(f"{w.name:>14}" for w in weights)
    print(f"{'s':>5} {'pair':<40}{header}{'truncated':>14}{'res R':>10}")
    for s in (0.5, 0.75, 1.0):
        cfg = lg.GeometryConfig(alg, s)
        for label, (x, y) in pairs.items():
            vals = "".join(f"{lg.ricci(x, y, cfg, w).real:>14.8f}" for w in weights)
            trunc = lg.ricci_truncated(x, y, cfg).real
            res = abs(lg.riemann_residue(x, y, cfg))
            print(f"{s:>5} {label:<40}{vals}{trunc:>14.8f}{res:>10.1e}")


if __name__ == "__main__":
    main()
