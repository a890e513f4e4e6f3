"""Table of the first Chern form next to its cocycle representatives on monomial pairs.

Usage: python scripts/chern_table.py [--max-mode 5]
"""

import argparse

from weightedtrace import loop_geometry as lg
from weightedtrace.corpus import monomial_pairs
from weightedtrace.lie_core import su2


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-mode", type=int, default=5)
    args = parser.parse_args()
    alg = su2()
    cfg = lg.GeometryConfig(alg, 0.5)
    print(f"{'n':>2} {'a':>3} {'b':>3} {'r1 (zeta)':>12} {'r1 (trunc)':>12} {'c_R(phi,phi)':>13} "
          f"{'lambda^D':>10} {'-i omega':>10} {'spread':>9}")
    for x, y, n, i, j in monomial_pairs(alg, args.max_mode):
        rec = lg.chern_identities(x, y, cfg)
        trunc = lg.first_chern_truncated(x, y, cfg)
        spread = max(rec.max_spread(), abs(trunc - rec.minus_i_omega))
        print(f"{n:>2} {alg.basis_labels[i]:>3} {alg.basis_labels[j]:>3} {rec.first_chern.real:>12.8f} "
              f"{trunc.real:>12.8f} {rec.radul_phi.real:>13.8f} {rec.lambda_finite_rank.real:>10.6f} "
              f"{rec.minus_i_omega.real:>10.6f} {spread:>9.1e}")


if __name__ == "__main__":
    main()
