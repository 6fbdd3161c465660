"""Frame potential of the restricted Clifford group: exhaustive for small q, sampled otherwise."""

import argparse

import numpy as np

from mubkit.clifford import enumerate_group
from mubkit.designs import unitary_2design_potential
from mubkit.gf import field_for_q


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5, 7, 8, 9])
    ap.add_argument("--pairs", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'q':>3} {'|G|':>7} {'mode':>10} {'potential':>12} {'se':>10}")
    for q in args.q:
        G = enumerate_group(field_for_q(q))
        sampled = q > 5
        val, se = unitary_2design_potential(G, sampled=sampled, pairs=args.pairs, rng=rng)
        print(f"{q:>3} {len(G):>7} {'sampled' if sampled else 'exhaustive':>10} {val:>12.8f} {se:>10.2e}")


if __name__ == "__main__":
    main()
