"""Compare minimal principalizing fans with exhaustive search over blow-up sequences.

    python scripts/fan_oracle.py --max-exp 6 --max-gens 3 --depth 9
"""

import argparse
from collections import Counter
from itertools import combinations

from torofold import toric2d


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--max-exp", type=int, default=6)
    p.add_argument("--max-gens", type=int, default=3)
    p.add_argument("--depth", type=int, default=9)
    args = p.parse_args()
    pts = [(i, j) for i in range(args.max_exp + 1) for j in range(args.max_exp + 1)]
    ideals = {
        toric2d.MonomialIdeal2D.of(g) for n in range(1, args.max_gens + 1) for g in combinations(pts, n)
    }
    levels = toric2d.all_fans(args.depth)
    counts, bad, deep = Counter(), [], 0
    for I in sorted(ideals, key=lambda I: I.gens):
        n = toric2d.minimal_principalizing_fan(I).n_insertions()
        if n > args.depth:
            deep += 1
            continue
        best = toric2d.exhaustive_min_insertions(I, max_insertions=args.depth, levels=levels)
        counts[n] += 1
        if best != n:
            bad.append((I.gens, n, best))
    print(f"{len(ideals)} ideals; blow-up counts {dict(sorted(counts.items()))}; {deep} beyond depth")
    for gens, n, best in bad:
        print(f"  mismatch {gens}: construction {n}, search {best}")
    print(f"{len(bad)} mismatches")


if __name__ == "__main__":
    main()
