"""Tabulate omega(m, r) for small ladders by the closed construction and by search.

    python scripts/omega_table.py --max-m 4 --max-r 4
"""

import argparse
from itertools import product

from torofold import toric2d


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--max-m", type=int, default=4)
    p.add_argument("--max-r", type=int, default=4)
    args = p.parse_args()
    mismatches = 0
    print(f"{'m':>2} {'r_2..r_(m-1)':<16} {'omega':>5} {'search':>6} {'fan'}")
    for m in range(3, args.max_m + 1):
        for r in product(range(args.max_r + 1), repeat=m - 2):
            if r[-1] == 0:
                continue
            om = toric2d.omega(m, list(r))
            ov = toric2d.omega_by_valuations(m, list(r))
            fan = toric2d.minimal_principalizing_fan(
                toric2d.ladder_ideal(m, r), toric2d.StrictTransformCondition(m, tuple(r))
            )
            mismatches += om != ov
            print(f"{m:>2} {str(list(r)):<16} {om:>5} {ov:>6} {list(fan.insertion_order)}")
    print(f"{mismatches} mismatches")


if __name__ == "__main__":
    main()
