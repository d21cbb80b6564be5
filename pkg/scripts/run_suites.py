"""Run the randomized suites and print verdict counts and timings.

    python scripts/run_suites.py --count 50 --seed 7 eq3 eq2 dim2
"""

import argparse
import random
import time
from collections import Counter

from torofold import randomforms as rf
from torofold.plane import run_dim2
from torofold.verify import (
    run_1point_reduction,
    run_1point_spec,
    run_2point_reduction,
    run_3point_principalization,
    run_torgood,
)


def one_case(kind, k, rng, b):
    if kind == "eq3":
        return run_1point_reduction(rf.eq3_form(rng, b))
    if kind == "eq2":
        return run_2point_reduction(rf.eq2_form(rng, b))
    if kind == "eq4":
        m, r, om = rf.eq4_case(rng, b)
        return run_1point_spec(rf.eq4_form(m, r, om + 1, rng, b))
    if kind == "step2":
        gen = rf.step2_three_point if k % 2 == 0 else rf.step2_two_point
        return run_3point_principalization(gen(rng, b))
    if kind == "torgood":
        return run_torgood(rf.torgood_form(rng, b, 3 if k % 10 == 0 else 2))
    u, v = rf.dim2_pair(rng, b)
    return run_dim2(u, v)


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("suites", nargs="*", default=["eq3", "eq2", "eq4", "step2", "torgood", "dim2"])
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trunc", type=int, default=16)
    p.add_argument("--exp-max", type=int, default=6)
    args = p.parse_args()
    b = rf.Bounds(exp_max=args.exp_max, trunc=args.trunc)
    for kind in args.suites:
        rng = random.Random(args.seed)
        verdicts = Counter()
        start = time.perf_counter()
        for k in range(args.count):
            rep = one_case(kind, k, rng, b)
            verdicts[rep.verdict] += 1
            if rep.verdict == "fail":
                print(f"  {kind} case {k} failed at {rep.witness.label}: {rep.tree.root}")
        dt = time.perf_counter() - start
        print(f"{kind:8s} {dict(verdicts)}  {dt:.1f}s  ({dt / max(args.count, 1) * 1000:.0f} ms/case)")


if __name__ == "__main__":
    main()
