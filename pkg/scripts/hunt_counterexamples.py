#!/usr/bin/env python3
"""Run seeded counterexample searches against certifiers and chains.

Useful for spotting which random families break which hypotheses, and for
confirming that families satisfying the multiplicative bound never break
the chains built on it:

    python3 scripts/hunt_counterexamples.py --budget 200 --seed 11
"""
import argparse

from hhv.convexity import SamplePlan
from hhv.expr import Interval
from hhv.search import FamilySpec, SearchTarget, find_counterexample

RUNS = [
    ("check:log_convex", FamilySpec("positive_poly", 2, (0.0, 2.0)), None, (1.0, 2.0)),
    ("check:log_convex", FamilySpec("exp_of_poly", 2, (-2.0, 2.0)), None, (0.0, 1.0)),
    ("check:log_convex", FamilySpec("exp_of_poly", 1, (-2.0, 2.0)), None, (0.0, 1.0)),
    ("check:convex", FamilySpec("power", 0, (0.0, 1.0)), None, (0.5, 2.0)),
    ("chain:classic_hh", FamilySpec("power", 0, (0.0, 1.0)), None, (0.5, 2.0)),
    ("chain:theorem1", FamilySpec("exp_of_poly", 1, (-2.0, 2.0)),
     FamilySpec("positive_poly", 2, (0.1, 2.0)), (0.0, 1.0)),
    ("chain:theorem2", FamilySpec("exp_of_poly", 1, (-2.0, 2.0)),
     FamilySpec("positive_poly", 2, (0.1, 2.0)), (0.0, 1.0)),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sampler = SamplePlan(x_points=9, t_points=9, random_count=128, seed=args.seed)
    for target_text, f_spec, phi_spec, (a, b) in RUNS:
        kind, _, name = target_text.partition(":")
        outcome = find_counterexample(
            SearchTarget(kind, name), f_spec, phi_spec, Interval(a, b),
            args.budget, args.seed, sampler=sampler)
        label = f"{target_text:22s} {f_spec.family:14s} deg<={f_spec.degree_bound} on [{a}, {b}]"
        if outcome.found:
            print(f"{label}  FOUND at trial {outcome.witness.trial}: "
                  f"f = {outcome.witness.f_text}")
        else:
            skipped = f", skipped {outcome.skipped}" if outcome.skipped else ""
            print(f"{label}  clean after {outcome.trials} trials{skipped}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
