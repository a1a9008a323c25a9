#!/usr/bin/env python3
"""Survey the four inequality chains over a small function catalog.

Prints one CSV row per (function, chain) with the worst adjacent margin,
so the equality cases and the violations are easy to eyeball:

    python3 scripts/chain_survey.py
    python3 scripts/chain_survey.py --a 0.5 --b 2 --quad-tol 1e-9
"""
import argparse
import csv
import sys

from hhv.chains import eval_classic_hh, eval_dragomir_mond, eval_theorem1, eval_theorem2
from hhv.convexity import PhiMap
from hhv.errors import HHVError
from hhv.expr import Interval, parse

CATALOG = [
    "exp(x)",          # equality case of the log-convex chains
    "exp(x^2)",        # log-convex, strict margins
    "x^2 + 0.5",       # convex but not log-convex on [0, 1]
    "2*x + 1",         # affine: classic chain is tight
    "sqrt(x + 0.25)",  # concave: classic chain breaks
    "1/(1 + x)",       # log-convex on positive domains
]

PHI_TEXTS = ["x", "x^2"]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--quad-tol", type=float, default=1e-10)
    args = ap.parse_args()

    interval = Interval(args.a, args.b)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["function", "chain", "phi", "verdict", "worst_margin"])

    for text in CATALOG:
        f = parse(text)
        runs = [("classic_hh", None, lambda: eval_classic_hh(f, interval, args.quad_tol)),
                ("dragomir_mond", None, lambda: eval_dragomir_mond(f, interval, args.quad_tol))]
        for phi_text in PHI_TEXTS:
            def run_t1(pt=phi_text):
                return eval_theorem1(f, PhiMap(parse(pt), interval), args.quad_tol)

            def run_t2(pt=phi_text):
                return eval_theorem2(f, f, PhiMap(parse(pt), interval), args.quad_tol)

            runs.append(("theorem1", phi_text, run_t1))
            runs.append(("theorem2", phi_text, run_t2))
        for chain_id, phi_text, run in runs:
            try:
                rep = run()
                worst = min(rep.pair_margins)
                writer.writerow([text, chain_id, phi_text or "", rep.verdict, repr(worst)])
            except HHVError as err:
                writer.writerow([text, chain_id, phi_text or "", "error", str(err)])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
