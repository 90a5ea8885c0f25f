#!/usr/bin/env python3
"""Monte-Carlo cross-check of the analytic formulas.

Runs the simulation at each (mu, L) operating point and prints the
deviation of every tallied statistic from its closed form, in binomial
standard errors. Exits nonzero if any row exceeds the sigma budget.
"""

import argparse
import sys

from dualqss.detectors import SystemParams
from dualqss.montecarlo import SimConfig, compare_to_analytic, max_abs_sigma, simulate


def run(rounds: int, seed: int, threads: int, budget: float, verbose: bool) -> int:
    worst_overall = 0.0
    for mu in (0.4, 0.84, 1.5):
        for l_km in (100.0, 400.0):
            cfg = SimConfig(sp=SystemParams(mu=mu, l_km=l_km), rounds=rounds,
                            seed=seed, basis_policy=1.0)
            rows = compare_to_analytic(simulate(cfg, threads=threads))
            worst = max_abs_sigma(rows)
            worst_overall = max(worst_overall, worst)
            flag = "ok" if worst <= budget else "EXCEEDED"
            print(f"mu={mu:<5} L={l_km:>5.0f} km  rows={len(rows):3d}  "
                  f"max|sigma|={worst:5.2f}  {flag}")
            shown = rows if verbose else [r for r in rows if abs(r["sigma"]) > 2.0]
            for r in shown:
                print(f"    {r['name']:34s} count={r['count']:>9d} "
                      f"expected={r['expected']:>12.2f} sigma={r['sigma']:+6.2f}")
    print(f"worst over all configurations: {worst_overall:.2f} "
          f"(budget {budget})")
    return 0 if worst_overall <= budget else 1


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rounds", type=int, default=10_000_000)
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--budget", type=float, default=5.0)
    parser.add_argument("--verbose", action="store_true",
                        help="print every row, not only |sigma| > 2")
    args = parser.parse_args()
    sys.exit(run(args.rounds, args.seed, args.threads, args.budget, args.verbose))
