"""Run the seeded property suites from the library.

Five suites: duality (K = W on the duality-preserving nodes), k-le-w
(K <= W everywhere, diagonal square included), axioms (lifted distances
are pseudometrics), well-behaved (max passes the three evaluation-function
conditions, min fails two of them with known witnesses), and oracle
(exact solvers vs brute-force enumeration).

Run:  python3 05_property_checks.py [--seed 7] [--n 20]
"""

import argparse

from behametric.suites import SUITES, run_suite

parser = argparse.ArgumentParser()
parser.add_argument("--seed", type=int, default=7)
parser.add_argument("--n", type=int, default=20, help="instances per node")
args = parser.parse_args()

for name in sorted(SUITES):
    result = run_suite(name, seed=args.seed, n=args.n)
    print(result.summary())

# the well-behavedness failures of min are data, not errors; look at them
from behametric.lifting import check_well_behaved
from behametric.values import TOP_ONE

report = check_well_behaved("min", TOP_ONE, seed=args.seed)
print("\nmin on finite sets is not a lawful evaluation function:")
print(f"  condition 2 witness: {sorted(report.witnesses[2], key=len)[0]}")
print(f"  condition 3 witness: {sorted(report.witnesses[3], key=len)[0]}")
