"""Are the hypotheses needed?  Search for kernel-free instances.

For each hypothesis we search for an instance that satisfies all the others,
violates that one, and has no H-kernel.  The control run (nothing dropped)
must never find anything.  Pass a budget on the command line to search
harder, e.g. ``python3 demos/04_tightness_search.py 100000``.
"""
import sys

from hkernel.harness import recertify, search_tightness

budget = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000

for drop in ("1", "2", "3", "4", "5", None):
    res = search_tightness(drop, budget, seed=0, jobs=2)
    label = "control" if drop is None else f"drop {drop}"
    if res is None:
        print(f"{label}: nothing found in {budget} instances")
        continue
    cert = recertify(res)
    arcs = ", ".join(f"{t}->{h}:{c}" for (t, h), c in sorted(res.instance.digraph.coloring.items()))
    print(f"{label}: trial {res.trial}, certificate valid={cert['valid']}")
    print(f"    H = {res.instance.pattern.sorted_arcs()}  arcs: {arcs}")
