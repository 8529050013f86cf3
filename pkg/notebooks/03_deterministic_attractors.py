"""Exact answers for 0-1 vectors through the boolean matrix semigroup.

Run: python3 notebooks/03_deterministic_attractors.py
"""

import collections

from cantordiff.determ import (
    codes_of,
    cross_validate,
    decide_deterministic,
    empty_column_depth,
    initial_set,
    scan_all_periods,
)
from cantordiff.spectrum import CantorSpec

for p in ([1, 0, 1], [1, 0, 1, 0, 1], [1, 0, 0, 1], [1, 1, 0, 1]):
    spec = CantorSpec.from_probs(p)
    d = decide_deterministic(spec)
    start = [f"T{c}" for c in codes_of(initial_set(spec))]
    print(p, "start", start, "->", d.verdict, d.report.to_dict()["attractor"])
    w = empty_column_depth(spec)
    if w is not None:
        print("   empty column at level", w.level, "digits", w.digits)

# Every one of the 2**16 starting sets settles on a fixed point.
periods = scan_all_periods()
print("periods seen:", collections.Counter(periods.tolist()))

# Brute force agrees with the attractor verdict on every 0-1 vector up to base 6.
r = cross_validate(max_M=6)
print(r["vectors"], "vectors,", len(r["mismatches"]), "mismatches")
