"""Three-coloured pairings of L- and R-triangles inside one column.

Run: python3 notebooks/05_delta_pair_coloring.py
"""

import random

from cantordiff.pairing import ColumnOccupancy, check_coloring, max_delta_pairs, three_color_pairing

odds, evens = [1, 3, 5], [2, 4, 6]
c = three_color_pairing(odds, evens)
print("single run:", list(zip(c.pairs, c.colors)), "violations:", check_coloring(odds, evens, c))

# Scattered labels: runs are glued and shifted before colouring.
rng = random.Random(5)
odds = sorted(rng.sample(range(1, 60, 2), 10))
evens = sorted(rng.sample(range(2, 61, 2), 10))
c = three_color_pairing(odds, evens)
print("odds ", odds)
print("evens", evens)
for colour, members in c.color_classes().items():
    print(f"  {colour}: {members}")
print("  uncoloured:", [p for p, col in zip(c.pairs, c.colors) if col is None])
print("  violations:", check_coloring(odds, evens, c))

# Largest set of disjoint non-adjacent couples in an occupied column.
occ = ColumnOccupancy.from_pattern([True, True, True, False, True, True, True, True])
print("occupancy", occ, "->", max_delta_pairs(occ))
