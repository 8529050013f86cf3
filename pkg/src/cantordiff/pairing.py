"""Delta-pair combinatorics inside one column.

Triangles in a column are numbered 1..K from the bottom; odd labels are
R-triangles, even labels L-triangles, and an (even, odd) couple is usable
when the two labels are not adjacent (``|e - o| > 1``).

``three_color_pairing`` is the constructive gluing-and-shifting argument:
maximal runs of labels are glued pairwise into alternating runs until at
most two remain, those are coloured by the periodic ``(u1,u4),(u2,u5),(u3,u6)``
scheme, and the colours are carried back to the original labels.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

COLORS = ("r", "g", "b")


@dataclass
class ColoredPairing:
    pairs: list = field(default_factory=list)  # (even, odd)
    colors: list = field(default_factory=list)  # aligned with pairs; None = uncoloured

    def color_classes(self) -> dict:
        out = {c: [] for c in COLORS}
        for pair, c in zip(self.pairs, self.colors):
            if c in out:
                out[c].append(pair)
        return out

    def to_dict(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs], "colors": list(self.colors)}


def _validate(odds: Sequence[int], evens: Sequence[int]):
    if len(odds) != len(evens):
        raise ValueError(f"need as many odd as even labels, got {len(odds)} and {len(evens)}")
    if any(o % 2 != 1 for o in odds):
        raise ValueError("odd labels must be odd")
    if any(e % 2 != 0 for e in evens):
        raise ValueError("even labels must be even")
    if len(set(odds)) != len(odds) or len(set(evens)) != len(evens):
        raise ValueError("labels must be distinct")


@dataclass
class _Run:
    start: int  # position on the working line
    labels: list  # original labels, in line order

    @property
    def end(self) -> int:
        return self.start + len(self.labels) - 1


def _runs(labels: Iterable[int]) -> list:
    runs = []
    for x in sorted(labels):
        if runs and x == runs[-1].end + 1:
            runs[-1].labels.append(x)
        else:
            runs.append(_Run(x, [x]))
    return runs


def _find_glue(runs: list) -> Optional[tuple]:
    # runs are sorted by position; prefer the left-most pair, J1 left of J2 first
    for a in range(len(runs)):
        for b in range(a + 1, len(runs)):
            for i, j in ((a, b), (b, a)):
                if runs[i].labels[-1] % 2 != runs[j].labels[0] % 2:
                    return i, j
    return None


def _glue(runs: list, i: int, j: int) -> list:
    j1, j2 = runs[i], runs[j]
    others = [r for k, r in enumerate(runs) if k not in (i, j)]
    length = len(j1.labels) + len(j2.labels)
    # others are disjoint and sorted, so one sweep finds the smallest feasible start
    lo = j1.start
    for r in others:
        if r.end <= lo - 2:
            continue
        if r.start >= lo + length + 1:
            break
        lo = r.end + 2
    merged = _Run(lo, j1.labels + j2.labels)
    return sorted(others + [merged], key=lambda r: r.start)


def _couple(a: int, b: int) -> tuple:
    return (a, b) if a % 2 == 0 else (b, a)


def _base_coloring(u: list, pairs: list, colors: list) -> int:
    """Colour the first ``6 * (len(u) // 6)`` labels; return the number of labels left."""
    blocks = len(u) // 6
    for k in range(blocks):
        blk = u[6 * k : 6 * k + 6]
        for off, c in enumerate(COLORS):
            pairs.append(_couple(blk[off], blk[off + 3]))
            colors.append(c)
    return len(u) - 6 * blocks


def three_color_pairing(odds: Sequence[int], evens: Sequence[int]) -> ColoredPairing:
    """Couple every odd with an even label and 3-colour the couples.

    Within a colour class no even label is adjacent to an odd label, and
    every colour is used at least ``N // 3`` times. Couples left over by
    the construction (at most two) stay uncoloured.
    """
    _validate(odds, evens)
    if not odds:
        return ColoredPairing()
    runs = _runs(list(odds) + list(evens))
    while True:
        hit = _find_glue(runs)
        if hit is None:
            break
        runs = _glue(runs, *hit)

    # terminal state: at most one even-start and one odd-start run, both alternating
    eo = [r.labels for r in runs if r.labels[0] % 2 == 0]
    oe = [r.labels for r in runs if r.labels[0] % 2 == 1]
    assert len(eo) <= 1 and len(oe) <= 1 and all(len(u) % 2 == 0 for u in eo + oe)
    u1 = eo[0] if eo else []
    u2 = oe[0] if oe else []

    pairs, colors = [], []
    rest1 = _base_coloring(u1, pairs, colors) // 2
    rest2 = _base_coloring(u2, pairs, colors) // 2
    t1 = u1[len(u1) - 2 * rest1 :]
    t2 = u2[len(u2) - 2 * rest2 :]

    if (rest1, rest2) == (1, 2):
        # t1: e o -> g b ; t2: o e o e -> r b g r
        extra = [(t2[3], t2[0], "r"), (t1[0], t2[2], "g"), (t2[1], t1[1], "b")]
    elif (rest1, rest2) == (2, 1):
        # t1: e o e o -> r b g r ; t2: o e -> g b
        extra = [(t1[0], t1[3], "r"), (t1[2], t2[0], "g"), (t2[1], t1[1], "b")]
    elif (rest1, rest2) == (2, 2):
        # both tails r g b r
        extra = [
            (t1[0], t1[3], "r"),
            (t2[3], t2[0], "r"),
            (t2[1], t1[1], "g"),
            (t1[2], t2[2], "b"),
        ]
    else:
        extra = [(t[m], t[m + 1], None) for t in (t1, t2) for m in range(0, len(t), 2)]
    for a, b, c in extra:
        pairs.append(_couple(a, b))
        colors.append(c)
    return ColoredPairing(pairs, colors)


def check_coloring(odds: Sequence[int], evens: Sequence[int], c: ColoredPairing) -> list:
    """Every violated requirement of a coloured pairing, as messages; empty means valid."""
    problems = []
    odd_set, even_set = set(odds), set(evens)
    if len(c.colors) != len(c.pairs):
        problems.append(f"{len(c.pairs)} pairs but {len(c.colors)} colour entries")
    used = Counter()
    for e, o in c.pairs:
        if e not in even_set:
            problems.append(f"{e} is not one of the even labels")
        if o not in odd_set:
            problems.append(f"{o} is not one of the odd labels")
        used[("e", e)] += 1
        used[("o", o)] += 1
    for (_, label), count in sorted(used.items()):
        if count > 1:
            problems.append(f"label reused: {label} appears in {count} pairs")
    for col in c.colors:
        if col is not None and col not in COLORS:
            problems.append(f"unknown colour {col!r}")
    classes = c.color_classes()
    for col, members in classes.items():
        es = [e for e, _ in members]
        os_ = [o for _, o in members]
        for e in es:
            for o in os_:
                if abs(e - o) <= 1:
                    problems.append(f"colour {col}: |{e} - {o}| = {abs(e - o)} is not > 1")
    need = len(c.pairs) // 3
    for col, members in classes.items():
        if len(members) < need:
            problems.append(f"colour {col} used {len(members)} times, need {need}")
    return problems


# ---------------------------------------------------------------------------
# maximum Delta-pair extraction


@dataclass(frozen=True)
class ColumnOccupancy:
    odds: tuple  # R-triangles present
    evens: tuple  # L-triangles present

    def __post_init__(self):
        if any(o % 2 != 1 for o in self.odds) or any(e % 2 != 0 for e in self.evens):
            raise ValueError("odds must be odd and evens even")
        if len(set(self.odds)) != len(self.odds) or len(set(self.evens)) != len(self.evens):
            raise ValueError("labels must be distinct")

    @classmethod
    def from_pattern(cls, present: Sequence[bool]) -> "ColumnOccupancy":
        """Occupancy from a bottom-to-top presence pattern over labels ``1..K``."""
        labels = [i + 1 for i, x in enumerate(present) if x]
        return cls(tuple(x for x in labels if x % 2), tuple(x for x in labels if x % 2 == 0))


def max_delta_pairs(occ: ColumnOccupancy) -> list:
    """A maximum set of disjoint non-adjacent (even, odd) couples."""
    evens, odds = list(occ.evens), list(occ.odds)
    if not evens or not odds:
        return []
    e = np.array(evens)[:, None]
    o = np.array(odds)[None, :]
    adj = csr_matrix((np.abs(e - o) > 1).astype(np.int8))
    if adj.nnz == 0:
        return []
    match = maximum_bipartite_matching(adj, perm_type="column")
    return [(evens[r], odds[cidx]) for r, cidx in enumerate(match) if cidx >= 0]
