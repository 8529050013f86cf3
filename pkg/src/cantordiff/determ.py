"""Exact decision procedure for 0-1 probability vectors.

A 0-1 matrix ``[[a, b], [c, d]]`` is coded ``a + 2b + 4c + 8d``; a set of
such matrices is a 16-bit mask. ``g_step`` maps a set to the reductions of
all ordered pairwise products, and the set of difference-set columns that
can go empty is read off from the attractor of that map.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np

from .spectrum import CantorSpec, digits, expectation_matrix

T0 = 0
ALL_SETS = 1 << 16
NO_DELTA_PAIR_FAMILY = (5, 6, 9, 10)


def reduce(m) -> int:
    """Code of the 0-1 pattern of a nonnegative 2x2 matrix."""
    a = np.asarray(m)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    if (a < 0).any():
        raise ValueError("reduction is defined for nonnegative matrices")
    nz = a != 0
    return int(nz[0, 0]) | int(nz[0, 1]) << 1 | int(nz[1, 0]) << 2 | int(nz[1, 1]) << 3


def to_matrix(code: int) -> np.ndarray:
    return np.array([[code & 1, code >> 1 & 1], [code >> 2 & 1, code >> 3 & 1]], dtype=np.int64)


@lru_cache(maxsize=None)
def product_table() -> tuple:
    """``table[a][b]`` is the code of the boolean product ``T_a T_b``."""
    return tuple(tuple(reduce(to_matrix(a) @ to_matrix(b)) for b in range(16)) for a in range(16))


def bool_product(a: int, b: int) -> int:
    return product_table()[a][b]


def mask_of(codes: Iterable[int]) -> int:
    mask = 0
    for c in codes:
        if not 0 <= c < 16:
            raise ValueError(f"matrix code {c} out of range")
        mask |= 1 << c
    return mask


def codes_of(mask: int) -> list:
    return [c for c in range(16) if mask >> c & 1]


def g_step(mask: int) -> int:
    """Reductions of all ordered products ``T T'`` with ``T, T'`` in the set."""
    return int(g_table()[mask])


@lru_cache(maxsize=None)
def g_table() -> np.ndarray:
    """Image of every one of the 2**16 sets under ``g_step``, computed by vectorised bit algebra."""
    table = product_table()
    sets = np.arange(ALL_SETS, dtype=np.int64)
    # right[a][C] = mask of {T_a T' : T' in C}
    out = np.zeros(ALL_SETS, dtype=np.int64)
    for a in range(16):
        right = np.zeros(ALL_SETS, dtype=np.int64)
        for b in range(16):
            right |= np.where(sets >> b & 1, 1 << table[a][b], 0)
        out |= np.where(sets >> a & 1, right, 0)
    out.setflags(write=False)
    return out


def g_step_direct(mask: int) -> int:
    """Straight double loop over the set; kept as a cross-check for ``g_table``."""
    cs = codes_of(mask)
    return mask_of(bool_product(a, b) for a in cs for b in cs)


@dataclass(frozen=True)
class AttractorReport:
    cycle: tuple
    preperiod: int
    trajectory: tuple

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def attractor(self) -> int:
        """First set of the cycle; for a fixed point this is the attractor itself."""
        return self.cycle[0]

    def contains_t0(self) -> bool:
        return any(s & 1 for s in self.cycle)

    def to_dict(self) -> dict:
        return {
            "attractor": [f"T{c}" for c in codes_of(self.attractor)],
            "cycle": [[f"T{c}" for c in codes_of(s)] for s in self.cycle],
            "preperiod": self.preperiod,
            "period": self.period,
            "trajectory": [[f"T{c}" for c in codes_of(s)] for s in self.trajectory],
        }


def attractor(initial: int) -> AttractorReport:
    g = g_table()
    seen = {}
    traj = []
    state = int(initial)
    while state not in seen:
        seen[state] = len(traj)
        traj.append(state)
        state = int(g[state])
    start = seen[state]
    return AttractorReport(tuple(traj[start:]), start, tuple(traj))


def scan_all_periods() -> np.ndarray:
    """Period of the attractor reached from each of the 2**16 initial sets.

    Walks the functional graph of ``g_table`` once, so every state is
    visited a bounded number of times.
    """
    g = g_table()
    period = np.zeros(ALL_SETS, dtype=np.int64)
    for s0 in range(ALL_SETS):
        if period[s0]:
            continue
        path = []
        pos = {}
        s = s0
        while not period[s] and s not in pos:
            pos[s] = len(path)
            path.append(s)
            s = int(g[s])
        p = period[s] if period[s] else len(path) - pos[s]
        for t in path:
            period[t] = p
    return period


def initial_set(spec: CantorSpec) -> int:
    return mask_of(reduce(expectation_matrix(spec, k)) for k in range(spec.M))


@dataclass(frozen=True)
class DeterministicDecision:
    verdict: str  # "Interval" | "NoInterval"
    report: Optional[AttractorReport]
    initial: int
    degenerate: bool = False

    def to_dict(self) -> dict:
        d = {
            "verdict": self.verdict,
            "initial": [f"T{c}" for c in codes_of(self.initial)],
            "degenerate": self.degenerate,
        }
        if self.report is not None:
            d.update(self.report.to_dict())
        return d


def decide_deterministic(spec: CantorSpec) -> DeterministicDecision:
    if not spec.is_deterministic:
        raise ValueError("decide_deterministic needs a 0-1 probability vector")
    if sum(spec.p) < 1 or sum(spec.second) < 1:
        raise ValueError("a set with no selected digit is empty")
    init = initial_set(spec)
    if sum(spec.p) <= 1 or sum(spec.second) <= 1:
        # one set is a single point, so the difference is a translate of the other set
        full = all(x == 1 for x in spec.p) or all(x == 1 for x in spec.second)
        return DeterministicDecision("Interval" if full else "NoInterval", None, init, degenerate=True)
    rep = attractor(init)
    return DeterministicDecision("NoInterval" if rep.contains_t0() else "Interval", rep, init)


# ---------------------------------------------------------------------------
# brute-force column occupancy


def survivors(probs, level: int) -> np.ndarray:
    """All level-``level`` digit strings (as integers) of a deterministic 0-1 vector."""
    M = len(probs)
    allowed = np.array([d for d in range(M) if probs[d] == 1], dtype=np.int64)
    nodes = np.zeros(1, dtype=np.int64)
    for _ in range(level):
        nodes = (nodes[:, None] * M + allowed[None, :]).ravel()
    return nodes


def lag_presence(s1: np.ndarray, s2: np.ndarray, size: int) -> np.ndarray:
    """Boolean array over lags ``t = i - j`` in ``[-size, size)`` (index ``t + size``)."""
    a = np.zeros(size)
    b = np.zeros(size)
    a[s1] = 1
    b[s2] = 1
    if size <= 4096:
        conv = np.convolve(a, b[::-1])
    else:
        from scipy.signal import fftconvolve

        conv = fftconvolve(a, b[::-1])
    out = np.zeros(2 * size, dtype=bool)
    # conv[m] counts i - j = m - (size - 1)
    out[1:] = conv > 0.5
    return out


def empty_columns(spec: CantorSpec, level: int) -> list:
    """Signed offsets ``s`` in ``[-M**n, M**n)`` of every empty level-``n`` column.

    Column ``s`` holds R-triangles with lag ``s`` and L-triangles with lag
    ``s + 1``.
    """
    size = spec.M**level
    lags = lag_presence(survivors(spec.p, level), survivors(spec.second, level), size)
    occupied = lags.copy()
    occupied[:-1] |= lags[1:]
    return [int(s) - size for s in np.flatnonzero(~occupied)]


def empty_column_indices(spec: CantorSpec, level: int) -> list:
    """Indices ``k`` whose columns ``C_k`` and ``C^-_k`` are both empty.

    This is the event ``Z^L(k) + Z^R(k) = 0``, i.e. a zero expectation
    pattern for the word ``k``, which then stays zero under every prefix.
    """
    size = spec.M**level
    empty = set(empty_columns(spec, level))
    return [k for k in range(size) if k in empty and k - size in empty]


@dataclass(frozen=True)
class EmptyColumn:
    level: int
    index: int
    digits: tuple


def empty_column_depth(spec: CantorSpec, cap: int = 6, check: bool = True) -> Optional[EmptyColumn]:
    """First level (up to ``cap``) with an empty column, found by brute force.

    With ``check`` set, failing to find one while the attractor contains
    ``T0`` raises, since that contradicts the decision procedure.
    """
    if not spec.is_deterministic:
        raise ValueError("empty_column_depth needs a 0-1 probability vector")
    for n in range(1, cap + 1):
        ks = empty_column_indices(spec, n)
        if ks:
            return EmptyColumn(n, ks[0], digits(ks[0], spec.M, n))
    if check and sum(spec.p) > 1 and attractor(initial_set(spec)).contains_t0():
        raise RuntimeError(
            f"T0 is in the attractor but no empty column was found up to level {cap}"
        )
    return None


def all_zero_one_vectors(M: int, min_sum: int = 2):
    for bits in range(1 << M):
        v = [(bits >> (M - 1 - i)) & 1 for i in range(M)]
        if sum(v) >= min_sum:
            yield v


def _has_full_row(code: int) -> bool:
    return code & 3 == 3 or code & 12 == 12


def cross_validate(max_M: int = 8, witness_level: int = 3, occupancy_level: int = 4) -> dict:
    """Check the attractor verdict against brute-force column occupancy.

    For every 0-1 vector with ``2 <= M <= max_M`` and at least two ones:

    * NoInterval iff some column is empty at a level ``<= witness_level``;
    * an Interval attractor inside ``{T5, T6, T9, T10}`` leaves no column
      empty up to ``occupancy_level``;
    * an attractor without ``T0`` and without a full row lies inside
      ``{T5, T6, T9, T10}``.
    """
    family = mask_of(NO_DELTA_PAIR_FAMILY)
    mismatches, occupancy_failures, case2_failures = [], [], []
    count = 0
    for M in range(2, max_M + 1):
        for v in all_zero_one_vectors(M):
            count += 1
            spec = CantorSpec.from_probs(v)
            d = decide_deterministic(spec)
            witness = empty_column_depth(spec, cap=witness_level, check=False)
            if (d.verdict == "NoInterval") != (witness is not None):
                mismatches.append({"p": v, "verdict": d.verdict, "witness_level": None if witness is None else witness.level})
            att = d.report.attractor
            if d.verdict == "Interval" and att & ~family == 0:
                for n in range(1, occupancy_level + 1):
                    if empty_columns(spec, n):
                        occupancy_failures.append({"p": v, "level": n})
                        break
            if not d.report.contains_t0() and not any(_has_full_row(c) for c in codes_of(att)):
                if att & ~family:
                    case2_failures.append({"p": v, "attractor": codes_of(att)})
    return {
        "vectors": count,
        "max_M": max_M,
        "witness_level": witness_level,
        "mismatches": mismatches,
        "occupancy_failures": occupancy_failures,
        "case2_failures": case2_failures,
    }
