"""Correlations, expectation matrices and triangle/column geometry.

Conventions used throughout the package:

* ``p`` drives the first set F1 (square index ``i``), ``q`` drives F2
  (square index ``j``); ``q`` defaults to ``p``.
* An expectation matrix is a 2x2 float array laid out as
  ``[[LL, LR], [RL, RR]]``: rows are the half of the unit square the
  parent triangle sits in (L = negative columns, R = positive columns),
  columns are the type of the offspring triangle.
* Words of column digits are read most significant digit first, so the
  order-``n`` column index ``k`` has digits ``k_1 ... k_n`` in base ``M``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

DEFAULT_LIFT_CAP = 10**6
DEFAULT_PRODUCT_CAP = 10**7


@dataclass(frozen=True)
class CantorSpec:
    """Base ``M`` and the selection probabilities of the two Cantor sets."""

    M: int
    p: tuple
    q: Optional[tuple] = None

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"base M must be an integer >= 2, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "p", _checked_probs(self.p, self.M, "p"))
        if self.q is not None:
            object.__setattr__(self, "q", _checked_probs(self.q, self.M, "q"))

    @classmethod
    def from_probs(cls, p: Sequence[float], q: Optional[Sequence[float]] = None) -> "CantorSpec":
        return cls(len(p), tuple(p), None if q is None else tuple(q))

    @classmethod
    def from_csv(cls, p: str, q: Optional[str] = None) -> "CantorSpec":
        """Build from comma separated strings such as ``"1,0,1,0.3"``."""
        pv = parse_csv(p)
        qv = None if q is None else parse_csv(q)
        if qv is not None and len(qv) != len(pv):
            raise ValueError(f"q has {len(qv)} entries but p has {len(pv)}")
        return cls.from_probs(pv, qv)

    @classmethod
    def from_json(cls, text: str) -> "CantorSpec":
        data = json.loads(text)
        return cls(data["M"], tuple(data["p"]), None if data.get("q") is None else tuple(data["q"]))

    def to_json(self) -> str:
        return json.dumps({"M": self.M, "p": list(self.p), "q": None if self.q is None else list(self.q)})

    @property
    def second(self) -> tuple:
        """Probability vector of F2."""
        return self.p if self.q is None else self.q

    @property
    def two_vector(self) -> bool:
        return self.q is not None

    @property
    def is_supercritical(self) -> bool:
        return sum(self.p) > 1 and sum(self.second) > 1

    @property
    def is_deterministic(self) -> bool:
        return all(x in (0, 1) for x in self.p + self.second)

    def p_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)

    def q_array(self) -> np.ndarray:
        return np.asarray(self.second, dtype=float)


def _checked_probs(values, M: int, name: str) -> tuple:
    vals = tuple(float(v) for v in values)
    if len(vals) != M:
        raise ValueError(f"{name} must have {M} entries, got {len(vals)}")
    for v in vals:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} entries must lie in [0, 1], got {v!r}")
    return vals


def parse_csv(text: str) -> list:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"malformed probability list {text!r}") from exc
    if not values:
        raise ValueError("empty probability list")
    return values


def correlations(spec: CantorSpec) -> np.ndarray:
    """Cyclic cross-correlations ``gamma_k = sum_j q_j p_{(j+k) mod M}``."""
    p, q = spec.p_array(), spec.q_array()
    return np.array([np.dot(q, np.roll(p, -k)) for k in range(spec.M)])


def expectation_matrix(spec: CantorSpec, k: int) -> np.ndarray:
    """Level-1 expectation matrix of column digit ``k``.

    Entries are plain (non-wrapping) difference sums over the level-1
    squares ``(i, j)``: an R-triangle lies over column ``i - j`` and an
    L-triangle over column ``i - j - 1``; negative offsets land in the
    L half (index shifted by ``M``).
    """
    M = spec.M
    if not 0 <= k < M:
        raise ValueError(f"column digit {k} out of range for M={M}")
    p, q = spec.p_array(), spec.q_array()

    def diag_sum(d):
        # sum of p_i q_j over i - j == d
        if d >= M or d <= -M:
            return 0.0
        if d >= 0:
            return float(np.dot(p[d:], q[: M - d]))
        return float(np.dot(p[: M + d], q[-d:]))

    return np.array(
        [
            [diag_sum(k + 1 - M), diag_sum(k - M)],
            [diag_sum(k + 1), diag_sum(k)],
        ]
    )


def level1_matrices(spec: CantorSpec) -> np.ndarray:
    """All ``M`` level-1 matrices stacked as an ``(M, 2, 2)`` array."""
    return np.stack([expectation_matrix(spec, k) for k in range(spec.M)])


def word_matrix(spec: CantorSpec, word: Sequence[int]) -> np.ndarray:
    result = np.eye(2)
    for k in word:
        result = result @ expectation_matrix(spec, int(k))
    return result


def pf_eigenvalue(m) -> float:
    """Perron-Frobenius eigenvalue of a nonnegative 2x2 matrix."""
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if (m < 0).any():
        raise ValueError("pf_eigenvalue needs a nonnegative matrix")
    return float(pf_eigenvalues(m[None])[0])


def pf_eigenvalues(mats: np.ndarray) -> np.ndarray:
    """Vectorised largest eigenvalue of a stack ``(..., 2, 2)`` of nonnegative matrices."""
    a, b = mats[..., 0, 0], mats[..., 0, 1]
    c, d = mats[..., 1, 0], mats[..., 1, 1]
    # (a-d)^2 + 4bc is the discriminant written without cancellation
    return 0.5 * (a + d + np.sqrt((a - d) ** 2 + 4.0 * b * c))


def digits(k: int, M: int, n: int) -> tuple:
    """Base-``M`` digits of ``k`` padded to length ``n``, most significant first."""
    if not 0 <= k < M**n:
        raise ValueError(f"index {k} out of range for M={M}, n={n}")
    out = []
    for _ in range(n):
        k, d = divmod(k, M)
        out.append(d)
    return tuple(reversed(out))


def higher_order(spec: CantorSpec, n: int, cap: int = DEFAULT_LIFT_CAP) -> CantorSpec:
    """Base ``M**n`` spec whose entry with digits ``i_1..i_n`` is ``p_{i_1}...p_{i_n}``."""
    if n < 1:
        raise ValueError("order must be >= 1")
    if spec.M**n > cap:
        raise ValueError(f"lifted vector would have {spec.M**n} entries (cap {cap})")

    def lift(v):
        out = np.ones(1)
        for _ in range(n):
            out = np.kron(out, v)
        return tuple(out)

    q = None if spec.q is None else lift(spec.q_array())
    return CantorSpec(spec.M**n, lift(spec.p_array()), q)


def gamma_at(spec: CantorSpec, n: int, k: int) -> float:
    """Order-``n`` correlation at index ``k`` without building the lifted vector."""
    m = word_matrix(spec, digits(k, spec.M, n))
    return float(m[0, 1] + m[1, 1])


def word_products(mats: np.ndarray, length: int, cap: int = DEFAULT_PRODUCT_CAP) -> np.ndarray:
    """Products over every word of ``length`` digits, in integer order.

    Returns an array of shape ``(M**length, 2, 2)``.
    """
    M = len(mats)
    if M**length > cap:
        raise ValueError(f"{M**length} words of length {length} exceed the product cap {cap}")
    out = np.eye(2)[None]
    for _ in range(length):
        out = np.einsum("wij,kjl->wkil", out, mats).reshape(-1, 2, 2)
    return out


def iter_column_sums(mats: np.ndarray, length: int, block: int = 1 << 16) -> Iterator[tuple]:
    """Yield ``(start, sums)`` blocks covering all words of ``length`` in integer order.

    ``sums[w] = (1, 1) @ M(word)``, i.e. the L- and R-column sums. Memory
    stays ``O(block)`` regardless of the number of words.
    """
    M = len(mats)
    if M**length <= block:
        v = np.ones((1, 2))
        for _ in range(length):
            v = np.einsum("wi,kij->wkj", v, mats).reshape(-1, 2)
        yield 0, v
        return
    b = 0
    while M ** (b + 1) <= block:
        b += 1
    b = max(b, 1)
    suffix = word_products(mats, b)
    width = M**b
    rows = max(1, block // width)
    for start, prefix in iter_column_sums(mats, length - b, block):
        for lo in range(0, len(prefix), rows):
            chunk = prefix[lo : lo + rows]
            sums = np.einsum("wi,sij->wsj", chunk, suffix).reshape(-1, 2)
            yield (start + lo) * width, sums


# ---------------------------------------------------------------------------
# triangle / column geometry


@dataclass(frozen=True)
class TriangleAddress:
    level: int
    kind: str  # "L" or "R"
    i: int
    j: int


@dataclass(frozen=True, order=True)
class ColumnId:
    level: int
    side: str  # "+" for C_k, "-" for C_k^-
    index: int
    M: int = field(default=0, compare=False)

    @property
    def digits(self) -> tuple:
        return digits(self.index, self.M, self.level)


def column_of(t: TriangleAddress, M: int) -> ColumnId:
    """Column over which a level-``n`` triangle projects."""
    size = M**t.level
    if not (0 <= t.i < size and 0 <= t.j < size):
        raise ValueError(f"triangle indices out of range for level {t.level}")
    if t.kind == "R":
        d = t.i - t.j
    elif t.kind == "L":
        d = t.i - t.j - 1
    else:
        raise ValueError(f"triangle kind must be 'L' or 'R', got {t.kind!r}")
    if d >= 0:
        return ColumnId(t.level, "+", d, M)
    return ColumnId(t.level, "-", d + size, M)


def signed_offset(col: ColumnId) -> int:
    """Position of a column on the line ``[-M**n, M**n)``; ``C_k`` -> ``k``, ``C_k^-`` -> ``k - M**n``."""
    return col.index if col.side == "+" else col.index - col.M**col.level


def dimension(spec: CantorSpec) -> tuple:
    """Almost-sure Hausdorff dimensions ``log(sum p) / log M`` of F1 and F2 (nan when subcritical)."""

    def dim(v):
        s = sum(v)
        return math.log(s) / math.log(spec.M) if s > 1 else float("nan")

    return dim(spec.p), dim(spec.second)
