"""Interval / no-interval certificates for random Cantor set differences.

Three kinds of evidence are produced:

* ``all-gamma``: every order-``n`` correlation exceeds 1 (an interval
  almost surely);
* ``consecutive-gamma``: two cyclically consecutive order-``n``
  correlations are both below 1 (almost surely no interval);
* ``spectral``: a digit word whose expectation matrix has Perron-Frobenius
  eigenvalue below 1 (almost surely no interval, since repeating the word
  drives the expected column occupancy to zero on a dense set).

Ties (a value exactly equal to 1) never certify anything.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .spectrum import (
    CantorSpec,
    correlations,
    digits,
    iter_column_sums,
    level1_matrices,
    pf_eigenvalue,
    pf_eigenvalues,
    word_matrix,
)

DEFAULT_ENUM_BUDGET = 10**8
DEFAULT_MAX_WORD_LEN = 6


class Verdict(str, Enum):
    INTERVAL = "IntervalAS"
    NO_INTERVAL = "NoIntervalAS"
    INCONCLUSIVE = "Inconclusive"


class CertificationError(ValueError):
    """Raised when a bracket endpoint cannot be certified within budget."""


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    kind: str
    order: Optional[int] = None
    min_gamma: Optional[float] = None
    column: Optional[int] = None
    gammas: Optional[tuple] = None
    word: Optional[tuple] = None
    eigenvalue: Optional[float] = None
    max_order: Optional[int] = None
    max_word_len: Optional[int] = None

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        d["verdict"] = self.verdict.value
        for key in ("gammas", "word"):
            if key in d:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Decision":
        d = dict(d)
        d["verdict"] = Verdict(d["verdict"])
        for key in ("gammas", "word"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def default_max_order(M: int) -> int:
    """10 for ``M <= 4``; otherwise the largest order with at most ``4**10`` words."""
    if M <= 4:
        return 10
    return max(1, int(math.floor(10 * math.log(4) / math.log(M) + 1e-12)))


def decide_order1(gamma: Sequence[float]) -> Decision:
    g = np.asarray(gamma, dtype=float)
    M = len(g)
    if g.min() > 1:
        return Decision(Verdict.INTERVAL, "all-gamma", order=1, min_gamma=float(g.min()))
    for k in range(M):
        nxt = g[(k + 1) % M]
        if g[k] < 1 and nxt < 1:
            return Decision(
                Verdict.NO_INTERVAL,
                "consecutive-gamma",
                order=1,
                column=k,
                gammas=(float(g[k]), float(nxt)),
            )
    return Decision(Verdict.INCONCLUSIVE, "searched", max_order=1)


def _require_supercritical(spec: CantorSpec):
    if not spec.is_supercritical:
        raise ValueError(
            f"spec is not supercritical (sum p = {sum(spec.p):g}, sum q = {sum(spec.second):g}); "
            "the sets are almost surely empty"
        )


def scan_order(mats: np.ndarray, order: int, block: int = 1 << 16) -> Decision:
    """Decide from all order-``order`` correlations.

    Column sums of ``M(w)`` are ``(gamma_{k+1}, gamma_k)`` for the word
    ``w`` with index ``k``, so one pass over the words sees every
    cyclically consecutive pair, including the wrap from the last index
    to 0.
    """
    all_above = True
    min_gamma = math.inf
    for start, sums in iter_column_sums(mats, order, block):
        both_below = (sums[:, 0] < 1) & (sums[:, 1] < 1)
        if both_below.any():
            w = int(np.argmax(both_below))
            return Decision(
                Verdict.NO_INTERVAL,
                "consecutive-gamma",
                order=order,
                column=start + w,
                gammas=(float(sums[w, 1]), float(sums[w, 0])),
            )
        if all_above:
            r = sums[:, 1]
            if (r <= 1).any():
                all_above = False
            else:
                min_gamma = min(min_gamma, float(r.min()))
    if all_above:
        return Decision(Verdict.INTERVAL, "all-gamma", order=order, min_gamma=min_gamma)
    return Decision(Verdict.INCONCLUSIVE, "searched", max_order=order)


def decide_escalating(
    spec: CantorSpec,
    max_order: Optional[int] = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Decision:
    """Apply the correlation test to the order 1, 2, ... lifted sets."""
    _require_supercritical(spec)
    if max_order is None:
        max_order = default_max_order(spec.M)
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    total = sum(spec.M**m for m in range(1, max_order + 1))
    if total > budget:
        raise ValueError(
            f"orders 1..{max_order} need {total} words, above the enumeration budget {budget}"
        )
    mats = level1_matrices(spec)
    for m in range(1, max_order + 1):
        d = scan_order(mats, m)
        if d.verdict is not Verdict.INCONCLUSIVE:
            return d
    return Decision(Verdict.INCONCLUSIVE, "searched", max_order=max_order)


def spectral_certificate(
    spec: CantorSpec,
    max_word_len: int = DEFAULT_MAX_WORD_LEN,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Optional[tuple]:
    """First word (by length, then lexicographically) whose matrix has eigenvalue < 1."""
    _require_supercritical(spec)
    total = sum(spec.M**m for m in range(1, max_word_len + 1))
    if total > budget:
        raise ValueError(f"{total} words up to length {max_word_len} exceed the budget {budget}")
    mats = level1_matrices(spec)
    prods = np.eye(2)[None]
    for _ in range(max_word_len):
        prods = np.einsum("wij,kjl->wkil", prods, mats).reshape(-1, 2, 2)
        lam = pf_eigenvalues(prods)
        hit = np.flatnonzero(lam < 1)
        if hit.size:
            length = int(round(math.log(len(prods), spec.M)))
            return digits(int(hit[0]), spec.M, length)
    return None


def analyze(
    spec: CantorSpec,
    max_order: Optional[int] = None,
    max_word_len: int = DEFAULT_MAX_WORD_LEN,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Decision:
    """Correlation escalation first, then the spectral word search."""
    d = decide_escalating(spec, max_order, budget)
    if d.verdict is not Verdict.INCONCLUSIVE:
        return d
    word = spectral_certificate(spec, max_word_len, budget)
    if word is not None:
        lam = pf_eigenvalue(word_matrix(spec, word))
        return Decision(Verdict.NO_INTERVAL, "spectral", word=word, eigenvalue=lam)
    return Decision(
        Verdict.INCONCLUSIVE, "searched", max_order=d.max_order, max_word_len=max_word_len
    )


def delta_start_lower_bound(spec: CantorSpec) -> float:
    """Lower bound ``max_i p_i**3 * p_{i+1}**5`` on the chance of a level-2 Delta-pair in ``C_00``."""
    g = correlations(spec)
    if not g.min() > 1:
        raise ValueError(
            f"the Delta-pair bound needs every correlation > 1; min is {g.min():g}"
        )
    p = spec.p
    vals = [p[i] ** 3 * p[i + 1] ** 5 for i in range(spec.M - 1) if p[i] > 0 and p[i + 1] > 0]
    return max(vals)


# ---------------------------------------------------------------------------
# parameter families and bracketing

PARAM = "rho"


def instantiate(template: Sequence, value: float) -> CantorSpec:
    """Replace every ``"rho"`` entry of ``template`` by ``value``."""
    return CantorSpec.from_probs([value if x == PARAM else float(x) for x in template])


def parse_family(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append(PARAM if tok == PARAM else float(tok))
    if PARAM not in out:
        raise ValueError(f"family {text!r} has no {PARAM!r} entry")
    return out


@dataclass
class Bracket:
    lo: float
    hi: float
    lo_certificate: Decision
    hi_certificate: Decision
    effort: dict = field(default_factory=dict)
    assumption: str = "assumed-monotone"

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "lo_certificate": self.lo_certificate.to_dict(),
            "hi_certificate": self.hi_certificate.to_dict(),
            "effort": dict(self.effort),
            "assumption": self.assumption,
        }


def critical_bracket(
    template: Sequence,
    lo0: float,
    hi0: float,
    tol: float = 1e-3,
    max_order: Optional[int] = None,
    max_word_len: int = DEFAULT_MAX_WORD_LEN,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> Bracket:
    """Bracket the critical parameter of a one-parameter family.

    Assumes the verdict is monotone in the parameter: small values have no
    interval, large values do. While midpoints are certified, this is plain
    bisection. Once a midpoint is inconclusive, the two certified
    boundaries are bisected separately on either side of it, so ``lo`` is
    (to ``tol``) the largest certifiably interval-free value and ``hi`` the
    smallest certifiably interval-containing one.
    """
    if not 0 <= lo0 < hi0 <= 1:
        raise ValueError("need 0 <= lo0 < hi0 <= 1")
    calls = 0

    def judge(rho):
        nonlocal calls
        calls += 1
        return analyze(instantiate(template, rho), max_order, max_word_len, budget)

    dlo, dhi = judge(lo0), judge(hi0)
    if dlo.verdict is not Verdict.NO_INTERVAL:
        raise CertificationError(f"lower endpoint {lo0} is not certified NoIntervalAS ({dlo.verdict.value})")
    if dhi.verdict is not Verdict.INTERVAL:
        raise CertificationError(f"upper endpoint {hi0} is not certified IntervalAS ({dhi.verdict.value})")

    lo, hi = lo0, hi0
    gap = None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        d = judge(mid)
        if d.verdict is Verdict.NO_INTERVAL:
            lo, dlo = mid, d
        elif d.verdict is Verdict.INTERVAL:
            hi, dhi = mid, d
        else:
            gap = mid
            break

    if gap is not None:
        # last certified NoIntervalAS below the gap, then first IntervalAS above it
        a, b = lo, gap
        while b - a > tol:
            mid = 0.5 * (a + b)
            d = judge(mid)
            if d.verdict is Verdict.NO_INTERVAL:
                a, lo, dlo = mid, mid, d
            else:
                b = mid
        a, b = gap, hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            d = judge(mid)
            if d.verdict is Verdict.INTERVAL:
                b, hi, dhi = mid, mid, d
            else:
                a = mid

    effort = {
        "max_order": max_order if max_order is not None else default_max_order(len(template)),
        "max_word_len": max_word_len,
        "tol": tol,
        "evaluations": calls,
        "inconclusive_at": gap,
    }
    return Bracket(lo, hi, dlo, dhi, effort)
