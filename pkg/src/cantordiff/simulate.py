"""Monte Carlo realisations of random M-adic Cantor sets and their column counts.

Every node label is a pure function of ``(seed, trial, side, level, node)``
through a splitmix64-style hash, so results do not depend on how trials are
batched or spread over worker processes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .spectrum import CantorSpec, correlations, expectation_matrix, word_matrix

DEFAULT_SURVIVOR_CAP = 10**7
DIRECT_PAIR_LIMIT = 10**6
TRIAL_CHUNK = 2048
_NODE_BUDGET = 4 * 10**6

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)


def _mix(z):
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MUL1
    z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def node_uniforms(seed: int, trial, side: int, level: int, node) -> np.ndarray:
    """Uniform [0, 1) variates keyed by node coordinates (vectorised over ``trial``/``node``)."""
    with np.errstate(over="ignore"):
        h = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        h = _mix(h ^ np.uint64(side))
        h = _mix(h ^ np.uint64(level))
        h = _mix(h ^ np.asarray(trial, dtype=np.uint64))
        h = _mix(h ^ np.asarray(node, dtype=np.uint64))
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _check_budget(probs: Sequence[float], n_max: int, cap: int):
    M = len(probs)
    if n_max * math.log(M) >= 62 * math.log(2):
        raise ValueError(f"M**n_max = {M}**{n_max} does not fit a 63-bit node index")
    mean = sum(probs)
    for n in range(1, n_max + 1):
        if mean**n > cap:
            raise ValueError(
                f"expected survivors at level {n} are {mean**n:.3g}, above the cap {cap}"
            )


def _sample_levels(probs, n_max: int, seed: int, trials: np.ndarray, side: int) -> list:
    """Survivors of a batch of trials: per level a pair ``(trial, node)`` of sorted arrays."""
    M = len(probs)
    pr = np.asarray(probs, dtype=float)
    digits = np.arange(M, dtype=np.int64)
    t = np.asarray(trials, dtype=np.int64)
    v = np.zeros(len(t), dtype=np.int64)
    out = [(t, v)]
    for n in range(1, n_max + 1):
        ct = np.repeat(t, M)
        cv = (v[:, None] * M + digits[None, :]).ravel()
        d = np.tile(digits, len(v))
        keep = node_uniforms(seed, ct, side, n, cv) < pr[d]
        t, v = ct[keep], cv[keep]
        out.append((t, v))
    return out


@dataclass
class CantorSample:
    M: int
    levels: list

    def survivors(self, n: int) -> np.ndarray:
        return self.levels[n]

    def is_hereditary(self) -> bool:
        for n in range(1, len(self.levels)):
            if not np.isin(self.levels[n] // self.M, self.levels[n - 1]).all():
                return False
        return True


def sample(
    spec: CantorSpec,
    n_max: int,
    seed: int,
    trial: int = 0,
    side: int = 1,
    cap: int = DEFAULT_SURVIVOR_CAP,
) -> CantorSample:
    """One realisation of F1 (``side=1``, vector ``p``) or F2 (``side=2``, vector ``q``)."""
    probs = spec.p if side == 1 else spec.second
    _check_budget(probs, n_max, cap)
    levels = _sample_levels(probs, n_max, seed, np.array([trial]), side)
    return CantorSample(spec.M, [v for _, v in levels])


@dataclass
class ColumnHistogram:
    """Triangle counts per column, indexed by signed offset ``s + M**n``.

    Offsets ``s >= 0`` are the columns ``C_s``; ``s < 0`` are ``C^-_{s + M**n}``.
    """

    level: int
    M: int
    z_L: np.ndarray
    z_R: np.ndarray

    def at(self, side: str, index: int) -> tuple:
        size = self.M**self.level
        s = index if side == "+" else index - size
        return int(self.z_L[s + size]), int(self.z_R[s + size])

    @property
    def total(self) -> int:
        return int(self.z_L.sum() + self.z_R.sum())


def lag_counts(s1: np.ndarray, s2: np.ndarray, size: int) -> np.ndarray:
    """Counts of ``t = i - j`` over ``i in s1, j in s2``; index ``t + size`` in ``[0, 2 size)``."""
    out = np.zeros(2 * size, dtype=np.int64)
    if len(s1) == 0 or len(s2) == 0:
        return out
    if len(s1) * len(s2) <= DIRECT_PAIR_LIMIT:
        diffs = np.subtract.outer(np.asarray(s1), np.asarray(s2)).ravel()
        out += np.bincount(diffs + size, minlength=2 * size)
        return out
    from scipy.signal import fftconvolve

    a = np.zeros(size)
    b = np.zeros(size)
    a[s1] = 1
    b[s2] = 1
    conv = fftconvolve(a, b[::-1])
    out[1:] = np.rint(conv).astype(np.int64)
    return out


def column_histogram(s1: CantorSample, s2: CantorSample, n: int) -> ColumnHistogram:
    if n >= len(s1.levels) or n >= len(s2.levels):
        raise ValueError(f"level {n} missing from a sample")
    size = s1.M**n
    lags = lag_counts(s1.levels[n], s2.levels[n], size)
    z_r = lags
    z_l = np.zeros_like(lags)
    # L-triangle with lag t lies in column t - 1
    z_l[:-1] = lags[1:]
    return ColumnHistogram(n, s1.M, z_l, z_r)


# ---------------------------------------------------------------------------
# experiments


def _present(t1, v1, t2, v2, lag: int, width: int, n_trials: int, base: int) -> np.ndarray:
    """Per trial: does some ``i`` of F1 and ``j`` of F2 satisfy ``i - j == lag``?"""
    j = v1 - lag
    ok = (j >= 0) & (j < width)
    query = (t1[ok] - base) * width + j[ok]
    keys = (t2 - base) * width + v2
    hit = np.isin(query, keys)
    return np.bincount(t1[ok][hit] - base, minlength=n_trials) > 0


def _run_chunk(args) -> dict:
    p, q, n_max, seed, lo, hi, constant_columns = args
    M = len(p)
    trials = np.arange(lo, hi, dtype=np.int64)
    n = hi - lo
    lv1 = _sample_levels(p, n_max, seed, trials, 1)
    lv2 = _sample_levels(q, n_max, seed, trials, 2)
    z1 = np.stack([np.bincount(t - lo, minlength=n) for t, _ in lv1], axis=1)
    z2 = np.stack([np.bincount(t - lo, minlength=n) for t, _ in lv2], axis=1)
    out = {"z1": z1, "z2": z2}
    if n_max >= 1:
        x1 = np.zeros((n, M), dtype=np.int64)
        x2 = np.zeros((n, M), dtype=np.int64)
        x1[lv1[1][0] - lo, lv1[1][1]] = 1
        x2[lv2[1][0] - lo, lv2[1][1]] = 1
        cols = np.zeros((n, 2 * M, 2), dtype=np.int64)
        for i in range(M):
            for j in range(M):
                both = x1[:, i] * x2[:, j]
                cols[:, i - j + M, 1] += both
                cols[:, i - j - 1 + M, 0] += both
        out["col1"] = cols
    if constant_columns and n_max >= 1:
        empty = np.zeros((n, n_max, M), dtype=bool)
        for lev in range(1, n_max + 1):
            (t1, v1), (t2, v2) = lv1[lev], lv2[lev]
            size = M**lev
            for k in range(M):
                c = k * (size - 1) // (M - 1)
                # C_c holds lags c, c + 1; C^-_c holds lags c - size, c - size + 1
                occ = np.zeros(n, dtype=bool)
                for lag in (c, c + 1, c - size, c - size + 1):
                    occ |= _present(t1, v1, t2, v2, lag, size, n, lo)
                empty[:, lev - 1, k] = ~occ
        out["empty"] = empty
    return out


@dataclass
class SimulationStats:
    M: int
    trials: int
    levels: list
    survival_rate: list
    survivors_mean: list
    survivors_var: list
    dim_estimate: list
    survival_rate_2: list
    survivors_mean_2: list
    survivors_var_2: list
    dim_estimate_2: list
    column_mean_L: list
    column_mean_R: list
    column_se_L: list
    column_se_R: list
    gamma_mean_L: list
    gamma_mean_R: list
    gamma_se_L: list
    gamma_se_R: list
    empty_constant_rate: Optional[list] = None

    def to_dict(self) -> dict:
        def clean(x):
            if isinstance(x, list):
                return [clean(v) for v in x]
            if isinstance(x, float) and not math.isfinite(x):
                return None
            return x

        return {k: clean(v) for k, v in self.__dict__.items()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["level", "trials", "survivors_mean", "survivors_var", "survival_rate", "dim_estimate"])
        for i, n in enumerate(self.levels):
            w.writerow(
                [
                    n,
                    self.trials,
                    repr(self.survivors_mean[i]),
                    repr(self.survivors_var[i]),
                    repr(self.survival_rate[i]),
                    repr(self.dim_estimate[i]),
                ]
            )
        return buf.getvalue()


def _side_stats(z: np.ndarray, M: int) -> tuple:
    ddof = 1 if len(z) > 1 else 0
    rate = (z > 0).mean(axis=0)
    mean = z.mean(axis=0)
    var = z.var(axis=0, ddof=ddof)
    dims = [math.nan]
    for n in range(1, z.shape[1]):
        alive = z[:, n][z[:, n] > 0]
        dims.append(float(np.mean(np.log(alive))) / (n * math.log(M)) if len(alive) else math.nan)
    return [float(x) for x in rate], [float(x) for x in mean], [float(x) for x in var], dims


def run_experiment(
    spec: CantorSpec,
    n_max: int,
    trials: int,
    seed: int,
    workers: int = 1,
    constant_columns: bool = True,
    cap: int = DEFAULT_SURVIVOR_CAP,
) -> SimulationStats:
    """Simulate ``trials`` independent pairs (F1, F2) down to level ``n_max``."""
    if trials < 1 or n_max < 0:
        raise ValueError("need trials >= 1 and n_max >= 0")
    p, q = spec.p, spec.second
    _check_budget(p, n_max, cap)
    _check_budget(q, n_max, cap)
    M = spec.M
    per_trial = sum(max(sum(p), sum(q)) ** n * M for n in range(n_max + 1))
    chunk = max(1, min(TRIAL_CHUNK, int(_NODE_BUDGET // max(per_trial, 1.0))))
    jobs = [
        (p, q, n_max, seed, lo, min(lo + chunk, trials), constant_columns)
        for lo in range(0, trials, chunk)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(j) for j in jobs]

    z1 = np.concatenate([x["z1"] for x in parts])
    z2 = np.concatenate([x["z2"] for x in parts])
    r1, m1, v1, d1 = _side_stats(z1, M)
    r2, m2, v2, d2 = _side_stats(z2, M)

    col = {"mL": [], "mR": [], "sL": [], "sR": [], "gL": [], "gR": [], "gsL": [], "gsR": []}
    if n_max >= 1:
        cols = np.concatenate([x["col1"] for x in parts]).astype(float)
        se = cols.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(cols.shape[1:])
        mean = cols.mean(axis=0)
        col["mL"], col["mR"] = mean[:, 0].tolist(), mean[:, 1].tolist()
        col["sL"], col["sR"] = se[:, 0].tolist(), se[:, 1].tolist()
        # Z^V(k) = count in C^-_k plus count in C_k
        comb = cols[:, :M, :] + cols[:, M:, :]
        gm = comb.mean(axis=0)
        gs = comb.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(gm.shape)
        col["gL"], col["gR"] = gm[:, 0].tolist(), gm[:, 1].tolist()
        col["gsL"], col["gsR"] = gs[:, 0].tolist(), gs[:, 1].tolist()

    empty_rate = None
    if constant_columns and n_max >= 1:
        empty = np.concatenate([x["empty"] for x in parts])
        alive = (z1[:, 1:] > 0) & (z2[:, 1:] > 0)
        empty_rate = []
        for lev in range(n_max):
            a = alive[:, lev]
            row = [float(empty[a, lev, k].mean()) if a.any() else math.nan for k in range(M)]
            empty_rate.append(row)

    return SimulationStats(
        M=M,
        trials=trials,
        levels=list(range(n_max + 1)),
        survival_rate=r1,
        survivors_mean=m1,
        survivors_var=v1,
        dim_estimate=d1,
        survival_rate_2=r2,
        survivors_mean_2=m2,
        survivors_var_2=v2,
        dim_estimate_2=d2,
        column_mean_L=col["mL"],
        column_mean_R=col["mR"],
        column_se_L=col["sL"],
        column_se_R=col["sR"],
        gamma_mean_L=col["gL"],
        gamma_mean_R=col["gR"],
        gamma_se_L=col["gsL"],
        gamma_se_R=col["gsR"],
        empty_constant_rate=empty_rate,
    )


def expected_column_decay(spec: CantorSpec, prefix: Sequence[int], k, m_max: int) -> list:
    """Entry sums of ``M(prefix k^m)`` for ``m = 1..m_max``: Markov bounds on column survival.

    ``k`` is a digit or a word; a word is repeated as a block.
    """
    base = word_matrix(spec, prefix)
    step = expectation_matrix(spec, k) if np.ndim(k) == 0 else word_matrix(spec, k)
    out = []
    cur = base
    for _ in range(m_max):
        cur = cur @ step
        out.append(float(np.abs(cur).sum()))
    return out


def expected_level1_columns(spec: CantorSpec) -> tuple:
    """Exact level-1 means ``(E z_L, E z_R)`` per signed column, matching ``SimulationStats`` layout."""
    M = spec.M
    mL = np.zeros(2 * M)
    mR = np.zeros(2 * M)
    for k in range(M):
        m = expectation_matrix(spec, k)
        mL[k], mR[k] = m[0, 0], m[0, 1]
        mL[M + k], mR[M + k] = m[1, 0], m[1, 1]
    g = correlations(spec)
    return mL, mR, np.roll(g, -1), g
