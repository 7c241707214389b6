"""Ground-truth machinery for tests.

exact_maxmin solves the max-min dispersion problem by exhaustive enumeration
(feasible only at capped sizes; the problem is NP-hard in general) and pits
the greedy baseline against the true optimum. The naive_* functions are
deliberately uncached re-derivations of the two pruning stages, recomputing
scores with explicit loops and the selected-set maximum from scratch at every
step; they exist so the optimized implementations can be checked index for
index.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import OracleScaleError, PreconditionError
from .rsp import ViewRing, generic_ring
from .selection import SelectionResult, WeightedSelectParams, greedy_expand, vanilla_seed
from .tensor import cosine_sim, unit_rows

MAX_ORACLE_N = 16
MAX_ORACLE_K = 6


@dataclass(frozen=True)
class OracleReport:
    """Exhaustive optimum vs greedy outcome for one max-min instance."""

    optimal_objective: float
    optimal_subset: tuple[int, ...]
    greedy_objective: float
    ratio: float


def _pairwise_distances(tokens: np.ndarray) -> np.ndarray:
    n = tokens.shape[0]
    dist = np.zeros((n, n), dtype=np.float64)
    for a in range(n):
        for b in range(a + 1, n):
            d = 1.0 - cosine_sim(tokens[a], tokens[b])
            dist[a, b] = d
            dist[b, a] = d
    return dist


def exact_maxmin(tokens, k: int) -> OracleReport:
    """Exhaustively maximize the minimum pairwise distance over k-subsets.

    Size caps keep C(N, k) small enough for sub-second suites. Ties go to the
    lexicographically smallest subset. The greedy column of the report runs
    the plain baseline (mean-similarity seed, unweighted expansion), with both
    objectives evaluated on the same pairwise distance matrix so the
    dominance comparison is exact.
    """
    mat = np.asarray(tokens)
    n = mat.shape[0]
    if n > MAX_ORACLE_N or k > MAX_ORACLE_K:
        raise OracleScaleError(f"oracle caps are N <= {MAX_ORACLE_N}, k <= {MAX_ORACLE_K}")
    if not 2 <= k <= n:
        raise PreconditionError(f"k={k} outside [2, {n}]")

    dist = _pairwise_distances(mat)
    combos = np.array(list(combinations(range(n), k)), dtype=np.int64)
    pair_a, pair_b = np.triu_indices(k, 1)
    subset_min = dist[combos[:, pair_a], combos[:, pair_b]].min(axis=1)
    best = int(np.argmax(subset_min))
    optimal = float(subset_min[best])

    seed = vanilla_seed(mat)
    greedy = greedy_expand(mat, seed, WeightedSelectParams(k=k))
    gi = greedy.indices
    greedy_objective = float(dist[np.ix_(gi, gi)][np.triu_indices(k, 1)].min())
    ratio = 1.0 if optimal <= 0.0 else greedy_objective / optimal
    return OracleReport(
        optimal_objective=optimal,
        optimal_subset=tuple(int(i) for i in combos[best]),
        greedy_objective=greedy_objective,
        ratio=ratio,
    )


def _naive_minmax(values: np.ndarray) -> np.ndarray:
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.full_like(values, 0.5)
    return (values - lo) / (hi - lo)


def _naive_weighted_seed(units: np.ndarray, mat64: np.ndarray, scores: np.ndarray, lam: float) -> int:
    norm_hat = _naive_minmax(np.linalg.norm(mat64, axis=1))
    if lam == 0.0:
        return int(np.argmax(norm_hat))
    return int(np.argmax(norm_hat + lam * scores))


def _naive_expand(units: np.ndarray, seed: int, k: int, lam: float, scores: np.ndarray) -> SelectionResult:
    n = units.shape[0]
    trace = [seed]
    for _ in range(1, k):
        sel = np.array(trace, dtype=np.int64)
        best = (units @ units[sel].T).max(axis=1)
        if lam == 0.0:
            objective = best
        else:
            objective = best + lam * (1.0 - scores)
        objective[sel] = np.inf
        trace.append(int(np.argmin(objective)))
    trace_arr = np.array(trace, dtype=np.int64)
    return SelectionResult(indices=np.sort(trace_arr), selection_trace=trace_arr)


def naive_mtp_reference(view_tokens, k1: int, params) -> SelectionResult:
    """Uncached re-derivation of temporal pruning for cross-checking."""
    slab = np.asarray(view_tokens, dtype=np.float64)
    t_frames, p_patches, c_dim = slab.shape
    n = t_frames * p_patches
    if not 1 <= k1 <= n:
        raise PreconditionError(f"k1={k1} outside [1, {n}]")

    motion_raw = np.empty((t_frames, p_patches), dtype=np.float64)
    for p in range(p_patches):
        mean_p = slab[:, p, :].mean(axis=0)
        for t in range(t_frames):
            diff = slab[t, p, :] - mean_p
            motion_raw[t, p] = float(diff @ diff)
    recency_raw = np.empty((t_frames, p_patches), dtype=np.float64)
    for t in range(t_frames):
        recency_raw[t, :] = np.exp(params.alpha * (t + 1) / t_frames)

    motion = _naive_minmax(motion_raw.reshape(-1))
    recency = _naive_minmax(recency_raw.reshape(-1))
    scores = _naive_minmax(motion + recency)

    mat64 = slab.reshape(n, c_dim)
    units = unit_rows(mat64)
    seed = _naive_weighted_seed(units, mat64, scores, params.lambda1)
    return _naive_expand(units, seed, k1, params.lambda1, scores)


def naive_rsp_reference(views, k2: int, lambda2: float, ring: ViewRing | None = None) -> list[SelectionResult]:
    """Uncached re-derivation of ring pruning for cross-checking."""
    arr = np.asarray(views, dtype=np.float64)
    v_count, m_count, _ = arr.shape
    if ring is None:
        ring = generic_ring(v_count)
    if v_count < 2:
        raise PreconditionError("naive ring reference needs V >= 2")
    if not 1 <= k2 <= m_count:
        raise PreconditionError(f"k2={k2} outside [1, {m_count}]")

    units = [unit_rows(arr[v]) for v in range(v_count)]
    raw = np.empty((v_count, m_count), dtype=np.float64)
    for v in range(v_count):
        nxt = units[ring.next(v)]
        prv = units[ring.prev(v)]
        for i in range(m_count):
            s_next = float((nxt @ units[v][i]).max())
            s_prev = float((prv @ units[v][i]).max())
            raw[v, i] = 1.0 - 0.5 * (s_next + s_prev)

    results = []
    for v in range(v_count):
        values = _naive_minmax(raw[v])
        seed = _naive_weighted_seed(units[v], arr[v], values, lambda2)
        results.append(_naive_expand(units[v], seed, k2, lambda2, values))
    return results
