"""Shared max-min selection engine.

Both pruning stages run the same seed-then-expand scheme over an N x C
candidate matrix: pick one anchor, then repeatedly add the candidate that
minimizes (max cosine similarity to the selected set + lam * (1 - score)).
With lam = 0 or no scores this degenerates to plain greedy max-min dispersion
under the distance d = 1 - cosine.

All similarity math runs on float64 unit rows; ties always break to the
lowest candidate index, which makes every result deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, PreconditionError
from .tensor import cosine_sim, minmax_normalize, unit_rows


@dataclass(frozen=True)
class WeightedSelectParams:
    """Retention count, balancing coefficient, and optional per-candidate scores."""

    k: int
    lam: float = 0.0
    scores: np.ndarray | None = None

    def __post_init__(self):
        if self.k < 1:
            raise PreconditionError(f"k must be >= 1, got {self.k}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise PreconditionError(f"lam must be finite and >= 0, got {self.lam}")
        if self.scores is not None:
            object.__setattr__(self, "scores", np.asarray(self.scores, dtype=np.float64))


@dataclass(frozen=True)
class SelectionResult:
    """Retained candidate indices.

    indices is sorted ascending (original candidate order, which downstream
    sequence consumers rely on); selection_trace is the same set in the order
    the greedy picked it, so trace prefixes are comparable across budgets.
    """

    indices: np.ndarray
    selection_trace: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "selection_trace", np.asarray(self.selection_trace, dtype=np.int64))


def _candidate_matrix(tokens) -> np.ndarray:
    mat = np.asarray(tokens)
    if mat.ndim != 2:
        raise DimensionError(f"candidate tokens must be an N x C matrix, got {mat.shape}")
    return mat


def _check_scores(scores: np.ndarray | None, n: int) -> np.ndarray | None:
    if scores is None:
        return None
    s = np.asarray(scores, dtype=np.float64)
    if s.shape != (n,):
        raise DimensionError(f"scores length {s.shape} does not match {n} candidates")
    if s.size and (s.min() < 0.0 or s.max() > 1.0):
        raise PreconditionError("scores must lie in [0, 1]")
    return s


def vanilla_seed(tokens) -> int:
    """Index of the token with the highest mean similarity to all others.

    This is the score-agnostic anchor of the plain diversity baseline; ties
    break to the lowest index, and a single candidate trivially wins.
    """
    mat = _candidate_matrix(tokens)
    n = mat.shape[0]
    if n == 0:
        raise PreconditionError("vanilla_seed needs at least one candidate")
    if n == 1:
        return 0
    units = unit_rows(mat)
    sims = units @ units.T
    mean_sim = (sims.sum(axis=1) - np.diag(sims)) / (n - 1)
    return int(np.argmax(mean_sim))


def weighted_seed(tokens, scores, lam: float) -> int:
    """Index maximizing norm_hat + lam * score.

    norm_hat is the min-max normalized L2 norm over the candidates, so the
    two terms share the [0, 1] scale and lam keeps its meaning across inputs.
    When lam is 0 or scores are absent the seed is the pure norm argmax.
    """
    mat = _candidate_matrix(tokens)
    n = mat.shape[0]
    if n == 0:
        raise PreconditionError("weighted_seed needs at least one candidate")
    s = _check_scores(scores, n)
    norm_hat = minmax_normalize(np.linalg.norm(mat.astype(np.float64), axis=1))
    if s is None or lam == 0.0:
        objective = norm_hat
    else:
        objective = norm_hat + lam * s
    return int(np.argmax(objective))


def greedy_expand(tokens, seed: int, params: WeightedSelectParams) -> SelectionResult:
    """Expand from a seed to k tokens by score-weighted max-min selection.

    Each step adds the unselected candidate minimizing
    best_sim(i) + lam * (1 - score(i)), where best_sim(i) is the running
    maximum cosine similarity of candidate i to the selected set. best_sim is
    maintained incrementally (one similarity row per step), so a full call
    costs O(k * N * C). With lam = 0 or absent scores the penalty term is
    skipped entirely and the result is the plain max-min greedy.
    """
    mat = _candidate_matrix(tokens)
    n = mat.shape[0]
    if not 0 <= seed < n:
        raise PreconditionError(f"seed {seed} outside [0, {n})")
    if params.k > n:
        raise PreconditionError(f"k={params.k} exceeds candidate count {n}")
    scores = _check_scores(params.scores, n)

    units = unit_rows(mat)
    trace = np.empty(params.k, dtype=np.int64)
    trace[0] = seed
    if params.k > 1:
        penalty = None
        if scores is not None and params.lam != 0.0:
            penalty = params.lam * (1.0 - scores)
        # best_sim carries +inf at selected slots; maximum() keeps them pinned,
        # so the argmin never revisits a selected candidate.
        best_sim = units @ units[seed]
        best_sim[seed] = np.inf
        objective = np.empty(n, dtype=np.float64)
        for m in range(1, params.k):
            if penalty is None:
                pick = int(np.argmin(best_sim))
            else:
                np.add(best_sim, penalty, out=objective)
                pick = int(np.argmin(objective))
            trace[m] = pick
            np.maximum(best_sim, units @ units[pick], out=best_sim)
            best_sim[pick] = np.inf
    return SelectionResult(indices=np.sort(trace), selection_trace=trace)


def objective_value(tokens, subset) -> float:
    """Minimum pairwise distance (1 - cosine) within a subset of >= 2 tokens."""
    mat = _candidate_matrix(tokens)
    idx = [int(i) for i in subset]
    if len(idx) < 2:
        raise PreconditionError("objective_value needs a subset of at least 2 tokens")
    best = np.inf
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            d = 1.0 - cosine_sim(mat[idx[a]], mat[idx[b]])
            if d < best:
                best = d
    return float(best)
