"""Motion-aware temporal pruning over one view's T x P x C token slab.

Tokens are scored by motion volatility (squared deviation from the patch's
temporal mean) plus temporal recency (exponential bias toward the latest
frame), then selected with the score-weighted max-min engine over the
flattened T*P candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError
from .selection import SelectionResult, WeightedSelectParams, greedy_expand, weighted_seed
from .tensor import minmax_normalize
from .timing import NULL_TIMER, PhaseTimer

DEFAULT_ALPHA = 2.0
DEFAULT_LAMBDA1 = 0.6


@dataclass(frozen=True)
class TemporalScoreParams:
    """Recency scaling factor and balancing coefficient for temporal pruning."""

    alpha: float = DEFAULT_ALPHA
    lambda1: float = DEFAULT_LAMBDA1

    def __post_init__(self):
        if not np.isfinite(self.alpha):
            raise PreconditionError(f"alpha must be finite, got {self.alpha}")
        if not np.isfinite(self.lambda1) or self.lambda1 < 0:
            raise PreconditionError(f"lambda1 must be finite and >= 0, got {self.lambda1}")


@dataclass(frozen=True)
class TemporalScoreMap:
    """T x P temporal importance scores plus the two normalized components."""

    values: np.ndarray
    motion_term: np.ndarray
    recency_term: np.ndarray


def _check_view_tokens(view_tokens) -> np.ndarray:
    slab = np.asarray(view_tokens, dtype=np.float64)
    if slab.ndim != 3:
        raise DimensionError(f"view tokens must be T x P x C, got shape {slab.shape}")
    if min(slab.shape) < 1:
        raise DimensionError(f"all dims must be >= 1, got {slab.shape}")
    return slab


def temporal_score(view_tokens, params: TemporalScoreParams = TemporalScoreParams()) -> TemporalScoreMap:
    """Score every (frame, patch) token of one view.

    The motion term is the squared L2 deviation of the token from its patch's
    mean over frames; the recency term is exp(alpha * t / T) with t running
    1..T (latest frame gets exponent alpha). Both terms are min-max
    normalized over all T*P entries, and their sum is re-normalized so the
    final score lies in [0, 1]. Degenerate ranges (e.g. T = 1) map to the
    neutral 0.5.
    """
    slab = _check_view_tokens(view_tokens)
    t_frames, p_patches, _ = slab.shape

    patch_mean = slab.mean(axis=0, keepdims=True)
    motion_raw = np.square(slab - patch_mean).sum(axis=2)

    frame_no = np.arange(1, t_frames + 1, dtype=np.float64)
    recency_raw = np.exp(params.alpha * frame_no / t_frames)
    recency_raw = np.broadcast_to(recency_raw[:, None], (t_frames, p_patches))

    motion_term = minmax_normalize(motion_raw.reshape(-1)).reshape(t_frames, p_patches)
    recency_term = minmax_normalize(recency_raw.reshape(-1)).reshape(t_frames, p_patches)
    values = minmax_normalize((motion_term + recency_term).reshape(-1)).reshape(t_frames, p_patches)
    return TemporalScoreMap(values=values, motion_term=motion_term, recency_term=recency_term)


def mtp_prune(
    view_tokens,
    k1: int,
    params: TemporalScoreParams = TemporalScoreParams(),
    timer: PhaseTimer = NULL_TIMER,
) -> SelectionResult:
    """Retain k1 of one view's T*P tokens, biased toward motion and recency.

    Candidates are the flattened (t, p) -> t * P + p sequence; the returned
    indices are sorted in that flattened order, so temporal-then-spatial
    ordering survives pruning.
    """
    slab = _check_view_tokens(view_tokens)
    t_frames, p_patches, _ = slab.shape
    n = t_frames * p_patches
    if not 1 <= k1 <= n:
        raise PreconditionError(f"k1={k1} outside [1, {n}]")

    tokens = np.asarray(view_tokens).reshape(n, -1)
    with timer.phase("score"):
        scores = temporal_score(slab, params).values.reshape(-1)
    with timer.phase("seed"):
        seed = weighted_seed(tokens, scores, params.lambda1)
    with timer.phase("expand"):
        result = greedy_expand(
            tokens, seed, WeightedSelectParams(k=k1, lam=params.lambda1, scores=scores)
        )
    return result
