"""Ring-view spatial pruning across adjacent camera views.

Every token is scored by how redundantly it appears in the two neighboring
views of the camera ring: raw = 1 - mean of its max similarities into the
previous and next views. Selection then runs independently per view with the
score-weighted max-min engine, so cross-view comparisons happen only inside
the scoring step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRingError, DimensionError, PreconditionError
from .selection import SelectionResult, WeightedSelectParams, greedy_expand, weighted_seed
from .tensor import minmax_normalize, unit_rows
from .timing import NULL_TIMER, PhaseTimer

DEFAULT_LAMBDA2 = 0.8


@dataclass(frozen=True)
class ViewRing:
    """Cyclic camera adjacency: neighbors of view v are (v-1) mod V and (v+1) mod V."""

    order: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.order)
        if len(labels) < 1:
            raise PreconditionError("ring needs at least one view label")
        if len(set(labels)) != len(labels):
            raise PreconditionError(f"ring labels must be distinct, got {labels}")
        object.__setattr__(self, "order", labels)

    @property
    def size(self) -> int:
        return len(self.order)

    def prev(self, v: int) -> int:
        return (v - 1) % self.size

    def next(self, v: int) -> int:
        return (v + 1) % self.size


# Six-camera surround order reflecting physical adjacency on the vehicle.
NUSCENES_RING = ViewRing(
    ("Front_Left", "Front", "Front_Right", "Back_Right", "Back", "Back_Left")
)


def generic_ring(v_count: int) -> ViewRing:
    """Index-ordered ring for datasets without named cameras."""
    return ViewRing(tuple(f"view_{i}" for i in range(v_count)))


@dataclass(frozen=True)
class SpatialScoreMap:
    """V x M spatial uniqueness scores; values are per-view normalized, raw is
    the unnormalized bilateral quantity in [0, 2]."""

    values: np.ndarray
    raw: np.ndarray


def _check_views(views) -> np.ndarray:
    arr = np.asarray(views)
    if arr.ndim != 3:
        raise DimensionError(f"views must be V x M x C, got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise DimensionError(f"all dims must be >= 1, got {arr.shape}")
    return arr


def spatial_score(views, ring: ViewRing, allow_single_view: bool = False) -> SpatialScoreMap:
    """Bilateral cross-view redundancy score for every token.

    raw(v, i) = 1 - (max sim into next view + max sim into prev view) / 2,
    with the two directed max-similarity rows of each adjacent pair computed
    from one pairwise similarity matrix (the O(V * M^2) precompute). values
    re-normalizes raw per view onto [0, 1].

    A single-view input has no neighbors; with allow_single_view the raw
    score is the constant 1 (maximally unique), otherwise it is an error.
    """
    arr = _check_views(views)
    v_count, m_count, _ = arr.shape
    if ring.size != v_count:
        raise DimensionError(f"ring has {ring.size} labels but input has {v_count} views")
    if v_count < 2:
        if not allow_single_view:
            raise DegenerateRingError("bilateral scoring needs V >= 2 (single-view mode is opt-in)")
        raw = np.ones((1, m_count), dtype=np.float64)
        values = minmax_normalize(raw[0])[None, :]
        return SpatialScoreMap(values=values, raw=raw)

    units = [unit_rows(arr[v]) for v in range(v_count)]
    to_next = np.empty((v_count, m_count), dtype=np.float64)
    to_prev = np.empty((v_count, m_count), dtype=np.float64)
    for v in range(v_count):
        w = ring.next(v)
        pair = units[v] @ units[w].T
        to_next[v] = pair.max(axis=1)
        to_prev[w] = pair.max(axis=0)

    raw = 1.0 - 0.5 * (to_next + to_prev)
    values = np.empty_like(raw)
    for v in range(v_count):
        values[v] = minmax_normalize(raw[v])
    return SpatialScoreMap(values=values, raw=raw)


def rsp_prune(
    views,
    k2: int,
    lambda2: float = DEFAULT_LAMBDA2,
    ring: ViewRing | None = None,
    allow_single_view: bool = False,
    timer: PhaseTimer = NULL_TIMER,
) -> list[SelectionResult]:
    """Retain k2 tokens per view, penalizing cross-view redundancy.

    Scoring is computed once over the whole ring; each view is then selected
    independently (seed by norm + lambda2 * score, expand with the overlap
    penalty). Results are assembled in ring order, indices sorted ascending.
    """
    arr = _check_views(views)
    v_count, m_count, _ = arr.shape
    if ring is None:
        ring = generic_ring(v_count)
    if not 1 <= k2 <= m_count:
        raise PreconditionError(f"k2={k2} outside [1, {m_count}]")
    if not np.isfinite(lambda2) or lambda2 < 0:
        raise PreconditionError(f"lambda2 must be finite and >= 0, got {lambda2}")

    with timer.phase("score"):
        score_map = spatial_score(arr, ring, allow_single_view=allow_single_view)

    results = []
    for v in range(v_count):
        with timer.phase("seed"):
            seed = weighted_seed(arr[v], score_map.values[v], lambda2)
        with timer.phase("expand"):
            results.append(
                greedy_expand(
                    arr[v],
                    seed,
                    WeightedSelectParams(k=k2, lam=lambda2, scores=score_map.values[v]),
                )
            )
    return results
