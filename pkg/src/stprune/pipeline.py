"""End-to-end two-stage pruning: budget allocation, stage ordering, assembly.

The default order runs temporal pruning per view first (T*P -> K1 tokens),
then spatial pruning across the ring (K1 -> K2 per view). The spatial-first
ablation applies ring pruning frame by frame, then temporal pruning over the
concatenated survivors, with the stage budgets playing swapped roles.

Every retained token is a verbatim copy of an input token, and refs trace it
back to its (frame, patch) of origin through both stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .mtp import DEFAULT_ALPHA, DEFAULT_LAMBDA1, TemporalScoreParams, mtp_prune, temporal_score
from .rsp import DEFAULT_LAMBDA2, NUSCENES_RING, ViewRing, generic_ring, rsp_prune, spatial_score
from .selection import WeightedSelectParams, greedy_expand, vanilla_seed
from .tensor import TokenRef, TokenTensor
from .timing import NULL_TIMER, PhaseTimer

ORDER_TEMPORAL_FIRST = "temporal-first"
ORDER_SPATIAL_FIRST = "spatial-first"
METHOD_STPRUNE = "st-prune"
METHOD_VANILLA = "vanilla"

# Published best splits at the two standard budgets.
SPLIT_PRESETS = {
    "paper-25": (0.50, 0.50),
    "paper-10": (0.32, 0.32),
}

_SPLIT_REL_TOL = 0.02


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def budget_split(total_retention: float, policy="balanced") -> tuple[float, float]:
    """Resolve a retention budget into (temporal_fraction, spatial_fraction).

    policy is "balanced" (square-root split of the given total), one of the
    named presets in SPLIT_PRESETS, or a custom (tf, sf) pair whose product
    must match total_retention within 2% relative.
    """
    if not 0.0 < total_retention <= 1.0:
        raise ConfigError(f"total retention must be in (0, 1], got {total_retention}")
    if isinstance(policy, str):
        if policy == "balanced":
            root = math.sqrt(total_retention)
            return (root, root)
        if policy in SPLIT_PRESETS:
            return SPLIT_PRESETS[policy]
        raise ConfigError(f"unknown split policy {policy!r}")
    try:
        tf, sf = (float(policy[0]), float(policy[1]))
    except (TypeError, ValueError, IndexError):
        raise ConfigError(f"split policy must be a name or a (tf, sf) pair, got {policy!r}") from None
    if not (0.0 < tf <= 1.0 and 0.0 < sf <= 1.0):
        raise ConfigError(f"split fractions must be in (0, 1], got ({tf}, {sf})")
    if abs(tf * sf - total_retention) > _SPLIT_REL_TOL * total_retention:
        raise ConfigError(
            f"split {tf} x {sf} = {tf * sf:.4f} inconsistent with total retention {total_retention}"
        )
    return (tf, sf)


@dataclass(frozen=True)
class PruneConfig:
    """Budget, ordering, coefficients, and ring layout for one pruning run."""

    total_retention: float
    split: tuple[float, float]
    order: str = ORDER_TEMPORAL_FIRST
    alpha: float = DEFAULT_ALPHA
    lambda1: float = DEFAULT_LAMBDA1
    lambda2: float = DEFAULT_LAMBDA2
    ring: ViewRing | None = None
    method: str = METHOD_STPRUNE
    allow_single_view: bool = False
    keep_diagnostics: bool = False

    def __post_init__(self):
        if not 0.0 < self.total_retention <= 1.0:
            raise ConfigError(f"total retention must be in (0, 1], got {self.total_retention}")
        tf, sf = self.split
        if not (0.0 < tf <= 1.0 and 0.0 < sf <= 1.0):
            raise ConfigError(f"split fractions must be in (0, 1], got {self.split}")
        if self.order not in (ORDER_TEMPORAL_FIRST, ORDER_SPATIAL_FIRST):
            raise ConfigError(f"unknown order {self.order!r}")
        if self.method not in (METHOD_STPRUNE, METHOD_VANILLA):
            raise ConfigError(f"unknown method {self.method!r}")

    @classmethod
    def from_retention(cls, total_retention: float, policy="balanced", **kwargs) -> "PruneConfig":
        split = budget_split(total_retention, policy)
        return cls(total_retention=total_retention, split=split, **kwargs)

    def resolve_ring(self, v_count: int) -> ViewRing:
        if self.ring is not None:
            if self.ring.size != v_count:
                raise ConfigError(f"ring has {self.ring.size} labels but tensor has {v_count} views")
            return self.ring
        if v_count == NUSCENES_RING.size:
            return NUSCENES_RING
        return generic_ring(v_count)


@dataclass(frozen=True)
class PrunedOutput:
    """Final V x K2 x C tokens plus per-view provenance refs.

    tokens[v][m] is bit-identical to the input token addressed by refs[v][m];
    refs within each view are strictly increasing in flattened (frame, patch)
    order. k1 is the intermediate per-view count, k2 the final one.
    """

    tokens: np.ndarray
    refs: list[list[TokenRef]]
    k1: int
    k2: int
    stage_diagnostics: dict | None = field(default=None, repr=False)


def _vanilla_select(tokens: np.ndarray, k: int, timer: PhaseTimer):
    with timer.phase("seed"):
        seed = vanilla_seed(tokens)
    with timer.phase("expand"):
        return greedy_expand(tokens, seed, WeightedSelectParams(k=k))


def derive_budgets(config: PruneConfig, t_frames: int, p_patches: int) -> tuple[int, int]:
    """Per-view (K1, K2) for the temporal-first order, round-half-up, floor 1."""
    tf, sf = config.split
    k1 = max(1, _round_half_up(tf * t_frames * p_patches))
    k2 = max(1, _round_half_up(sf * k1))
    return k1, k2


def st_prune(x: TokenTensor, config: PruneConfig, timer: PhaseTimer = NULL_TIMER) -> PrunedOutput:
    """Run the two-stage pruning pipeline on a full V x T x P x C tensor."""
    v_count, t_frames, p_patches, c_dim = x.dims
    ring = config.resolve_ring(v_count)
    if config.order == ORDER_TEMPORAL_FIRST:
        return _temporal_first(x, config, ring, timer)
    return _spatial_first(x, config, ring, timer)


def _temporal_first(x: TokenTensor, config: PruneConfig, ring: ViewRing, timer: PhaseTimer) -> PrunedOutput:
    v_count, t_frames, p_patches, c_dim = x.dims
    k1, k2 = derive_budgets(config, t_frames, p_patches)
    tparams = TemporalScoreParams(alpha=config.alpha, lambda1=config.lambda1)

    stage1_refs = []
    stage1_tokens = np.empty((v_count, k1, c_dim), dtype=x.data.dtype)
    for v in range(v_count):
        slab = x.view(v)
        if config.method == METHOD_VANILLA:
            sel = _vanilla_select(slab.reshape(t_frames * p_patches, c_dim), k1, timer)
        else:
            sel = mtp_prune(slab, k1, tparams, timer=timer)
        stage1_refs.append(sel.indices)
        with timer.phase("assembly"):
            stage1_tokens[v] = slab.reshape(t_frames * p_patches, c_dim)[sel.indices]

    if config.method == METHOD_VANILLA:
        stage2 = [_vanilla_select(stage1_tokens[v], k2, timer) for v in range(v_count)]
    else:
        stage2 = rsp_prune(
            stage1_tokens, k2, config.lambda2, ring,
            allow_single_view=config.allow_single_view, timer=timer,
        )

    with timer.phase("assembly"):
        out_tokens = np.empty((v_count, k2, c_dim), dtype=x.data.dtype)
        refs = []
        for v in range(v_count):
            flat = stage1_refs[v][stage2[v].indices]
            out_tokens[v] = stage1_tokens[v][stage2[v].indices]
            refs.append([TokenRef.from_flat(v, int(i), p_patches) for i in flat])

    diagnostics = None
    if config.keep_diagnostics:
        diagnostics = _temporal_first_diagnostics(x, config, ring, stage1_refs, stage1_tokens)
    return PrunedOutput(tokens=out_tokens, refs=refs, k1=k1, k2=k2, stage_diagnostics=diagnostics)


def _temporal_first_diagnostics(x, config, ring, stage1_refs, stage1_tokens):
    tparams = TemporalScoreParams(alpha=config.alpha, lambda1=config.lambda1)
    diag = {"stage1_indices": [r.copy() for r in stage1_refs]}
    if config.method == METHOD_STPRUNE:
        diag["temporal_scores"] = np.stack(
            [temporal_score(x.view(v), tparams).values for v in range(x.dims[0])]
        )
        if x.dims[0] >= 2 or config.allow_single_view:
            diag["spatial_scores"] = spatial_score(
                stage1_tokens, ring, allow_single_view=config.allow_single_view
            ).values
    return diag


def _spatial_first(x: TokenTensor, config: PruneConfig, ring: ViewRing, timer: PhaseTimer) -> PrunedOutput:
    v_count, t_frames, p_patches, c_dim = x.dims
    tf, sf = config.split
    k_frame = max(1, _round_half_up(sf * p_patches))
    n_survivors = t_frames * k_frame
    k_final = max(1, _round_half_up(tf * n_survivors))
    tparams = TemporalScoreParams(alpha=config.alpha, lambda1=config.lambda1)

    # Stage 1: ring pruning independently per frame (keeps Eq-7-style per-view
    # token sets frame-consistent), k_frame survivors per view per frame.
    stage1_refs = [np.empty(n_survivors, dtype=np.int64) for _ in range(v_count)]
    stage1_tokens = np.empty((v_count, n_survivors, c_dim), dtype=x.data.dtype)
    for t in range(t_frames):
        frame = x.data[:, t]
        if config.method == METHOD_VANILLA:
            frame_sel = [_vanilla_select(frame[v], k_frame, timer) for v in range(v_count)]
        else:
            frame_sel = rsp_prune(
                frame, k_frame, config.lambda2, ring,
                allow_single_view=config.allow_single_view, timer=timer,
            )
        with timer.phase("assembly"):
            lo = t * k_frame
            for v in range(v_count):
                stage1_refs[v][lo : lo + k_frame] = t * p_patches + frame_sel[v].indices
                stage1_tokens[v, lo : lo + k_frame] = frame[v][frame_sel[v].indices]

    # Stage 2: temporal pruning over the survivors, arranged T x k_frame.
    with timer.phase("assembly"):
        out_tokens = np.empty((v_count, k_final, c_dim), dtype=x.data.dtype)
    refs = []
    for v in range(v_count):
        if config.method == METHOD_VANILLA:
            sel = _vanilla_select(stage1_tokens[v], k_final, timer)
        else:
            sel = mtp_prune(
                stage1_tokens[v].reshape(t_frames, k_frame, c_dim), k_final, tparams, timer=timer
            )
        with timer.phase("assembly"):
            flat = stage1_refs[v][sel.indices]
            out_tokens[v] = stage1_tokens[v][sel.indices]
            refs.append([TokenRef.from_flat(v, int(i), p_patches) for i in flat])

    diagnostics = None
    if config.keep_diagnostics:
        diagnostics = {"stage1_indices": [r.copy() for r in stage1_refs]}
    return PrunedOutput(tokens=out_tokens, refs=refs, k1=n_survivors, k2=k_final, stage_diagnostics=diagnostics)
