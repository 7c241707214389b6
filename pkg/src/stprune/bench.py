"""Wall-time measurement harness.

All timings use the monotonic clock, discard one warm-up iteration, and
report the median of the remaining repeats. The named cases back the
complexity checks (temporal stage linear in token count, ring precompute
quadratic in per-view count) and the stage-ordering comparison.
"""

from __future__ import annotations

import time

import numpy as np

from .mtp import TemporalScoreParams, mtp_prune
from .pipeline import ORDER_SPATIAL_FIRST, ORDER_TEMPORAL_FIRST, PruneConfig, st_prune
from .rsp import generic_ring, spatial_score
from .tensor import TokenTensor
from .timing import PhaseTimer


def median_time(fn, repeats: int = 5, warmup: int = 1) -> float:
    """Median wall seconds of fn() over `repeats` runs after `warmup` runs."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return float(np.median(samples))


def _random_slab(shape, seed) -> np.ndarray:
    return np.random.default_rng(seed).normal(size=shape).astype(np.float32)


def mtp_scaling_case(
    t_frames: int = 5,
    p_small: int = 1024,
    c_dim: int = 64,
    k1: int = 320,
    repeats: int = 5,
    seed: int = 11,
) -> dict:
    """Time the temporal stage at N and 2N candidates with K1 fixed.

    The stage is linear in the candidate count, so the ratio should sit near
    2 (cache and interpreter constants widen the band in practice).
    """
    slab_small = _random_slab((t_frames, p_small, c_dim), seed)
    slab_large = _random_slab((t_frames, 2 * p_small, c_dim), seed + 1)
    params = TemporalScoreParams()
    t_small = median_time(lambda: mtp_prune(slab_small, k1, params), repeats=repeats)
    t_large = median_time(lambda: mtp_prune(slab_large, k1, params), repeats=repeats)
    return {
        "name": "mtp-scaling",
        "params": {"t": t_frames, "p": [p_small, 2 * p_small], "c": c_dim, "k1": k1, "repeats": repeats},
        "seconds_small": t_small,
        "seconds_large": t_large,
        "ratio": t_large / t_small,
    }


def rsp_precompute_scaling_case(
    v_count: int = 6,
    m_small: int = 256,
    c_dim: int = 64,
    repeats: int = 5,
    seed: int = 23,
) -> dict:
    """Time the bilateral scoring precompute at M and 2M tokens per view.

    The pairwise similarity blocks are quadratic in M, so the ratio should
    sit near 4.
    """
    views_small = _random_slab((v_count, m_small, c_dim), seed)
    views_large = _random_slab((v_count, 2 * m_small, c_dim), seed + 1)
    ring = generic_ring(v_count)
    t_small = median_time(lambda: spatial_score(views_small, ring), repeats=repeats)
    t_large = median_time(lambda: spatial_score(views_large, ring), repeats=repeats)
    return {
        "name": "rsp-precompute-scaling",
        "params": {"v": v_count, "m": [m_small, 2 * m_small], "c": c_dim, "repeats": repeats},
        "seconds_small": t_small,
        "seconds_large": t_large,
        "ratio": t_large / t_small,
    }


def ordering_case(
    v_count: int = 6,
    t_frames: int = 5,
    p_patches: int = 576,
    c_dim: int = 128,
    retention: float = 0.25,
    repeats: int = 5,
    seed: int = 37,
) -> dict:
    """End-to-end wall time of the two stage orders on one workload."""
    x = TokenTensor(_random_slab((v_count, t_frames, p_patches, c_dim), seed))
    cfg_t = PruneConfig.from_retention(retention, order=ORDER_TEMPORAL_FIRST)
    cfg_s = PruneConfig.from_retention(retention, order=ORDER_SPATIAL_FIRST)
    t_temporal = median_time(lambda: st_prune(x, cfg_t), repeats=repeats)
    t_spatial = median_time(lambda: st_prune(x, cfg_s), repeats=repeats)
    return {
        "name": "ordering",
        "params": {
            "v": v_count, "t": t_frames, "p": p_patches, "c": c_dim,
            "retention": retention, "repeats": repeats,
        },
        "temporal_first_seconds": t_temporal,
        "spatial_first_seconds": t_spatial,
    }


def pipeline_grid_case(dims: tuple[int, int, int, int], retention: float, repeats: int, seed: int) -> dict:
    """Median end-to-end time plus per-stage breakdown for one grid point."""
    v_count, t_frames, p_patches, c_dim = dims
    x = TokenTensor(_random_slab(dims, seed))
    cfg = PruneConfig.from_retention(retention)
    total = median_time(lambda: st_prune(x, cfg), repeats=repeats)
    timer = PhaseTimer()
    out = st_prune(x, cfg, timer=timer)
    return {
        "name": "pipeline",
        "params": {"v": v_count, "t": t_frames, "p": p_patches, "c": c_dim, "retention": retention,
                   "k1": out.k1, "k2": out.k2, "repeats": repeats},
        "median_seconds": total,
        "stage_times_us": timer.as_us(),
    }


def default_grid(quick: bool = False, repeats: int = 5) -> list[dict]:
    """The standard bench sweep: grid points plus the named scaling cases."""
    if quick:
        grid = [(2, 3, 64, 32), (4, 3, 64, 32)]
        cases = [
            pipeline_grid_case(dims, 0.25, repeats=max(3, repeats - 2), seed=5 + i)
            for i, dims in enumerate(grid)
        ]
        cases.append(mtp_scaling_case(p_small=128, k1=80, repeats=3))
        cases.append(rsp_precompute_scaling_case(m_small=64, repeats=3))
        cases.append(ordering_case(p_patches=96, c_dim=32, repeats=3))
        return cases
    grid = [
        (6, 5, 144, 64),
        (6, 5, 288, 64),
        (6, 5, 576, 64),
        (6, 5, 576, 128),
        (2, 5, 576, 128),
        (6, 1, 576, 128),
    ]
    cases = [pipeline_grid_case(dims, 0.25, repeats=repeats, seed=5 + i) for i, dims in enumerate(grid)]
    cases.append(mtp_scaling_case(repeats=repeats))
    cases.append(rsp_precompute_scaling_case(repeats=repeats))
    cases.append(ordering_case(repeats=repeats))
    return cases
