"""Training-free spatio-temporal token pruning for multi-view, multi-frame
token tensors: motion-aware temporal pruning, ring-view spatial pruning, a
vanilla max-min baseline, an exact oracle, and a synthetic scene harness.
"""

from .errors import (
    ConfigError,
    ConsistencyError,
    DegenerateRingError,
    DimensionError,
    FormatError,
    OracleScaleError,
    PreconditionError,
    StpruneError,
)
from .mtp import TemporalScoreMap, TemporalScoreParams, mtp_prune, temporal_score
from .oracle import OracleReport, exact_maxmin, naive_mtp_reference, naive_rsp_reference
from .pipeline import (
    METHOD_STPRUNE,
    METHOD_VANILLA,
    ORDER_SPATIAL_FIRST,
    ORDER_TEMPORAL_FIRST,
    PruneConfig,
    PrunedOutput,
    budget_split,
    derive_budgets,
    st_prune,
)
from .rsp import NUSCENES_RING, SpatialScoreMap, ViewRing, generic_ring, rsp_prune, spatial_score
from .selection import (
    SelectionResult,
    WeightedSelectParams,
    greedy_expand,
    objective_value,
    vanilla_seed,
    weighted_seed,
)
from .synth import (
    RetentionMetrics,
    SceneLabels,
    SceneSpec,
    eval_retention,
    gen_scene,
    load_labels,
    save_labels,
)
from .tensor import (
    TokenRef,
    TokenTensor,
    cosine_sim,
    l2_norm,
    load_stt,
    max_sim_to_set,
    minmax_normalize,
    save_stt,
    unit_rows,
)

__version__ = "0.1.0"
