"""Synthetic labeled scenes and retention-quality metrics.

Scenes plant four token populations with known roles into a background of
per-patch constants plus small frame noise: drifting "dynamic" trajectories
(high temporal variance), "landmark" tokens salient only in the final frame,
and "duplicate" tokens copied verbatim into both ring-adjacent views.
Retention metrics then measure how well a pruned output kept each population.

Generation is fully deterministic for a given spec; the RNG is the
counter-based Philox4x32-10 generator as shipped in numpy, and its identity
is recorded in the labels sidecar.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, ConsistencyError
from .fileio import write_json_atomic
from .pipeline import PrunedOutput
from .tensor import TokenTensor

RNG_NAME = "numpy.random.Philox (Philox4x32-10, counter-based)"
LABELS_SCHEMA_VERSION = 1

ROLE_BACKGROUND = 0
ROLE_DYNAMIC = 1
ROLE_LANDMARK = 2
ROLE_DUPLICATE = 3
ROLE_NAMES = ("background", "dynamic", "landmark", "duplicate")

# Dynamic trajectories sweep this angle (radians) through a random 2-D plane
# across the T frames: consecutive frames stay correlated while the whole
# trajectory spans far more than the background jitter.
_TRAJECTORY_SWEEP_RAD = 2.0


@dataclass(frozen=True)
class SceneSpec:
    """Dimensions, planted-population counts, scales, and RNG seed."""

    v: int
    t: int
    p: int
    c: int
    n_dynamic: int = 0
    n_landmark: int = 0
    n_duplicate: int = 0
    background_sigma: float = 0.02
    feature_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if min(self.v, self.t, self.p, self.c) < 1:
            raise ConfigError(f"dims must all be >= 1, got {(self.v, self.t, self.p, self.c)}")
        if min(self.n_dynamic, self.n_landmark, self.n_duplicate) < 0:
            raise ConfigError("planted counts must be >= 0")
        # Each view hosts its own duplicate sources plus incoming copies from
        # both neighbors, so duplicates claim 3 * n_duplicate patch slots.
        needed = self.n_dynamic + self.n_landmark + 3 * self.n_duplicate
        if needed > self.p:
            raise ConfigError(f"planted populations need {needed} patch slots but P={self.p}")
        if self.background_sigma <= 0 or self.feature_scale <= 0:
            raise ConfigError("scales must be > 0")
        if self.n_duplicate > 0 and self.v < 2:
            raise ConfigError("duplicates need at least 2 views")


@dataclass(frozen=True)
class SceneLabels:
    """Ground truth for one generated scene.

    roles is a (V, T, P) array of ROLE_* codes; duplicate_links pairs
    (view, flat) coordinates of bit-identical tokens in adjacent views.
    """

    roles: np.ndarray
    duplicate_links: list[tuple[tuple[int, int], tuple[int, int]]]
    spec: SceneSpec
    rng_name: str = RNG_NAME


@dataclass(frozen=True)
class RetentionMetrics:
    """Per-role retention quality of one pruned output, each field in [0, 1]."""

    dynamic_recall: float
    landmark_recall: float
    duplicate_elimination_rate: float
    current_frame_fraction: float


def _unit(vec: np.ndarray) -> np.ndarray:
    return vec / np.linalg.norm(vec)


def gen_scene(spec: SceneSpec) -> tuple[TokenTensor, SceneLabels]:
    """Generate a labeled scene; identical specs give byte-identical outputs."""
    rng = np.random.Generator(np.random.Philox(spec.seed))
    v_n, t_n, p_n, c_n = spec.v, spec.t, spec.p, spec.c

    base = rng.normal(0.0, 1.0, size=(v_n, p_n, c_n))
    noise = rng.normal(0.0, 1.0, size=(v_n, t_n, p_n, c_n)) * spec.background_sigma
    tokens = base[:, None, :, :] + noise
    roles = np.full((v_n, t_n, p_n), ROLE_BACKGROUND, dtype=np.int8)

    # Per view: disjoint patch slots for each planted population.
    slots = [rng.permutation(p_n) for _ in range(v_n)]
    n_dyn, n_lm, n_dup = spec.n_dynamic, spec.n_landmark, spec.n_duplicate
    dyn_slots = [s[:n_dyn] for s in slots]
    lm_slots = [s[n_dyn : n_dyn + n_lm] for s in slots]
    src_slots = [s[n_dyn + n_lm : n_dyn + n_lm + n_dup] for s in slots]
    from_prev_slots = [s[n_dyn + n_lm + n_dup : n_dyn + n_lm + 2 * n_dup] for s in slots]
    from_next_slots = [s[n_dyn + n_lm + 2 * n_dup : n_dyn + n_lm + 3 * n_dup] for s in slots]

    progress = np.linspace(0.0, _TRAJECTORY_SWEEP_RAD, t_n)
    for v in range(v_n):
        for slot in dyn_slots[v]:
            d1 = _unit(rng.normal(size=c_n))
            d2 = rng.normal(size=c_n)
            d2 = _unit(d2 - (d2 @ d1) * d1)
            traj = np.outer(np.cos(progress), d1) + np.outer(np.sin(progress), d2)
            tokens[v, :, slot, :] = traj * spec.feature_scale + noise[v, :, slot, :]
            roles[v, :, slot] = ROLE_DYNAMIC

    last = t_n - 1
    for v in range(v_n):
        for slot in lm_slots[v]:
            lm_dir = _unit(rng.normal(size=c_n))
            tokens[v, last, slot, :] = lm_dir * spec.feature_scale + noise[v, last, slot, :]
            roles[v, last, slot] = ROLE_LANDMARK

    links: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for v in range(v_n):
        for j in range(n_dup):
            dup_vec = _unit(rng.normal(size=c_n)) * spec.feature_scale
            src = int(src_slots[v][j])
            nxt, prv = (v + 1) % v_n, (v - 1) % v_n
            copy_next = int(from_prev_slots[nxt][j])
            copy_prev = int(from_next_slots[prv][j])
            for w, slot in ((v, src), (nxt, copy_next), (prv, copy_prev)):
                tokens[w, last, slot, :] = dup_vec
                roles[w, last, slot] = ROLE_DUPLICATE
            src_flat = last * p_n + src
            links.append(((v, src_flat), (nxt, last * p_n + copy_next)))
            links.append(((v, src_flat), (prv, last * p_n + copy_prev)))

    tensor = TokenTensor(tokens.astype(np.float32))
    return tensor, SceneLabels(roles=roles, duplicate_links=links, spec=spec)


def _refs_per_view(result) -> list[list[int]]:
    if isinstance(result, PrunedOutput):
        return [[ref.flat for ref in view_refs] for view_refs in result.refs]
    return [[int(i) for i in view_refs] for view_refs in result]


def eval_retention(result, labels: SceneLabels) -> RetentionMetrics:
    """Score a pruned output (or per-view flat-index lists) against labels."""
    refs = _refs_per_view(result)
    v_n, t_n, p_n = labels.roles.shape
    if len(refs) != v_n:
        raise ConsistencyError(f"refs cover {len(refs)} views but scene has {v_n}")
    retained: list[set[int]] = []
    for v, view_refs in enumerate(refs):
        flat = set(view_refs)
        if len(flat) != len(view_refs):
            raise ConsistencyError(f"view {v} refs are not distinct")
        for i in view_refs:
            if not 0 <= i < t_n * p_n:
                raise ConsistencyError(f"view {v} ref {i} outside [0, {t_n * p_n})")
        retained.append(flat)

    flat_roles = labels.roles.reshape(v_n, t_n * p_n)
    counts = {ROLE_DYNAMIC: [0, 0], ROLE_LANDMARK: [0, 0]}
    for role, acc in counts.items():
        acc[0] = int((flat_roles == role).sum())
        acc[1] = sum(1 for v in range(v_n) for i in retained[v] if flat_roles[v, i] == role)

    def recall(role: int) -> float:
        planted, kept = counts[role]
        return 1.0 if planted == 0 else kept / planted

    surviving_pairs = sum(
        1 for (va, fa), (vb, fb) in labels.duplicate_links
        if fa in retained[va] and fb in retained[vb]
    )
    n_pairs = len(labels.duplicate_links)
    dup_elimination = 1.0 if n_pairs == 0 else 1.0 - surviving_pairs / n_pairs

    total = sum(len(r) for r in retained)
    current = sum(1 for v in range(v_n) for i in retained[v] if i // p_n == t_n - 1)
    current_fraction = 0.0 if total == 0 else current / total

    return RetentionMetrics(
        dynamic_recall=recall(ROLE_DYNAMIC),
        landmark_recall=recall(ROLE_LANDMARK),
        duplicate_elimination_rate=dup_elimination,
        current_frame_fraction=current_fraction,
    )


def save_labels(labels: SceneLabels, path) -> None:
    """Write the labels sidecar (UTF-8 JSON, schema-versioned)."""
    doc = {
        "schema_version": LABELS_SCHEMA_VERSION,
        "dims": {"v": labels.spec.v, "t": labels.spec.t, "p": labels.spec.p, "c": labels.spec.c},
        "roles": [ROLE_NAMES[code] for code in labels.roles.reshape(-1)],
        "duplicate_links": [[list(a), list(b)] for a, b in labels.duplicate_links],
        "spec": asdict(labels.spec),
        "rng": labels.rng_name,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_labels(path) -> SceneLabels:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != LABELS_SCHEMA_VERSION:
        raise ConsistencyError(f"unsupported labels schema {doc.get('schema_version')!r}")
    spec = SceneSpec(**doc["spec"])
    code_of = {name: i for i, name in enumerate(ROLE_NAMES)}
    try:
        codes = np.array([code_of[r] for r in doc["roles"]], dtype=np.int8)
    except KeyError as exc:
        raise ConsistencyError(f"unknown role {exc.args[0]!r} in labels") from None
    if codes.size != spec.v * spec.t * spec.p:
        raise ConsistencyError("roles length does not match dims")
    links = [
        ((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))
        for a, b in doc["duplicate_links"]
    ]
    return SceneLabels(
        roles=codes.reshape(spec.v, spec.t, spec.p),
        duplicate_links=links,
        spec=spec,
        rng_name=doc.get("rng", RNG_NAME),
    )
