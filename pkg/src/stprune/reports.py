"""Report document builders and schema plumbing.

Reports are plain JSON with sorted keys and fixed separators, so identical
inputs serialize to identical bytes (timing fields aside). The committed
schemas live under stprune/schemas/ and the test suite validates every
report kind against them.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict
from importlib import resources

from . import __version__
from .pipeline import PruneConfig, PrunedOutput
from .rsp import ViewRing
from .synth import RetentionMetrics

SCHEMA_KINDS = ("run_report", "eval_report", "bench_report", "oracle_report")


def tool_stamp() -> dict:
    return {"name": "stprune", "version": __version__}


def dims_doc(dims) -> dict:
    v, t, p, c = dims
    return {"v": int(v), "t": int(t), "p": int(p), "c": int(c)}


def config_echo(config: PruneConfig, ring: ViewRing) -> dict:
    return {
        "retention": config.total_retention,
        "split": [config.split[0], config.split[1]],
        "order": config.order,
        "alpha": config.alpha,
        "lambda1": config.lambda1,
        "lambda2": config.lambda2,
        "ring": list(ring.order),
        "method": config.method,
    }


def metrics_doc(metrics: RetentionMetrics | None) -> dict | None:
    return None if metrics is None else asdict(metrics)


def run_report(
    config: PruneConfig,
    ring: ViewRing,
    input_dims,
    output: PrunedOutput,
    stage_times_us: dict,
    metrics: RetentionMetrics | None = None,
) -> dict:
    _, t, p, _ = input_dims
    return {
        "schema_version": 1,
        "kind": "run-report",
        "tool": tool_stamp(),
        "config": config_echo(config, ring),
        "input": dims_doc(input_dims),
        "counts": {
            "input_per_view": int(t * p),
            "stage1_per_view": int(output.k1),
            "output_per_view": int(output.k2),
            "total_output": int(output.tokens.shape[0] * output.k2),
        },
        "stage_times_us": dict(stage_times_us),
        "metrics": metrics_doc(metrics),
    }


def eval_report(dims, metrics: RetentionMetrics) -> dict:
    return {
        "schema_version": 1,
        "kind": "eval-report",
        "tool": tool_stamp(),
        "dims": dims_doc(dims),
        "metrics": metrics_doc(metrics),
    }


def bench_report(cases: list[dict]) -> dict:
    return {
        "schema_version": 1,
        "kind": "bench-report",
        "tool": tool_stamp(),
        "cases": cases,
    }


def oracle_report(suite: dict, ratios: list[float], dominance_violations: int) -> dict:
    return {
        "schema_version": 1,
        "kind": "oracle-report",
        "tool": tool_stamp(),
        "suite": dict(suite),
        "min_ratio": min(ratios),
        "mean_ratio": sum(ratios) / len(ratios),
        "dominance_violations": int(dominance_violations),
        "ratios": list(ratios),
    }


def dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_json(doc, path) -> None:
    """Atomic JSON write (temp file + rename), byte-stable serialization."""
    payload = dump_json(doc).encode("utf-8")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".json.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_schema(kind: str) -> dict:
    if kind not in SCHEMA_KINDS:
        raise ValueError(f"unknown schema kind {kind!r}")
    ref = resources.files("stprune").joinpath(f"schemas/{kind}.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))
