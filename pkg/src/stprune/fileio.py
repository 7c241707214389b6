"""Atomic file writing shared by every artifact producer."""

from __future__ import annotations

import json
import os
import tempfile


def write_bytes_atomic(path, payload: bytes) -> None:
    """Write payload to path via a same-directory temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(doc) -> str:
    """Canonical JSON serialization: sorted keys, fixed separators, one
    trailing newline. Identical documents give identical bytes."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_json_atomic(path, doc) -> None:
    write_bytes_atomic(path, dump_json(doc).encode("utf-8"))
