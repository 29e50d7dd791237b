"""Deterministic JSON output.

Floats are always written with 17 significant digits so that artifacts
round-trip bit-exactly and re-runs produce byte-identical files. Files are
written to a temporary sibling and renamed into place.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite float {x!r}")
    return format(x, ".17g")


def _scalar(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(int(obj))
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    # numpy scalars
    if hasattr(obj, "item"):
        return _scalar(obj.item())
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _is_container(obj) -> bool:
    return isinstance(obj, (dict, list, tuple))


def _inline(obj) -> str:
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k), ensure_ascii=False)}: {_inline(v)}"
                               for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_inline(v) for v in obj) + "]"
    return _scalar(obj)


def _encode(obj, level: int, indent: int) -> str:
    if not _is_container(obj):
        return _scalar(obj)
    items = obj.values() if isinstance(obj, dict) else obj
    if not any(_is_container(v) for v in items):
        return _inline(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        body = ",\n".join(
            f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, level + 1, indent)}"
            for k, v in obj.items()
        )
        return "{\n" + body + "\n" + end + "}"
    body = ",\n".join(pad + _encode(v, level + 1, indent) for v in obj)
    return "[\n" + body + "\n" + end + "]"


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, 0, indent) + "\n"


def dumps_line(obj) -> str:
    """Single-line encoding, for JSON-lines output."""
    return _inline(obj)


def write_text_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    write_text_atomic(path, dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
