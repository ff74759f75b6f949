"""Deterministic file output helpers.

All JSON emitted by the CLI goes through :func:`dumps_json` so that repeated
runs with the same seed produce byte-identical files: floats are always
rendered with 17 significant digits (enough to round-trip IEEE doubles) and
object keys keep insertion order.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np


def format_float(x: float) -> str:
    """Render a float with 17 significant digits ("1.0" style for integral values)."""
    if x != x:  # NaN
        raise ValueError("cannot serialize NaN")
    text = format(float(x), ".17g")
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


def dumps_json(obj, indent: int = 2) -> str:
    """Serialize nested dicts/lists/scalars to JSON with fixed float formatting."""
    out: list[str] = []
    _write_json(obj, out, indent, 0)
    out.append("\n")
    return "".join(out)


def _write_json(obj, out: list[str], indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    end_pad = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(pad)
            out.append(json.dumps(str(key)))
            out.append(": ")
            _write_json(value, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end_pad + "}")
    elif isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        nested = any(isinstance(v, (dict, list, tuple, np.ndarray)) for v in items)
        if nested:
            out.append("[\n")
            for i, value in enumerate(items):
                out.append(pad)
                _write_json(value, out, indent, level + 1)
                out.append(",\n" if i < len(items) - 1 else "\n")
            out.append(end_pad + "]")
        else:
            out.append("[")
            out.append(", ".join(_scalar_json(v) for v in items))
            out.append("]")
    else:
        out.append(_scalar_json(obj))


def _scalar_json(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__} to JSON")


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file + rename in the same directory."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str | os.PathLike, header: list[str], rows) -> None:
    """Write a CSV file atomically; floats formatted with 17 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("")
            elif isinstance(cell, (float, np.floating)):
                cells.append(format_float(float(cell)))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")
