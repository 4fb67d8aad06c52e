"""Table serialization and amplitude-file parsing."""

from __future__ import annotations

import io
import json
import math
import warnings
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .entanglement import SuperposedState
from .model import SPIN_UP

CSV_DIGITS = 9
RENORM_WARN = 1e-9


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{CSV_DIGITS}g}"
    return str(value)


def to_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_csv_cell(row[c]) for c in columns) + "\n")
    return out.getvalue()


def to_json(meta: dict, columns: Sequence[str], rows: Sequence[dict]) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    payload = {"meta": _plain(meta), "rows": [{c: _plain(row[c]) for c in columns} for row in rows]}
    return json.dumps(payload, indent=2) + "\n"


def write_output(text: str, path: str | None, stream) -> None:
    if path is None or path == "-":
        stream.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def parse_amplitudes(text: str) -> SuperposedState:
    """Parse ``m re(c) im(c) [re(up) im(up) re(down) im(down)]`` lines.

    Blank lines and ``#`` comments are ignored; the spinor defaults to up.
    The result is normalized, with a warning if that moved the norm by more
    than ``1e-9``.
    """
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (3, 7):
            raise ValueError(f"line {lineno}: expected 3 or 7 fields, got {len(fields)}")
        try:
            m = int(fields[0])
            numbers = [float(x) for x in fields[1:]]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if not all(math.isfinite(x) for x in numbers):
            raise ValueError(f"line {lineno}: non-finite value")
        c = complex(numbers[0], numbers[1])
        if len(numbers) == 6:
            spinor = np.array([complex(numbers[2], numbers[3]), complex(numbers[4], numbers[5])])
        else:
            spinor = SPIN_UP
        entries.append((m, c, spinor))
    if not entries:
        raise ValueError("amplitude list is empty")
    state = SuperposedState.from_entries(entries)
    norm = state.norm()
    if norm == 0 or np.any(np.linalg.norm(state.spinors, axis=1) == 0):
        raise ValueError("amplitude list cannot be normalized")
    if abs(norm - 1) > RENORM_WARN:
        warnings.warn(f"amplitudes renormalized (norm was {norm:.12g})", stacklevel=2)
    return state.normalized()


def read_amplitudes(path: str | Path) -> SuperposedState:
    return parse_amplitudes(Path(path).read_text(encoding="utf-8"))
