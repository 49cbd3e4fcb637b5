"""CSV and JSON file formats.

Signal CSV: header ``t,z1,...,zd`` then one row per time step with strictly
consecutive ascending ``t``. Floats are written with ``repr`` so a write/read
round trip is exact and reruns are byte-identical.

Closed-loop CSV: header ``t,x1..xn,u1..um,stage_cost``. Rows ``t = 0..steps-1``
carry the applied input and stage cost; the final row ``t = steps`` holds only
the last state, with the input and cost fields left empty.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError
from .signals import Signal


def _fmt(v: float) -> str:
    return repr(float(v))


def write_signal_csv(z: Signal, path, prefix: str = "z") -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"{prefix}{i + 1}" for i in range(z.dim)])
        for i, row in enumerate(z.samples):
            w.writerow([z.first_index + i] + [_fmt(v) for v in row])


def _parse_float(text: str, path, line: int, column: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"column '{column}': cannot parse {text!r} as a number", path, line) from None
    if not math.isfinite(v):
        raise ParseError(f"column '{column}': non-finite value {text!r}", path, line)
    return v


def _check_header(header: list[str], path, prefix: str) -> int:
    if not header or header[0].strip() != "t":
        raise ParseError("missing column 't' (header must start with t)", path, 1)
    names = [h.strip() for h in header[1:]]
    if not names:
        raise ParseError(f"missing column '{prefix}1'", path, 1)
    for i, name in enumerate(names):
        expected = f"{prefix}{i + 1}"
        if name != expected:
            raise ParseError(f"missing column '{expected}' (found '{name}')", path, 1)
    return len(names)


def read_signal_csv(path, prefix: str | None = None) -> Signal:
    """Read a signal written by :func:`write_signal_csv`.

    The column prefix (``z``, ``u``, ``x``...) is taken from the first data
    column unless given explicitly.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty file", path, 1)
    header = rows[0]
    if prefix is None:
        prefix = header[1].strip().rstrip("0123456789") if len(header) > 1 else "z"
    dim = _check_header(header, path, prefix)
    data = []
    t_first = None
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != dim + 1:
            raise ParseError(f"expected {dim + 1} fields, got {len(row)}", path, lineno)
        try:
            t = int(row[0])
        except ValueError:
            raise ParseError(f"column 't': {row[0]!r} is not an integer", path, lineno) from None
        if t_first is None:
            t_first = t
        elif t != t_first + len(data):
            raise ParseError(f"column 't': expected {t_first + len(data)}, got {t}", path, lineno)
        data.append([_parse_float(v, path, lineno, f"{prefix}{j + 1}") for j, v in enumerate(row[1:])])
    if not data:
        raise ParseError("no data rows", path, 2)
    return Signal(np.array(data), first_index=t_first)


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None


def write_closed_loop_csv(x: Signal, u: Signal | None, stage_costs, path) -> None:
    n = x.dim
    steps = x.length - 1
    m = u.dim if u is not None else 0
    if m == 0 and steps > 0:
        raise ValueError("inputs are required when steps > 0")
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"x{i + 1}" for i in range(n)] + [f"u{j + 1}" for j in range(m)] + ["stage_cost"])
        for t in range(steps + 1):
            row = [t] + [_fmt(v) for v in x.samples[t]]
            if t < steps:
                row += [_fmt(v) for v in u.samples[t]] + [_fmt(stage_costs[t])]
            else:
                row += [""] * (m + 1)
            w.writerow(row)


def read_closed_loop_csv(path) -> tuple[Signal, Signal | None, np.ndarray]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty file", path, 1)
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "t" or header[-1] != "stage_cost":
        raise ParseError("header must be t,x1..xn,u1..um,stage_cost", path, 1)
    xs = [h for h in header[1:-1] if h.startswith("x")]
    us = [h for h in header[1:-1] if h.startswith("u")]
    n, m = len(xs), len(us)
    for i in range(n):
        if xs[i] != f"x{i + 1}":
            raise ParseError(f"missing column 'x{i + 1}'", path, 1)
    for j in range(m):
        if us[j] != f"u{j + 1}":
            raise ParseError(f"missing column 'u{j + 1}'", path, 1)
    X, U, C = [], [], []
    body = [r for r in rows[1:] if r]
    for k, row in enumerate(body):
        lineno = k + 2
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, lineno)
        X.append([_parse_float(v, path, lineno, xs[i]) for i, v in enumerate(row[1 : 1 + n])])
        if k < len(body) - 1:
            U.append([_parse_float(v, path, lineno, us[j]) for j, v in enumerate(row[1 + n : 1 + n + m])])
            C.append(_parse_float(row[-1], path, lineno, "stage_cost"))
    if not X:
        raise ParseError("no data rows", path, 2)
    return Signal(np.array(X)), (Signal(np.array(U)) if U else None), np.array(C)
