"""Plain-text file formats: edge lists, CSV tables and JSON sidecars."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import DomainError


def write_edge_list(path, edges) -> Path:
    """One ``u v`` pair per line, 0-indexed, ``u < v``, ascending in ``u`` then ``v``."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    e = np.column_stack([e.min(axis=1), e.max(axis=1)])
    e = e[np.lexsort((e[:, 1], e[:, 0]))]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.writelines(f"{u} {v}\n" for u, v in e.tolist())
    return path


def read_edge_list(path, n_nodes: int | None = None) -> tuple[int, np.ndarray]:
    """Edges of a ``u v`` file; blank lines and ``#`` comments are skipped.

    Without ``n_nodes`` the node count is one more than the largest index.
    """
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                rows.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise DomainError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
    e = np.array(rows, dtype=np.int64).reshape(-1, 2)
    if len(e) and e.min() < 0:
        raise DomainError(f"{path}: negative node id")
    top = int(e.max()) + 1 if len(e) else 0
    if n_nodes is None:
        n_nodes = top
    elif n_nodes < top:
        raise DomainError(f"{path}: node id {top - 1} exceeds n_nodes={n_nodes}")
    return n_nodes, e


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v


def write_csv(path, rows: list[dict], columns: list[str] | None = None) -> Path:
    """CSV with ``columns`` (default: union of keys in first-seen order); missing cells blank."""
    if columns is None:
        columns = list(dict.fromkeys(k for r in rows for k in r))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path
