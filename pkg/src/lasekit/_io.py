"""Small text-format helpers shared by the CSV writers."""

import json
from pathlib import Path

import numpy as np


def fmt(x):
    """Render a float with 17 significant digits (exact float64 round-trip)."""
    return "%.17g" % x


def write_table(path, header, rows, meta=None):
    """Write a CSV table, optionally preceded by a '#'-prefixed JSON line."""
    path = Path(path)
    lines = []
    if meta is not None:
        lines.append("# " + json.dumps(meta, sort_keys=True))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return fmt(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def read_table(path):
    """Read a CSV written by :func:`write_table`.

    Returns
    -------
    meta : dict or None
    header : list of str
    rows : list of list of str
    """
    meta = None
    header = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if meta is None and header is None:
                    meta = json.loads(line[1:].strip())
                continue
            parts = line.split(",")
            if header is None:
                header = parts
            else:
                rows.append(parts)
    if header is None:
        raise ValueError(f"{path}: no header row")
    return meta, header, rows


def write_matrix(path, index, M, labels, meta=None):
    """Write ``index,label1,...`` rows for a 2-D float array."""
    rows = [[int(i)] + [float(v) for v in row] for i, row in zip(index, M)]
    write_table(path, ["index"] + list(labels), rows, meta=meta)


def read_matrix(path):
    """Inverse of :func:`write_matrix`; returns (meta, index, M)."""
    meta, header, rows = read_table(path)
    index = np.array([int(r[0]) for r in rows], dtype=np.int64)
    M = np.array([[float(v) for v in r[1:]] for r in rows], dtype=np.float64)
    M = M.reshape(len(rows), len(header) - 1)
    return meta, index, M
