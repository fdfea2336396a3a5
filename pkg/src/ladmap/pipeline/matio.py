"""Matrix and label files.

Two matrix formats, chosen by extension:

* ``.csv``  human readable; the first line holds ``rows,cols``, each further
  line is one row of comma-separated values.
* ``.bin``  raw little-endian float64, row major, after a 16-byte header of
  an 8-byte magic ``LRRMAT01`` and two little-endian uint32 dimensions.

Labels are a single-column CSV of integers.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..linalg import Array, check_matrix

MAGIC = b"LRRMAT01"


def save_matrix(path: str | Path, M: Array) -> None:
    M = check_matrix(M, "matrix")
    path = Path(path)
    if path.suffix == ".bin":
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", M.shape[0], M.shape[1]))
            fh.write(np.ascontiguousarray(M, dtype="<f8").tobytes())
    elif path.suffix == ".csv":
        with open(path, "w") as fh:
            fh.write(f"{M.shape[0]},{M.shape[1]}\n")
            for row in M:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    else:
        raise ValueError(f"unsupported matrix extension {path.suffix!r} (use .csv or .bin)")


def load_matrix(path: str | Path) -> Array:
    path = Path(path)
    if not path.exists():
        raise ValueError(f"no such file: {path}")
    if path.suffix == ".bin":
        raw = path.read_bytes()
        if len(raw) < 16 or raw[:8] != MAGIC:
            raise ValueError(f"{path} is not a valid binary matrix file")
        rows, cols = struct.unpack("<II", raw[8:16])
        data = np.frombuffer(raw[16:], dtype="<f8")
        if data.size != rows * cols:
            raise ValueError(f"{path}: expected {rows * cols} values, found {data.size}")
        return check_matrix(data.reshape(rows, cols).copy(), str(path))
    if path.suffix == ".csv":
        with open(path) as fh:
            header = fh.readline().strip()
            try:
                rows, cols = (int(v) for v in header.split(","))
            except Exception as exc:
                raise ValueError(f"{path}: bad header {header!r}") from exc
            M = np.loadtxt(fh, delimiter=",", ndmin=2)
        if M.shape != (rows, cols):
            raise ValueError(f"{path}: header says {rows}x{cols}, data is {M.shape}")
        return check_matrix(M, str(path))
    raise ValueError(f"unsupported matrix extension {path.suffix!r} (use .csv or .bin)")


def save_labels(path: str | Path, labels) -> None:
    labels = np.asarray(labels, dtype=np.int64)
    with open(path, "w") as fh:
        for v in labels:
            fh.write(f"{v}\n")


def load_labels(path: str | Path) -> Array:
    path = Path(path)
    if not path.exists():
        raise ValueError(f"no such file: {path}")
    return np.loadtxt(path, dtype=np.int64, ndmin=1)
