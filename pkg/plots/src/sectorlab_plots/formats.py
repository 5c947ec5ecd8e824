"""Readers for the sectorlab artifact schemas.

This package never recomputes physics; it consumes the documented files:

* CSV tables with a header row (bands: k,E_1..E_n; convergence:
  cutoff,defect; twist sweeps: theta,t,...defect columns)
* the binary kernel container: little-endian magic b"KMAT", uint32 version
  (=1), uint32 n_points, float64 t_i, t_f, theta, then n_points^2 row-major
  complex128 entries
"""

from __future__ import annotations

import struct

import numpy as np


class SchemaError(Exception):
    """Input file does not match the schema of the requested figure kind."""


_KERNEL_HEADER = struct.Struct("<4sII3d")


def read_csv_table(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}: row with {len(cells)} cells, header has {len(header)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise SchemaError(f"{path}: non-numeric cell ({exc})") from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return header, np.array(rows)


def require_columns(path, header: list[str], required: list[str]) -> None:
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}; found {header}")


def read_bands(path) -> tuple[np.ndarray, np.ndarray, list[str]]:
    header, data = read_csv_table(path)
    require_columns(path, header, ["k", "E_1"])
    band_cols = [c for c in header if c.startswith("E_")]
    k = data[:, header.index("k")]
    bands = data[:, [header.index(c) for c in band_cols]]
    return k, bands, band_cols


def read_convergence(path) -> tuple[np.ndarray, np.ndarray]:
    header, data = read_csv_table(path)
    require_columns(path, header, ["cutoff", "defect"])
    return data[:, header.index("cutoff")], data[:, header.index("defect")]


def read_theta_sweep(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[str]]:
    header, data = read_csv_table(path)
    require_columns(path, header, ["theta", "t"])
    defect_cols = [c for c in header if "defect" in c or "_vs_" in c]
    if not defect_cols:
        raise SchemaError(f"{path}: no defect columns among {header}")
    theta = data[:, header.index("theta")]
    t = data[:, header.index("t")]
    defects = data[:, [header.index(c) for c in defect_cols]]
    return theta, t, defects, defect_cols


def read_kernel(path) -> tuple[np.ndarray, dict]:
    with open(path, "rb") as fh:
        head = fh.read(_KERNEL_HEADER.size)
        if len(head) < _KERNEL_HEADER.size:
            raise SchemaError(f"{path}: too short for a kernel container")
        magic, version, n, t_i, t_f, theta = _KERNEL_HEADER.unpack(head)
        if magic != b"KMAT" or version != 1:
            raise SchemaError(f"{path}: not a kernel container (magic {magic!r}, version {version})")
        payload = fh.read(16 * n * n)
    if len(payload) != 16 * n * n:
        raise SchemaError(f"{path}: truncated kernel payload")
    kernel = np.frombuffer(payload, dtype="<c16").reshape(n, n)
    return kernel, {"n_points": n, "t_i": t_i, "t_f": t_f, "theta": theta}
