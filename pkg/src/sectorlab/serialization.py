"""File formats shared by the harness and downstream plotting.

* packets: CSV with columns x, re, im
* band structures: CSV with columns k, E_1 .. E_n
* dense kernels: binary container, little-endian
    magic  b"KMAT"
    uint32 version (= 1)
    uint32 n_points
    float64 t_i, t_f, theta
    complex128 row-major matrix (n_points * n_points entries)
* reports: JSON with sorted keys (byte-stable for fixed inputs)
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .errors import MalformedWordError
from .ring import Grid1D, Wavepacket

KERNEL_MAGIC = b"KMAT"
KERNEL_VERSION = 1
_HEADER = struct.Struct("<4sII3d")


def write_packet_csv(path, psi: Wavepacket) -> None:
    x = psi.grid.points
    with open(path, "w", newline="") as fh:
        fh.write("x,re,im\n")
        for xi, amp in zip(x, psi.amplitudes):
            fh.write(f"{float(xi)!r},{float(amp.real)!r},{float(amp.imag)!r}\n")


def read_packet_csv(path, grid: Grid1D | None = None) -> Wavepacket:
    data = np.genfromtxt(path, delimiter=",", names=True)
    x = np.atleast_1d(data["x"])
    amps = np.atleast_1d(data["re"]) + 1j * np.atleast_1d(data["im"])
    if grid is None:
        n = len(x)
        dx = float(x[1] - x[0])
        grid = Grid1D(n, n * dx, origin=float(x[0]) - dx / 2)
    return Wavepacket(grid, amps)


def write_bands_csv(path, rows: np.ndarray) -> None:
    n_bands = rows.shape[1] - 1
    header = "k," + ",".join(f"E_{i + 1}" for i in range(n_bands))
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_kernel(path, kernel: np.ndarray, t_i: float, t_f: float, theta: float = 0.0) -> None:
    kernel = np.ascontiguousarray(kernel, dtype=np.complex128)
    n = kernel.shape[0]
    if kernel.shape != (n, n):
        raise MalformedWordError("kernel container stores square matrices")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(KERNEL_MAGIC, KERNEL_VERSION, n, float(t_i), float(t_f), float(theta)))
        fh.write(kernel.astype("<c16").tobytes(order="C"))


def read_kernel(path) -> tuple[np.ndarray, dict]:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        magic, version, n, t_i, t_f, theta = _HEADER.unpack(header)
        if magic != KERNEL_MAGIC or version != KERNEL_VERSION:
            raise MalformedWordError("not a kernel container (bad magic or version)")
        payload = fh.read(16 * n * n)
    kernel = np.frombuffer(payload, dtype="<c16").reshape(n, n).copy()
    return kernel, {"n_points": n, "t_i": t_i, "t_f": t_f, "theta": theta}


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def dumps_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"
