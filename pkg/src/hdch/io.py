"""Binary field snapshots.

Layout, little-endian: ``b"HDCH"``, u32 version, u32 nx, u32 ny, f64 lx,
f64 ly, then ``nx * ny`` f64 values of the ``(nx, ny)`` array in C order.
"""

import struct

import numpy as np

from .grid import Grid

MAGIC = b"HDCH"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")


def write_snapshot(path, grid, phi):
    phi = grid.check(phi)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, grid.nx, grid.ny, grid.lx, grid.ly))
        fh.write(np.ascontiguousarray(phi, dtype="<f8").tobytes())


def read_snapshot(path):
    """Returns ``(grid, phi)``."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, nx, ny, lx, ly = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a snapshot file")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} values, found {data.size}")
    return Grid(nx, ny, lx, ly), data.reshape(nx, ny).astype(float)
