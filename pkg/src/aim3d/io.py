"""
Binary and text product formats.

Image grid (``.grid`` / ``.bin``), all little-endian::

    b"AIMG1"
    u32 rows, u32 cols
    f64 axis1_min, f64 axis1_max, f64 axis2_min, f64 axis2_max
    rows * cols complex64 (f32 re, f32 im), row-major

Radar cube::

    b"AIMC1"
    u32 n_range, u32 n_pulse, u32 n_channel
    f64 range_bin_m, f64 pri_s
    complex64 samples, channel-major: for each channel, for each pulse,
    the n_range fast-time samples

Axes are stored as extents only, so grids are assumed evenly spaced.
All writers go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .compression import RadarDataCube
from .images import ImageGrid
from .interferometry import VisibilitySet

__all__ = [
    "atomic_write",
    "image_to_bytes",
    "image_from_bytes",
    "write_image",
    "read_image",
    "write_image_csv",
    "write_image_pgm",
    "cube_to_bytes",
    "cube_from_bytes",
    "write_cube",
    "read_cube",
    "write_visibility_csv",
    "read_visibility_csv",
]

IMAGE_MAGIC = b"AIMG1"
CUBE_MAGIC = b"AIMC1"
_IMAGE_HEADER = struct.Struct("<5sII4d")
_CUBE_HEADER = struct.Struct("<5sIII2d")
PGM_FLOOR_DB = -40.0


def atomic_write(path, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def image_to_bytes(grid: ImageGrid) -> bytes:
    rows, cols = grid.shape
    (a0, a1), (b0, b1) = grid.extent
    header = _IMAGE_HEADER.pack(IMAGE_MAGIC, rows, cols, a0, a1, b0, b1)
    return header + np.ascontiguousarray(grid.values, dtype="<c8").tobytes()


def image_from_bytes(buf: bytes, axis1_name="axis1", axis2_name="axis2") -> ImageGrid:
    if len(buf) < _IMAGE_HEADER.size:
        raise ValueError("truncated image header")
    magic, rows, cols, a0, a1, b0, b1 = _IMAGE_HEADER.unpack_from(buf)
    if magic != IMAGE_MAGIC:
        raise ValueError(f"bad image magic {magic!r}")
    expected = _IMAGE_HEADER.size + rows * cols * 8
    if len(buf) != expected:
        raise ValueError(f"image payload is {len(buf)} bytes, expected {expected}")
    values = np.frombuffer(buf, dtype="<c8", offset=_IMAGE_HEADER.size).reshape(rows, cols)
    return ImageGrid(np.linspace(a0, a1, rows), np.linspace(b0, b1, cols),
                     values.astype(np.complex64), axis1_name, axis2_name)


def write_image(path, grid: ImageGrid) -> Path:
    return atomic_write(path, image_to_bytes(grid))


def read_image(path, **kwargs) -> ImageGrid:
    return image_from_bytes(Path(path).read_bytes(), **kwargs)


def write_image_csv(path, grid: ImageGrid) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([grid.axis1_name, grid.axis2_name, "re", "im"])
    values = np.asarray(grid.values, dtype=np.complex64)
    for i, a in enumerate(grid.axis1):
        for j, b in enumerate(grid.axis2):
            z = values[i, j]
            w.writerow([repr(float(a)), repr(float(b)), repr(float(z.real)), repr(float(z.imag))])
    return atomic_write(path, buf.getvalue().encode())


def image_to_pgm_bytes(grid: ImageGrid, floor_db: float = PGM_FLOOR_DB) -> bytes:
    """8-bit binary PGM of ``10 log10(|I| / max|I|)`` clipped at ``floor_db``."""
    mag = np.abs(np.asarray(grid.values, dtype=np.complex64)).astype(float)
    peak = mag.max()
    if peak > 0:
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(mag / peak)
    else:
        db = np.full(mag.shape, floor_db)
    db = np.clip(db, floor_db, 0.0)
    pix = np.round((db - floor_db) / -floor_db * 255.0).astype(np.uint8)
    rows, cols = pix.shape
    return f"P5\n{cols} {rows}\n255\n".encode() + pix.tobytes()


def write_image_pgm(path, grid: ImageGrid, floor_db: float = PGM_FLOOR_DB) -> Path:
    return atomic_write(path, image_to_pgm_bytes(grid, floor_db))


def cube_to_bytes(cube: RadarDataCube) -> bytes:
    r, p, c = cube.shape
    header = _CUBE_HEADER.pack(CUBE_MAGIC, r, p, c, cube.range_bin_m, cube.pulse_interval_s)
    payload = np.ascontiguousarray(np.transpose(cube.data, (2, 1, 0)), dtype="<c8")
    return header + payload.tobytes()


def cube_from_bytes(buf: bytes, channel_ids=None) -> RadarDataCube:
    if len(buf) < _CUBE_HEADER.size:
        raise ValueError("truncated cube header")
    magic, r, p, c, bin_m, pri = _CUBE_HEADER.unpack_from(buf)
    if magic != CUBE_MAGIC:
        raise ValueError(f"bad cube magic {magic!r}")
    expected = _CUBE_HEADER.size + r * p * c * 8
    if len(buf) != expected:
        raise ValueError(f"cube payload is {len(buf)} bytes, expected {expected}")
    raw = np.frombuffer(buf, dtype="<c8", offset=_CUBE_HEADER.size).reshape(c, p, r)
    data = np.ascontiguousarray(np.transpose(raw, (2, 1, 0))).astype(np.complex64)
    return RadarDataCube(data, bin_m, pri, list(channel_ids) if channel_ids else [])


def write_cube(path, cube: RadarDataCube) -> Path:
    return atomic_write(path, cube_to_bytes(cube))


def read_cube(path, channel_ids=None) -> RadarDataCube:
    return cube_from_bytes(Path(path).read_bytes(), channel_ids)


def write_visibility_csv(path, vis: VisibilitySet) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "v", "re", "im", "multiplicity"])
    for u, v, z, m in zip(vis.u, vis.v, vis.values, vis.multiplicity):
        w.writerow([repr(float(u)), repr(float(v)), repr(float(z.real)), repr(float(z.imag)),
                    int(m)])
    return atomic_write(path, buf.getvalue().encode())


def read_visibility_csv(path, source: str = "raw_correlation") -> VisibilitySet:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no visibility rows")
    u = np.array([float(r["u"]) for r in rows])
    v = np.array([float(r["v"]) for r in rows])
    z = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    m = np.array([int(r["multiplicity"]) for r in rows])
    return VisibilitySet(u, v, z, m, source)
