"""Rasters and their on-disk formats.

A raster is a 2-D ``numpy`` float array indexed ``[row, col]`` (i.e.
``[y, x]``) with intensities in [0, 1].  Two formats are supported:

* binary PGM (P5, maxval 255) for frames (quantizes to 8 bit);
* a plain-text grid for templates: one raster row per line, values as
  space-separated floats, ``#`` lines and blank lines ignored.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np


def validate_raster(raster: np.ndarray) -> np.ndarray:
    raster = np.asarray(raster, dtype=float)
    if raster.ndim != 2 or raster.shape[0] < 1 or raster.shape[1] < 1:
        raise ValueError(f"raster must be 2-D and non-empty, got shape {raster.shape}")
    if not np.all(np.isfinite(raster)):
        raise ValueError("raster contains non-finite values")
    if raster.min() < 0.0 or raster.max() > 1.0:
        raise ValueError("raster values outside [0, 1]")
    return raster


def write_pgm(raster: np.ndarray, path: str | os.PathLike) -> None:
    raster = validate_raster(raster)
    Path(path).write_bytes(pgm_bytes(raster))


def pgm_bytes(raster: np.ndarray) -> bytes:
    raster = validate_raster(raster)
    h, w = raster.shape
    header = f"P5 {w} {h} 255\n".encode("ascii")
    body = np.round(raster * 255.0).astype(np.uint8).tobytes()
    return header + body


def read_pgm(path: str | os.PathLike) -> np.ndarray:
    return pgm_from_bytes(Path(path).read_bytes())


def pgm_from_bytes(data: bytes) -> np.ndarray:
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM (missing P5 magic)")
    # header = magic, width, height, maxval as whitespace-separated tokens,
    # then exactly one whitespace byte before the pixel payload
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":  # comment line
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1
    w, h, maxval = fields
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos)
    return validate_raster(pixels.reshape(h, w).astype(float) / float(maxval))


def read_template(path: str | os.PathLike) -> np.ndarray:
    """Parse one plain-text grid template file."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in stripped.split()])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: no rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged rows (widths {sorted(widths)})")
    return validate_raster(np.array(rows, dtype=float))


def write_template(template: np.ndarray, path: str | os.PathLike, comment: str = "") -> None:
    template = validate_raster(template)
    lines = []
    if comment:
        lines.append(f"# {comment}")
    for row in template:
        lines.append(" ".join(f"{v:g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_template_library(directory: str | os.PathLike) -> dict[str, np.ndarray]:
    """Load every ``*.txt`` grid in a directory, keyed by file stem."""
    directory = Path(directory)
    library = {p.stem: read_template(p) for p in sorted(directory.glob("*.txt"))}
    if not library:
        raise ValueError(f"no *.txt templates found in {directory}")
    return library
