"""CSV and PGM readers/writers.

Matrices are plain CSV without a header; traces are CSV with a single header
line. Floats are written with 17 significant digits so reruns are
byte-identical and values round-trip exactly.
"""
import csv
import math
import re
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from ..linalg import as_matrix


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    if value is None:
        return ""
    return str(value)


def read_matrix_csv(path):
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise ValidationError(f"{path}: cannot parse matrix CSV ({exc})") from exc
    return as_matrix(M, str(path))


def write_matrix_csv(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", newline="") as fh:
        for row in M:
            fh.write(",".join(fmt(float(v)) for v in row) + "\n")


def write_table_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def read_table_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, [row for row in reader]


def to_uint8(img):
    """Clamp to [0, 255] and round; only used at export time."""
    return np.clip(np.rint(np.asarray(img, dtype=float)), 0, 255).astype(np.uint8)


def write_pgm(path, img):
    data = to_uint8(img)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


_PGM_TOKEN = re.compile(rb"(#[^\n]*\n)|(\s+)|(\S+)")


def read_pgm(path):
    """Read an 8-bit binary PGM (P5) as a float array."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        m = _PGM_TOKEN.match(raw, pos)
        if m is None:
            raise ValidationError(f"{path}: truncated PGM header")
        pos = m.end()
        if m.group(3):
            tokens.append(m.group(3))
    if tokens[0] != b"P5":
        raise ValidationError(f"{path}: only binary P5 PGM is supported")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValidationError(f"{path}: only 8-bit PGM (maxval 255) is supported")
    # exactly one whitespace byte separates maxval from the raster
    pixels = raw[pos + 1:]
    if len(pixels) < w * h:
        raise ValidationError(f"{path}: expected {w * h} pixels, found {len(pixels)}")
    return np.frombuffer(pixels[:w * h], dtype=np.uint8).reshape(h, w).astype(float)
