"""Artifact file formats: far-field CSV, diagnostics JSON, binary matrix dumps.

All text artifacts are deterministic — fixed column order, fixed key order
(sorted), '.' decimal separator, UTF-8, RFC-4180 CRLF line endings for CSV —
so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .fields import FarFieldPattern

__all__ = [
    "FARFIELD_COLUMNS",
    "SWEEP_COLUMNS",
    "read_farfield_csv",
    "write_complex_matrix",
    "write_farfield_csv",
    "write_farfield_json",
    "write_json",
    "write_sweep_csv",
]

FARFIELD_COLUMNS = ("dirX", "dirY", "dirZ", "reU", "imU", "absU")
SWEEP_COLUMNS = ("omega", "crossSection", "reCinv", "imCinv", "status", "dominatingDiff")


def _open_csv(path):
    # newline="" so the csv module fully controls line endings (CRLF).
    return open(path, "w", newline="", encoding="utf-8")


def write_farfield_csv(path, pattern: FarFieldPattern) -> None:
    """One row per direction: dirX, dirY, dirZ, reU, imU, absU."""
    with _open_csv(path) as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(FARFIELD_COLUMNS)
        for d, v in zip(pattern.directions, pattern.values):
            writer.writerow(
                [repr(float(d[0])), repr(float(d[1])), repr(float(d[2])),
                 repr(float(v.real)), repr(float(v.imag)), repr(float(abs(v)))]
            )


def read_farfield_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read back (directions, complex values) from a far-field CSV."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if tuple(header) != FARFIELD_COLUMNS:
            raise ValueError(f"unexpected far-field CSV header {header!r}")
        rows = [[float(cell) for cell in row] for row in reader]
    data = np.asarray(rows)
    return data[:, :3], data[:, 3] + 1j * data[:, 4]


def write_farfield_json(path, pattern: FarFieldPattern, omega: float, m: int) -> None:
    """Scalar summary of a pattern: cross-section, incident direction, omega,
    bubble count, and which solver produced it."""
    summary = {
        "M": int(m),
        "crossSection": pattern.cross_section,
        "omega": float(omega),
        "source": pattern.source,
        "thetaDir": [float(t) for t in pattern.theta],
    }
    write_json(path, summary)


def write_json(path, payload) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_sweep_csv(path, rows) -> None:
    """Frequency-sweep table; ``rows`` holds per-frequency dicts keyed by
    the SWEEP_COLUMNS names."""
    with _open_csv(path) as handle:
        writer = csv.writer(handle, lineterminator="\r\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            out = []
            for column in SWEEP_COLUMNS:
                value = row[column]
                out.append(value if isinstance(value, str) else repr(float(value)))
            writer.writerow(out)


def write_complex_matrix(path, matrix: np.ndarray) -> None:
    """Debug dump: row-major complex128 (little-endian float64 re/im pairs)."""
    array = np.ascontiguousarray(np.asarray(matrix, dtype=complex))
    array.astype("<c16").tofile(path)
