"""Touchstone v1 four-port reader/writer (GHz, S-parameters, real/imaginary).

The full 4x4 matrix of a doubly-symmetric branch-line coupler follows from
its four distinct entries: both port pairs are mirror images, so

    S = [[s11, s21, s31, s41],
         [s21, s11, s41, s31],
         [s31, s41, s11, s21],
         [s41, s31, s21, s11]]

Files use the standard layout: option line ``# GHz S RI R 50``, then four
data lines per frequency (one matrix row each), frequency on the first.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import SchemaError

OPTION_LINE = "# GHz S RI R 50"


def full_matrix(s11: complex, s21: complex, s31: complex, s41: complex) -> np.ndarray:
    return np.array(
        [
            [s11, s21, s31, s41],
            [s21, s11, s41, s31],
            [s31, s41, s11, s21],
            [s41, s31, s21, s11],
        ]
    )


def write_s4p(
    path: str | Path,
    f_ghz: np.ndarray,
    s11: np.ndarray,
    s21: np.ndarray,
    s31: np.ndarray,
    s41: np.ndarray,
) -> None:
    """Write a sweep as a 4-port Touchstone file, symmetry-expanded."""
    lines = [
        "! branch-line coupler response (ports: 1 in, 2 through, 3 coupled, 4 isolated)",
        OPTION_LINE,
    ]
    for k in range(len(f_ghz)):
        s = full_matrix(s11[k], s21[k], s31[k], s41[k])
        for row in range(4):
            head = repr(float(f_ghz[k])) if row == 0 else " " * 4
            cells = " ".join(
                f"{s[row, col].real!r} {s[row, col].imag!r}" for col in range(4)
            )
            lines.append(f"{head} {cells}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_s4p(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a 4-port Touchstone file; returns (frequencies, (n, 4, 4) matrix)."""
    values: list[float] = []
    option_seen = False
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if line != OPTION_LINE:
                raise SchemaError(
                    f"{path}: line {lineno}: unsupported option line {line!r}"
                )
            option_seen = True
            continue
        try:
            values.extend(float(tok) for tok in line.split())
        except ValueError as err:
            raise SchemaError(f"{path}: line {lineno}: {err}") from err
    if not option_seen:
        raise SchemaError(f"{path}: missing option line {OPTION_LINE!r}")
    # per frequency: 1 frequency value + 4 rows x 4 complex = 33 numbers
    if not values or len(values) % 33 != 0:
        raise SchemaError(f"{path}: malformed data block ({len(values)} numbers)")
    n = len(values) // 33
    freqs = np.empty(n)
    s = np.empty((n, 4, 4), dtype=complex)
    for k in range(n):
        block = values[33 * k : 33 * (k + 1)]
        freqs[k] = block[0]
        flat = block[1:]
        for row in range(4):
            for col in range(4):
                re = flat[8 * row + 2 * col]
                im = flat[8 * row + 2 * col + 1]
                s[k, row, col] = complex(re, im)
    return freqs, s
