"""Design-space sampling, truth-model evaluation, and dataset persistence.

A dataset row pairs one design vector with one evaluation frequency and the
six electrical properties the surrogate learns:

    |s11|dB, |s21|dB, |s31|dB, |s41|dB, phase(s21) deg, phase(s31) deg

Magnitudes are floored at -80 dB; phases are wrapped to (-180, 180].
Generation is reproducible: the geometry matrix comes from one seeded Latin
hypercube, and every record's frequency (and any pole-resample) uses an RNG
derived from (seed, stream, record index), so the result does not depend on
evaluation order or worker count.

Files are plain CSV with a schema comment line::

    # coupler-dataset v1 kind=folded
    w1,l1,w2,l2,w3,f_ghz,s11_db,s21_db,s31_db,s41_db,ph21_deg,ph31_deg
    2.125,...

at full repr precision, so a save/load round trip is lossless.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import couplers
from .couplers import VECTOR_ORDER, bounds_arrays, db20, evaluate_point
from .errors import NumericalError, SchemaError, ValidationError
from .microstrip import Substrate
from .rfnetwork import SingularStubError, phase_deg

OUTPUT_COLUMNS = ("s11_db", "s21_db", "s31_db", "s41_db", "ph21_deg", "ph31_deg")
ANGULAR_OUTPUTS = (4, 5)  # indices of the phase columns

FORMAT_TAG = "# coupler-dataset v1"

# RNG stream ids for counter-based per-record seeding
_STREAM_FREQ = 1
_STREAM_RESAMPLE = 2

_MAX_RESAMPLE_ATTEMPTS = 100


@dataclass(frozen=True)
class SampleRecord:
    x: np.ndarray  # design vector, mm
    f: float  # evaluation frequency, GHz
    y: np.ndarray  # six electrical properties

    def row(self) -> np.ndarray:
        return np.concatenate([self.x, [self.f], self.y])


@dataclass(frozen=True)
class ColumnStats:
    """Per-column min/max of inputs (design vector + frequency) and outputs."""

    in_min: np.ndarray
    in_max: np.ndarray
    out_min: np.ndarray
    out_max: np.ndarray


@dataclass
class Dataset:
    kind: str
    records: list[SampleRecord]
    norm: ColumnStats
    resample_count: int = field(default=0, compare=False)

    def input_matrix(self) -> np.ndarray:
        return np.array([np.concatenate([r.x, [r.f]]) for r in self.records])

    def output_matrix(self) -> np.ndarray:
        return np.array([r.y for r in self.records])


def input_columns(kind: str) -> tuple[str, ...]:
    if kind not in ("folded", "cascaded"):
        raise ValidationError(f"datasets support folded|cascaded topologies, got {kind!r}")
    return VECTOR_ORDER[kind] + ("f_ghz",)


def compute_stats(records: list[SampleRecord]) -> ColumnStats:
    """Min/max per column; rejects degenerate (constant) columns."""
    if not records:
        raise ValidationError("cannot compute statistics of an empty record list")
    x = np.array([np.concatenate([r.x, [r.f]]) for r in records])
    y = np.array([r.y for r in records])
    stats = ColumnStats(x.min(axis=0), x.max(axis=0), y.min(axis=0), y.max(axis=0))
    for name, lo, hi in zip(
        ("input",) * x.shape[1] + ("output",) * y.shape[1],
        np.concatenate([stats.in_min, stats.out_min]),
        np.concatenate([stats.in_max, stats.out_max]),
    ):
        if not (lo < hi):
            raise ValidationError(f"degenerate {name} column: min {lo} not below max {hi}")
    return stats


def lhs_sample(bounds: np.ndarray, n: int, seed: int) -> np.ndarray:
    """Latin hypercube sample: n points, one per equal-width stratum per dimension."""
    bounds = np.asarray(bounds, dtype=float)
    if bounds.ndim != 2 or bounds.shape[1] != 2:
        raise ValidationError(f"bounds must be shaped (d, 2), got {bounds.shape}")
    if np.any(bounds[:, 0] >= bounds[:, 1]):
        raise ValidationError("every dimension needs lo < hi")
    if n < 1:
        raise ValidationError(f"need at least one sample, got {n}")
    rng = np.random.default_rng(seed)
    out = np.empty((n, bounds.shape[0]))
    for j, (lo, hi) in enumerate(bounds):
        strata = rng.permutation(n)
        u = rng.uniform(size=n)
        out[:, j] = lo + (hi - lo) * (strata + u) / n
    return out


def record_outputs(s) -> np.ndarray:
    """Map a FourPortS to the six learned outputs (floored dB, wrapped degrees)."""
    return np.array(
        [
            db20(abs(s.s11)),
            db20(abs(s.s21)),
            db20(abs(s.s31)),
            db20(abs(s.s41)),
            phase_deg(s.s21),
            phase_deg(s.s31),
        ]
    )


def generate(
    kind: str,
    sub: Substrate,
    n: int,
    f_band: tuple[float, float],
    seed: int,
) -> Dataset:
    """Sample the design space and evaluate the truth model, one frequency per record.

    Geometries come from a Latin hypercube over the topology bounds;
    frequencies are uniform in ``f_band`` per record. Records hitting a stub
    pole are resampled (uniformly) with a counter-derived RNG; more than 10 %
    resamples raises a degenerate-space warning.
    """
    input_columns(kind)  # validates kind
    if n < 10:
        raise ValidationError(f"need at least 10 samples, got {n}")
    f_lo, f_hi = float(f_band[0]), float(f_band[1])
    if not (0.0 < f_lo < f_hi):
        raise ValidationError(f"invalid frequency band {f_band}")
    lo, hi = bounds_arrays(kind)
    xs = lhs_sample(np.column_stack([lo, hi]), n, seed)
    records: list[SampleRecord] = []
    resamples = 0
    for i in range(n):
        x = xs[i]
        f = float(np.random.default_rng([seed, _STREAM_FREQ, i]).uniform(f_lo, f_hi))
        for attempt in range(_MAX_RESAMPLE_ATTEMPTS):
            try:
                s = evaluate_point(couplers.vector_to_geometry(kind, x), sub, f)
                break
            except SingularStubError:
                resamples += 1
                rng = np.random.default_rng([seed, _STREAM_RESAMPLE, i, attempt])
                x = rng.uniform(lo, hi)
                f = float(rng.uniform(f_lo, f_hi))
        else:
            raise NumericalError(
                f"record {i}: {_MAX_RESAMPLE_ATTEMPTS} resamples all hit stub poles"
            )
        records.append(SampleRecord(x=np.array(x), f=f, y=record_outputs(s)))
    if resamples > 0.1 * n:
        warnings.warn(
            f"degenerate design space: {resamples} resamples for {n} records",
            RuntimeWarning,
            stacklevel=2,
        )
    return Dataset(kind=kind, records=records, norm=compute_stats(records),
                   resample_count=resamples)


def split(d: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seed-deterministic shuffle split; test side takes floor(n * fraction).

    Normalization statistics are recomputed on the training part and copied
    onto the test part, so the test side is normalized the same way.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValidationError(f"test fraction must lie in (0, 1), got {test_fraction}")
    n = len(d.records)
    n_test = math.floor(n * test_fraction)
    if n_test < 1 or n - n_test < 1:
        raise ValidationError(
            f"fraction {test_fraction} leaves an empty side for {n} records"
        )
    perm = np.random.default_rng(seed).permutation(n)
    test_records = [d.records[i] for i in perm[:n_test]]
    train_records = [d.records[i] for i in perm[n_test:]]
    train_stats = compute_stats(train_records)
    return (
        Dataset(kind=d.kind, records=train_records, norm=train_stats),
        Dataset(kind=d.kind, records=test_records, norm=train_stats),
    )


def save(d: Dataset, path: str | Path) -> None:
    """Write the dataset as CSV with a schema comment line, full precision."""
    columns = input_columns(d.kind) + OUTPUT_COLUMNS
    lines = [f"{FORMAT_TAG} kind={d.kind}", ",".join(columns)]
    for r in d.records:
        lines.append(",".join(repr(float(v)) for v in r.row()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load(path: str | Path) -> Dataset:
    """Read a dataset CSV; normalization statistics are recomputed from the records."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith(FORMAT_TAG):
        raise SchemaError(f"{path}: line 1: expected schema tag {FORMAT_TAG!r}")
    tag_fields = dict(
        part.split("=", 1) for part in lines[0][len(FORMAT_TAG):].split() if "=" in part
    )
    kind = tag_fields.get("kind")
    if kind not in ("folded", "cascaded"):
        raise SchemaError(f"{path}: line 1: unknown or missing topology tag {kind!r}")
    expected = input_columns(kind) + OUTPUT_COLUMNS
    if len(lines) < 2:
        raise SchemaError(f"{path}: missing header line")
    header = tuple(lines[1].split(","))
    for col in expected:
        if col not in header:
            raise SchemaError(f"{path}: line 2: missing column {col!r}")
    if header != expected:
        raise SchemaError(
            f"{path}: line 2: columns must be exactly {','.join(expected)}"
        )
    n_in = len(input_columns(kind))
    records = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(expected):
            raise SchemaError(
                f"{path}: line {lineno}: expected {len(expected)} fields, got {len(parts)}"
            )
        try:
            values = [float(p) for p in parts]
        except ValueError as err:
            raise SchemaError(f"{path}: line {lineno}: {err}") from err
        records.append(
            SampleRecord(
                x=np.array(values[: n_in - 1]),
                f=values[n_in - 1],
                y=np.array(values[n_in:]),
            )
        )
    if not records:
        raise SchemaError(f"{path}: no records")
    return Dataset(kind=kind, records=records, norm=compute_stats(records))
