"""Coupler topologies, the analytic truth-model simulator, and scalar metrics.

Three geometries are supported:

* ``ClassicalDesign`` -- the textbook single-box ring in normalized
  admittances (branch g, through h), quarter-wave at its center frequency.
* ``FoldedGeometry`` -- the miniaturized single-box coupler in physical mm.
  Each meandered arm is modeled as a straight line whose path length is
  ``FOLD_PASSES * l1 + 2 * (l2 + v)``: FOLD_PASSES parallel passes of the
  main run l1 plus two end tails. The same path feeds the through arm
  (width w1) and the shunt arms (width w2); w3 is the port feed width and
  is reference-plane only. The mapping lives in ``folded_arm_length`` so it
  can be swapped without touching the solver.
* ``CascadedGeometry`` -- a symmetric three-section (four-branch) wideband
  coupler: outer series sections (w1, l1), middle section (w2, l2), four
  identical shunt branches (w3, l3), port feeds of width w excluded from
  the cascade.

All electrical behavior is computed per frequency by bisecting the network
into even/odd half-circuits (see ``rfnetwork``), with widths mapped to
normalized admittances y = Z_PORT / z0(w) and lengths to electrical angles
through the microstrip model. The model is lossless, so every response
satisfies unit power conservation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import OutOfRangeError, SingularStubError, ValidationError
from .microstrip import Substrate, analyze_width, electrical_length
from .rfnetwork import (
    FourPortS,
    Termination,
    half_circuit,
    half_circuits_to_sparams,
    phase_deg,
    wrap_deg,
)

Z_PORT = 50.0  # port reference impedance, ohms

# Meander multiplicity of the folded arms: number of parallel passes of l1.
FOLD_PASSES = 6

# dB floor: linear magnitudes are clamped at 1e-4 (-80 dB) before the log,
# so perfectly matched samples stay finite.
DB_FLOOR_LIN = 1e-4

FOLDED_BOUNDS: tuple[tuple[str, float, float], ...] = (
    ("w1", 1.5, 3.0),
    ("l1", 5.0, 12.0),
    ("w2", 0.3, 2.0),
    ("l2", 0.1, 2.0),
    ("w3", 1.2, 1.8),
)

CASCADED_BOUNDS: tuple[tuple[str, float, float], ...] = (
    ("w1", 3.5, 5.0),
    ("l1", 20.0, 30.0),
    ("w2", 3.0, 4.5),
    ("l2", 20.0, 30.0),
    ("w3", 0.1, 1.0),
    ("l3", 20.0, 30.0),
    ("w", 4.5, 5.5),
)

TOPOLOGIES = ("classical", "folded", "cascaded")


def db20(x: float) -> float:
    """Magnitude in dB with the -80 dB floor."""
    return 20.0 * math.log10(max(abs(x), DB_FLOOR_LIN))


def _check_bounds(kind: str, values: dict[str, float]) -> None:
    bounds = bounds_table(kind)
    violations = [
        f"{name}={values[name]} outside [{lo}, {hi}]"
        for name, lo, hi in bounds
        if not (lo <= values[name] <= hi)
    ]
    if violations:
        raise ValidationError(f"{kind} geometry out of bounds: " + "; ".join(violations))


@dataclass(frozen=True)
class ClassicalDesign:
    """Normalized single-box design: branch admittance g, through admittance h.

    ``f0_ghz`` anchors the quarter-wave reference; it is not part of the
    design vector.
    """

    g: float
    h: float
    f0_ghz: float = 1.0

    def __post_init__(self):
        if not (self.g > 0.0) or not (self.h > 0.0):
            raise ValidationError(f"admittances must be positive, got g={self.g}, h={self.h}")
        if not (self.f0_ghz > 0.0):
            raise ValidationError(f"center frequency must be positive, got {self.f0_ghz}")


@dataclass(frozen=True)
class FoldedGeometry:
    """Folded single-box coupler, dimensions in mm. u and v are fixed layout constants."""

    w1: float
    l1: float
    w2: float
    l2: float
    w3: float
    u: float = 0.1
    v: float = 1.0

    def __post_init__(self):
        _check_bounds("folded", {"w1": self.w1, "l1": self.l1, "w2": self.w2,
                                 "l2": self.l2, "w3": self.w3})


@dataclass(frozen=True)
class CascadedGeometry:
    """Three-section wideband coupler, dimensions in mm."""

    w1: float
    l1: float
    w2: float
    l2: float
    w3: float
    l3: float
    w: float

    def __post_init__(self):
        _check_bounds("cascaded", {"w1": self.w1, "l1": self.l1, "w2": self.w2,
                                   "l2": self.l2, "w3": self.w3, "l3": self.l3,
                                   "w": self.w})


Geometry = Union[ClassicalDesign, FoldedGeometry, CascadedGeometry]


@dataclass(frozen=True)
class FrequencySweep:
    f_start: float
    f_stop: float
    n_points: int

    def __post_init__(self):
        if not (0.0 < self.f_start < self.f_stop):
            raise ValidationError(
                f"need 0 < f_start < f_stop, got [{self.f_start}, {self.f_stop}]"
            )
        if self.n_points < 2:
            raise ValidationError(f"sweep needs at least 2 points, got {self.n_points}")

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.f_start, self.f_stop, self.n_points)


@dataclass(frozen=True)
class FourPortResponse:
    """Four-port S-parameters over a sweep; lossless unitarity is enforced."""

    sweep: FrequencySweep
    points: tuple[FourPortS, ...]

    def __post_init__(self):
        if len(self.points) != self.sweep.n_points:
            raise ValidationError(
                f"expected {self.sweep.n_points} points, got {len(self.points)}"
            )
        for i, p in enumerate(self.points):
            if abs(p.power_sum() - 1.0) > 1e-9:
                raise ValidationError(
                    f"response is not lossless at point {i}: power sum {p.power_sum()!r}"
                )

    def s_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(s11, s21, s31, s41) as complex arrays over the sweep."""
        return (
            np.array([p.s11 for p in self.points]),
            np.array([p.s21 for p in self.points]),
            np.array([p.s31 for p in self.points]),
            np.array([p.s41 for p in self.points]),
        )


@dataclass(frozen=True)
class BandThresholds:
    """Bandwidth criteria: return-loss/isolation ceilings (positive dB) and imbalance."""

    rl_db: float = 20.0
    iso_db: float = 20.0
    imbalance_db: float = 0.86


@dataclass(frozen=True)
class CouplerMetrics:
    coupling_db: float
    phase_diff_deg: float
    isolation_db: float
    return_loss_db: float
    fbw_pct: float
    k0_db: float


def bounds_table(kind: str) -> tuple[tuple[str, float, float], ...]:
    if kind == "folded":
        return FOLDED_BOUNDS
    if kind == "cascaded":
        return CASCADED_BOUNDS
    raise ValidationError(f"no design-space bounds for topology {kind!r}")


def bounds_arrays(kind: str) -> tuple[np.ndarray, np.ndarray]:
    table = bounds_table(kind)
    return (np.array([lo for _, lo, _ in table]),
            np.array([hi for _, _, hi in table]))


def synth_classical(c_db: float) -> ClassicalDesign:
    """Classical closed-form synthesis for a coupling factor in dB (> 0).

    Inverts C = 20 lg((g^2+1)/(g h)) under the matching condition
    g^2 = h^2 - 1: with c_lin = 10^(C/20), g = 1/sqrt(c_lin^2 - 1) and
    h = sqrt(g^2 + 1).
    """
    if not (c_db > 0.0) or not math.isfinite(c_db):
        raise ValidationError(
            f"coupling factor must be > 0 dB for a realizable design, got {c_db}"
        )
    c_lin = 10.0 ** (c_db / 20.0)
    g = 1.0 / math.sqrt(c_lin * c_lin - 1.0)
    h = math.sqrt(g * g + 1.0)
    return ClassicalDesign(g=g, h=h)


def coupling_factor(g: float, h: float) -> float:
    """Coupling factor 20 lg((g^2+1)/(g h)) in dB."""
    if not (g > 0.0) or not (h > 0.0):
        raise ValidationError(f"admittances must be positive, got g={g}, h={h}")
    return 20.0 * math.log10((g * g + 1.0) / (g * h))


def folded_arm_length(l1: float, l2: float, v: float, passes: int = FOLD_PASSES) -> float:
    """Straightened path length of one meandered arm in mm."""
    return passes * l1 + 2.0 * (l2 + v)


def _ladder_params(
    geometry: Geometry, sub: Substrate | None, f_ghz: float
) -> tuple[list[tuple[float, float]], list[tuple[float, float]]]:
    """(sections, branches) of the bisected ladder at one frequency.

    Sections are (admittance, theta); branches are (admittance, theta/2)
    because bisection halves every shunt arm.
    """
    if isinstance(geometry, ClassicalDesign):
        scale = f_ghz / geometry.f0_ghz
        theta_t = 0.5 * math.pi * scale
        theta_b_half = 0.25 * math.pi * scale
        return ([(geometry.h, theta_t)], [(geometry.g, theta_b_half)] * 2)

    if sub is None:
        raise ValidationError("physical geometries require a substrate")

    if isinstance(geometry, FoldedGeometry):
        through = analyze_width(geometry.w1, sub)
        branch = analyze_width(geometry.w2, sub)
        path = folded_arm_length(geometry.l1, geometry.l2, geometry.v)
        theta_t = electrical_length(path, through.eps_eff, f_ghz)
        theta_b = electrical_length(path, branch.eps_eff, f_ghz)
        return (
            [(Z_PORT / through.z0, theta_t)],
            [(Z_PORT / branch.z0, theta_b / 2.0)] * 2,
        )

    if isinstance(geometry, CascadedGeometry):
        outer = analyze_width(geometry.w1, sub)
        middle = analyze_width(geometry.w2, sub)
        branch = analyze_width(geometry.w3, sub)
        y1, y2, y3 = Z_PORT / outer.z0, Z_PORT / middle.z0, Z_PORT / branch.z0
        t1 = electrical_length(geometry.l1, outer.eps_eff, f_ghz)
        t2 = electrical_length(geometry.l2, middle.eps_eff, f_ghz)
        t3 = electrical_length(geometry.l3, branch.eps_eff, f_ghz)
        return (
            [(y1, t1), (y2, t2), (y1, t1)],
            [(y3, t3 / 2.0)] * 4,
        )

    raise ValidationError(f"unsupported geometry type {type(geometry).__name__}")


def evaluate_point(geometry: Geometry, sub: Substrate | None, f_ghz: float) -> FourPortS:
    """Four-port S-parameters of a geometry at a single frequency."""
    sections, branches = _ladder_params(geometry, sub, f_ghz)
    even = half_circuit(sections, branches, Termination.OPEN)
    odd = half_circuit(sections, branches, Termination.SHORT)
    return half_circuits_to_sparams(even, odd)


def simulate(geometry: Geometry, sub: Substrate | None, sweep: FrequencySweep) -> FourPortResponse:
    """Truth-model response over a frequency sweep.

    Deterministic and pure; a stub-pole hit is re-raised with the offending
    frequency index attached.
    """
    points = []
    for i, f in enumerate(sweep.frequencies()):
        try:
            points.append(evaluate_point(geometry, sub, float(f)))
        except SingularStubError as err:
            raise SingularStubError(
                f"stub pole at sweep point {i} (f={f:.6f} GHz): {err}", frequency_index=i
            ) from err
    return FourPortResponse(sweep=sweep, points=tuple(points))


def response_tables(resp: FourPortResponse) -> dict[str, np.ndarray]:
    """Plot-ready dB/phase columns of a response (floored at -80 dB)."""
    s11, s21, s31, s41 = resp.s_arrays()
    return {
        "f_ghz": resp.sweep.frequencies(),
        "s11_db": np.array([db20(abs(v)) for v in s11]),
        "s21_db": np.array([db20(abs(v)) for v in s21]),
        "s31_db": np.array([db20(abs(v)) for v in s31]),
        "s41_db": np.array([db20(abs(v)) for v in s41]),
        "ph21_deg": np.array([phase_deg(v) for v in s21]),
        "ph31_deg": np.array([phase_deg(v) for v in s31]),
    }


def metrics_from_tables(
    f_ghz: np.ndarray,
    s11_db: np.ndarray,
    s21_db: np.ndarray,
    s31_db: np.ndarray,
    s41_db: np.ndarray,
    ph21_deg: np.ndarray,
    ph31_deg: np.ndarray,
    f0: float,
    thresholds: BandThresholds = BandThresholds(),
) -> CouplerMetrics:
    """Scalar metrics from tabulated dB/phase columns.

    f0 is snapped to the nearest tabulated frequency. The fractional
    bandwidth spans the largest contiguous run of samples containing f0 on
    which return loss and isolation stay below their (negative) ceilings
    and the |s21|/|s31| imbalance stays below ``imbalance_db``; if f0 itself
    fails, the FBW is 0 (not an error).
    """
    if not (f_ghz[0] <= f0 <= f_ghz[-1]):
        raise OutOfRangeError(
            f"f0={f0} GHz outside tabulated range [{f_ghz[0]}, {f_ghz[-1]}]"
        )
    idx = int(np.argmin(np.abs(f_ghz - f0)))
    imbalance = np.abs(s21_db - s31_db)
    ok = (
        (s11_db < -thresholds.rl_db)
        & (s41_db < -thresholds.iso_db)
        & (imbalance < thresholds.imbalance_db)
    )
    if not ok[idx]:
        fbw = 0.0
    else:
        lo = idx
        while lo > 0 and ok[lo - 1]:
            lo -= 1
        hi = idx
        while hi < len(ok) - 1 and ok[hi + 1]:
            hi += 1
        fbw = 100.0 * (float(f_ghz[hi]) - float(f_ghz[lo])) / f0
    return CouplerMetrics(
        coupling_db=-float(s31_db[idx]),
        phase_diff_deg=wrap_deg(float(ph21_deg[idx]) - float(ph31_deg[idx])),
        isolation_db=float(s41_db[idx]),
        return_loss_db=float(s11_db[idx]),
        fbw_pct=fbw,
        k0_db=abs(float(s21_db[idx]) - float(s31_db[idx])),
    )


def metrics(
    resp: FourPortResponse, f0: float, thresholds: BandThresholds = BandThresholds()
) -> CouplerMetrics:
    """Scalar metrics of a simulated response at center frequency f0."""
    t = response_tables(resp)
    return metrics_from_tables(
        t["f_ghz"], t["s11_db"], t["s21_db"], t["s31_db"], t["s41_db"],
        t["ph21_deg"], t["ph31_deg"], f0, thresholds,
    )


VECTOR_ORDER = {
    "classical": ("g", "h"),
    "folded": ("w1", "l1", "w2", "l2", "w3"),
    "cascaded": ("w1", "l1", "w2", "l2", "w3", "l3", "w"),
}


def geometry_to_vector(geometry: Geometry) -> np.ndarray:
    """Design vector in canonical order (w1, l1, w2, l2, w3[, l3, w]) or (g, h)."""
    if isinstance(geometry, ClassicalDesign):
        return np.array([geometry.g, geometry.h])
    if isinstance(geometry, FoldedGeometry):
        return np.array([geometry.w1, geometry.l1, geometry.w2, geometry.l2, geometry.w3])
    if isinstance(geometry, CascadedGeometry):
        return np.array([geometry.w1, geometry.l1, geometry.w2, geometry.l2,
                         geometry.w3, geometry.l3, geometry.w])
    raise ValidationError(f"unsupported geometry type {type(geometry).__name__}")


def vector_to_geometry(kind: str, vector: Sequence[float]) -> Geometry:
    """Inverse of ``geometry_to_vector``; validates length and bounds."""
    vec = [float(v) for v in vector]
    expected = VECTOR_ORDER.get(kind)
    if expected is None:
        raise ValidationError(f"unknown topology {kind!r}, expected one of {TOPOLOGIES}")
    if len(vec) != len(expected):
        raise ValidationError(
            f"{kind} design vector needs {len(expected)} entries "
            f"({', '.join(expected)}), got {len(vec)}"
        )
    if kind == "classical":
        return ClassicalDesign(g=vec[0], h=vec[1])
    if kind == "folded":
        return FoldedGeometry(*vec)
    return CascadedGeometry(*vec)
