"""Two-port ABCD algebra and even/odd-mode composition for symmetric couplers.

Everything here works in normalized units: all port impedances are scaled
to 1, so admittances are dimensionless and the ABCD entries of a reciprocal
lossless two-port satisfy a*d - b*c = 1. A symmetric four-port is analyzed
by bisecting it along its mirror plane; the even half sees a magnetic wall
(shunt arms become open-circuited half-stubs) and the odd half an electric
wall (short-circuited half-stubs). The two half-circuit responses combine
into the four-port scattering parameters:

    s11 = (Ge + Go)/2    s21 = (Te + To)/2
    s31 = (Te - To)/2    s41 = (Ge - Go)/2

with G/T the reflection/transmission coefficients of each half.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import DegenerateNetworkError, SingularStubError, ValidationError

# Guard band for stub-pole detection: below this, tan/cot admittance blows up.
STUB_POLE_EPS = 1e-12


class Termination(Enum):
    OPEN = "open"
    SHORT = "short"


@dataclass(frozen=True)
class AbcdMatrix:
    """Normalized 2x2 transmission matrix."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __matmul__(self, other: "AbcdMatrix") -> "AbcdMatrix":
        return AbcdMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def entries(self) -> tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)

    @staticmethod
    def identity() -> "AbcdMatrix":
        return AbcdMatrix(1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class TlineSegment:
    """Series transmission-line section: normalized admittance y, length theta."""

    y: float
    theta: float

    def __post_init__(self):
        if not (self.y > 0.0) or not math.isfinite(self.y):
            raise ValidationError(f"line admittance must be positive and finite, got {self.y}")
        if not math.isfinite(self.theta) or self.theta < 0.0:
            raise ValidationError(f"electrical length must be finite and >= 0, got {self.theta}")


@dataclass(frozen=True)
class ShuntStub:
    """Shunt stub of normalized admittance y, length theta, open or short ended."""

    y: float
    theta: float
    termination: Termination = Termination.OPEN

    def __post_init__(self):
        if not (self.y > 0.0) or not math.isfinite(self.y):
            raise ValidationError(f"stub admittance must be positive and finite, got {self.y}")
        if not math.isfinite(self.theta):
            raise ValidationError(f"stub length must be finite, got {self.theta}")


@dataclass(frozen=True)
class EvenOddPair:
    """Reflection/transmission coefficients of the even and odd half-circuits."""

    gamma_e: complex
    t_e: complex
    gamma_o: complex
    t_o: complex


@dataclass(frozen=True)
class FourPortS:
    s11: complex
    s21: complex
    s31: complex
    s41: complex

    def power_sum(self) -> float:
        """Total scattered power for unit drive at port 1 (= 1 when lossless)."""
        return abs(self.s11) ** 2 + abs(self.s21) ** 2 + abs(self.s31) ** 2 + abs(self.s41) ** 2


def abcd_series_line(seg: TlineSegment) -> AbcdMatrix:
    """ABCD matrix of a lossless series line: [[cos t, j sin t / y], [j y sin t, cos t]]."""
    c = math.cos(seg.theta)
    s = math.sin(seg.theta)
    return AbcdMatrix(c, 1j * s / seg.y, 1j * seg.y * s, c)


def abcd_shunt_stub(stub: ShuntStub) -> AbcdMatrix:
    """ABCD matrix of a shunt stub: [[1, 0], [Y_in, 1]].

    Y_in = j*y*tan(theta) for an open end, -j*y*cot(theta) for a short end.
    Evaluation at a pole of the input admittance raises ``SingularStubError``.
    """
    if stub.termination is Termination.OPEN:
        if abs(math.cos(stub.theta)) <= STUB_POLE_EPS:
            raise SingularStubError(
                f"open stub at admittance pole: theta={stub.theta!r} (cos ~ 0)"
            )
        y_in = 1j * stub.y * math.tan(stub.theta)
    else:
        if abs(math.sin(stub.theta)) <= STUB_POLE_EPS:
            raise SingularStubError(
                f"short stub at admittance pole: theta={stub.theta!r} (sin ~ 0)"
            )
        y_in = -1j * stub.y / math.tan(stub.theta)
    return AbcdMatrix(1.0, 0.0, y_in, 1.0)


def abcd_cascade(elements: Iterable[AbcdMatrix]) -> AbcdMatrix:
    """Left-to-right product of a non-empty sequence of ABCD matrices."""
    result = None
    for m in elements:
        result = m if result is None else result @ m
    if result is None:
        raise ValidationError("cannot cascade an empty sequence of ABCD matrices")
    return result


def abcd_to_gamma_t(m: AbcdMatrix) -> tuple[complex, complex]:
    """Reflection and transmission of a two-port between unit source and load.

    Gamma = (a + b - c - d) / (a + b + c + d),  T = 2 / (a + b + c + d).
    """
    denom = m.a + m.b + m.c + m.d
    if denom == 0:
        raise DegenerateNetworkError("a + b + c + d = 0: network has no defined response")
    return (m.a + m.b - m.c - m.d) / denom, 2.0 / denom


def closed_form_even_odd(g: float, h: float) -> tuple[AbcdMatrix, AbcdMatrix]:
    """Closed-form half-circuit matrices of the quarter-wave branch-line section.

    For branch admittance g and through admittance h at center frequency:
    even mode has diagonal -g/h, odd mode +g/h, and both share off-diagonal
    entries j/h and j*h - j*g^2/h. Equal to the cascade
    [half-stub(g), line(h, pi/2), half-stub(g)] with the matching wall applied.
    """
    if not (g > 0.0) or not (h > 0.0):
        raise ValidationError(f"admittances must be positive, got g={g}, h={h}")
    off_b = 1j / h
    off_c = 1j * h - 1j * g * g / h
    even = AbcdMatrix(-g / h, off_b, off_c, -g / h)
    odd = AbcdMatrix(g / h, off_b, off_c, g / h)
    return even, odd


def even_odd_to_sparams(p: EvenOddPair) -> FourPortS:
    """Combine half-circuit coefficients into four-port S-parameters."""
    return FourPortS(
        s11=(p.gamma_e + p.gamma_o) / 2.0,
        s21=(p.t_e + p.t_o) / 2.0,
        s31=(p.t_e - p.t_o) / 2.0,
        s41=(p.gamma_e - p.gamma_o) / 2.0,
    )


def half_circuit(
    sections: Sequence[tuple[float, float]],
    branches: Sequence[tuple[float, float]],
    termination: Termination,
) -> AbcdMatrix:
    """Bisected ladder of a symmetric branch-line network.

    ``sections`` holds (admittance, electrical length) of the series lines and
    ``branches`` the (admittance, HALF length) of the bisected shunt arms; the
    ladder alternates branch, line, branch, ... and therefore needs
    len(branches) == len(sections) + 1. ``termination`` selects the symmetry
    wall: OPEN for the even mode, SHORT for the odd mode.
    """
    if len(branches) != len(sections) + 1:
        raise ValidationError(
            f"ladder needs len(branches) == len(sections) + 1, "
            f"got {len(branches)} branches and {len(sections)} sections"
        )
    elements = [abcd_shunt_stub(ShuntStub(branches[0][0], branches[0][1], termination))]
    for (y, theta), (by, btheta) in zip(sections, branches[1:]):
        elements.append(abcd_series_line(TlineSegment(y, theta)))
        elements.append(abcd_shunt_stub(ShuntStub(by, btheta, termination)))
    return abcd_cascade(elements)


def half_circuits_to_sparams(even: AbcdMatrix, odd: AbcdMatrix) -> FourPortS:
    ge, te = abcd_to_gamma_t(even)
    go, to = abcd_to_gamma_t(odd)
    return even_odd_to_sparams(EvenOddPair(ge, te, go, to))


def wrap_deg(angle: float) -> float:
    """Wrap an angle in degrees into (-180, 180].

    Exact (bitwise identity) for angles already inside the range.
    """
    wrapped = angle - 360.0 * round(angle / 360.0)
    if wrapped <= -180.0:
        wrapped += 360.0
    elif wrapped > 180.0:
        wrapped -= 360.0
    return wrapped


def phase_deg(z: complex) -> float:
    """Phase of a complex value in degrees, in (-180, 180]."""
    return wrap_deg(math.degrees(cmath.phase(z)))
