"""Quasi-static microstrip closed forms: width <-> impedance, electrical length.

The analysis function follows the Hammerstad-Jensen model: the homogeneous
(air) impedance

    Z01(u) = (eta0 / 2 pi) * ln( f(u)/u + sqrt(1 + (2/u)^2) ),
    f(u)   = 6 + (2 pi - 6) * exp( -(30.666/u)^0.7528 ),

with u = w/h, divided by the square root of the effective permittivity

    eps_eff = (er + 1)/2 + (er - 1)/2 * (1 + 10/u)^(-a(u) b(er)),
    a(u) = 1 + ln((u^4 + (u/52)^2) / (u^4 + 0.432))/49 + ln(1 + (u/18.1)^3)/18.7,
    b(er) = 0.564 * ((er - 0.9) / (er + 3))^0.053.

No dispersion correction is applied; the model is static and strictly
monotone in w, which lets synthesis run as a plain bisection. The loss
tangent is carried on the substrate but unused by the lossless line model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRangeError, ValidationError

ETA0 = 376.730313668  # vacuum wave impedance, ohms
C_MM_GHZ = 299.792458  # vacuum light speed in mm * GHz

# Validity window of the closed forms used for synthesis, in w/h.
U_MIN = 0.05
U_MAX = 30.0


@dataclass(frozen=True)
class Substrate:
    """Dielectric slab: relative permittivity, loss tangent, thickness in mm."""

    eps_r: float
    tan_d: float
    h_mm: float

    def __post_init__(self):
        if not (self.eps_r >= 1.0) or not math.isfinite(self.eps_r):
            raise ValidationError(f"eps_r must be >= 1, got {self.eps_r}")
        if not (self.h_mm > 0.0) or not math.isfinite(self.h_mm):
            raise ValidationError(f"substrate thickness must be positive, got {self.h_mm}")
        if self.tan_d < 0.0 or not math.isfinite(self.tan_d):
            raise ValidationError(f"loss tangent must be >= 0, got {self.tan_d}")


@dataclass(frozen=True)
class LineParams:
    z0: float  # characteristic impedance, ohms
    eps_eff: float  # effective permittivity


def _eps_eff(u: float, er: float) -> float:
    a = (
        1.0
        + math.log((u**4 + (u / 52.0) ** 2) / (u**4 + 0.432)) / 49.0
        + math.log(1.0 + (u / 18.1) ** 3) / 18.7
    )
    b = 0.564 * ((er - 0.9) / (er + 3.0)) ** 0.053
    return (er + 1.0) / 2.0 + (er - 1.0) / 2.0 * (1.0 + 10.0 / u) ** (-a * b)


def _z01(u: float) -> float:
    f = 6.0 + (2.0 * math.pi - 6.0) * math.exp(-((30.666 / u) ** 0.7528))
    return ETA0 / (2.0 * math.pi) * math.log(f / u + math.sqrt(1.0 + (2.0 / u) ** 2))


def analyze_width(w_mm: float, sub: Substrate) -> LineParams:
    """Characteristic impedance and effective permittivity of a microstrip line."""
    if not (w_mm > 0.0) or not math.isfinite(w_mm):
        raise ValidationError(f"line width must be positive, got {w_mm}")
    u = w_mm / sub.h_mm
    eps = _eps_eff(u, sub.eps_r)
    return LineParams(z0=_z01(u) / math.sqrt(eps), eps_eff=eps)


def achievable_z0(sub: Substrate) -> tuple[float, float]:
    """Impedance range reachable within the w/h validity window."""
    z_hi = analyze_width(U_MIN * sub.h_mm, sub).z0
    z_lo = analyze_width(U_MAX * sub.h_mm, sub).z0
    return z_lo, z_hi


def synthesize_width(z0_target: float, sub: Substrate, tol_ohm: float = 1e-4) -> float:
    """Width (mm) whose analyzed impedance matches ``z0_target``.

    Bisection on the strictly decreasing analysis function over
    w/h in [0.05, 30]; raises ``OutOfRangeError`` outside that window.
    """
    z_lo, z_hi = achievable_z0(sub)
    if not (z_lo <= z0_target <= z_hi):
        raise OutOfRangeError(
            f"z0={z0_target} ohm not achievable on this substrate; "
            f"reachable range is [{z_lo:.2f}, {z_hi:.2f}] ohm"
        )
    u_lo, u_hi = U_MIN, U_MAX  # z0 decreasing in u: z(u_lo) >= target >= z(u_hi)
    for _ in range(200):
        u_mid = 0.5 * (u_lo + u_hi)
        z_mid = analyze_width(u_mid * sub.h_mm, sub).z0
        if abs(z_mid - z0_target) <= tol_ohm:
            return u_mid * sub.h_mm
        if z_mid > z0_target:
            u_lo = u_mid
        else:
            u_hi = u_mid
    return 0.5 * (u_lo + u_hi) * sub.h_mm


def electrical_length(l_mm: float, eps_eff: float, f_ghz: float) -> float:
    """Electrical length in radians of a physical line at frequency f.

    theta = 2 pi f sqrt(eps_eff) l / c with consistent mm/GHz units.
    """
    if l_mm < 0.0 or not math.isfinite(l_mm):
        raise ValidationError(f"physical length must be >= 0, got {l_mm}")
    if not (f_ghz > 0.0) or not math.isfinite(f_ghz):
        raise ValidationError(f"frequency must be positive, got {f_ghz}")
    return 2.0 * math.pi * f_ghz * math.sqrt(eps_eff) * l_mm / C_MM_GHZ
