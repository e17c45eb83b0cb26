"""Weighted design objective over the surrogate, and the discovery loop.

The scalar objective combines four terms evaluated at the center frequency:

    total = alpha * |coupling error|            (dB)
          + beta  * |phase-difference error|    (degrees, wrapped)
          + gamma * max(0, s41_db - iso_ceiling)
          + lam   * max(0, s11_db - rl_ceiling)

Optional band-check offsets add the isolation/return-loss hinges at
f0 + offset for each configured offset, plus the coupling error scaled by
``band_coupling_weight``; the extra coupling term rewards a flat split
across the band, which is what widens the usable bandwidth of multi-stage
designs. Discovery runs the self-adaptive DE search over the topology box
using this objective, then re-simulates the winner with the truth model and
reports spec-versus-achieved metrics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import couplers, sade, surrogate
from .couplers import BandThresholds, FrequencySweep, bounds_arrays
from .errors import TopologyMismatchError, ValidationError
from .microstrip import Substrate
from .rfnetwork import wrap_deg

# Default truth-model validation sweeps per topology (GHz, GHz, points).
VALIDATION_SWEEPS = {
    "folded": FrequencySweep(0.5, 2.0, 201),
    "cascaded": FrequencySweep(1.0, 3.5, 201),
    "classical": FrequencySweep(0.5, 1.5, 201),
}

# Tolerances used by the validation report to flag met/unmet targets.
COUPLING_TOL_DB = 0.25
PHASE_TOL_DEG = 1.5


@dataclass(frozen=True)
class DesignSpec:
    """Target electrical properties and objective weights for one discovery run."""

    f0_ghz: float
    coupling_target_db: float
    phase_target_deg: float = 90.0
    iso_threshold_db: float = -20.0
    rl_threshold_db: float = -20.0
    alpha: float = 1.0
    beta: float = 0.2
    gamma: float = 1.0
    lam: float = 1.0
    band_check_ghz: tuple[float, ...] = ()
    band_coupling_weight: float = 0.5
    # extra dB the search hinges demand beyond the spec thresholds, so that
    # surrogate error at the optimum cannot push a validated design over them
    hinge_margin_db: float = 5.0

    def __post_init__(self):
        if not (self.f0_ghz > 0.0):
            raise ValidationError(f"center frequency must be positive, got {self.f0_ghz}")
        weights = (self.alpha, self.beta, self.gamma, self.lam)
        if any(w < 0.0 for w in weights):
            raise ValidationError(f"weights must be non-negative, got {weights}")
        if not any(w > 0.0 for w in weights):
            raise ValidationError("at least one objective weight must be positive")
        if self.band_coupling_weight < 0.0 or self.hinge_margin_db < 0.0:
            raise ValidationError("band coupling weight and hinge margin must be non-negative")

    def search_spec(self) -> "DesignSpec":
        """Copy of this spec with hinge thresholds tightened by the margin."""
        if self.hinge_margin_db == 0.0:
            return self
        return replace(
            self,
            iso_threshold_db=self.iso_threshold_db - self.hinge_margin_db,
            rl_threshold_db=self.rl_threshold_db - self.hinge_margin_db,
            hinge_margin_db=0.0,
        )


@dataclass(frozen=True)
class LossBreakdown:
    l_cf: float
    l_pd: float
    l_is: float
    l_rc: float
    total: float


def loss_terms(pred, spec: DesignSpec) -> LossBreakdown:
    """Per-term losses of one predicted 6-vector against the spec.

    The predicted coupling factor is -s31_db; isolation and return loss are
    one-sided hinges above their (negative dB) ceilings.
    """
    pred = np.asarray(pred, dtype=float)
    if pred.shape != (6,) or not np.all(np.isfinite(pred)):
        raise ValidationError("prediction must be six finite values")
    l_cf = abs(-pred[2] - spec.coupling_target_db)
    l_pd = abs(wrap_deg((pred[4] - pred[5]) - spec.phase_target_deg))
    l_is = max(0.0, pred[3] - spec.iso_threshold_db)
    l_rc = max(0.0, pred[0] - spec.rl_threshold_db)
    total = spec.alpha * l_cf + spec.beta * l_pd + spec.gamma * l_is + spec.lam * l_rc
    return LossBreakdown(l_cf=l_cf, l_pd=l_pd, l_is=l_is, l_rc=l_rc, total=total)


def objective_fn(x, spec: DesignSpec, model: surrogate.MlpModel) -> float:
    """Objective total for one design vector, evaluated through the surrogate.

    The hinge ceilings are tightened by ``hinge_margin_db`` during the
    search; non-finite surrogate output maps to +inf so the search never
    aborts.
    """
    x = np.asarray(x, dtype=float)
    search = spec.search_spec()
    freqs = [search.f0_ghz] + [search.f0_ghz + off for off in search.band_check_ghz]
    rows = np.array([np.concatenate([x, [f]]) for f in freqs])
    preds = surrogate.forward(model, rows)
    if not np.all(np.isfinite(preds)):
        return math.inf
    total = loss_terms(preds[0], search).total
    for pred in preds[1:]:
        terms = loss_terms(pred, search)
        total += search.gamma * terms.l_is + search.lam * terms.l_rc
        total += search.band_coupling_weight * search.alpha * terms.l_cf
    return float(total)


@dataclass(frozen=True)
class ValidationReport:
    """Truth-model check of a discovered design against its spec."""

    metrics: couplers.CouplerMetrics
    met_coupling: bool
    met_phase: bool
    met_isolation: bool
    met_return_loss: bool

    @property
    def all_met(self) -> bool:
        return (
            self.met_coupling
            and self.met_phase
            and self.met_isolation
            and self.met_return_loss
        )


@dataclass(frozen=True)
class DiscoveryOutcome:
    result: sade.DiscoveryResult
    geometry: couplers.Geometry
    response: couplers.FourPortResponse
    report: ValidationReport


def validate_design(
    geometry: couplers.Geometry,
    sub: Substrate | None,
    spec: DesignSpec,
    sweep: FrequencySweep,
) -> tuple[couplers.FourPortResponse, ValidationReport]:
    """Simulate a geometry with the truth model and grade it against the spec."""
    response = couplers.simulate(geometry, sub, sweep)
    thresholds = BandThresholds(
        rl_db=-spec.rl_threshold_db, iso_db=-spec.iso_threshold_db
    )
    m = couplers.metrics(response, spec.f0_ghz, thresholds)
    report = ValidationReport(
        metrics=m,
        met_coupling=abs(m.coupling_db - spec.coupling_target_db) <= COUPLING_TOL_DB,
        met_phase=abs(wrap_deg(m.phase_diff_deg - spec.phase_target_deg)) <= PHASE_TOL_DEG,
        met_isolation=m.isolation_db <= spec.iso_threshold_db,
        met_return_loss=m.return_loss_db <= spec.rl_threshold_db,
    )
    return response, report


def discover(
    spec: DesignSpec,
    kind: str,
    model: surrogate.MlpModel,
    cfg: sade.SadeConfig,
    sub: Substrate,
    sweep: FrequencySweep | None = None,
) -> DiscoveryOutcome:
    """Search the topology box with SaDE over the surrogate, then validate.

    The returned outcome carries the best design vector as a geometry, its
    truth-model response over the validation sweep, and the spec-versus-
    achieved report.
    """
    if model.topology != kind:
        raise TopologyMismatchError(
            f"model was trained for {model.topology!r}, discovery asked for {kind!r}"
        )
    lo, hi = bounds_arrays(kind)
    bounds = sade.Bounds(lo, hi)
    result = sade.run(lambda x: objective_fn(x, spec, model), bounds, cfg)
    geometry = couplers.vector_to_geometry(kind, result.x_star)
    if sweep is None:
        sweep = VALIDATION_SWEEPS[kind]
    response, report = validate_design(geometry, sub, spec, sweep)
    return DiscoveryOutcome(result=result, geometry=geometry, response=response, report=report)
