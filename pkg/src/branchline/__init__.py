"""Surrogate-assisted design automation for microwave branch-line couplers.

The package pairs an analytic transmission-line truth model (even/odd-mode
ABCD analysis of single-box and three-section branch-line couplers) with a
neural surrogate and a self-adaptive differential-evolution search:
sample the design space, train the surrogate, then search the physical
parameter box for geometries meeting coupling, phase, isolation, and
return-loss targets.
"""

from .couplers import (
    BandThresholds,
    CascadedGeometry,
    ClassicalDesign,
    CouplerMetrics,
    FoldedGeometry,
    FourPortResponse,
    FrequencySweep,
    coupling_factor,
    geometry_to_vector,
    metrics,
    simulate,
    synth_classical,
    vector_to_geometry,
)
from .dataset import Dataset, SampleRecord, generate, lhs_sample, split
from .errors import (
    BranchlineError,
    ConfigError,
    DegenerateNetworkError,
    DivergenceError,
    NumericalError,
    OutOfRangeError,
    SchemaError,
    SingularStubError,
    TopologyMismatchError,
    UnsupportedVersionError,
    ValidationError,
)
from .microstrip import LineParams, Substrate, analyze_width, electrical_length, synthesize_width
from .objective import DesignSpec, DiscoveryOutcome, LossBreakdown, discover, loss_terms, objective_fn
from .sade import Bounds, DiscoveryResult, SadeConfig, SadeState, init_population, run, step
from .surrogate import MlpModel, TrainConfig, TrainReport, evaluate_mae, forward, gradient, load_model, save_model, train

__version__ = "0.1.0"
