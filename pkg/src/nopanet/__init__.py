"""Squeezing analysis, optimization and beamsplitter synthesis for dual-NOPA feedback networks."""

from .errors import (
    IllPosedFeedback,
    InfeasiblePoint,
    InfeasibleStart,
    MatrixFormatError,
    NonSymplecticInput,
    NonUnitaryInput,
    NopaNetError,
    RankDeficient,
    ResonanceWarning,
    ResonantFrequency,
    StabilityWarning,
    UnitarityWarning,
)
from .network import (
    BUILTIN_NETWORKS,
    REFERENCE_PARAMS,
    NopaParams,
    PassiveNetwork,
    QuadratureNetwork,
    StateSpace,
    build_state_space,
    cfb_network,
    complex_form,
    lm_paper_network,
    quadrature_form,
    stability_check,
)
from .optimizer import (
    GradientMatrix,
    OptimizationResult,
    OptimizerConfig,
    Status,
    descent_direction,
    euclidean_gradient,
    feasible,
    inner_product,
    optimize,
    retract,
)
from .spectra import SqueezingReport, selectors, squeezing_v0, sweep_spectrum, transfer_matrix, two_mode_squeezing
from .synthesis import (
    FactorKind,
    PermutationVector,
    SynthesisReport,
    TwoLevelFactor,
    classify,
    decompose,
    quantize_sensitivity,
    reconstruct,
)

__version__ = "0.1.0"
