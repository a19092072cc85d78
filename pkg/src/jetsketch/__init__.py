"""jetsketch: local sketching of arithmetic circuits by forward-mode jets
in random complex directions, and retraining-free deletion prediction."""

from ._kernels import backend_name
from .circuits import (
    Circuit,
    CircuitBuilder,
    ComplexRing,
    ComposedProgram,
    JetRing,
    evaluate,
    from_json,
    load_circuit,
    save_circuit,
    size,
    to_json,
    validate,
)
from .deletion import (
    DeletionSet,
    ParameterChoice,
    error_envelope,
    precompute,
    predict,
    select_parameters,
)
from .errors import GateDomainError, SketchFormatError, UsageError
from .estimator import (
    aggregate,
    median_of_means,
    rank1_projection_estimate,
    sym_dim,
)
from .jets import (
    GATE_KINDS,
    Jet,
    apply_gate_scalar,
    jet_add,
    jet_compose_unary,
    jet_mul,
    jet_mul_naive,
    jet_pow,
    jet_scale,
    jet_sub,
)
from .oracle import (
    AlphaBound,
    OracleLimits,
    TaylorTensors,
    alpha_exact,
    exact_taylor_tensors,
    frobenius_profile,
    gate_taylor_coefficients,
    scalar_derivatives,
)
from .persistence import load_sketch, save_sketch
from .sampling import (
    DirectionStream,
    ExplicitDirections,
    SeededDirections,
    derive_component,
    normalize_key,
    real_haar_block,
    sample_direction,
)
from .sketching import SketchData, sketch, sketch_eval
from .stability import AlphaFit, StabilityProfile, fit_alpha, probe
from .trainers import (
    MeasurementConfig,
    TrainerConfig,
    build_measurement,
    build_trainer,
    initial_parameters,
    retrain_oracle,
)

__version__ = "0.1.0"
