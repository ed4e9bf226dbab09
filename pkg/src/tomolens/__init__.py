"""tomolens: simulate Pauli-basis measurements on pure n-qubit states and
reconstruct the state from the counts by bounded maximum-likelihood
estimation.  Ships as a library, a batch CLI, and an HTTP service."""

from .estimator import OptimizerConfig, TomographyResult, bounded_minimize, estimate_mle
from .experiment import (
    ExperimentReport,
    ExperimentSpec,
    default_shot_plan,
    run_experiment,
)
from .likelihood import MeasurementRecord, log_likelihood, negative_log_likelihood
from .measurement import (
    OutcomeSample,
    PauliString,
    enumerate_settings,
    outcome_prob_plus,
    pauli_matrix,
    projector_minus,
    projector_plus,
    rng_stream,
    sample_outcomes,
    single_qubit_prob_plus,
)
from .statemodel import (
    BlochVector,
    PolarParams,
    PureState,
    ReducedDensityMatrix,
    bloch_vector,
    fidelity,
    params_to_state,
    random_params,
    reduced_density_matrix,
    state_to_params_single,
)

__version__ = "0.1.0"

__all__ = [
    "BlochVector",
    "ExperimentReport",
    "ExperimentSpec",
    "MeasurementRecord",
    "OptimizerConfig",
    "OutcomeSample",
    "PauliString",
    "PolarParams",
    "PureState",
    "ReducedDensityMatrix",
    "TomographyResult",
    "__version__",
    "bloch_vector",
    "bounded_minimize",
    "default_shot_plan",
    "enumerate_settings",
    "estimate_mle",
    "fidelity",
    "log_likelihood",
    "negative_log_likelihood",
    "outcome_prob_plus",
    "params_to_state",
    "pauli_matrix",
    "projector_minus",
    "projector_plus",
    "random_params",
    "reduced_density_matrix",
    "rng_stream",
    "run_experiment",
    "sample_outcomes",
    "single_qubit_prob_plus",
    "state_to_params_single",
]
