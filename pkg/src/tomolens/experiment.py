"""End-to-end tomography runs: prepare, sample, estimate, evaluate.

A run is fully specified by (true parameters, shot plan, seed, optimizer
config) and is deterministic: each setting samples from its own stream of
the master seed, keyed by the setting's global enumeration index, so a
plan subset draws the same counts as the full plan would for the shared
settings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .estimator import OptimizerConfig, TomographyResult, estimate_mle
from .likelihood import MeasurementRecord
from .measurement import (
    STREAM_SAMPLING,
    PauliString,
    enumerate_settings,
    outcome_prob_plus,
    rng_stream,
    sample_outcomes,
)
from .statemodel import (
    BlochVector,
    PolarParams,
    PureState,
    bloch_vector,
    params_to_state,
    reduced_density_matrix,
)

WARN_PHI_UNCONSTRAINED = "phi unconstrained"
WARN_PHI_SIGN_AMBIGUOUS = "phi sign ambiguous"


def _canonical_plan(
    n_qubits: int, shot_plan: Mapping[PauliString, int]
) -> tuple[tuple[PauliString, int], ...]:
    items = []
    for setting, shots in shot_plan.items():
        if setting.n_qubits != n_qubits:
            raise ValueError(
                f"setting {setting} has {setting.n_qubits} qubits, expected {n_qubits}"
            )
        shots = int(shots)
        if shots < 0:
            raise ValueError(f"shot count for {setting} must be >= 0, got {shots}")
        items.append((setting, shots))
    if not items:
        raise ValueError("shot plan is empty")
    if all(shots == 0 for _, shots in items):
        raise ValueError("shot plan needs at least one setting with shots > 0")
    items.sort(key=lambda item: item[0].setting_index)
    return tuple(items)


@dataclass(frozen=True)
class ExperimentSpec:
    """Inputs of one simulated tomography experiment."""

    n_qubits: int
    true_params: PolarParams
    shot_plan: tuple[tuple[PauliString, int], ...]
    seed: int
    optimizer: OptimizerConfig

    def __post_init__(self):
        if self.true_params.n_qubits != self.n_qubits:
            raise ValueError(
                f"true_params are for {self.true_params.n_qubits} qubits, "
                f"expected {self.n_qubits}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")
        object.__setattr__(
            self, "shot_plan", _canonical_plan(self.n_qubits, dict(self.shot_plan))
        )


@dataclass(frozen=True)
class ExperimentReport:
    """Everything a run produced: raw counts, estimate, and geometry."""

    spec: ExperimentSpec
    records: tuple[MeasurementRecord, ...]
    result: TomographyResult
    true_state: PureState
    bloch_true: tuple[BlochVector, ...]
    bloch_estimated: tuple[BlochVector, ...]
    fidelity: float
    warnings: tuple[str, ...]


def default_shot_plan(n_qubits: int, shots_per_setting: int) -> dict[PauliString, int]:
    """Uniform budget over all 4**n - 1 settings."""
    if shots_per_setting < 0:
        raise ValueError(f"shots_per_setting must be >= 0, got {shots_per_setting}")
    return {setting: shots_per_setting for setting in enumerate_settings(n_qubits)}


def _warning_flags(spec: ExperimentSpec) -> tuple[str, ...]:
    # Teachable under-determined single-qubit plans are flagged, not rejected.
    if spec.n_qubits != 1:
        return ()
    live = {str(setting) for setting, shots in spec.shot_plan if shots > 0}
    if "X" not in live and "Y" not in live:
        return (WARN_PHI_UNCONSTRAINED,)
    if "Y" not in live:
        return (WARN_PHI_SIGN_AMBIGUOUS,)
    return ()


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Sample every planned setting, reconstruct by MLE, and evaluate the
    reconstruction against the known true state."""
    true_state = params_to_state(spec.true_params)
    records = []
    for setting, shots in spec.shot_plan:
        p_plus = outcome_prob_plus(true_state, setting)
        rng = rng_stream(spec.seed, STREAM_SAMPLING, setting.setting_index)
        plus_count = sample_outcomes(p_plus, shots, rng)
        records.append(MeasurementRecord(setting, shots, plus_count))

    result = estimate_mle(records, spec.n_qubits, spec.optimizer, true_state=true_state)

    bloch_true = tuple(
        bloch_vector(reduced_density_matrix(true_state, k)) for k in range(spec.n_qubits)
    )
    bloch_estimated = tuple(
        bloch_vector(reduced_density_matrix(result.estimated_state, k))
        for k in range(spec.n_qubits)
    )
    return ExperimentReport(
        spec=spec,
        records=tuple(records),
        result=result,
        true_state=true_state,
        bloch_true=bloch_true,
        bloch_estimated=bloch_estimated,
        fidelity=result.fidelity_to_truth,
        warnings=_warning_flags(spec),
    )
