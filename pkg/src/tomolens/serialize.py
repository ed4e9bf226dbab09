"""Canonical JSON forms for specs, reports, and their pieces.

Conventions: lower_snake_case field names, complex numbers as [re, im]
pairs, angles in radians, Pauli strings as uppercase letter strings like
"XZ".  dumps_canonical fixes key order and indentation so identical runs
serialize to identical bytes.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Sequence

from .estimator import OptimizerConfig, TomographyResult
from .experiment import ExperimentReport, ExperimentSpec
from .likelihood import MeasurementRecord
from .measurement import PauliString
from .statemodel import BlochVector, PolarParams, PureState


def complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def pair_to_complex(pair: Sequence[float]) -> complex:
    return complex(pair[0], pair[1])


def state_to_json(state: PureState) -> list[list[float]]:
    return [complex_to_pair(z) for z in state.amplitudes]


def state_from_json(n_qubits: int, pairs: Sequence[Sequence[float]]) -> PureState:
    return PureState(n_qubits, [pair_to_complex(p) for p in pairs])


def params_to_json(params: PolarParams) -> dict[str, list[float]]:
    return {
        "thetas": [float(v) for v in params.thetas],
        "phis": [float(v) for v in params.phis],
    }


def params_from_json(n_qubits: int, data: Mapping[str, Any]) -> PolarParams:
    return PolarParams(n_qubits, data["thetas"], data["phis"])


def bloch_to_json(vector: BlochVector) -> list[float]:
    return [vector.x, vector.y, vector.z]


def record_to_json(record: MeasurementRecord) -> dict[str, Any]:
    return {
        "setting": str(record.setting),
        "shots": int(record.shots),
        "plus_count": int(record.plus_count),
    }


def record_from_json(data: Mapping[str, Any]) -> MeasurementRecord:
    return MeasurementRecord(
        setting=PauliString.from_str(data["setting"]),
        shots=int(data["shots"]),
        plus_count=int(data["plus_count"]),
    )


def optimizer_to_json(config: OptimizerConfig) -> dict[str, Any]:
    return {
        "restarts": config.restarts,
        "max_iterations": config.max_iterations,
        "gradient_step": config.gradient_step,
        "convergence_tol": config.convergence_tol,
        "seed": config.seed,
    }


def optimizer_from_json(data: Mapping[str, Any]) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=int(data["restarts"]),
        max_iterations=int(data["max_iterations"]),
        gradient_step=float(data["gradient_step"]),
        convergence_tol=float(data["convergence_tol"]),
        seed=int(data["seed"]),
    )


def spec_to_json(spec: ExperimentSpec) -> dict[str, Any]:
    return {
        "n_qubits": spec.n_qubits,
        "true_params": params_to_json(spec.true_params),
        "shot_plan": {str(setting): shots for setting, shots in spec.shot_plan},
        "seed": spec.seed,
        "optimizer": optimizer_to_json(spec.optimizer),
    }


def spec_from_json(data: Mapping[str, Any]) -> ExperimentSpec:
    n_qubits = int(data["n_qubits"])
    plan = {
        PauliString.from_str(name): int(shots)
        for name, shots in data["shot_plan"].items()
    }
    return ExperimentSpec(
        n_qubits=n_qubits,
        true_params=params_from_json(n_qubits, data["true_params"]),
        shot_plan=tuple(plan.items()),
        seed=int(data["seed"]),
        optimizer=optimizer_from_json(data["optimizer"]),
    )


def result_to_json(result: TomographyResult) -> dict[str, Any]:
    return {
        "estimated_params": params_to_json(result.estimated_params),
        "estimated_state": state_to_json(result.estimated_state),
        "fidelity_to_truth": (
            None if result.fidelity_to_truth is None else float(result.fidelity_to_truth)
        ),
        "final_log_likelihood": float(result.final_log_likelihood),
        "restarts_run": result.restarts_run,
        "best_restart_index": result.best_restart_index,
        "converged": result.converged,
    }


def report_to_json(report: ExperimentReport) -> dict[str, Any]:
    return {
        "spec": spec_to_json(report.spec),
        "records": [record_to_json(r) for r in report.records],
        "result": result_to_json(report.result),
        "true_state": state_to_json(report.true_state),
        "bloch_true": [bloch_to_json(v) for v in report.bloch_true],
        "bloch_estimated": [bloch_to_json(v) for v in report.bloch_estimated],
        "fidelity": float(report.fidelity),
        "warnings": list(report.warnings),
    }


def dumps_canonical(payload: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, no NaN."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False)
