"""Joint Bernoulli log-likelihood of observed counts over Pauli settings.

Settings are independent, so the joint likelihood is the product of one
binomial term per record; only the sufficient counts (shots, plus_count)
enter.  A small epsilon guards both log arguments against p = 0 or 1.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .measurement import OutcomeSample, outcome_prob_plus, projector_plus
from .statemodel import PolarParams, _amplitudes_from_angles, params_to_state

# One record = one setting's sufficient statistic; the sampling and
# inference sides share the same type.
MeasurementRecord = OutcomeSample

LOG_EPSILON = 1e-10


def _check_records(n_qubits: int, records: Sequence[MeasurementRecord]) -> None:
    for record in records:
        if record.setting.n_qubits != n_qubits:
            raise ValueError(
                f"record setting {record.setting} has {record.setting.n_qubits} "
                f"qubits, expected {n_qubits}"
            )


def log_likelihood(params: PolarParams, records: Sequence[MeasurementRecord]) -> float:
    """Sum over records of n+ * ln(p + eps) + (N - n+) * ln(1 - p + eps),
    with p the Born-rule +1 probability of the record's setting.  An
    empty record list gives 0."""
    _check_records(params.n_qubits, records)
    state = params_to_state(params)
    total = 0.0
    for record in records:
        p = outcome_prob_plus(state, record.setting)
        total += record.plus_count * np.log(p + LOG_EPSILON)
        total += (record.shots - record.plus_count) * np.log(1.0 - p + LOG_EPSILON)
    return float(total)


def negative_log_likelihood(
    params: PolarParams, records: Sequence[MeasurementRecord]
) -> float:
    """Exact negation of log_likelihood; the quantity the estimator
    minimizes."""
    return -log_likelihood(params, records)


def make_negative_log_likelihood(
    n_qubits: int, records: Sequence[MeasurementRecord]
) -> Callable[[np.ndarray], float]:
    """Objective over the flat vector x = [thetas..., phis...].

    Projectors are stacked once up front; the state itself is re-derived
    from the angles on every call.  Values match
    negative_log_likelihood(PolarParams(...), records) up to summation
    order.
    """
    _check_records(n_qubits, records)
    c = 2**n_qubits - 1
    projectors = np.stack([projector_plus(r.setting) for r in records])
    n_plus = np.array([r.plus_count for r in records], dtype=float)
    n_minus = np.array([r.shots - r.plus_count for r in records], dtype=float)

    def objective(x: np.ndarray) -> float:
        psi = _amplitudes_from_angles(x[:c], x[c:])
        p = np.einsum("i,mij,j->m", psi.conj(), projectors, psi).real
        np.clip(p, 0.0, 1.0, out=p)
        value = n_plus @ np.log(p + LOG_EPSILON)
        value += n_minus @ np.log(1.0 - p + LOG_EPSILON)
        return -float(value)

    return objective
