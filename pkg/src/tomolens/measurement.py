"""Pauli measurement settings, Born-rule probabilities, and shot sampling.

A measurement setting is a Pauli string: one label from {I, X, Y, Z} per
qubit, excluding the all-identity string (its outcome is always +1).
Measuring a string yields the binary +1/-1 eigenvalue of the full tensor
product; outcomes are stored as sufficient counts (shots, plus_count).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .statemodel import PAULI_X, PAULI_Y, PAULI_Z, PureState

PAULI_LABELS = "IXYZ"

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": PAULI_X,
    "Y": PAULI_Y,
    "Z": PAULI_Z,
}

# Dense-matrix cutoff: 2**6 = 64-dimensional operators at most.  Raise it
# only if you accept the 4**n memory growth.
MAX_DENSE_QUBITS = 6

# Spawn-key namespaces keeping sampling streams disjoint from the
# estimator's restart streams under a shared master seed.
STREAM_SAMPLING = 0
STREAM_RESTARTS = 1
STREAM_TRIALS = 2


@dataclass(frozen=True)
class PauliString:
    """Measurement setting: one Pauli label per qubit, not all identity."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) < 1:
            raise ValueError("a Pauli string needs at least one qubit")
        for label in labels:
            if label not in PAULI_LABELS:
                raise ValueError(f"unknown Pauli label {label!r}")
        if all(label == "I" for label in labels):
            raise ValueError("the all-identity string is not a valid setting")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        return cls(tuple(text.upper()))

    def __str__(self) -> str:
        return "".join(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    @property
    def setting_index(self) -> int:
        """Position in the lexicographic enumeration over (I, X, Y, Z),
        counting from 1 (index 0 would be the excluded all-I string)."""
        index = 0
        for label in self.labels:
            index = 4 * index + PAULI_LABELS.index(label)
        return index


@dataclass(frozen=True)
class OutcomeSample:
    """Counts observed for one setting: `plus_count` of `shots` gave +1."""

    setting: PauliString
    shots: int
    plus_count: int

    def __post_init__(self):
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")
        if not 0 <= self.plus_count <= self.shots:
            raise ValueError(
                f"plus_count must lie in [0, {self.shots}], got {self.plus_count}"
            )


def _check_dense(n_qubits: int) -> None:
    if n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(
            f"dense operators are limited to {MAX_DENSE_QUBITS} qubits, got {n_qubits}"
        )


def pauli_matrix(string: PauliString) -> np.ndarray:
    """Ordered tensor product of the single-qubit Pauli matrices."""
    _check_dense(string.n_qubits)
    matrix = _SINGLE_QUBIT[string.labels[0]]
    for label in string.labels[1:]:
        matrix = np.kron(matrix, _SINGLE_QUBIT[label])
    return matrix


def projector_plus(string: PauliString) -> np.ndarray:
    """Projector (I + M)/2 onto the +1 eigenspace of the string M."""
    matrix = pauli_matrix(string)
    return 0.5 * (np.eye(matrix.shape[0], dtype=complex) + matrix)


def projector_minus(string: PauliString) -> np.ndarray:
    """Projector (I - M)/2 onto the -1 eigenspace of the string M."""
    matrix = pauli_matrix(string)
    return 0.5 * (np.eye(matrix.shape[0], dtype=complex) - matrix)


def outcome_prob_plus(state: PureState, string: PauliString) -> float:
    """Born rule: p(+1) = <psi| (I + M)/2 |psi>, clipped into [0, 1]."""
    if state.n_qubits != string.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits but setting has {string.n_qubits}"
        )
    psi = state.amplitudes
    p = np.vdot(psi, projector_plus(string) @ psi).real
    return float(np.clip(p, 0.0, 1.0))


def single_qubit_prob_plus(theta: float, phi: float, basis: str) -> float:
    """Closed-form single-qubit p(+1) for the X, Y, or Z axis."""
    if basis == "Z":
        p = 0.5 * (1.0 + np.cos(theta))
    elif basis == "X":
        p = 0.5 * (1.0 + np.cos(phi) * np.sin(theta))
    elif basis == "Y":
        p = 0.5 * (1.0 + np.sin(phi) * np.sin(theta))
    else:
        raise ValueError(f"basis must be one of X, Y, Z, got {basis!r}")
    return float(np.clip(p, 0.0, 1.0))


def rng_stream(seed: int, namespace: int, index: int) -> np.random.Generator:
    """Independent counter-based (Philox) stream for one (seed, purpose,
    index) triple; identical triples reproduce identical draws."""
    if seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(namespace, index))
    return np.random.Generator(np.random.Philox(seq))


def sample_outcomes(p_plus: float, shots: int, rng: np.random.Generator) -> int:
    """Draw the +1 count for `shots` repetitions: Binomial(shots, p_plus)."""
    if not 0.0 <= p_plus <= 1.0:
        raise ValueError(f"p_plus must lie in [0, 1], got {p_plus}")
    if shots < 0:
        raise ValueError(f"shots must be >= 0, got {shots}")
    return int(rng.binomial(shots, p_plus))


def enumerate_settings(n_qubits: int) -> list[PauliString]:
    """All 4**n - 1 non-identity Pauli strings in lexicographic order
    over (I, X, Y, Z) per qubit."""
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    settings = []
    for labels in product(PAULI_LABELS, repeat=n_qubits):
        if all(label == "I" for label in labels):
            continue
        settings.append(PauliString(labels))
    return settings
