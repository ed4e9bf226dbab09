"""Pure n-qubit states and their polar-coordinate parametrization.

A pure state on n qubits is a unit vector of 2**n complex amplitudes,
indexed so that index k is the basis ket whose big-endian binary
expansion is k (|0...0> = index 0).  Up to global phase such a state is
fixed by c = 2**n - 1 polar angles in [0, pi] and c phases in [0, 2*pi),
the generalized polar coordinates used throughout this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Shared by the Bloch projection here and the tensor products in measurement.
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_NORM_ATOL = 1e-9
_HERMITIAN_ATOL = 1e-9
_EIGENVALUE_FLOOR = -1e-9
_BLOCH_NORM_SLACK = 1e-9
_POLE_SIN_TOL = 1e-12


def wrap_angle(phi: float) -> float:
    """Map an angle into [0, 2*pi).  Float mod can land exactly on 2*pi
    for tiny negative inputs, so that case is folded back to 0."""
    out = phi % TWO_PI
    if out >= TWO_PI:
        out = 0.0
    return out


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PolarParams:
    """Angle/phase vector (thetas, phis) that fixes a pure n-qubit state.

    Both vectors have length c = 2**n_qubits - 1, with every theta in
    [0, pi] and every phi in [0, 2*pi).
    """

    n_qubits: int
    thetas: np.ndarray
    phis: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        thetas = _frozen_array(self.thetas, float)
        phis = _frozen_array(self.phis, float)
        c = 2**self.n_qubits - 1
        if thetas.shape != (c,) or phis.shape != (c,):
            raise ValueError(
                f"expected {c} thetas and {c} phis for n_qubits={self.n_qubits}, "
                f"got shapes {thetas.shape} and {phis.shape}"
            )
        if np.any(thetas < 0.0) or np.any(thetas > np.pi):
            raise ValueError("every theta must lie in [0, pi]")
        if np.any(phis < 0.0) or np.any(phis >= TWO_PI):
            raise ValueError("every phi must lie in [0, 2*pi)")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "phis", phis)

    @property
    def n_params(self) -> int:
        return 2 * (2**self.n_qubits - 1)


@dataclass(frozen=True)
class PureState:
    """Unit-norm complex amplitude vector of length 2**n_qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        amps = _frozen_array(self.amplitudes, complex)
        dim = 2**self.n_qubits
        if amps.shape != (dim,):
            raise ValueError(
                f"expected {dim} amplitudes for n_qubits={self.n_qubits}, got shape {amps.shape}"
            )
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > _NORM_ATOL:
            raise ValueError(f"amplitudes are not unit norm: |psi|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """2x2 reduced state of one qubit: Hermitian, unit trace, PSD."""

    entries: np.ndarray

    def __post_init__(self):
        entries = _frozen_array(self.entries, complex)
        if entries.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {entries.shape}")
        if not np.allclose(entries, entries.conj().T, atol=_HERMITIAN_ATOL, rtol=0.0):
            raise ValueError("matrix is not Hermitian")
        trace = complex(np.trace(entries))
        if abs(trace - 1.0) > _HERMITIAN_ATOL:
            raise ValueError(f"trace must be 1, got {trace!r}")
        if np.min(np.linalg.eigvalsh(entries)) < _EIGENVALUE_FLOOR:
            raise ValueError("matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class BlochVector:
    """Cartesian point inside the closed unit ball of R^3."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.norm > 1.0 + _BLOCH_NORM_SLACK:
            raise ValueError(f"Bloch vector has norm {self.norm} > 1")

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


def _reduced_phases(phis: np.ndarray) -> np.ndarray:
    # Map [pi, 2*pi) onto [-pi, 0); the subtraction is exact there
    # (Sterbenz), so phi and 2*pi - phi reduce to exact mirror angles.
    return np.where(phis >= np.pi, phis - TWO_PI, phis)


def _amplitudes_from_angles(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Hyperspherical expansion shared by params_to_state and the fast
    likelihood objective; see params_to_state for the index convention."""
    c = thetas.shape[0]
    half = 0.5 * thetas
    sines = np.sin(half)
    prefix = np.empty(c + 1)
    prefix[0] = 1.0
    np.cumprod(sines, out=prefix[1:])
    amps = np.empty(c + 1, dtype=complex)
    amps[:c] = prefix[:c] * np.cos(half)
    amps[c] = prefix[c]
    reduced = _reduced_phases(phis)
    # cos forced even / sin forced odd in the phase so that conjugate
    # parameter vectors produce exactly conjugate amplitudes.
    mag = np.abs(reduced)
    amps[1:] *= np.cos(mag) + 1j * (np.sign(reduced) * np.sin(mag))
    return amps


def params_to_state(params: PolarParams) -> PureState:
    """Expand polar coordinates into the full amplitude vector.

    Amplitude k carries prod_{j<=k} sin(theta_j/2) times cos(theta_{k+1}/2)
    times exp(i*phi_k); amplitude 0 has no phase and the last amplitude
    replaces the cosine with sin(theta_c/2).  The result is unit norm by
    construction.
    """
    amps = _amplitudes_from_angles(params.thetas, params.phis)
    return PureState(params.n_qubits, amps)


def state_to_params_single(state: PureState) -> PolarParams:
    """Invert params_to_state for one qubit.

    Assumes the global phase is already fixed so that amplitude 0 is real
    and non-negative.  At the poles (sin(theta) = 0) the phase is
    unidentifiable and is returned as 0.
    """
    if state.n_qubits != 1:
        raise ValueError(f"expected a single-qubit state, got n_qubits={state.n_qubits}")
    a0, a1 = state.amplitudes
    theta = float(2.0 * np.arccos(np.clip(a0.real, -1.0, 1.0)))
    if abs(np.sin(theta)) < _POLE_SIN_TOL:
        phi = 0.0
    else:
        phi = wrap_angle(float(np.angle(a1)))
    return PolarParams(1, [theta], [phi])


def fidelity(a: PureState, b: PureState) -> float:
    """Squared overlap |<a|b>|^2; 1 means the states coincide up to
    global phase."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(abs(overlap) ** 2, 1.0))


def reduced_density_matrix(state: PureState, keep: int) -> ReducedDensityMatrix:
    """Partial trace of |psi><psi| over every qubit except `keep`."""
    n = state.n_qubits
    if not 0 <= keep < n:
        raise IndexError(f"keep={keep} out of range for {n} qubits")
    tensor = state.amplitudes.reshape((2,) * n)
    rows = np.moveaxis(tensor, keep, 0).reshape(2, -1)
    rho = rows @ rows.conj().T
    return ReducedDensityMatrix(rho)


def bloch_vector(rho: ReducedDensityMatrix) -> BlochVector:
    """Pauli-axis projections (Tr rho*X, Tr rho*Y, Tr rho*Z)."""
    entries = rho.entries
    return BlochVector(
        x=float(np.trace(entries @ PAULI_X).real),
        y=float(np.trace(entries @ PAULI_Y).real),
        z=float(np.trace(entries @ PAULI_Z).real),
    )


def random_params(n_qubits: int, rng: np.random.Generator) -> PolarParams:
    """Draw thetas ~ U[0, pi] and phis ~ U[0, 2*pi) independently."""
    c = 2**n_qubits - 1
    thetas = rng.uniform(0.0, np.pi, size=c)
    phis = rng.uniform(0.0, TWO_PI, size=c)
    return PolarParams(n_qubits, thetas, phis)
