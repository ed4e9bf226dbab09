"""Maximum-likelihood reconstruction by bounded multi-start optimization.

Each restart runs a box-constrained quasi-Newton (L-BFGS-B) descent on the
negative log-likelihood with numerically differenced gradients, falling
back to a coordinate-wise golden-section polish when the descent does not
converge.  The restart with the highest final log-likelihood wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .likelihood import MeasurementRecord, make_negative_log_likelihood
from .measurement import STREAM_RESTARTS, rng_stream
from .statemodel import TWO_PI, PolarParams, PureState, fidelity, params_to_state, wrap_angle

# Box bounds cannot express the half-open phase interval; the optimizer
# sees [0, 2*pi - margin] and results are wrapped back into [0, 2*pi).
PHI_BOUND_MARGIN = 1e-12

# Restarts whose objectives agree within this are ties; the lowest index wins.
TIE_TOLERANCE = 1e-12

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the multi-start bounded descent."""

    restarts: int = 8
    max_iterations: int = 500
    gradient_step: float = 1e-6
    convergence_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.gradient_step <= 0.0:
            raise ValueError(f"gradient_step must be > 0, got {self.gradient_step}")
        if self.convergence_tol <= 0.0:
            raise ValueError(f"convergence_tol must be > 0, got {self.convergence_tol}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")


@dataclass(frozen=True)
class TomographyResult:
    """Winning restart of an MLE run plus diagnostics."""

    estimated_params: PolarParams
    estimated_state: PureState
    fidelity_to_truth: Optional[float]
    final_log_likelihood: float
    restarts_run: int
    best_restart_index: int
    converged: bool


class _NonFiniteObjective(Exception):
    pass


def finite_difference_gradient(
    fun: Callable[[np.ndarray], float],
    x: np.ndarray,
    step: float,
    lower: np.ndarray,
    upper: np.ndarray,
) -> np.ndarray:
    """Central differences with the actually-representable step, falling
    back to one-sided differences where a bound truncates the stencil."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        hi = min(x[i] + step, upper[i])
        lo = max(x[i] - step, lower[i])
        if hi == lo:
            grad[i] = 0.0
            continue
        probe = x.copy()
        probe[i] = hi
        f_hi = fun(probe)
        probe[i] = lo
        f_lo = fun(probe)
        grad[i] = (f_hi - f_lo) / (hi - lo)
    return grad


def _golden_section(fun: Callable[[float], float], lo: float, hi: float, iters: int = 60) -> float:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
    return c if fc <= fd else d


def _coordinate_polish(
    fun: Callable[[np.ndarray], float],
    lower: np.ndarray,
    upper: np.ndarray,
    x: np.ndarray,
    tol: float,
    sweeps: int = 5,
) -> tuple[np.ndarray, float, bool]:
    x = x.copy()
    f = fun(x)
    for _ in range(sweeps):
        f_before = f
        for i in range(x.size):
            def along(v: float, i: int = i) -> float:
                probe = x.copy()
                probe[i] = v
                return fun(probe)

            candidate = _golden_section(along, lower[i], upper[i])
            f_candidate = along(candidate)
            if f_candidate < f:
                x[i] = candidate
                f = f_candidate
        if f_before - f < tol:
            return x, f, True
    return x, f, False


def bounded_minimize(
    objective: Callable[[np.ndarray], float],
    bounds: Sequence[tuple[float, float]],
    start: np.ndarray,
    config: OptimizerConfig,
) -> tuple[np.ndarray, float, bool]:
    """Minimize within a box from `start`; returns (argmin, value,
    converged).  A non-finite objective value mid-run aborts the descent
    and reports the best point seen so far as non-converged."""
    lower = np.array([b[0] for b in bounds], dtype=float)
    upper = np.array([b[1] for b in bounds], dtype=float)
    start = np.asarray(start, dtype=float)
    if np.any(start < lower) or np.any(start > upper):
        raise ValueError("start point violates the bounds")

    best_x = start.copy()
    best_f = objective(start)
    if not np.isfinite(best_f):
        raise ValueError(f"objective is not finite at the start point: {best_f!r}")

    def guarded(x: np.ndarray) -> float:
        nonlocal best_x, best_f
        value = objective(x)
        if not np.isfinite(value):
            raise _NonFiniteObjective
        if value < best_f:
            best_f = value
            best_x = np.array(x, dtype=float)
        return value

    def gradient(x: np.ndarray) -> np.ndarray:
        return finite_difference_gradient(guarded, x, config.gradient_step, lower, upper)

    try:
        result = minimize(
            guarded,
            start,
            jac=gradient,
            method="L-BFGS-B",
            bounds=list(zip(lower, upper)),
            options={"maxiter": config.max_iterations, "ftol": config.convergence_tol},
        )
        x = np.clip(result.x, lower, upper)
        converged = bool(result.success)
    except _NonFiniteObjective:
        return np.clip(best_x, lower, upper), best_f, False

    if not converged:
        try:
            x, _, converged = _coordinate_polish(
                guarded, lower, upper, x, config.convergence_tol
            )
        except _NonFiniteObjective:
            return np.clip(best_x, lower, upper), best_f, False
        x = np.clip(x, lower, upper)
    return x, objective(x), converged


def estimate_mle(
    records: Sequence[MeasurementRecord],
    n_qubits: int,
    config: OptimizerConfig,
    true_state: Optional[PureState] = None,
) -> TomographyResult:
    """Reconstruct the state behind `records` by multi-start bounded MLE.

    Starting points draw thetas ~ U[0, pi] and phis ~ U[0, 2*pi) from the
    restart's own stream of config.seed, so results are deterministic for
    fixed (records, config).  fidelity_to_truth is filled only when the
    caller knows the true state (simulation mode).
    """
    records = list(records)
    if not records or all(record.shots == 0 for record in records):
        raise ValueError("records carry no shots; nothing to estimate")
    objective = make_negative_log_likelihood(n_qubits, records)

    c = 2**n_qubits - 1
    lower = np.zeros(2 * c)
    upper = np.concatenate([np.full(c, np.pi), np.full(c, TWO_PI - PHI_BOUND_MARGIN)])
    bounds = list(zip(lower, upper))

    best_index = -1
    best_x: Optional[np.ndarray] = None
    best_ll = -np.inf
    best_converged = False
    for index in range(config.restarts):
        rng = rng_stream(config.seed, STREAM_RESTARTS, index)
        start = np.concatenate(
            [rng.uniform(0.0, np.pi, size=c), rng.uniform(0.0, TWO_PI, size=c)]
        )
        start = np.clip(start, lower, upper)
        x, value, converged = bounded_minimize(objective, bounds, start, config)
        ll = -value
        if best_x is None or ll > best_ll + TIE_TOLERANCE:
            best_index, best_x, best_ll, best_converged = index, x, ll, converged

    thetas = best_x[:c]
    phis = np.array([wrap_angle(v) for v in best_x[c:]])
    params = PolarParams(n_qubits, thetas, phis)
    state = params_to_state(params)
    fidelity_to_truth = None if true_state is None else fidelity(true_state, state)
    return TomographyResult(
        estimated_params=params,
        estimated_state=state,
        fidelity_to_truth=fidelity_to_truth,
        final_log_likelihood=best_ll,
        restarts_run=config.restarts,
        best_restart_index=best_index,
        converged=best_converged,
    )
