"""HTTP/JSON facade over the experiment runner.

Endpoints:
  POST /api/v1/tomography/run  -- validate a RunRequest, execute, return
                                  the report plus display-ready helpers
  GET  /api/v1/health          -- static liveness payload
  GET  /schemas/{name}         -- published JSON schemas

The service is stateless; every response is reproducible from the request
body alone.  Invalid input yields a structured error body
{"error": {"code": ..., "message": ...}} with a 4xx status.
"""

from __future__ import annotations

import json
import logging
import time
import uuid
from importlib import resources
from typing import Any, Mapping

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .estimator import OptimizerConfig
from .experiment import ExperimentReport, ExperimentSpec, run_experiment
from .measurement import PauliString, enumerate_settings
from .serialize import report_to_json
from .statemodel import TWO_PI, PolarParams, wrap_angle

logger = logging.getLogger("tomolens.service")

# Dense simulation cost grows as 16**n; keep interactive requests small.
MAX_SERVICE_QUBITS = 4
MAX_SHOTS_PER_SETTING = 100_000_000

DEG_PER_RAD = 180.0 / np.pi


class RequestError(Exception):
    """Validation failure with a machine-readable code."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _bad(code: str, message: str) -> RequestError:
    return RequestError(400, code, message)


def _require_int(value: Any, code: str, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _bad(code, f"{name} must be an integer, got {value!r}")
    return value


def _require_angle_list(value: Any, count: int, name: str) -> list[float]:
    if not isinstance(value, list) or len(value) != count:
        raise _bad("invalid_params", f"{name} must be a list of {count} numbers")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise _bad("invalid_params", f"{name} entries must be numbers, got {item!r}")
        out.append(float(item))
    return out


def _parse_settings(value: Any, n_qubits: int) -> list[PauliString]:
    if not isinstance(value, list) or not value:
        raise _bad("invalid_setting", "settings must be a non-empty list of Pauli strings")
    parsed = []
    seen = set()
    for item in value:
        if not isinstance(item, str):
            raise _bad("invalid_setting", f"settings entries must be strings, got {item!r}")
        try:
            setting = PauliString.from_str(item)
        except ValueError as exc:
            raise _bad("invalid_setting", f"bad setting {item!r}: {exc}") from exc
        if setting.n_qubits != n_qubits:
            raise _bad(
                "invalid_setting",
                f"setting {item!r} has {setting.n_qubits} qubits, expected {n_qubits}",
            )
        if setting in seen:
            raise _bad("invalid_setting", f"duplicate setting {item!r}")
        seen.add(setting)
        parsed.append(setting)
    return parsed


def _parse_shot_count(value: Any, name: str) -> int:
    shots = _require_int(value, "invalid_shot_count", name)
    if shots < 0:
        raise _bad("invalid_shot_count", f"{name} must be >= 0, got {shots}")
    if shots > MAX_SHOTS_PER_SETTING:
        raise _bad(
            "invalid_shot_count",
            f"{name} exceeds the per-setting limit of {MAX_SHOTS_PER_SETTING}",
        )
    return shots


def _parse_optimizer(value: Any, default_seed: int) -> OptimizerConfig:
    defaults = OptimizerConfig(seed=default_seed)
    if value is None:
        return defaults
    if not isinstance(value, Mapping):
        raise _bad("invalid_optimizer", "optimizer must be an object")
    allowed = {"restarts", "max_iterations", "gradient_step", "convergence_tol", "seed"}
    unknown = set(value) - allowed
    if unknown:
        raise _bad("invalid_optimizer", f"unknown optimizer fields: {sorted(unknown)}")
    merged = {
        "restarts": value.get("restarts", defaults.restarts),
        "max_iterations": value.get("max_iterations", defaults.max_iterations),
        "gradient_step": value.get("gradient_step", defaults.gradient_step),
        "convergence_tol": value.get("convergence_tol", defaults.convergence_tol),
        "seed": value.get("seed", defaults.seed),
    }
    try:
        return OptimizerConfig(
            restarts=int(merged["restarts"]),
            max_iterations=int(merged["max_iterations"]),
            gradient_step=float(merged["gradient_step"]),
            convergence_tol=float(merged["convergence_tol"]),
            seed=int(merged["seed"]),
        )
    except (TypeError, ValueError) as exc:
        raise _bad("invalid_optimizer", f"bad optimizer config: {exc}") from exc


def parse_run_request(body: Any) -> tuple[ExperimentSpec, str]:
    """Validate a RunRequest body into an ExperimentSpec plus the unit the
    caller wants angles reported in."""
    if not isinstance(body, Mapping):
        raise _bad("malformed_request", "request body must be a JSON object")

    n_qubits = _require_int(body.get("n_qubits"), "invalid_n_qubits", "n_qubits")
    if not 1 <= n_qubits <= MAX_SERVICE_QUBITS:
        raise _bad(
            "invalid_n_qubits",
            f"n_qubits must lie in [1, {MAX_SERVICE_QUBITS}], got {n_qubits}",
        )

    angle_unit = body.get("angle_unit", "deg")
    if angle_unit not in ("deg", "rad"):
        raise _bad("invalid_angle_unit", f"angle_unit must be 'deg' or 'rad', got {angle_unit!r}")
    theta_max = 180.0 if angle_unit == "deg" else float(np.pi)
    phi_max = 360.0 if angle_unit == "deg" else TWO_PI

    c = 2**n_qubits - 1
    thetas = _require_angle_list(body.get("thetas"), c, "thetas")
    phis = _require_angle_list(body.get("phis"), c, "phis")
    for value in thetas:
        if not 0.0 <= value <= theta_max:
            raise _bad("invalid_angle", f"theta {value} outside [0, {theta_max}]")
    for value in phis:
        if not 0.0 <= value < phi_max:
            raise _bad("invalid_angle", f"phi {value} outside [0, {phi_max})")
    if angle_unit == "deg":
        thetas = [np.deg2rad(v) for v in thetas]
        phis = [np.deg2rad(v) for v in phis]
    thetas = [min(max(v, 0.0), float(np.pi)) for v in thetas]
    phis = [wrap_angle(v) for v in phis]

    shots = body.get("shots")
    if isinstance(shots, Mapping):
        if "settings" in body:
            raise _bad(
                "invalid_setting",
                "give either a shots map or a settings list, not both",
            )
        if not shots:
            raise _bad("invalid_shot_count", "shots map is empty")
        plan = {}
        for key, raw in shots.items():
            try:
                setting = PauliString.from_str(str(key))
            except ValueError as exc:
                raise _bad("invalid_setting", f"bad setting {key!r}: {exc}") from exc
            if setting.n_qubits != n_qubits:
                raise _bad(
                    "invalid_setting",
                    f"setting {key!r} has {setting.n_qubits} qubits, expected {n_qubits}",
                )
            if setting in plan:
                raise _bad("invalid_setting", f"duplicate setting {key!r}")
            plan[setting] = _parse_shot_count(raw, f"shots[{key}]")
    else:
        per_setting = _parse_shot_count(shots, "shots")
        if "settings" in body:
            settings = _parse_settings(body["settings"], n_qubits)
        else:
            settings = enumerate_settings(n_qubits)
        plan = {setting: per_setting for setting in settings}
    if all(count == 0 for count in plan.values()):
        raise RequestError(422, "empty_shot_plan", "every setting has zero shots")

    seed = body.get("seed", 0)
    seed = _require_int(seed, "invalid_seed", "seed")
    if seed < 0:
        raise _bad("invalid_seed", f"seed must be >= 0, got {seed}")

    optimizer = _parse_optimizer(body.get("optimizer"), default_seed=seed)

    known = {
        "n_qubits",
        "angle_unit",
        "thetas",
        "phis",
        "settings",
        "shots",
        "seed",
        "optimizer",
    }
    unknown = set(body) - known
    if unknown:
        raise _bad("unknown_field", f"unknown request fields: {sorted(unknown)}")

    spec = ExperimentSpec(
        n_qubits=n_qubits,
        true_params=PolarParams(n_qubits, thetas, phis),
        shot_plan=tuple(plan.items()),
        seed=seed,
        optimizer=optimizer,
    )
    return spec, angle_unit


def _angles_out(values, unit: str) -> list[float]:
    if unit == "deg":
        return [float(v) * DEG_PER_RAD for v in values]
    return [float(v) for v in values]


def build_run_response(
    report: ExperimentReport, angle_unit: str, elapsed_ms: float
) -> dict[str, Any]:
    """Report plus the three display payloads the explorer renders:
    Bloch triples, parameter bars, and the fidelity gauge value."""
    c = 2**report.spec.n_qubits - 1
    labels = [f"theta_{i + 1}" for i in range(c)] + [f"phi_{i + 1}" for i in range(c)]
    true_values = _angles_out(report.spec.true_params.thetas, angle_unit)
    true_values += _angles_out(report.spec.true_params.phis, angle_unit)
    estimated = _angles_out(report.result.estimated_params.thetas, angle_unit)
    estimated += _angles_out(report.result.estimated_params.phis, angle_unit)
    return {
        "report": report_to_json(report),
        "display": {
            "bloch_true": [[v.x, v.y, v.z] for v in report.bloch_true],
            "bloch_estimated": [[v.x, v.y, v.z] for v in report.bloch_estimated],
            "parameter_bars": {
                "unit": angle_unit,
                "labels": labels,
                "true_values": true_values,
                "estimated_values": estimated,
            },
            "fidelity": float(report.fidelity),
            "warnings": list(report.warnings),
        },
        "elapsed_ms": elapsed_ms,
    }


def _schema_text(name: str) -> str:
    return resources.files("tomolens").joinpath("schemas", name).read_text()


def create_app() -> FastAPI:
    app = FastAPI(title="tomolens", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def access_log(request: Request, call_next):
        started = time.perf_counter()
        response = await call_next(request)
        elapsed = (time.perf_counter() - started) * 1000.0
        logger.info(
            "method=%s path=%s status=%d elapsed_ms=%.2f seed=%s",
            request.method,
            request.url.path,
            response.status_code,
            elapsed,
            getattr(request.state, "seed", "-"),
        )
        return response

    @app.exception_handler(RequestError)
    async def on_request_error(request: Request, exc: RequestError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "error": {"code": "malformed_request", "message": "body is not a JSON object"}
            },
        )

    @app.exception_handler(Exception)
    async def on_internal_error(request: Request, exc: Exception):
        correlation_id = uuid.uuid4().hex
        logger.exception("internal error, correlation_id=%s", correlation_id)
        return JSONResponse(
            status_code=500,
            content={
                "error": {
                    "code": "internal_error",
                    "message": "internal error",
                    "correlation_id": correlation_id,
                }
            },
        )

    @app.get("/api/v1/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.post("/api/v1/tomography/run")
    def run_tomography(payload: dict, request: Request) -> JSONResponse:
        started = time.perf_counter()
        spec, angle_unit = parse_run_request(payload)
        request.state.seed = spec.seed
        report = run_experiment(spec)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return JSONResponse(build_run_response(report, angle_unit, elapsed_ms))

    @app.get("/schemas/{name}")
    def schema(name: str) -> JSONResponse:
        if name not in ("run_request.schema.json", "run_response.schema.json"):
            raise RequestError(404, "unknown_schema", f"no schema named {name!r}")
        return JSONResponse(json.loads(_schema_text(name)))

    return app


app = create_app()
