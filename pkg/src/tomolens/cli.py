"""Batch command-line front end: seeded runs, fidelity sweeps, serving.

Exit codes: 0 success, 1 internal error, 2 flag/validation error.
"""

from __future__ import annotations

import csv
import io
import os
import sys

import click
import numpy as np

from .estimator import OptimizerConfig
from .experiment import ExperimentReport, ExperimentSpec, run_experiment
from .measurement import STREAM_TRIALS, PauliString, enumerate_settings, rng_stream
from .serialize import dumps_canonical, report_to_json
from .statemodel import TWO_PI, PolarParams, random_params, wrap_angle

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8000

SWEEP_HEADER = ["shots", "trial", "seed", "fidelity", "theta_error", "phi_error"]

DEG_PER_RAD = 180.0 / np.pi


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise click.UsageError(f"{flag} must be a comma-separated list of numbers, got {text!r}")


def _parse_angles(
    theta_text: str, phi_text: str, n_qubits: int, angle_unit: str
) -> PolarParams:
    c = 2**n_qubits - 1
    thetas = _parse_float_list(theta_text, "--theta")
    phis = _parse_float_list(phi_text, "--phi")
    if len(thetas) != c or len(phis) != c:
        raise click.UsageError(
            f"--theta and --phi need {c} value(s) each for {n_qubits} qubit(s), "
            f"got {len(thetas)} and {len(phis)}"
        )
    theta_max = 180.0 if angle_unit == "deg" else float(np.pi)
    phi_max = 360.0 if angle_unit == "deg" else TWO_PI
    for value in thetas:
        if not 0.0 <= value <= theta_max:
            raise click.UsageError(f"--theta value {value} outside [0, {theta_max}]")
    for value in phis:
        if not 0.0 <= value < phi_max:
            raise click.UsageError(f"--phi value {value} outside [0, {phi_max})")
    if angle_unit == "deg":
        thetas = [np.deg2rad(v) for v in thetas]
        phis = [np.deg2rad(v) for v in phis]
    # Unit conversion can overshoot the closed bounds by a few ulp.
    thetas = [min(max(v, 0.0), float(np.pi)) for v in thetas]
    phis = [wrap_angle(v) for v in phis]
    return PolarParams(n_qubits, thetas, phis)


def _parse_settings_flag(text: str, n_qubits: int) -> list[PauliString]:
    settings = []
    for part in text.split(","):
        part = part.strip()
        try:
            setting = PauliString.from_str(part)
        except ValueError as exc:
            raise click.UsageError(f"bad setting {part!r}: {exc}")
        if setting.n_qubits != n_qubits:
            raise click.UsageError(
                f"setting {part!r} has {setting.n_qubits} qubit(s), expected {n_qubits}"
            )
        if setting in settings:
            raise click.UsageError(f"duplicate setting {part!r}")
        settings.append(setting)
    return settings


def _parse_shot_plan(
    shots_text: str, settings_text: str | None, n_qubits: int
) -> dict[PauliString, int]:
    counts = []
    for part in shots_text.split(","):
        try:
            count = int(part)
        except ValueError:
            raise click.UsageError(f"--shots entries must be integers, got {part!r}")
        if count < 0:
            raise click.UsageError(f"--shots entries must be >= 0, got {count}")
        counts.append(count)

    if len(counts) == 3 and n_qubits == 1:
        if settings_text is not None:
            raise click.UsageError("give either per-basis --shots Nx,Ny,Nz or --settings, not both")
        bases = [PauliString.from_str(b) for b in ("X", "Y", "Z")]
        return dict(zip(bases, counts))
    if len(counts) != 1:
        raise click.UsageError(
            "--shots takes one per-setting count (or Nx,Ny,Nz for a single qubit)"
        )

    if settings_text is None:
        settings = enumerate_settings(n_qubits)
    else:
        settings = _parse_settings_flag(settings_text, n_qubits)
    return {setting: counts[0] for setting in settings}


def _build_spec(
    n_qubits: int,
    params: PolarParams,
    plan: dict[PauliString, int],
    seed: int,
    restarts: int,
) -> ExperimentSpec:
    if seed < 0:
        raise click.UsageError(f"--seed must be >= 0, got {seed}")
    if restarts < 1:
        raise click.UsageError(f"--restarts must be >= 1, got {restarts}")
    try:
        return ExperimentSpec(
            n_qubits=n_qubits,
            true_params=params,
            shot_plan=tuple(plan.items()),
            seed=seed,
            optimizer=OptimizerConfig(restarts=restarts, seed=seed),
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _angle_out(value: float, unit: str) -> float:
    return value * DEG_PER_RAD if unit == "deg" else value


def _format_table(report: ExperimentReport, angle_unit: str) -> str:
    c = 2**report.spec.n_qubits - 1
    lines = []
    lines.append(f"fidelity            {report.fidelity:.6f}")
    lines.append(f"log_likelihood      {report.result.final_log_likelihood:.6f}")
    lines.append(f"converged           {str(report.result.converged).lower()}")
    lines.append(f"seed                {report.spec.seed}")
    suffix = "deg" if angle_unit == "deg" else "rad"
    for i in range(c):
        true_v = _angle_out(float(report.spec.true_params.thetas[i]), angle_unit)
        est_v = _angle_out(float(report.result.estimated_params.thetas[i]), angle_unit)
        lines.append(f"theta_{i + 1} ({suffix})       true {true_v:10.4f}   est {est_v:10.4f}")
    for i in range(c):
        true_v = _angle_out(float(report.spec.true_params.phis[i]), angle_unit)
        est_v = _angle_out(float(report.result.estimated_params.phis[i]), angle_unit)
        lines.append(f"phi_{i + 1} ({suffix})         true {true_v:10.4f}   est {est_v:10.4f}")
    for warning in report.warnings:
        lines.append(f"warning             {warning}")
    return "\n".join(lines)


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        click.echo(text)
    else:
        with open(out_path, "w") as handle:
            handle.write(text)
            handle.write("\n")


def circular_error(a: float, b: float) -> float:
    """Shortest angular distance mod 2*pi, in radians."""
    diff = abs(a - b) % TWO_PI
    return min(diff, TWO_PI - diff)


@click.group()
def main() -> None:
    """Simulate Pauli measurements on a pure state and reconstruct it by
    maximum likelihood."""


@main.command()
@click.option("--qubits", "n_qubits", type=int, default=1, show_default=True, help="Number of qubits.")
@click.option("--theta", "theta_text", required=True, help="True polar angles, comma-separated.")
@click.option("--phi", "phi_text", required=True, help="True phases, comma-separated.")
@click.option("--angle-unit", type=click.Choice(["deg", "rad"]), default="deg", show_default=True)
@click.option("--shots", "shots_text", required=True, help="Shots per setting, or Nx,Ny,Nz for one qubit.")
@click.option("--settings", "settings_text", default=None, help="Comma list of Pauli strings (default: all).")
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed for sampling and restarts.")
@click.option("--restarts", type=int, default=8, show_default=True, help="Optimizer restarts.")
@click.option("--output", type=click.Choice(["json", "table"]), default="json", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), default=None, help="Write to a file instead of stdout.")
def run(
    n_qubits: int,
    theta_text: str,
    phi_text: str,
    angle_unit: str,
    shots_text: str,
    settings_text: str | None,
    seed: int,
    restarts: int,
    output: str,
    out_path: str | None,
) -> None:
    """Run one seeded experiment and print or save the report."""
    if n_qubits < 1:
        raise click.UsageError(f"--qubits must be >= 1, got {n_qubits}")
    params = _parse_angles(theta_text, phi_text, n_qubits, angle_unit)
    plan = _parse_shot_plan(shots_text, settings_text, n_qubits)
    spec = _build_spec(n_qubits, params, plan, seed, restarts)
    try:
        report = run_experiment(spec)
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if output == "json":
        _emit(dumps_canonical(report_to_json(report)), out_path)
    else:
        _emit(_format_table(report, angle_unit), out_path)


@main.command()
@click.option("--qubits", "n_qubits", type=int, default=1, show_default=True, help="Number of qubits.")
@click.option("--trials", type=int, required=True, help="Random true states per shot budget.")
@click.option("--shots-grid", "grid_text", required=True, help="Comma list of per-setting shot budgets.")
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed for the trial streams.")
@click.option("--restarts", type=int, default=8, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), default=None, help="Write CSV to a file instead of stdout.")
def sweep(
    n_qubits: int,
    trials: int,
    grid_text: str,
    seed: int,
    restarts: int,
    out_path: str | None,
) -> None:
    """Fidelity statistics over random true states and a shot-budget grid.

    CSV columns: shots,trial,seed,fidelity,theta_error,phi_error with
    angle errors in radians (phi errors circular); for multi-qubit runs
    the errors are the worst component.
    """
    if n_qubits < 1:
        raise click.UsageError(f"--qubits must be >= 1, got {n_qubits}")
    if trials < 1:
        raise click.UsageError(f"--trials must be >= 1, got {trials}")
    if seed < 0:
        raise click.UsageError(f"--seed must be >= 0, got {seed}")
    budgets = []
    for part in grid_text.split(","):
        try:
            budget = int(part)
        except ValueError:
            raise click.UsageError(f"--shots-grid entries must be integers, got {part!r}")
        if budget < 1:
            raise click.UsageError(f"--shots-grid entries must be >= 1, got {budget}")
        budgets.append(budget)

    # One stream per trial: first the true parameters, then the run seed,
    # so every budget sees the same trial states.
    truths = []
    for trial in range(trials):
        stream = rng_stream(seed, STREAM_TRIALS, trial)
        truths.append((random_params(n_qubits, stream), int(stream.integers(0, 2**62))))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    try:
        for budget in budgets:
            for trial, (true_params, trial_seed) in enumerate(truths):
                plan = {s: budget for s in enumerate_settings(n_qubits)}
                spec = ExperimentSpec(
                    n_qubits=n_qubits,
                    true_params=true_params,
                    shot_plan=tuple(plan.items()),
                    seed=trial_seed,
                    optimizer=OptimizerConfig(restarts=restarts, seed=trial_seed),
                )
                report = run_experiment(spec)
                estimated = report.result.estimated_params
                theta_error = float(
                    np.max(np.abs(estimated.thetas - true_params.thetas))
                )
                phi_error = max(
                    circular_error(float(a), float(b))
                    for a, b in zip(estimated.phis, true_params.phis)
                )
                writer.writerow(
                    [
                        budget,
                        trial,
                        trial_seed,
                        repr(report.fidelity),
                        repr(theta_error),
                        repr(phi_error),
                    ]
                )
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    _emit(buffer.getvalue().rstrip("\n"), out_path)


def resolve_bind(
    addr_flag: str | None, port_flag: int | None, env_value: str | None
) -> tuple[str, int]:
    """Pick the bind host/port: defaults, then TOMOLENS_ADDR, then flags."""
    host, port = DEFAULT_HOST, DEFAULT_PORT
    if env_value:
        env_value = env_value.strip()
        if ":" in env_value:
            env_host, env_port = env_value.rsplit(":", 1)
            if env_host:
                host = env_host
            try:
                port = int(env_port)
            except ValueError:
                raise click.UsageError(f"TOMOLENS_ADDR has a bad port: {env_value!r}")
        elif env_value:
            host = env_value
    if addr_flag is not None:
        host = addr_flag
    if port_flag is not None:
        port = port_flag
    if not 0 < port < 65536:
        raise click.UsageError(f"port must lie in [1, 65535], got {port}")
    return host, port


@main.command()
@click.option("--addr", "addr_flag", default=None, help=f"Bind host (default {DEFAULT_HOST}; TOMOLENS_ADDR overrides, flag wins).")
@click.option("--port", "port_flag", type=int, default=None, help=f"Bind port (default {DEFAULT_PORT}).")
def serve(addr_flag: str | None, port_flag: int | None) -> None:
    """Serve the HTTP API."""
    host, port = resolve_bind(addr_flag, port_flag, os.environ.get("TOMOLENS_ADDR"))
    import uvicorn

    from .service import create_app

    try:
        uvicorn.run(create_app(), host=host, port=port, log_level="info")
    except OSError as exc:
        click.echo(f"error: cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(1)
    except SystemExit as exc:
        if exc.code not in (0, None):
            click.echo(f"error: server failed to start on {host}:{port}", err=True)
            sys.exit(1)


if __name__ == "__main__":
    main()
