"""CLI entrypoint for the parametric wave lab."""

import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click
import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from .. import __version__
from ..config import configure_logging, settings
from ..errors import ConfigError, NumericError, ParametricError
from ..generators.figures import produce_figure
from ..generators.report import format_gain, format_system, render_report
from ..physics.analytic import classify_regime, dominant_branch, solve_branch
from ..physics.integrator import default_settings, integrate_envelope, integrate_full, max_step
from ..physics.model import resonant_gain_magnitude
from ..physics.quantum import (
    build_hamiltonian,
    coherent_state,
    evolve,
    gain_time,
    hermiticity_defect,
    truncation_convergence,
)
from ..schemas import (
    Branch,
    EnvelopeForm,
    EnvelopeSeries,
    InitialConditions,
    PumpConfig,
    QuantumConfigFile,
    RunConfigFile,
    RunManifest,
    SweepSpecFile,
    SystemConfig,
)
from ..sweep.engine import run_sweep
from ..tools.writers import (
    write_envelope_csv,
    write_grid_csv,
    write_json,
    write_manifest,
    write_time_series_csv,
    write_trajectory_csv,
)

console = Console()
logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
DEFAULT_GAIN_PERIODS = 2.0


def load_json_model(path: Path, model: Any) -> Any:
    """Parse a JSON config file into a pydantic model, raising ConfigError on any failure."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return model.model_validate(payload)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid configuration in {path}: {e}") from e


def resolve_out_dir(out: Optional[Path]) -> Path:
    out_dir = Path(out) if out is not None else settings.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def run_command(command: str, config: Dict[str, Any], body: Callable[[], List[str]], out_dir: Path) -> None:
    """Run a command body, map errors to exit codes and write the manifest last."""
    started = time.perf_counter()
    logger.info("Running %s into %s", command, out_dir)
    try:
        outputs = body()
    except (ConfigError, ValidationError) as e:
        console.print(f"[bold red]Configuration error:[/bold red] {e}")
        sys.exit(EXIT_CONFIG)
    except NumericError as e:
        console.print(f"[bold red]Numeric error:[/bold red] {e}")
        sys.exit(EXIT_NUMERIC)
    except ParametricError as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        sys.exit(EXIT_CONFIG)

    manifest = RunManifest(
        command=command,
        config=config,
        version=__version__,
        wall_time_s=time.perf_counter() - started,
        outputs=outputs,
    )
    write_manifest(out_dir, manifest)
    console.print(f"[bold green]Done.[/bold green] {len(outputs)} files written to {out_dir}/")
    for path in outputs:
        console.print(f"  - {path}")


def analytic_series(
    cfg: SystemConfig,
    pump: PumpConfig,
    init: InitialConditions,
    t_end: float,
    dt: Optional[float],
    sample_stride: int,
) -> EnvelopeSeries:
    """Closed-form fields of the branch nearest resonance, on the same grid the envelope mode uses."""
    spacing = (dt or max_step(cfg, pump)) * sample_stride
    n_samples = int(math.floor(t_end / spacing + 1e-9)) + 1
    times = spacing * np.arange(max(n_samples, 2))
    branch = dominant_branch(cfg, pump)
    env_e, env_g = solve_branch(cfg, pump, init, times, branch)
    form = EnvelopeForm.DPA if branch is Branch.DPA else EnvelopeForm.OPA
    return EnvelopeSeries(dt=spacing, envelope_e=env_e, envelope_g=env_g, form=form)


def quantum_horizon(qc: QuantumConfigFile) -> float:
    """Default horizon: one gain time of the configured couplings and pump."""
    horizon = gain_time(qc.chi_e.value, qc.chi_g.value, qc.pump.value)
    if math.isinf(horizon):
        raise ConfigError("t_end is required when the pump or couplings vanish")
    return horizon


def _write_report(out_dir: Path, title: str, config: Dict[str, Any], outputs: List[str], **kwargs: Any) -> str:
    path = out_dir / "report.md"
    path.write_text(render_report(title, config, outputs + ["report.md"], **kwargs), encoding="utf-8")
    return "report.md"


@click.group()
@click.option("--log-level", default=None, help="Logging level (defaults to PWL_LOG_LEVEL or INFO)")
@click.version_option(__version__, prog_name="pwl")
def cli(log_level: Optional[str]) -> None:
    """Simulate and analyse sum- and difference-frequency parametric amplification."""
    configure_logging(log_level)


seed_option = click.option("--seed", type=int, default=None, help="Reserved; the models are deterministic.")
out_option = click.option(
    "--out", "out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output directory (default: PWL_OUT_DIR)"
)


@cli.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--mode", type=click.Choice(["full", "envelope", "analytic"]), default="full", show_default=True)
@out_option
@seed_option
def simulate(config_path: Path, mode: str, out: Optional[Path], seed: Optional[int]) -> None:
    """Run one simulation from a JSON config (frequencies in Hz)."""
    out_dir = resolve_out_dir(out)
    snapshot: Dict[str, Any] = {"config_path": str(config_path), "mode": mode}

    def body() -> List[str]:
        run = load_json_model(config_path, RunConfigFile)
        snapshot["config"] = run.model_dump(mode="json")
        cfg, pump, init = run.to_system(), run.to_pump(), run.to_init()
        report = classify_regime(cfg, pump)
        console.print(f"[bold blue]{format_gain(report)}[/bold blue]")

        t_end = run.t_end_s
        if t_end is None:
            rate = resonant_gain_magnitude(cfg, pump.amplitude_a0)
            if rate == 0.0:
                raise ConfigError("t_end_s is required when the pump or couplings vanish")
            t_end = DEFAULT_GAIN_PERIODS * 2.0 * math.pi / rate
        integrator = default_settings(t_end, dt=run.dt_s, sample_stride=run.sample_stride)

        outputs = []
        if mode == "full":
            ts = integrate_full(cfg, pump, init, integrator)
            write_time_series_csv(out_dir / "timeseries.csv", ts)
        else:
            if mode == "envelope":
                series = integrate_envelope(cfg, pump, init, integrator, EnvelopeForm.DETUNED)
            else:
                series = analytic_series(cfg, pump, init, t_end, run.dt_s, run.sample_stride)
            write_time_series_csv(out_dir / "timeseries.csv", series.to_time_series())
            write_envelope_csv(out_dir / "envelope.csv", series)
            outputs.append("envelope.csv")
        outputs.insert(0, "timeseries.csv")
        write_json(out_dir / "gain_report.json", report)
        outputs.append("gain_report.json")
        outputs.append(
            _write_report(
                out_dir,
                f"Simulation ({mode})",
                format_system(cfg, pump),
                outputs,
                reports=[("run", report)],
            )
        )
        return outputs

    run_command("simulate", snapshot, body, out_dir)


@cli.command()
@click.argument("number", type=click.IntRange(2, 5))
@out_option
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker processes for sweeps")
@seed_option
def figure(number: int, out: Optional[Path], jobs: Optional[int], seed: Optional[int]) -> None:
    """Write the data behind one of the figure panels (2, 3, 4 or 5)."""
    out_dir = resolve_out_dir(out)
    workers = jobs or settings.jobs
    snapshot = {"figure": number, "jobs": workers}

    def body() -> List[str]:
        run = produce_figure(number, out_dir, workers)
        for finding in run.findings:
            console.print(f"  {finding}")
        return run.outputs + [
            _write_report(
                out_dir,
                f"Figure {number} data",
                {"figure": number},
                run.outputs,
                reports=run.reports,
                findings=run.findings,
            )
        ]

    run_command("figure", snapshot, body, out_dir)


@cli.command()
@click.argument("spec_path", type=click.Path(path_type=Path))
@click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker processes")
@out_option
@seed_option
def sweep(spec_path: Path, jobs: Optional[int], out: Optional[Path], seed: Optional[int]) -> None:
    """Run a parameter sweep from a JSON spec; output does not depend on --jobs."""
    out_dir = resolve_out_dir(out)
    snapshot: Dict[str, Any] = {"spec_path": str(spec_path)}

    def body() -> List[str]:
        spec_file = load_json_model(spec_path, SweepSpecFile)
        spec = spec_file.to_spec()
        snapshot["spec"] = spec_file.model_dump(mode="json")
        result = run_sweep(spec, jobs=jobs or settings.jobs)
        paths = write_grid_csv(out_dir / "grid.csv", result)
        outputs = [p.name for p in paths]

        table = Table(title="Sweep summary")
        table.add_column("Cells")
        table.add_column("Amplify")
        table.add_column("Errors")
        amplify = sum(1 for c in result.cells if c.label == "Amplify")
        table.add_row(str(len(result.cells)), str(amplify), str(len(result.errors)))
        console.print(table)

        warnings = [f"cell {c.index}: {c.error}" for c in result.errors]
        return outputs + [_write_report(out_dir, "Parameter sweep", {"cells": len(result.cells)}, outputs, warnings=warnings)]

    run_command("sweep", snapshot, body, out_dir)


@cli.command()
@click.argument("config_path", type=click.Path(path_type=Path))
@click.option("--nmax", type=click.IntRange(min=1), default=None, help="Fock cutoff per mode")
@click.option("--convergence", is_flag=True, help="Also compare against a doubled cutoff")
@out_option
@seed_option
def quantum(config_path: Path, nmax: Optional[int], convergence: bool, out: Optional[Path], seed: Optional[int]) -> None:
    """Evolve a coherent state under the generalized Hamiltonian and report its defect."""
    out_dir = resolve_out_dir(out)
    snapshot: Dict[str, Any] = {"config_path": str(config_path)}

    def body() -> List[str]:
        qc = load_json_model(config_path, QuantumConfigFile)
        n_max = nmax or qc.n_max
        t_end = qc.t_end if qc.t_end is not None else quantum_horizon(qc)
        snapshot["t_end"] = t_end
        snapshot["config"] = qc.model_dump(mode="json")
        snapshot["n_max"] = n_max
        op = build_hamiltonian(
            qc.chi_e.value, qc.chi_g.value, qc.pump.value, qc.omega_e, qc.omega_g, n_max, qc.nu
        )
        defect = hermiticity_defect(op)
        console.print(f"[bold blue]Hermiticity defect:[/bold blue] {defect:.6g}")
        trajectory = evolve(
            coherent_state(qc.alpha_e.value, qc.alpha_g.value, n_max),
            op,
            t_end,
            dt=qc.dt,
            sample_stride=qc.sample_stride,
        )
        write_trajectory_csv(out_dir / "trajectory.csv", trajectory)

        summary: Dict[str, Any] = {
            "n_max": n_max,
            "hermiticity_defect": defect,
            "max_abs_im_energy": float(abs(trajectory.energy.imag).max()),
            "final_norm": float(trajectory.norm[-1]),
            "initial_total_number": float(trajectory.total_number[0]),
            "final_total_number": float(trajectory.total_number[-1]),
        }
        if convergence:
            summary["truncation_convergence"] = truncation_convergence(
                qc.chi_e.value,
                qc.chi_g.value,
                qc.pump.value,
                qc.omega_e,
                qc.omega_g,
                n_max,
                qc.alpha_e.value,
                qc.alpha_g.value,
                t_end,
                qc.nu,
            )
        write_json(out_dir / "defect_report.json", summary)
        outputs = ["trajectory.csv", "defect_report.json"]
        findings = [f"{key}: {value}" for key, value in summary.items()]
        return outputs + [_write_report(out_dir, "Quantum evolution", snapshot["config"], outputs, findings=findings)]

    run_command("quantum", snapshot, body, out_dir)


if __name__ == "__main__":
    cli()
