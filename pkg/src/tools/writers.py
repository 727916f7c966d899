"""CSV and JSON writers for simulation outputs.

Floats are written with a fixed number of significant digits and no
timestamps, so re-running a command reproduces its data files byte for byte.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..config import settings
from ..schemas import (
    TWO_PI,
    DpaWindows,
    EnergyFlow,
    EnvelopeSeries,
    QuantumTrajectory,
    RunManifest,
    Spectrum,
    SweepParameter,
    SweepResult,
    TimeSeries,
)

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def format_float(value: Optional[float], digits: Optional[int] = None) -> str:
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits or settings.float_digits}g}"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows, formatting floats; strings and ints pass through."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format_float(v) if isinstance(v, (float, np.floating)) or v is None else v for v in row]
            )
    logger.debug("Wrote %s", path)
    return path


def write_time_series_csv(path: Path, ts: TimeSeries) -> Path:
    header = ["t", "E_e", "E_g"]
    columns = [ts.times, ts.samples_e, ts.samples_g]
    if ts.has_velocity:
        header += ["dEe_dt", "dEg_dt"]
        columns += [ts.velocity_e, ts.velocity_g]
    return write_csv(path, header, zip(*(c.tolist() for c in columns)))


def write_envelope_csv(path: Path, series: EnvelopeSeries) -> Path:
    return write_csv(
        path,
        ["t", "re_Ee", "im_Ee", "re_Eg", "im_Eg"],
        zip(
            series.times.tolist(),
            series.envelope_e.real.tolist(),
            series.envelope_e.imag.tolist(),
            series.envelope_g.real.tolist(),
            series.envelope_g.imag.tolist(),
        ),
    )


def write_spectrum_csv(path: Path, spectrum: Spectrum) -> Path:
    return write_csv(path, ["freq_hz", "magnitude"], zip(spectrum.freq_hz.tolist(), spectrum.magnitude.tolist()))


def write_energy_flow_csv(
    path: Path,
    flow: EnergyFlow,
    coarse_e: Optional[np.ndarray] = None,
    coarse_g: Optional[np.ndarray] = None,
) -> Path:
    header = ["t", "dWe_dt", "dWg_dt", "W_e", "W_g"]
    columns = [flow.times, flow.flow_e, flow.flow_g, flow.work_e, flow.work_g]
    if coarse_e is not None and coarse_g is not None:
        header += ["dWe_dt_coarse", "dWg_dt_coarse"]
        columns += [coarse_e, coarse_g]
    return write_csv(path, header, zip(*(np.asarray(c).tolist() for c in columns)))


def write_trajectory_csv(path: Path, trajectory: QuantumTrajectory) -> Path:
    return write_csv(
        path,
        ["t", "re_ae", "im_ae", "re_ag", "im_ag", "re_H", "im_H", "norm"],
        zip(
            trajectory.times.tolist(),
            trajectory.a_e.real.tolist(),
            trajectory.a_e.imag.tolist(),
            trajectory.a_g.real.tolist(),
            trajectory.a_g.imag.tolist(),
            trajectory.energy.real.tolist(),
            trajectory.energy.imag.tolist(),
            trajectory.norm.tolist(),
        ),
    )


def write_windows_csv(path: Path, windows: DpaWindows, wavelength_g: float) -> Path:
    rows: List[List[Any]] = []
    for w in windows.bracketed:
        rows.append(["bracketed", w.m, w.start / wavelength_g, w.end / wavelength_g])
    for w in windows.exact:
        rows.append(["exact", "", w.start / wavelength_g, w.end / wavelength_g])
    return write_csv(path, ["kind", "m", "start_over_lambda_g", "end_over_lambda_g"], rows)


def _axis_column(parameter: SweepParameter) -> str:
    return "x_r_over_lambda_g" if parameter is SweepParameter.X_R else parameter.value


def write_grid_csv(path: Path, result: SweepResult) -> List[Path]:
    """Grid CSV plus a JSON sidecar holding the spec and any cell errors."""
    spec = result.spec
    wavelength_g = TWO_PI * spec.cavity.wave_speed / spec.cavity.omega_g if spec.cavity else 1.0

    def scaled(parameter: Optional[SweepParameter], value: Optional[float]) -> Optional[float]:
        if parameter is SweepParameter.X_R and value is not None:
            return value / wavelength_g
        return value

    header = [
        _axis_column(spec.axis1.parameter),
        _axis_column(spec.axis2.parameter) if spec.axis2 else "axis2",
        "metric",
        "regime",
    ]
    rows = [
        [
            scaled(spec.axis1.parameter, cell.axis1_value),
            scaled(spec.axis2.parameter if spec.axis2 else None, cell.axis2_value),
            cell.metric,
            cell.label,
        ]
        for cell in result.cells
    ]
    csv_path = write_csv(path, header, rows)
    sidecar = {
        "spec": spec.model_dump(mode="json"),
        "errors": [{"index": c.index, "error": c.error} for c in result.errors],
        "simulated_amplify": [c.simulated_amplify for c in result.cells],
    }
    json_path = write_json(path.with_suffix(".json"), sidecar)
    return [csv_path, json_path]


def write_json(path: Path, payload: Any) -> Path:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_manifest(out_dir: Path, manifest: RunManifest) -> Path:
    """Write the manifest; callers do this last, after every listed output exists."""
    missing = [p for p in manifest.outputs if not (out_dir / p).exists()]
    if missing:
        raise FileNotFoundError(f"manifest lists missing outputs: {missing}")
    return write_json(out_dir / MANIFEST_NAME, manifest)
