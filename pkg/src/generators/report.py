"""Generator for markdown run reports."""

from typing import Any, Dict, List, Optional, Sequence, Tuple

from jinja2 import Template

from ..schemas import GainReport, PumpConfig, SystemConfig
from ..templates.report_template import RUN_REPORT_TEMPLATE


def render_report(
    title: str,
    config: Dict[str, Any],
    outputs: Sequence[str],
    reports: Optional[Sequence[Tuple[str, GainReport]]] = None,
    findings: Optional[List[str]] = None,
    warnings: Optional[List[str]] = None,
) -> str:
    """Render the markdown report for one command run."""
    template = Template(RUN_REPORT_TEMPLATE)
    return template.render(
        title=title,
        config=config,
        outputs=list(outputs),
        reports=list(reports or []),
        findings=findings or [],
        warnings=warnings or [],
    )


def format_system(cfg: SystemConfig, pump: PumpConfig) -> Dict[str, str]:
    """Human-readable configuration summary in Hz."""
    return {
        "omega_e / 2pi": f"{cfg.omega_e_hz:.6g} Hz",
        "omega_g / 2pi": f"{cfg.omega_g_hz:.6g} Hz",
        "chi_e": f"{cfg.chi_e:.6g}",
        "chi_g": f"{cfg.chi_g:.6g}",
        "pump A0": f"{pump.amplitude_a0:.6g}",
        "pump nu / 2pi": f"{pump.nu_hz:.6g} Hz",
        "pump phi": f"{pump.phi:.6g} rad",
    }


def format_gain(report: GainReport) -> str:
    """One-line gain summary."""
    rate = report.gain_rate
    return (
        f"{report.branch.value}: Omega = {rate.re:.6g} + {rate.im:.6g}i rad/s, "
        f"{report.regime.value}, margin {report.threshold_margin:.4g}"
    )
