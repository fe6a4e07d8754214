"""
Report Generator: CSV Tables, Run Summaries, Structured Reports

Turns computed results into files and text:
- Evolution CSV (the contract for downstream plotting): 17 significant
  digits, '.' decimal separator, '\\n' line endings, UTF-8
- Markdown run summary saved next to the CSV
- JSON documents for current observables and channel diagnostics
  (complex numbers as [re, im]); parse-safe round trip
- Verification report lines
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from scenario_config import ScenarioConfig, encode_matrix

CSV_FLOAT_FORMAT = '%.17g'


@dataclass
class RunReport:
    """Sampled rows plus an end-of-run summary."""

    rows: pd.DataFrame
    summary: dict = field(default_factory=dict)


def csv_columns(dim: int, projection_names: list[str], current_labels: list[str]) -> list[str]:
    """t,[x,y,z,]pop:<name>...,cur:<channel>:<proj>...,trace_err,min_eig"""
    columns = ['t']
    if dim == 2:
        columns += ['x', 'y', 'z']
    columns += [f'pop:{name}' for name in projection_names]
    columns += [f'cur:{label}' for label in current_labels]
    columns += ['trace_err', 'min_eig']
    return columns


class ReportGenerator:
    """Writes run outputs and renders structured reports."""

    REPORT_DIR = Path('reports')

    def __init__(self, report_dir: Optional[Path] = None):
        """
        Args:
            report_dir: Where default-named outputs go (default: reports/)
        """
        self.report_dir = Path(report_dir) if report_dir is not None else self.REPORT_DIR

    def default_csv_path(self, config: ScenarioConfig) -> Path:
        return self.report_dir / f"{config.name}.csv"

    # ===== CSV =====

    def write_csv(self, run: RunReport, path) -> Path:
        """
        Write the sampled rows.

        Formatting is locale independent (%-formatting), so identical runs
        produce byte-identical files.
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        run.rows.to_csv(
            path,
            index=False,
            float_format=CSV_FLOAT_FORMAT,
            lineterminator='\n',
            encoding='utf-8',
        )
        return path

    # ===== Markdown run summary =====

    def generate_run_report(self, run: RunReport, config: ScenarioConfig, csv_path: Path) -> str:
        """Assemble the Markdown summary of one evolution run."""
        report = self._build_header(config)
        report += self._build_model_section(config)
        report += self._build_summary_section(run)
        report += self._build_diagnostics_section(run, csv_path)
        report += self._build_footer()
        return report

    def _build_header(self, config: ScenarioConfig) -> str:
        return f"""# Relaxation Current Run - {config.name}

*Method: {config.method} | t_final = {config.schedule.t_final:g} | dt = {config.schedule.dt:g} | sample every {config.schedule.sample_every} steps*

---

"""

    def _build_model_section(self, config: ScenarioConfig) -> str:
        channel_lines = '\n'.join(
            f"- **{c.name}**: rate {c.rate:g}" for c in config.model.channels
        ) or "- (none, purely unitary)"
        projection_lines = ', '.join(f"`{name}`" for name, _ in config.projections) or "none"
        return f"""## Model

- **Dimension:** {config.model.dim}
- **Tracked projections:** {projection_lines}

### Channels

{channel_lines}

---

"""

    def _build_summary_section(self, run: RunReport) -> str:
        s = run.summary
        lines = [
            f"- **Samples:** {len(run.rows)}",
            f"- **Final time:** {s.get('final_time', float('nan')):g}",
        ]
        if s.get('final_bloch') is not None:
            x, y, z = s['final_bloch']
            lines.append(f"- **Final Bloch vector:** ({x:.6f}, {y:.6f}, {z:.6f})")
        if s.get('stationary_bloch') is not None:
            x, y, z = s['stationary_bloch']
            lines.append(f"- **Stationary Bloch vector:** ({x:.6f}, {y:.6f}, {z:.6f})")
        if s.get('stationary_populations'):
            pops = ', '.join(f"{name} = {value:.6f}" for name, value in s['stationary_populations'].items())
            lines.append(f"- **Stationary populations:** {pops}")
        if s.get('analytic_max_error') is not None:
            lines.append(f"- **Max Bloch error vs closed form:** {s['analytic_max_error']:.3e}")
        body = '\n'.join(lines)
        return f"""## Summary

{body}

---

"""

    def _build_diagnostics_section(self, run: RunReport, csv_path: Path) -> str:
        s = run.summary
        status = "✅" if s.get('max_trace_error', 0) <= 1e-9 and s.get('min_eigenvalue', 0) >= -1e-10 else "⚠️"
        extra = ''.join(f"\n- **{key}:** {value}" for key, value in sorted(s.get('diagnostics', {}).items()))
        return f"""## Diagnostics {status}

- **Max trace error:** {s.get('max_trace_error', float('nan')):.3e}
- **Min eigenvalue:** {s.get('min_eigenvalue', float('nan')):.3e}{extra}
- **CSV:** `{csv_path}`

---

"""

    def _build_footer(self) -> str:
        return """## Notes

- `pop:<name>` is Tr(rho P); `cur:<channel>:<name>` is the Born-rule value of rate * D*(B, P)
- Trace is never renormalized and eigenvalues are never clipped; drift is reported above

---

*Report generated by Relaxation Current Lab*
"""

    def save_report(self, content: str, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding='utf-8')
        return path

    # ===== Structured (JSON) reports =====

    @staticmethod
    def render_json(document: dict) -> str:
        """Parse-safe text: floats in repr form, fixed key order."""
        return json.dumps(_jsonable(document), indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def encode_matrix(m) -> list:
        return encode_matrix(m)

    # ===== Verification =====

    @staticmethod
    def format_check(suite: str, invariant: str, passed: bool, metric: str) -> str:
        return f"{'PASS' if passed else 'FAIL'} {suite}: {invariant} {metric}"


def _jsonable(value):
    """numpy scalars/arrays to plain JSON values; complex arrays as [re, im] pairs."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return encode_matrix(value) if value.ndim == 2 else [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in value]
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value) + 0.0
    if isinstance(value, complex):
        return [value.real + 0.0, value.imag + 0.0]
    return value
