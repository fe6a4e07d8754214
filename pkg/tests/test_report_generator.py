import json

import numpy as np
import pandas as pd
import pytest

from report_generator import ReportGenerator, RunReport, csv_columns
from scenario_config import load_config


@pytest.fixture
def run():
    rows = pd.DataFrame(
        [[0.0, 0.0, 0.0, -1.0, 0.0, 0.3, 0.0, 0.0], [0.1, 0.01, -0.02, -0.97, 0.015, 0.29, 1e-17, -2e-18]],
        columns=csv_columns(2, ["ground"], ["radiative:ground"]),
    )
    summary = {
        'final_time': 0.1,
        'final_bloch': (0.01, -0.02, -0.97),
        'stationary_bloch': (0.0, 0.0, 0.5),
        'stationary_populations': {'ground': 0.75},
        'max_trace_error': 1e-17,
        'min_eigenvalue': -2e-18,
        'analytic_max_error': 3e-12,
        'diagnostics': {'method': 'rk4', 'steps': 100},
    }
    return RunReport(rows=rows, summary=summary)


class TestColumns:
    def test_qubit_columns(self):
        assert csv_columns(2, ["ground"], ["radiative:ground"]) == [
            "t", "x", "y", "z", "pop:ground", "cur:radiative:ground", "trace_err", "min_eig",
        ]

    def test_bloch_columns_omitted_above_two(self):
        assert csv_columns(3, ["P1"], ["2→1:P1"]) == ["t", "pop:P1", "cur:2→1:P1", "trace_err", "min_eig"]


class TestCsv:
    def test_format(self, run, tmp_path):
        path = ReportGenerator(tmp_path).write_csv(run, tmp_path / "run.csv")
        raw = path.read_bytes()
        assert b"\r\n" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert lines[0] == "t,x,y,z,pop:ground,cur:radiative:ground,trace_err,min_eig"
        assert lines[2].startswith("0.10000000000000001,0.01,-0.02,-0.96999999999999997,")
        assert lines[2].endswith(",1.0000000000000001e-17,-2.0000000000000001e-18")

    def test_values_survive_reading(self, run, tmp_path):
        path = ReportGenerator(tmp_path).write_csv(run, tmp_path / "run.csv")
        back = pd.read_csv(path, float_precision="round_trip")
        np.testing.assert_array_equal(back.to_numpy(), run.rows.to_numpy())

    def test_byte_identical(self, run, tmp_path):
        generator = ReportGenerator(tmp_path)
        first = generator.write_csv(run, tmp_path / "a.csv").read_bytes()
        second = generator.write_csv(run, tmp_path / "b.csv").read_bytes()
        assert first == second

    def test_default_path(self, two_level_path, tmp_path):
        config = load_config(two_level_path)
        assert ReportGenerator(tmp_path).default_csv_path(config) == tmp_path / "two_level.csv"


class TestRunSummary:
    def test_sections(self, run, two_level_path, tmp_path):
        config = load_config(two_level_path)
        report = ReportGenerator(tmp_path).generate_run_report(run, config, tmp_path / "run.csv")
        assert report.startswith("# Relaxation Current Run - two_level")
        for heading in ("## Model", "## Summary", "## Diagnostics ✅", "## Notes"):
            assert heading in report
        assert "**radiative**: rate 0.3" in report
        assert "(0.000000, 0.000000, 0.500000)" in report

    def test_drift_is_flagged(self, run, two_level_path, tmp_path):
        run.summary['min_eigenvalue'] = -1e-6
        config = load_config(two_level_path)
        report = ReportGenerator(tmp_path).generate_run_report(run, config, tmp_path / "run.csv")
        assert "## Diagnostics ⚠️" in report

    def test_save(self, tmp_path):
        path = ReportGenerator(tmp_path).save_report("# hi\n", tmp_path / "nested" / "r.md")
        assert path.read_text(encoding="utf-8") == "# hi\n"


class TestJson:
    def test_complex_matrices_as_pairs(self):
        text = ReportGenerator.render_json({'m': np.array([[1, 1j], [-1j, 0]])})
        assert json.loads(text) == {'m': [[[1.0, 0.0], [0.0, 1.0]], [[0.0, -1.0], [0.0, 0.0]]]}

    def test_numpy_scalars(self):
        text = ReportGenerator.render_json({'p': np.float64(0.5), 'n': np.int64(3), 'ok': np.bool_(True)})
        assert json.loads(text) == {'p': 0.5, 'n': 3, 'ok': True}

    def test_floats_round_trip(self):
        value = 0.1 + 0.2
        assert json.loads(ReportGenerator.render_json({'v': value}))['v'] == value

    def test_unicode_kept(self):
        assert "2→1" in ReportGenerator.render_json({'channel': "2→1"})

    def test_check_line(self):
        assert ReportGenerator.format_check("lindblad", "duality", True, "max_err=1e-16") == \
            "PASS lindblad: duality max_err=1e-16"
