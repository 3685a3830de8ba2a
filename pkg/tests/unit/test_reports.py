"""
Unit tests for reports.py

Tests value formatting, regime lines and summary files.
"""

import pandas as pd
import pytest

from slowlight.physics import check_regime, derive_params
from slowlight.reports import (
    format_key_values,
    format_value,
    params_pairs,
    regime_lines,
    write_summary,
    write_table_csv,
)


class TestFormatting:
    """Test key-value formatting."""

    @pytest.mark.parametrize("key, value, expected", [
        ("eta", 0.5, "0.500000"),
        ("qubit_fidelity", 1.0, "1.000000"),
        ("delay_s", 4.3e-10, "4.3e-10"),
        ("regime_ok", True, "true"),
        ("n_z", 128, "128"),
        ("a_out", 0.5 - 0.25j, "0.5-0.25j"),
        ("tier", "full", "full"),
    ])
    def test_format_value(self, key, value, expected):
        """Should print fixed decimals for figures of merit and compact floats otherwise."""
        assert format_value(key, value) == expected

    def test_key_value_lines(self):
        """Should print one 'key = value' per line."""
        text = format_key_values([("eta", 1.0), ("regime_ok", False)])

        assert text == "eta = 1.000000\nregime_ok = false"


class TestRegimeLines:
    """Test the validate report."""

    def test_numerical_example(self, rb87_atoms, rb87_drive):
        """Should print FAIL for every condition and the Doppler bound."""
        report = check_regime(derive_params(rb87_atoms, rb87_drive), 20e-9, rb87_atoms)

        lines = regime_lines(report)

        assert len(lines) == 4
        assert all(line.endswith("FAIL") for line in lines[:3])
        assert lines[3].startswith("doppler_temperature ")
        assert lines[3].endswith(" K INFO")

    def test_passing_configuration(self, desk_atoms, desk_drive):
        """Should print PASS with the values of both carriers."""
        report = check_regime(derive_params(desk_atoms, desk_drive), 3e-9, desk_atoms)

        lines = regime_lines(report)

        assert all(line.endswith("PASS") for line in lines[:3])
        assert lines[0].split()[1].count(",") == 1

    def test_phase_mismatch_warns(self, desk_atoms, desk_drive):
        """Should print the phase mismatch before the Doppler bound, as WARN when it is too large."""
        drive = desk_drive.model_copy(update={"lambda_c": 1.6e-6, "lambda_0": 795e-9})
        report = check_regime(derive_params(desk_atoms, drive), 3e-9, desk_atoms, drive=drive)

        lines = regime_lines(report)

        assert len(lines) == 5
        assert lines[3].startswith("phase_mismatch ")
        assert lines[3].endswith(" <=0.1 WARN")
        assert report.all_ok is True


class TestSummaryFiles:
    """Test report files."""

    def test_write_summary(self, tmp_path):
        """Should end the file with a newline."""
        path = tmp_path / "summary.txt"

        write_summary([("eta", 0.25), ("tier", "analytic")], path)

        assert path.read_text(encoding="utf-8") == "eta = 0.250000\ntier = analytic\n"

    def test_params_pairs(self, rb87_atoms, rb87_drive):
        """Should report beta*L first."""
        pairs = dict(params_pairs(derive_params(rb87_atoms, rb87_drive)))

        assert pairs["beta_l"] == pytest.approx(34.86, rel=1e-3)
        assert pairs["v1_mps"] > 0

    def test_table_round_trip(self, tmp_path):
        """Should write floats that read back exactly."""
        frame = pd.DataFrame({"value": [0.1, 1 / 3], "eta": [2 / 3, 0.7]})
        path = tmp_path / "table.csv"

        write_table_csv(frame, path)

        pd.testing.assert_frame_equal(pd.read_csv(path, float_precision="round_trip"), frame)
