"""Tests for artifacts module."""

import json
from pathlib import Path

import numpy as np
import pytest

from qboson_sampling.artifacts import (
    distribution_rows,
    format_float,
    format_occupation,
    load_matrix_json,
    matrix_to_json,
    parse_float_list,
    parse_occupation,
    write_csv,
    write_json,
    write_samples,
    write_table,
)
from qboson_sampling.sector import OutcomeDistribution, sector_basis


class TestFormatting:
    """Tests for float and occupation formatting."""

    def test_float_has_17_significant_digits(self) -> None:
        """Should round-trip floats exactly."""
        assert format_float(0.1) == "0.10000000000000001"
        assert float(format_float(1 / 3)) == 1 / 3

    def test_integral_float(self) -> None:
        """Should write integral floats without a fraction."""
        assert format_float(9.75) == "9.75"
        assert format_float(2.0) == "2"

    def test_occupation(self) -> None:
        """Should join counts with commas."""
        assert format_occupation((2, 0, 1)) == "2,0,1"


class TestParsing:
    """Tests for parse_occupation and parse_float_list functions."""

    def test_parses_occupation(self) -> None:
        """Should parse comma-separated integers with spaces."""
        assert parse_occupation("1, 1,0") == (1, 1, 0)

    @pytest.mark.parametrize("text", ["1,x", "1,-1", "", "1.5"])
    def test_rejects_bad_occupation(self, text: str) -> None:
        """Should raise ValueError for non-integer or negative entries."""
        with pytest.raises(ValueError):
            parse_occupation(text)

    def test_parses_float_list(self) -> None:
        """Should parse floats and skip empty entries."""
        assert parse_float_list("0.1, -0.03,,1e-3") == [0.1, -0.03, 0.001]

    def test_rejects_bad_float_list(self) -> None:
        """Should raise ValueError naming the list."""
        with pytest.raises(ValueError, match="Invalid number list"):
            parse_float_list("0.1,abc")


class TestMatrixJson:
    """Tests for matrix_to_json and load_matrix_json functions."""

    def test_pairs_layout(self) -> None:
        """Should write nested [re, im] pairs."""
        assert matrix_to_json(np.array([[1 + 2j, 0], [0, -1j]])) == [
            [[1.0, 2.0], [0.0, 0.0]],
            [[0.0, 0.0], [0.0, -1.0]],
        ]

    def test_load(self, tmp_path: Path) -> None:
        """Should read pairs and plain numbers."""
        path = tmp_path / "u.json"
        path.write_text(json.dumps([[[0, 1], 2], [3, [4, -5]]]), encoding="utf-8")
        a = load_matrix_json(path)
        assert np.array_equal(a, np.array([[1j, 2], [3, 4 - 5j]]))

    def test_load_missing_file(self, tmp_path: Path) -> None:
        """Should raise FileNotFoundError if the file doesn't exist."""
        with pytest.raises(FileNotFoundError, match="Matrix file not found"):
            load_matrix_json(tmp_path / "missing.json")

    def test_load_invalid_json(self, tmp_path: Path) -> None:
        """Should raise ValueError for malformed JSON."""
        path = tmp_path / "u.json"
        path.write_text("[[1, 2]", encoding="utf-8")
        with pytest.raises(ValueError, match="Invalid JSON"):
            load_matrix_json(path)

    def test_load_ragged(self, tmp_path: Path) -> None:
        """Should raise ValueError for rows of different lengths."""
        path = tmp_path / "u.json"
        path.write_text("[[1, 2], [3]]", encoding="utf-8")
        with pytest.raises(ValueError, match="same length"):
            load_matrix_json(path)


class TestWriters:
    """Tests for CSV, JSON and sample writers."""

    def test_csv_layout(self, tmp_path: Path) -> None:
        """Should write a header row, formatted floats and newline endings."""
        path = tmp_path / "out" / "levels.csv"
        count = write_csv(path, ["index", "energy"], [[0, 9.75], [1, 0.1]])
        assert count == 2
        assert path.read_bytes() == b"index,energy\n0,9.75\n1,0.10000000000000001\n"

    def test_csv_quotes_occupations(self, tmp_path: Path) -> None:
        """Should quote occupation tuples that contain commas."""
        path = tmp_path / "dist.csv"
        basis = sector_basis(2, 1)
        dist = OutcomeDistribution(basis, np.array([0.25, 0.75]))
        write_csv(path, ["occupation", "probability"], distribution_rows(dist))
        assert path.read_text(encoding="utf-8").splitlines() == [
            "occupation,probability",
            '"0,1",0.25',
            '"1,0",0.75',
        ]

    def test_table_as_json(self, tmp_path: Path) -> None:
        """Should mirror the rows as objects keyed by the header."""
        path = tmp_path / "levels.json"
        write_table(path, ["index", "energy"], [[0, 9.75]], as_json=True)
        assert json.loads(path.read_text(encoding="utf-8")) == [{"index": 0, "energy": 9.75}]

    def test_json_trailing_newline(self, tmp_path: Path) -> None:
        """Should end JSON files with a newline."""
        path = tmp_path / "summary.json"
        write_json(path, {"a": 1})
        assert path.read_text(encoding="utf-8").endswith("}\n")

    def test_samples(self, tmp_path: Path) -> None:
        """Should write one tuple per line."""
        path = tmp_path / "samples.txt"
        assert write_samples(path, [(1, 1), (2, 0)]) == 2
        assert path.read_text(encoding="utf-8") == "1,1\n2,0\n"
