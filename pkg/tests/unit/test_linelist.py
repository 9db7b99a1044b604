from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from vibronic_gbs.linelist import LineListError, read_line_list, write_curve, write_line_list, write_sweep
from vibronic_gbs.molfile import load_dataset
from vibronic_gbs.spectrum import ErrorSweep, broaden, noncondon_profile


def test_line_list_round_trip_is_exact(tmp_path: Path) -> None:
    profile = noncondon_profile(load_dataset("phenanthrene"), None, 1e-2, None, 2)
    path = write_line_list(profile, tmp_path / "lines.csv")

    lines = read_line_list(path)

    np.testing.assert_array_equal(lines.patterns, profile.patterns)
    np.testing.assert_array_equal(lines.frequencies, profile.frequencies)
    np.testing.assert_array_equal(lines.probabilities, profile.probabilities)
    assert lines.entries() == profile.entries()


def test_line_list_layout(tmp_path: Path) -> None:
    profile = noncondon_profile(load_dataset("naphthalene"), None, 1e-2, None, 1)
    path = write_line_list(profile, tmp_path / "lines.csv")

    rows = path.read_text(encoding="utf-8").splitlines()

    assert rows[0] == "pattern,frequency_cm1,probability"
    assert rows[1].startswith("0;0,0.0,")
    assert rows[2].startswith("1;0,438.0,")
    assert len(rows) == 5


def test_reading_wrong_header_fails(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("mode,freq,p\n0,0.0,1.0\n", encoding="utf-8")

    with pytest.raises(LineListError, match="expected header"):
        read_line_list(path)


def test_reading_bad_number_names_row(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("pattern,frequency_cm1,probability\n0;1,12.0,abc\n", encoding="utf-8")

    with pytest.raises(LineListError, match="row 2"):
        read_line_list(path)


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(LineListError):
        read_line_list(tmp_path / "absent.csv")


def test_curve_and_sweep_files(tmp_path: Path) -> None:
    profile = noncondon_profile(load_dataset("naphthalene"), None, 1e-2, None, 1)
    curve = write_curve(broaden(profile, 5.0, grid_step=2.0), tmp_path / "curve.csv")
    sweep = write_sweep(
        ErrorSweep(taus=np.array([0.1, 0.03, 0.01]), errors=np.array([1e-3, 9e-5, 1e-5]), slope=None),
        tmp_path / "sweep.csv",
    )

    assert curve.read_text(encoding="utf-8").splitlines()[0] == "frequency_cm1,intensity"
    assert sweep.read_text(encoding="utf-8").splitlines() == [
        "tau,l1_error,slope",
        "0.1,0.001,",
        "0.03,9e-05,",
        "0.01,1e-05,",
    ]
