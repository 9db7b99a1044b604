from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .models import InputError
from .spectrum import BroadenedSpectrum, ErrorSweep, SpectralProfile

LINE_LIST_COLUMNS = ("pattern", "frequency_cm1", "probability")
CURVE_COLUMNS = ("frequency_cm1", "intensity")
SWEEP_COLUMNS = ("tau", "l1_error", "slope")


class LineListError(InputError):
    """Raised when a CSV file does not follow the expected columns."""


@dataclass(frozen=True, eq=False)
class LineList:
    patterns: np.ndarray
    frequencies: np.ndarray
    probabilities: np.ndarray

    def entries(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(n) for n in pattern): float(p) for pattern, p in zip(self.patterns, self.probabilities)}


def format_float(value: float) -> str:
    """Shortest decimal that reads back to the same double."""
    return repr(float(value))


def write_line_list(profile: SpectralProfile, path: str | Path) -> Path:
    rows = (
        (";".join(str(int(n)) for n in pattern), format_float(frequency), format_float(probability))
        for pattern, frequency, probability in zip(profile.patterns, profile.frequencies, profile.probabilities)
    )
    return _write(path, LINE_LIST_COLUMNS, rows)


def read_line_list(path: str | Path) -> LineList:
    patterns: list[list[int]] = []
    frequencies: list[float] = []
    probabilities: list[float] = []
    for number, row in _read(path, LINE_LIST_COLUMNS):
        try:
            patterns.append([int(value) for value in row["pattern"].split(";")])
            frequencies.append(float(row["frequency_cm1"]))
            probabilities.append(float(row["probability"]))
        except ValueError as exc:
            raise LineListError(f"{path}: row {number}: {exc}") from exc
    widths = {len(pattern) for pattern in patterns}
    if len(widths) > 1:
        raise LineListError(f"{path}: patterns have inconsistent lengths {sorted(widths)}")
    return LineList(
        patterns=np.array(patterns, dtype=int),
        frequencies=np.array(frequencies, dtype=float),
        probabilities=np.array(probabilities, dtype=float),
    )


def write_curve(spectrum: BroadenedSpectrum, path: str | Path) -> Path:
    rows = ((format_float(x), format_float(y)) for x, y in zip(spectrum.grid, spectrum.intensity))
    return _write(path, CURVE_COLUMNS, rows)


def write_sweep(sweep: ErrorSweep, path: str | Path) -> Path:
    slope = "" if sweep.slope is None else format_float(sweep.slope)
    rows = ((format_float(tau), format_float(error), slope) for tau, error in zip(sweep.taus, sweep.errors))
    return _write(path, SWEEP_COLUMNS, rows)


def _write(path: str | Path, header: tuple[str, ...], rows) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return target


def _read(path: str | Path, header: tuple[str, ...]):
    try:
        handle = Path(path).open("r", encoding="utf-8", newline="")
    except OSError as exc:
        raise LineListError(f"cannot read {path}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or tuple(reader.fieldnames) != header:
            raise LineListError(f"{path}: expected header {','.join(header)}, got {reader.fieldnames}")
        yield from enumerate(reader, start=2)
