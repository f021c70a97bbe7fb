"""CSV and JSON ingestion/emission.

Recordings travel as CSV, either timed (``t,value`` rows with uniform
spacing) or sampled (single ``value`` column plus an explicit rate). Beats
travel as ``t_seconds,amplitude`` CSV. Floats are written with ``repr``,
whose shortest round-trip form restores the exact bit pattern on read.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detect import KIND_ECG_R, BeatSeries
from .errors import EmptyInputError, FormatError, ParameterError
from .signals import MODALITY_BCG, MODALITY_ECG, Signal

FORMAT_TIMED = "timed"
FORMAT_SAMPLED = "sampled"

# Maximum relative deviation of a timestamp step before the file is
# rejected as non-uniform.
_UNIFORM_TOL = 1e-6

BEATS_HEADER = ("t_seconds", "amplitude")
TIMED_HEADER = ("t", "value")
SAMPLED_HEADER = ("value",)


@dataclass(frozen=True)
class RecordingFile:
    """A recording on disk plus what it claims to be."""

    path: Path
    fmt: str = FORMAT_TIMED
    modality: str = MODALITY_ECG
    fs: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "path", Path(self.path))
        if self.fmt not in (FORMAT_TIMED, FORMAT_SAMPLED):
            raise ParameterError(f"unknown recording format {self.fmt!r}")
        if self.modality not in (MODALITY_ECG, MODALITY_BCG):
            raise ParameterError(f"unknown modality {self.modality!r}")


def _parse_float(raw: str, path: Path, row: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise FormatError(f"{path}: row {row}: bad {column} value {raw!r}") from exc
    if not math.isfinite(value):
        raise FormatError(f"{path}: row {row}: non-finite {column} value {raw!r}")
    return value


def _read_rows(path: Path, n_columns: int) -> list[tuple[int, list[str]]]:
    """Data rows with their 1-based file row numbers; a header row is skipped."""
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    rows: list[tuple[int, list[str]]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1:
                try:
                    float(row[0])
                except ValueError:
                    continue  # header row
            if len(row) != n_columns:
                raise FormatError(
                    f"{path}: row {lineno}: expected {n_columns} columns, got {len(row)}"
                )
            rows.append((lineno, row))
    return rows


def read_signal(file: RecordingFile) -> Signal:
    """Load a recording, inferring the rate from timestamps when timed."""
    if file.fmt == FORMAT_SAMPLED:
        if file.fs is None:
            raise ParameterError(f"{file.path}: sampled format requires a sampling rate")
        rows = _read_rows(file.path, 1)
        if not rows:
            raise EmptyInputError(f"{file.path}: no samples")
        values = [_parse_float(row[0], file.path, lineno, "sample") for lineno, row in rows]
        return Signal(values, file.fs)

    rows = _read_rows(file.path, 2)
    if not rows:
        raise EmptyInputError(f"{file.path}: no samples")
    t = np.empty(len(rows))
    values = np.empty(len(rows))
    for i, (lineno, row) in enumerate(rows):
        t[i] = _parse_float(row[0], file.path, lineno, "timestamp")
        values[i] = _parse_float(row[1], file.path, lineno, "sample")
    if len(rows) < 2:
        raise FormatError(f"{file.path}: timed format needs at least 2 rows to infer fs")
    dt_ref = (t[-1] - t[0]) / (len(rows) - 1)
    if dt_ref <= 0.0:
        raise FormatError(f"{file.path}: row {rows[-1][0]}: timestamps must increase")
    dt = np.diff(t)
    bad = np.flatnonzero(np.abs(dt - dt_ref) > _UNIFORM_TOL * dt_ref)
    if bad.size:
        lineno = rows[int(bad[0]) + 1][0]
        raise FormatError(
            f"{file.path}: row {lineno}: non-uniform timestamp spacing "
            f"({dt[bad[0]]:.9g} s vs expected {dt_ref:.9g} s)"
        )
    return Signal(values, 1.0 / dt_ref, t0=float(t[0]))


def write_signal(path: str | Path, x: Signal, fmt: str = FORMAT_TIMED) -> Path:
    """Write a recording as CSV; ``repr`` keeps samples exact on round trip."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if fmt == FORMAT_TIMED:
            writer.writerow(TIMED_HEADER)
            for t, v in zip(x.times, x.samples):
                writer.writerow((repr(float(t)), repr(float(v))))
        elif fmt == FORMAT_SAMPLED:
            writer.writerow(SAMPLED_HEADER)
            for v in x.samples:
                writer.writerow((repr(float(v)),))
        else:
            raise ParameterError(f"unknown recording format {fmt!r}")
    return path


def write_beats(path: str | Path, beats: BeatSeries) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BEATS_HEADER)
        for t, a in zip(beats.times, beats.amplitudes):
            writer.writerow((repr(float(t)), repr(float(a))))
    return path


def read_beats(path: str | Path, kind: str = KIND_ECG_R) -> BeatSeries:
    path = Path(path)
    rows = _read_rows(path, 2)
    if not rows:
        raise EmptyInputError(f"{path}: no beats")
    times = [_parse_float(row[0], path, lineno, "timestamp") for lineno, row in rows]
    amps = [_parse_float(row[1], path, lineno, "amplitude") for lineno, row in rows]
    return BeatSeries(times, amps, kind)


def looks_like_beats_file(path: str | Path) -> bool:
    """True when the file's header names the beats columns."""
    with open(path, newline="") as fh:
        first = next(csv.reader(fh), None)
    return first is not None and [c.strip() for c in first] == list(BEATS_HEADER)


def write_json(path: str | Path, document: dict) -> Path:
    path = Path(path)
    with open(path, "w") as fh:
        json.dump(document, fh, indent=2, allow_nan=False)
        fh.write("\n")
    return path


def read_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)
