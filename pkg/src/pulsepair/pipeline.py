"""End-to-end analysis: recording files in, report document and plot data out."""

from __future__ import annotations

import csv
import datetime
import math
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from ._version import __version__
from .agreement import INDEX_UNITS, IndexDiffs, compare_indices, index_map
from .config import PipelineConfig, config_hash
from .detect import (
    BeatSeries,
    beats_to_intervals,
    detect_j_peaks,
    detect_qrs,
)
from .errors import InsufficientBeatsError, PulsePairError
from .hrv import (
    FreqDomainIndices,
    IntervalSeries,
    Spectrum,
    TimeDomainIndices,
    band_powers,
    clean_nn,
    resample_tachogram,
    time_domain,
    welch_psd,
)
from .io import RecordingFile, read_signal
from .signals import MODALITY_ECG, PreprocessedSignal, Signal, preprocess_bcg, preprocess_ecg

SCHEMA_VERSION = "1"

PLOT_FILES = ("preprocessing", "beats", "heart_rate", "intervals", "psd")


@dataclass
class ModalityArtifacts:
    """Every intermediate product of one modality's analysis."""

    modality: str
    raw: Signal
    preprocessed: PreprocessedSignal
    beats: BeatSeries
    intervals: IntervalSeries
    nn: IntervalSeries
    time_indices: TimeDomainIndices
    tachogram: Signal
    spectrum: Spectrum
    freq_indices: FreqDomainIndices


@dataclass
class PipelineResult:
    report: dict
    ecg: ModalityArtifacts
    bcg: ModalityArtifacts
    diffs: IndexDiffs


@contextmanager
def _stage(name: str):
    """Tag any pipeline error with the stage it came from."""
    try:
        yield
    except PulsePairError as exc:
        if not str(exc).startswith("["):
            exc.args = (f"[{name}] {exc}",) + exc.args[1:]
        raise


def analyze_signal(raw: Signal, modality: str, cfg: PipelineConfig | None = None) -> ModalityArtifacts:
    """Run one modality through preprocess -> detect -> intervals -> indices."""
    cfg = cfg or PipelineConfig()
    if modality == MODALITY_ECG:
        with _stage("ecg preprocessing"):
            pre = preprocess_ecg(raw, cfg.ecg_band(), cfg.ecg_integrate_window_s)
        with _stage("ecg beat detection"):
            beats = detect_qrs(pre, cfg.ecg_detector())
    else:
        with _stage("bcg preprocessing"):
            pre = preprocess_bcg(
                raw, cfg.bcg_gain, cfg.bcg_band(), cfg.bcg_detect_band(), cfg.bcg_integrate_window_s
            )
        with _stage("bcg beat detection"):
            beats = detect_j_peaks(pre, cfg.bcg_detector())
    with _stage(f"{modality} interval extraction"):
        if len(beats) < 2:
            raise InsufficientBeatsError(f"detected only {len(beats)} beats")
        intervals = beats_to_intervals(beats)
        if cfg.clean_nn:
            nn = clean_nn(
                intervals, cfg.nn_min_ms, cfg.nn_max_ms, cfg.nn_max_deviation, cfg.nn_median_window
            )
        else:
            nn = intervals
    with _stage(f"{modality} time-domain indices"):
        time_idx = time_domain(nn)
    with _stage(f"{modality} spectral analysis"):
        tachogram = resample_tachogram(nn, cfg.tachogram_fs)
        spectrum = welch_psd(tachogram, cfg.welch_segment_s, cfg.welch_overlap)
        freq_idx = band_powers(spectrum, *cfg.bands())
    return ModalityArtifacts(
        modality, raw, pre, beats, intervals, nn, time_idx, tachogram, spectrum, freq_idx
    )


def _validate_bands(cfg: PipelineConfig, fs_ecg: float, fs_bcg: float) -> None:
    cfg.ecg_band().validate_for(fs_ecg)
    cfg.bcg_band().validate_for(fs_bcg)
    cfg.bcg_detect_band().validate_for(fs_bcg)


def run_pipeline(
    ecg_file: RecordingFile, bcg_file: RecordingFile, cfg: PipelineConfig | None = None
) -> PipelineResult:
    """Full paired analysis of an ECG and a BCG recording."""
    cfg = cfg or PipelineConfig()
    with _stage("ecg ingestion"):
        ecg_raw = read_signal(ecg_file)
    with _stage("bcg ingestion"):
        bcg_raw = read_signal(bcg_file)
    with _stage("configuration"):
        _validate_bands(cfg, ecg_raw.fs, bcg_raw.fs)
    ecg_art = analyze_signal(ecg_raw, "ecg", cfg)
    bcg_art = analyze_signal(bcg_raw, "bcg", cfg)
    diffs = compare_indices(
        index_map(ecg_art.time_indices, ecg_art.freq_indices),
        index_map(bcg_art.time_indices, bcg_art.freq_indices),
    )
    report = build_report(cfg, ecg_file, bcg_file, ecg_art, bcg_art, diffs)
    return PipelineResult(report, ecg_art, bcg_art, diffs)


def _with_units(values: dict[str, float]) -> dict[str, dict]:
    out = {}
    for name, value in values.items():
        out[name] = {
            "value": float(value) if math.isfinite(value) else None,
            "unit": INDEX_UNITS[name],
        }
    return out


def _modality_block(art: ModalityArtifacts) -> dict:
    full = index_map(art.time_indices, art.freq_indices)
    return {
        "beat_count": len(art.beats),
        "interval_count": len(art.intervals),
        "nn_count": len(art.nn),
        "time_domain": _with_units({k: full[k] for k in ("mean_hr", "sdnn", "rmssd", "pnn50")}),
        "frequency_domain": _with_units(
            {k: full[k] for k in ("vlf_power", "lf_power", "hf_power", "total_power", "lf_hf_ratio")}
        ),
    }


def build_report(
    cfg: PipelineConfig,
    ecg_file: RecordingFile,
    bcg_file: RecordingFile,
    ecg_art: ModalityArtifacts,
    bcg_art: ModalityArtifacts,
    diffs: IndexDiffs,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "provenance": {
            "tool": "pulsepair",
            "version": __version__,
            "ecg_file": str(ecg_file.path),
            "bcg_file": str(bcg_file.path),
            "config": cfg.as_dict(),
            "config_hash": config_hash(cfg),
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        },
        "ecg": _modality_block(ecg_art),
        "bcg": _modality_block(bcg_art),
        "comparison": {
            "reference": "ecg",
            "abs_diff": {k: v for k, v in diffs.abs_diff.items()},
            "rel_diff": {k: v for k, v in diffs.rel_diff.items()},
        },
    }


def _write_csv(path: Path, header: tuple[str, ...], columns) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])
    return path


def emit_plot_data(result: PipelineResult, out_dir: str | Path) -> list[Path]:
    """Write the per-stage CSV series behind each standard figure.

    Five files per modality: preprocessing stages, detected-beat overlay,
    instantaneous heart rate, interval series, and the tachogram PSD.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for art in (result.ecg, result.bcg):
        m = art.modality
        written.append(
            _write_csv(
                out_dir / f"{m}_preprocessing.csv",
                ("t_seconds", "raw", "filtered", "integrated"),
                (
                    art.raw.times,
                    art.raw.samples,
                    art.preprocessed.filtered.samples,
                    art.preprocessed.integrated.samples,
                ),
            )
        )
        written.append(
            _write_csv(
                out_dir / f"{m}_beats.csv",
                ("t_seconds", "amplitude"),
                (art.beats.times, art.beats.amplitudes),
            )
        )
        hr = 60000.0 / art.intervals.intervals_ms
        written.append(
            _write_csv(
                out_dir / f"{m}_heart_rate.csv",
                ("t_seconds", "bpm"),
                (art.intervals.anchors_s, hr),
            )
        )
        written.append(
            _write_csv(
                out_dir / f"{m}_intervals.csv",
                ("t_seconds", "interval_ms"),
                (art.intervals.anchors_s, art.intervals.intervals_ms),
            )
        )
        written.append(
            _write_csv(
                out_dir / f"{m}_psd.csv",
                ("frequency_hz", "psd_ms2_per_hz"),
                (art.spectrum.freqs, art.spectrum.psd),
            )
        )
    return written
