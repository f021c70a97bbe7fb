"""Command-line surface.

Subcommands: ``synth`` (profile -> paired recordings + ground-truth beats),
``detect`` (recording -> beats CSV), ``hrv`` (recording or beats -> indices
JSON), ``compare`` (two index reports or a cohort directory -> agreement
JSON), ``pipeline`` (ECG + BCG -> full report + plot data).

Exit codes: 0 success, 1 usage, 2 input format or I/O, 3 computation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from ._version import __version__
from .agreement import (
    ComparisonReport,
    SubjectResult,
    compare_cohort,
    compare_indices,
    index_map,
)
from .config import PipelineConfig, load_config
from .detect import KIND_BCG_J, KIND_ECG_R, beats_to_intervals, detect_j_peaks, detect_qrs
from .errors import (
    EmptyInputError,
    FormatError,
    InsufficientDataError,
    PulsePairError,
)
from .hrv import FreqDomainIndices, TimeDomainIndices, band_powers, clean_nn, resample_tachogram, time_domain, welch_psd
from .io import (
    FORMAT_SAMPLED,
    FORMAT_TIMED,
    RecordingFile,
    looks_like_beats_file,
    read_beats,
    read_json,
    read_signal,
    write_beats,
    write_json,
    write_signal,
)
from .pipeline import analyze_signal, emit_plot_data, run_pipeline
from .signals import MODALITY_BCG, MODALITY_ECG, preprocess_bcg, preprocess_ecg
from .synth import BeatTrainProfile, synth_pair

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_COMPUTE = 3


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _recording_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=[FORMAT_TIMED, FORMAT_SAMPLED], default=FORMAT_TIMED,
                        help="recording CSV layout (default: timed)")
    parser.add_argument("--fs", type=float, default=None,
                        help="sampling rate in Hz (required for sampled format)")
    parser.add_argument("--config", type=Path, default=None,
                        help="key=value file overriding analysis defaults")


def _load_cfg(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None) is not None:
        return load_config(args.config)
    return PipelineConfig()


def _build_parser() -> _Parser:
    parser = _Parser(prog="pulsepair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pulsepair {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate a paired synthetic recording")
    p.add_argument("--duration", type=float, default=300.0, help="seconds (default 300)")
    p.add_argument("--mean-rr", type=float, default=800.0, help="mean beat gap in ms")
    p.add_argument("--lf-amp", type=float, default=0.0, help="LF modulation amplitude in ms")
    p.add_argument("--lf-freq", type=float, default=0.1, help="LF modulation frequency in Hz")
    p.add_argument("--hf-amp", type=float, default=0.0, help="HF modulation amplitude in ms")
    p.add_argument("--hf-freq", type=float, default=0.25, help="HF modulation frequency in Hz")
    p.add_argument("--jitter", type=float, default=0.0, help="white jitter std in ms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fs", type=float, default=250.0)
    p.add_argument("--snr-db", type=float, default=math.inf, help="noise level (default clean)")
    p.add_argument("--latency-ms", type=float, default=150.0, help="J-after-R delay")
    p.add_argument("--ecg-amplitude", type=float, default=1.0, help="ECG peak amplitude in mV")
    p.add_argument("--bcg-amplitude", type=float, default=50.0, help="BCG peak amplitude in mV")
    p.add_argument("--format", choices=[FORMAT_TIMED, FORMAT_SAMPLED], default=FORMAT_TIMED)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("detect", help="detect beats in one recording")
    p.add_argument("recording", type=Path)
    p.add_argument("--modality", choices=[MODALITY_ECG, MODALITY_BCG], required=True)
    _recording_options(p)
    p.add_argument("--out", type=Path, required=True, help="beats CSV path")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("hrv", help="variability indices from a recording or beats CSV")
    p.add_argument("input", type=Path, help="beats CSV or recording CSV")
    p.add_argument("--modality", choices=[MODALITY_ECG, MODALITY_BCG], default=MODALITY_ECG,
                   help="modality when the input is a recording")
    _recording_options(p)
    p.add_argument("--out", type=Path, required=True, help="indices JSON path")
    p.set_defaults(func=_cmd_hrv)

    p = sub.add_parser("compare", help="agreement between two index reports or a cohort")
    p.add_argument("--reports", nargs=2, type=Path, metavar=("ECG_JSON", "BCG_JSON"),
                   help="two hrv outputs for one session")
    p.add_argument("--cohort", type=Path, help="directory of pipeline reports")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("pipeline", help="full paired ECG+BCG analysis")
    p.add_argument("--ecg", type=Path, required=True)
    p.add_argument("--bcg", type=Path, required=True)
    _recording_options(p)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=_cmd_pipeline)
    return parser


def _cmd_synth(args: argparse.Namespace) -> int:
    profile = BeatTrainProfile(
        duration_s=args.duration,
        mean_rr_ms=args.mean_rr,
        lf_amp_ms=args.lf_amp,
        lf_freq_hz=args.lf_freq,
        hf_amp_ms=args.hf_amp,
        hf_freq_hz=args.hf_freq,
        jitter_ms=args.jitter,
        seed=args.seed,
    )
    pair = synth_pair(
        profile,
        fs=args.fs,
        snr_db=args.snr_db,
        latency_ms=args.latency_ms,
        ecg_amplitude_mv=args.ecg_amplitude,
        bcg_amplitude_mv=args.bcg_amplitude,
    )
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_signal(out / "ecg.csv", pair.ecg, args.format)
    write_signal(out / "bcg.csv", pair.bcg, args.format)
    write_beats(out / "beats.csv", pair.beats)
    meta = dataclasses.asdict(profile)
    meta.update(
        fs=args.fs,
        snr_db=args.snr_db if math.isfinite(args.snr_db) else None,
        latency_ms=args.latency_ms,
        ecg_amplitude_mv=args.ecg_amplitude,
        bcg_amplitude_mv=args.bcg_amplitude,
        format=args.format,
    )
    write_json(out / "profile.json", meta)
    print(f"wrote {len(pair.beats)} beats and paired recordings to {out}")
    return EXIT_OK


def _cmd_detect(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    file = RecordingFile(args.recording, args.format, args.modality, args.fs)
    raw = read_signal(file)
    if args.modality == MODALITY_ECG:
        pre = preprocess_ecg(raw, cfg.ecg_band(), cfg.ecg_integrate_window_s)
        beats = detect_qrs(pre, cfg.ecg_detector())
    else:
        pre = preprocess_bcg(
            raw, cfg.bcg_gain, cfg.bcg_band(), cfg.bcg_detect_band(), cfg.bcg_integrate_window_s
        )
        beats = detect_j_peaks(pre, cfg.bcg_detector())
    write_beats(args.out, beats)
    print(f"{len(beats)} beats -> {args.out}")
    return EXIT_OK


def _indices_document(time_idx: TimeDomainIndices, freq_idx: FreqDomainIndices | None, source: Path) -> dict:
    from .pipeline import _with_units  # shared unit annotations

    doc = {
        "schema_version": "1",
        "source": str(source),
        "time_domain": _with_units(index_map(time_idx)),
    }
    if freq_idx is not None:
        doc["frequency_domain"] = _with_units(
            {
                k: v
                for k, v in index_map(time_idx, freq_idx).items()
                if k in ("vlf_power", "lf_power", "hf_power", "total_power", "lf_hf_ratio")
            }
        )
    return doc


def _cmd_hrv(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    if looks_like_beats_file(args.input):
        kind = KIND_BCG_J if args.modality == MODALITY_BCG else KIND_ECG_R
        beats = read_beats(args.input, kind)
        intervals = beats_to_intervals(beats)
        nn = clean_nn(intervals, cfg.nn_min_ms, cfg.nn_max_ms, cfg.nn_max_deviation,
                      cfg.nn_median_window) if cfg.clean_nn else intervals
        time_idx = time_domain(nn)
        freq_idx = None
        try:
            tach = resample_tachogram(nn, cfg.tachogram_fs)
            spectrum = welch_psd(tach, cfg.welch_segment_s, cfg.welch_overlap)
            freq_idx = band_powers(spectrum, *cfg.bands())
        except InsufficientDataError as exc:
            print(f"note: frequency-domain indices skipped: {exc}", file=sys.stderr)
    else:
        file = RecordingFile(args.input, args.format, args.modality, args.fs)
        art = analyze_signal(read_signal(file), args.modality, cfg)
        time_idx, freq_idx = art.time_indices, art.freq_indices
    write_json(args.out, _indices_document(time_idx, freq_idx, args.input))
    print(f"indices -> {args.out}")
    return EXIT_OK


def _indices_from_document(doc: dict, path: Path) -> dict[str, float]:
    try:
        out = {k: v["value"] for k, v in doc["time_domain"].items()}
        for k, v in doc.get("frequency_domain", {}).items():
            out[k] = v["value"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"{path}: not an indices document") from exc
    return {k: (float("nan") if v is None else float(v)) for k, v in out.items()}


def _subject_from_report(doc: dict, path: Path) -> SubjectResult:
    def block(modality: str) -> tuple[TimeDomainIndices, FreqDomainIndices]:
        try:
            t = {k: v["value"] for k, v in doc[modality]["time_domain"].items()}
            f = {k: v["value"] for k, v in doc[modality]["frequency_domain"].items()}
        except (KeyError, TypeError) as exc:
            raise FormatError(f"{path}: not a pipeline report") from exc
        ratio = f["lf_hf_ratio"]
        return (
            TimeDomainIndices(t["mean_hr"], t["sdnn"], t["rmssd"], t["pnn50"]),
            FreqDomainIndices(
                f["vlf_power"], f["lf_power"], f["hf_power"], f["total_power"],
                float("nan") if ratio is None else float(ratio),
            ),
        )

    ecg_t, ecg_f = block("ecg")
    bcg_t, bcg_f = block("bcg")
    return SubjectResult(path.stem, ecg_t, ecg_f, bcg_t, bcg_f)


def _cmd_compare(args: argparse.Namespace) -> int:
    if (args.reports is None) == (args.cohort is None):
        print("pulsepair compare: provide exactly one of --reports or --cohort", file=sys.stderr)
        return EXIT_USAGE
    if args.reports is not None:
        ecg_doc, bcg_doc = (read_json(p) for p in args.reports)
        diffs = compare_indices(
            _indices_from_document(ecg_doc, args.reports[0]),
            _indices_from_document(bcg_doc, args.reports[1]),
        )
        document = {
            "schema_version": "1",
            "reference": "ecg",
            "abs_diff": diffs.abs_diff,
            "rel_diff": diffs.rel_diff,
        }
    else:
        paths = sorted(args.cohort.glob("*.json"))
        if not paths:
            raise EmptyInputError(f"no report JSON files in {args.cohort}")
        subjects = [_subject_from_report(read_json(p), p) for p in paths]
        report = compare_cohort(subjects)
        document = _cohort_document(report, [p.stem for p in paths])
    write_json(args.out, document)
    print(f"comparison -> {args.out}")
    return EXIT_OK


def _cohort_document(report: ComparisonReport, subject_ids: list[str]) -> dict:
    return {
        "schema_version": "1",
        "reference": "ecg",
        "subjects": subject_ids,
        "mean_abs_diff": report.per_index_abs_diff,
        "mean_rel_diff": report.per_index_rel_diff,
        "pearson_r": report.cohort_pearson_r,
        "bland_altman": {
            name: {"bias": bias, "lower_limit": lo, "upper_limit": hi}
            for name, (bias, lo, hi) in report.bland_altman.items()
        },
    }


def _cmd_pipeline(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args)
    ecg_file = RecordingFile(args.ecg, args.format, MODALITY_ECG, args.fs)
    bcg_file = RecordingFile(args.bcg, args.format, MODALITY_BCG, args.fs)
    result = run_pipeline(ecg_file, bcg_file, cfg)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "report.json", result.report)
    written = emit_plot_data(result, out)
    print(f"report and {len(written)} plot files -> {out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FormatError, EmptyInputError, json.JSONDecodeError) as exc:
        print(f"pulsepair: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"pulsepair: i/o error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PulsePairError as exc:
        print(f"pulsepair: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
