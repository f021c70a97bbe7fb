"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line so the suite doubles as a checklist run
(``pytest -s tests/test_acceptance.py``)."""

import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pulsepair import (
    IntervalSeries,
    RecordingFile,
    Signal,
    SubjectResult,
    band_powers,
    bandpass_filter,
    correlate_cohort,
    detect_j_peaks,
    detect_qrs,
    match_beats,
    preprocess_bcg,
    preprocess_ecg,
    resample_tachogram,
    run_pipeline,
    synth_pair,
    time_domain,
    welch_psd,
    write_signal,
)
from pulsepair.agreement import compare_indices, index_map
from pulsepair.pipeline import analyze_signal
from pulsepair.signals import BandSpec
from pulsepair.synth import BeatTrainProfile

WARMUP_S = 1.0


@contextmanager
def criterion(number, description):
    try:
        yield
    except Exception:
        print(f"[criterion {number}] FAIL {description}")
        raise
    print(f"[criterion {number}] PASS {description}")


def truth_after_warmup(times):
    times = np.asarray(times)
    return times[times >= WARMUP_S]


def direct_time_domain(vals):
    """Single-pass formula evaluation, independent of the library path."""
    n = len(vals)
    mean = sum(vals) / n
    sdnn = (sum((v - mean) ** 2 for v in vals) / (n - 1)) ** 0.5
    diffs = [vals[i + 1] - vals[i] for i in range(n - 1)]
    rmssd = (sum(d * d for d in diffs) / len(diffs)) ** 0.5
    pnn50 = 100.0 * sum(1 for d in diffs if abs(d) > 50.0) / len(diffs)
    return 60000.0 / mean, sdnn, rmssd, pnn50


def test_criterion_1_time_domain_oracle_equivalence():
    with criterion(1, "time-domain indices match a direct-formula oracle over 1000 series"):
        rng = np.random.default_rng(0)
        cases = []
        for _ in range(1000):
            n = int(rng.integers(2, 501))
            vals = rng.uniform(300.0, 1200.0, n)
            cases.append(IntervalSeries(vals, np.cumsum(vals) / 1000.0, "rr"))
        start = time.perf_counter()
        results = [time_domain(c) for c in cases]
        elapsed = time.perf_counter() - start
        for case, td in zip(cases, results):
            hr, sdnn, rmssd, pnn50 = direct_time_domain(case.intervals_ms.tolist())
            assert td.mean_hr == pytest.approx(hr, rel=1e-9)
            assert td.sdnn == pytest.approx(sdnn, rel=1e-9)
            assert td.rmssd == pytest.approx(rmssd, rel=1e-9)
            assert td.pnn50 == pytest.approx(pnn50, rel=1e-9, abs=1e-9)
        assert elapsed < 1.0, f"time_domain over 1000 series took {elapsed:.3f} s"


def test_criterion_2_detection_accuracy():
    with criterion(2, "perfect beat scores on clean recordings, >= 0.95 at 10 dB, < 5 s each"):
        for mean_rr, seed in ((1000.0, 1), (800.0, 2), (667.0, 3)):  # 60-90 bpm
            profile = BeatTrainProfile(
                duration_s=300.0, mean_rr_ms=mean_rr, lf_amp_ms=30.0, lf_freq_hz=0.09,
                hf_amp_ms=15.0, hf_freq_hz=0.24, jitter_ms=10.0, seed=seed,
            )
            for snr, floor in ((float("inf"), 1.0), (10.0, 0.95)):
                pair = synth_pair(profile, snr_db=snr)
                start = time.perf_counter()
                ecg_beats = detect_qrs(preprocess_ecg(pair.ecg))
                ecg_elapsed = time.perf_counter() - start
                m = match_beats(truth_after_warmup(pair.beats.times), ecg_beats.times, 0.010)
                assert m.sensitivity >= floor and m.ppv >= floor, (mean_rr, snr, "ecg", m)
                start = time.perf_counter()
                bcg_beats = detect_j_peaks(preprocess_bcg(pair.bcg))
                bcg_elapsed = time.perf_counter() - start
                m = match_beats(truth_after_warmup(pair.j_times), bcg_beats.times, 0.015)
                assert m.sensitivity >= floor and m.ppv >= floor, (mean_rr, snr, "bcg", m)
                assert ecg_elapsed < 5.0 and bcg_elapsed < 5.0


def test_criterion_3_paired_agreement_tolerances():
    with criterion(3, "ECG-vs-BCG rel diff <= 3% sdnn/rmssd, <= 1 pp pnn50, <= 0.5 bpm hr"):
        profile = BeatTrainProfile(
            duration_s=300.0, mean_rr_ms=800.0, lf_amp_ms=45.0, lf_freq_hz=0.095,
            hf_amp_ms=25.0, hf_freq_hz=0.24, jitter_ms=20.0, seed=11,
        )
        pair = synth_pair(profile, snr_db=20.0, latency_ms=150.0)
        ecg = analyze_signal(pair.ecg, "ecg")
        bcg = analyze_signal(pair.bcg, "bcg")
        diffs = compare_indices(
            index_map(ecg.time_indices, ecg.freq_indices),
            index_map(bcg.time_indices, bcg.freq_indices),
        )
        assert diffs.rel_diff["sdnn"] <= 0.03
        assert diffs.rel_diff["rmssd"] <= 0.03
        assert diffs.abs_diff["pnn50"] <= 1.0
        assert diffs.abs_diff["mean_hr"] <= 0.5


def _synthetic_cohort(n=20):
    rng = np.random.default_rng(99)
    subjects = []
    for i in range(n):
        profile = BeatTrainProfile(
            duration_s=300.0,
            mean_rr_ms=float(rng.uniform(660.0, 1000.0)),
            lf_amp_ms=float(rng.uniform(20.0, 60.0)),
            lf_freq_hz=float(rng.uniform(0.07, 0.13)),
            hf_amp_ms=float(rng.uniform(10.0, 50.0)),
            hf_freq_hz=float(rng.uniform(0.20, 0.33)),
            jitter_ms=float(rng.uniform(5.0, 30.0)),
            seed=1000 + i,
        )
        pair = synth_pair(profile, snr_db=20.0, latency_ms=150.0)
        ecg = analyze_signal(pair.ecg, "ecg")
        bcg = analyze_signal(pair.bcg, "bcg")
        subjects.append(
            SubjectResult(f"s{i:02d}", ecg.time_indices, ecg.freq_indices,
                          bcg.time_indices, bcg.freq_indices)
        )
    return subjects


def test_criterion_4_cohort_correlation():
    with criterion(4, "20-subject cohort: r > 0.99 time domain, r > 0.95 LF/HF"):
        r = correlate_cohort(_synthetic_cohort())
        for name in ("mean_hr", "sdnn", "rmssd", "pnn50"):
            assert r[name] > 0.99, (name, r[name])
        for name in ("lf_power", "hf_power"):
            assert r[name] > 0.95, (name, r[name])


def test_criterion_5_spectral_correctness():
    with criterion(5, "LF sine power within 10% of a^2/2 and total power tracks variance"):
        times = [0.0]
        t = 0.0
        while True:
            t += (800.0 + 50.0 * np.sin(2.0 * np.pi * 0.1 * t)) / 1000.0
            if t > 300.0:
                break
            times.append(t)
        times = np.asarray(times)
        iv = IntervalSeries(np.diff(times) * 1000.0, times[1:], "rr")
        tach = resample_tachogram(iv, 4.0)
        fq = band_powers(welch_psd(tach))
        assert abs(fq.lf_power - 1250.0) / 1250.0 <= 0.10
        assert fq.lf_power / (fq.vlf_power + fq.lf_power + fq.hf_power) > 0.9
        variance = float(np.var(tach.samples))
        assert abs(fq.total_power - variance) / variance <= 0.10


def test_criterion_6_invariance_suite(tmp_path):
    with criterion(6, "scale, time-shift, linearity, and determinism invariances hold"):
        # beat-time scale invariance, exact
        pair = synth_pair(BeatTrainProfile(duration_s=150.0, mean_rr_ms=800.0, jitter_ms=10.0, seed=6))
        base = detect_qrs(preprocess_ecg(pair.ecg))
        scaled = detect_qrs(preprocess_ecg(pair.ecg.with_samples(pair.ecg.samples * 10.0)))
        assert np.array_equal(base.times, scaled.times)

        # anchor time-shift invariance: exact time domain, 1e-12 frequency domain
        rng = np.random.default_rng(5)
        vals = np.clip(800.0 + np.cumsum(rng.normal(0.0, 12.0, 380)), 500.0, 1200.0)
        anchors = np.cumsum(vals) / 1000.0
        a = IntervalSeries(vals, anchors, "rr")
        b = IntervalSeries(vals, anchors + 97.3, "rr")
        td_a, td_b = time_domain(a), time_domain(b)
        assert (td_a.mean_hr, td_a.sdnn, td_a.rmssd, td_a.pnn50) == (
            td_b.mean_hr, td_b.sdnn, td_b.rmssd, td_b.pnn50,
        )
        fa = band_powers(welch_psd(resample_tachogram(a)))
        fb = band_powers(welch_psd(resample_tachogram(b)))
        for name in ("vlf_power", "lf_power", "hf_power", "total_power"):
            va, vb = getattr(fa, name), getattr(fb, name)
            assert abs(va - vb) <= 1e-12 * abs(va), name

        # filter linearity at 1e-9 relative
        noise = np.random.default_rng(1).normal(size=4000)
        tone = np.sin(2.0 * np.pi * 8.0 * np.arange(4000) / 250.0)
        band = BandSpec(5.0, 20.0, 4)
        x, z = Signal(noise, 250.0), Signal(tone, 250.0)
        combined = bandpass_filter(x.with_samples(3.0 * noise - 0.5 * tone), band)
        separate = 3.0 * bandpass_filter(x, band).samples - 0.5 * bandpass_filter(z, band).samples
        assert np.max(np.abs(combined.samples - separate)) / np.max(np.abs(separate)) < 1e-9

        # report determinism modulo the provenance timestamp
        write_signal(tmp_path / "e.csv", pair.ecg)
        write_signal(tmp_path / "b.csv", pair.bcg)
        files = (
            RecordingFile(tmp_path / "e.csv", "timed", "ecg"),
            RecordingFile(tmp_path / "b.csv", "timed", "bcg"),
        )
        r1 = run_pipeline(*files).report
        r2 = run_pipeline(*files).report
        r1["provenance"].pop("timestamp")
        r2["provenance"].pop("timestamp")
        assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_criterion_7_pipeline_wall_clock(tmp_path):
    with criterion(7, "full paired pipeline on a 5-minute recording finishes in < 5 s"):
        profile = BeatTrainProfile(
            duration_s=300.0, mean_rr_ms=800.0, lf_amp_ms=40.0, lf_freq_hz=0.09,
            hf_amp_ms=20.0, hf_freq_hz=0.22, jitter_ms=15.0, seed=12,
        )
        pair = synth_pair(profile, snr_db=20.0)
        write_signal(tmp_path / "e.csv", pair.ecg)
        write_signal(tmp_path / "b.csv", pair.bcg)
        start = time.perf_counter()
        result = run_pipeline(
            RecordingFile(tmp_path / "e.csv", "timed", "ecg"),
            RecordingFile(tmp_path / "b.csv", "timed", "bcg"),
        )
        elapsed = time.perf_counter() - start
        assert result.report["ecg"]["beat_count"] > 300
        assert elapsed < 5.0, f"pipeline took {elapsed:.2f} s"
