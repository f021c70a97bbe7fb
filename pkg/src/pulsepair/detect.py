"""R-peak and J-peak detection on preprocessed recordings.

Both detectors share one adaptive dual-threshold engine driven by the
integrated envelope: running signal/noise peak estimates set the detection
threshold, a search-back pass recovers beats missed during sudden
amplitude drops, and every accepted envelope event is refined to the
corresponding peak of the band-passed waveform. All decisions compare
envelope values against thresholds built from envelope values, so scaling
the input leaves the detected beat times unchanged.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import InsufficientBeatsError, ParameterError
from .hrv import KIND_JJ, KIND_RR, IntervalSeries
from .signals import (
    BCG_INTEGRATE_WINDOW_S,
    ECG_INTEGRATE_WINDOW_S,
    MODALITY_BCG,
    MODALITY_ECG,
    PreprocessedSignal,
)

KIND_ECG_R = "ecg_r"
KIND_BCG_J = "bcg_j"

_INTERVAL_KIND = {KIND_ECG_R: KIND_RR, KIND_BCG_J: KIND_JJ}

# Envelopes whose maximum sits below this absolute level are treated as
# silent: a flatline leaves only filter rounding residue (~1e-30 and below
# in squared units), far under any physiological amplitude.
_SILENCE_FLOOR = 1e-24

# Search-back acceptances are weighted more heavily: the estimate was stale.
_SEARCHBACK_UPDATE = 0.25
# Running-RR average length used by the search-back trigger.
_RR_HISTORY = 8
# Span used to seed the signal/noise estimates.
_INIT_SPAN_S = 2.0


@dataclass(frozen=True)
class BeatSeries:
    """Detected beat timestamps with the matching waveform amplitudes."""

    times: np.ndarray
    amplitudes: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        amplitudes = np.asarray(self.amplitudes, dtype=np.float64)
        if times.ndim != 1 or amplitudes.ndim != 1:
            raise ParameterError("times and amplitudes must be one-dimensional")
        if times.size != amplitudes.size:
            raise ParameterError("times and amplitudes must have equal length")
        if times.size > 1 and not np.all(np.diff(times) > 0.0):
            raise ParameterError("beat times must be strictly increasing")
        if self.kind not in (KIND_ECG_R, KIND_BCG_J):
            raise ParameterError(f"unknown beat kind {self.kind!r}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amplitudes", amplitudes)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class DetectorConfig:
    """Decision-logic constants for the adaptive threshold engine.

    ``envelope_delay_s`` maps an envelope event back to waveform time
    (half the integrator window for the default chains); refinement then
    searches ``refine_window_s`` either side of that point.
    """

    refractory_s: float
    refine_window_s: float
    envelope_delay_s: float
    searchback_factor: float = 1.66
    threshold_fraction: float = 0.25
    peak_update: float = 0.125
    warmup_s: float = 1.0

    def __post_init__(self) -> None:
        if self.refractory_s <= 0.0:
            raise ParameterError("refractory period must be positive")
        if self.searchback_factor <= 1.0:
            raise ParameterError("search-back factor must exceed 1")
        if not 0.0 < self.threshold_fraction < 1.0:
            raise ParameterError("threshold fraction must lie in (0, 1)")
        if not 0.0 < self.peak_update < 1.0:
            raise ParameterError("peak update coefficient must lie in (0, 1)")
        if self.refine_window_s <= 0.0 or self.envelope_delay_s < 0.0 or self.warmup_s < 0.0:
            raise ParameterError("detector windows must be non-negative")


def ecg_detector_config(
    refractory_s: float = 0.200,
    refine_window_s: float = 0.075,
    integrate_window_s: float = ECG_INTEGRATE_WINDOW_S,
    **kwargs,
) -> DetectorConfig:
    return DetectorConfig(refractory_s, refine_window_s, integrate_window_s / 2.0, **kwargs)


def bcg_detector_config(
    refractory_s: float = 0.300,
    refine_window_s: float = 0.150,
    integrate_window_s: float = BCG_INTEGRATE_WINDOW_S,
    **kwargs,
) -> DetectorConfig:
    return DetectorConfig(refractory_s, refine_window_s, integrate_window_s / 2.0, **kwargs)


def _adaptive_events(envelope: np.ndarray, fs: float, cfg: DetectorConfig) -> list[int]:
    """Accepted envelope peak indices under the adaptive dual threshold."""
    if float(envelope.max(initial=0.0)) < _SILENCE_FLOOR:
        return []
    candidates, _ = find_peaks(envelope)
    if candidates.size == 0:
        return []
    head = envelope[: max(2, int(round(_INIT_SPAN_S * fs)))]
    spk = 0.5 * float(head.max())
    npk = 0.5 * float(head.mean())
    if spk <= 0.0:
        spk = 0.5 * float(envelope.max())
        npk = 0.5 * float(envelope.mean())
        if spk <= 0.0:
            return []
    refractory = max(1, int(round(cfg.refractory_s * fs)))
    accepted: list[int] = []
    rejected: list[int] = []  # noise-classified candidates since the last acceptance
    rr: deque[int] = deque(maxlen=_RR_HISTORY)

    for idx in candidates:
        if accepted and idx - accepted[-1] < refractory:
            continue
        if accepted and rr:
            gap = idx - accepted[-1]
            if gap > cfg.searchback_factor * (sum(rr) / len(rr)):
                threshold = npk + cfg.threshold_fraction * (spk - npk)
                lo = accepted[-1] + refractory
                hi = idx - refractory
                pool = [j for j in rejected if lo <= j <= hi and envelope[j] > 0.5 * threshold]
                if pool:
                    best = max(pool, key=lambda j: envelope[j])
                    spk = _SEARCHBACK_UPDATE * envelope[best] + (1.0 - _SEARCHBACK_UPDATE) * spk
                    rr.append(best - accepted[-1])
                    accepted.append(best)
                    rejected = [j for j in rejected if j > best]
        peak = envelope[idx]
        threshold = npk + cfg.threshold_fraction * (spk - npk)
        if peak > threshold:
            spk = cfg.peak_update * peak + (1.0 - cfg.peak_update) * spk
            if accepted:
                rr.append(idx - accepted[-1])
            accepted.append(idx)
            rejected = []
        else:
            npk = cfg.peak_update * peak + (1.0 - cfg.peak_update) * npk
            rejected.append(idx)
    return accepted


def _refine_events(
    events: list[int], waveform: np.ndarray, fs: float, cfg: DetectorConfig
) -> list[int]:
    """Map envelope events to waveform peak indices, enforcing the refractory gap."""
    half = max(1, int(round(cfg.refine_window_s * fs)))
    delay = int(round(cfg.envelope_delay_s * fs))
    refractory = max(1, int(round(cfg.refractory_s * fs)))
    refined: list[int] = []
    for event in events:
        center = event - delay
        lo = max(0, center - half)
        hi = min(waveform.size, center + half + 1)
        if lo >= hi:
            continue
        peak = lo + int(np.argmax(waveform[lo:hi]))
        if refined and peak - refined[-1] < refractory:
            if waveform[peak] > waveform[refined[-1]]:
                refined[-1] = peak
        elif not refined or peak > refined[-1]:
            refined.append(peak)
    return refined


def _detect(p: PreprocessedSignal, cfg: DetectorConfig, kind: str) -> BeatSeries:
    fs = p.source_fs
    events = _adaptive_events(p.integrated.samples, fs, cfg)
    refined = _refine_events(events, p.filtered.samples, fs, cfg)
    warmup = cfg.warmup_s * fs
    idx = np.asarray([j for j in refined if j >= warmup], dtype=np.intp)
    times = p.filtered.t0 + idx / fs
    series = BeatSeries(times, p.filtered.samples[idx], kind)
    gaps = np.diff(series.times)
    assert not gaps.size or gaps.min() >= cfg.refractory_s - 1.0 / fs
    return series


def detect_qrs(p: PreprocessedSignal, cfg: DetectorConfig | None = None) -> BeatSeries:
    """Locate R peaks in a preprocessed ECG recording."""
    if p.modality != MODALITY_ECG:
        raise ParameterError(f"QRS detection expects an ECG input, got {p.modality!r}")
    return _detect(p, cfg or ecg_detector_config(), KIND_ECG_R)


def detect_j_peaks(p: PreprocessedSignal, cfg: DetectorConfig | None = None) -> BeatSeries:
    """Locate J peaks (largest positive deflection) in a preprocessed BCG recording."""
    if p.modality != MODALITY_BCG:
        raise ParameterError(f"J-peak detection expects a BCG input, got {p.modality!r}")
    return _detect(p, cfg or bcg_detector_config(), KIND_BCG_J)


def beats_to_intervals(b: BeatSeries) -> IntervalSeries:
    """Successive beat-to-beat intervals in ms, anchored at the terminating beat."""
    if len(b) < 2:
        raise InsufficientBeatsError(
            f"interval computation needs at least 2 beats, got {len(b)}"
        )
    return IntervalSeries(np.diff(b.times) * 1000.0, b.times[1:], _INTERVAL_KIND[b.kind])


def mean_heart_rate(iv: IntervalSeries) -> float:
    """Heart rate in bpm from the mean beat-to-beat interval."""
    if len(iv) == 0:
        raise InsufficientBeatsError("mean heart rate needs a non-empty interval series")
    return 60000.0 / float(np.mean(iv.intervals_ms))


@dataclass(frozen=True)
class MatchResult:
    """Detection-vs-reference beat matching counts."""

    true_positive: int
    false_positive: int
    false_negative: int

    @property
    def sensitivity(self) -> float:
        found = self.true_positive + self.false_negative
        return self.true_positive / found if found else float("nan")

    @property
    def ppv(self) -> float:
        detected = self.true_positive + self.false_positive
        return self.true_positive / detected if detected else float("nan")


def match_beats(
    reference: np.ndarray,
    detected: np.ndarray,
    tol_s: float,
    window: tuple[float, float] | None = None,
) -> MatchResult:
    """Greedy one-to-one matching of detected beats against a reference.

    ``window`` restricts scoring to reference beats and detections inside
    the given time range, e.g. to exclude the detector's warm-up span.
    """
    ref = np.sort(np.asarray(reference, dtype=np.float64))
    det = np.sort(np.asarray(detected, dtype=np.float64))
    if window is not None:
        lo, hi = window
        ref = ref[(ref >= lo) & (ref <= hi)]
        det = det[(det >= lo) & (det <= hi)]
    used = np.zeros(det.size, dtype=bool)
    tp = 0
    j = 0
    for r in ref:
        while j < det.size and det[j] < r - tol_s:
            j += 1
        best = -1
        for k in range(max(0, j - 2), min(det.size, j + 3)):
            if used[k] or abs(det[k] - r) > tol_s:
                continue
            if best < 0 or abs(det[k] - r) < abs(det[best] - r):
                best = k
        if best >= 0:
            used[best] = True
            tp += 1
    return MatchResult(tp, int(det.size - tp), int(ref.size - tp))
