"""Interval-series container and time/frequency-domain variability indices."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import detrend, welch

from .errors import (
    EmptyAfterCleaningError,
    InsufficientDataError,
    ParameterError,
    ShortRecordingWarning,
)
from .signals import Signal

KIND_RR = "rr"
KIND_JJ = "jj"

# Artifact-screening defaults: physiological range plus a running-median
# deviation rule over the most recent accepted intervals.
NN_MIN_MS = 300.0
NN_MAX_MS = 2000.0
NN_MAX_DEVIATION = 0.20
NN_MEDIAN_WINDOW = 5

TACHOGRAM_FS = 4.0
WELCH_SEGMENT_S = 120.0
WELCH_OVERLAP = 0.5

VLF_BAND = (0.0033, 0.04)
LF_BAND = (0.04, 0.15)
HF_BAND = (0.15, 0.4)

# Recordings shorter than this give unreliable low-frequency power.
MIN_SPECTRAL_SPAN_S = 60.0


@dataclass(frozen=True)
class IntervalSeries:
    """Beat-to-beat intervals in milliseconds.

    ``anchors_s`` holds the timestamp of each interval's terminating beat,
    so the series doubles as an unevenly sampled tachogram.
    """

    intervals_ms: np.ndarray
    anchors_s: np.ndarray
    kind: str = KIND_RR

    def __post_init__(self) -> None:
        intervals = np.asarray(self.intervals_ms, dtype=np.float64)
        anchors = np.asarray(self.anchors_s, dtype=np.float64)
        if intervals.ndim != 1 or anchors.ndim != 1:
            raise ParameterError("intervals and anchors must be one-dimensional")
        if intervals.size != anchors.size:
            raise ParameterError("intervals and anchors must have equal length")
        if intervals.size and not np.all(intervals > 0.0):
            raise ParameterError("all intervals must be positive")
        if anchors.size > 1 and not np.all(np.diff(anchors) > 0.0):
            raise ParameterError("anchors must be strictly increasing")
        if self.kind not in (KIND_RR, KIND_JJ):
            raise ParameterError(f"unknown interval kind {self.kind!r}")
        object.__setattr__(self, "intervals_ms", intervals)
        object.__setattr__(self, "anchors_s", anchors)

    def __len__(self) -> int:
        return self.intervals_ms.size


@dataclass(frozen=True)
class TimeDomainIndices:
    mean_hr: float
    sdnn: float
    rmssd: float
    pnn50: float

    def __post_init__(self) -> None:
        if self.mean_hr <= 0.0 or self.sdnn < 0.0 or self.rmssd < 0.0:
            raise ParameterError("time-domain indices out of range")
        if not 0.0 <= self.pnn50 <= 100.0:
            raise ParameterError(f"pnn50 must be in [0, 100], got {self.pnn50}")


@dataclass(frozen=True)
class FreqDomainIndices:
    vlf_power: float
    lf_power: float
    hf_power: float
    total_power: float
    lf_hf_ratio: float

    def __post_init__(self) -> None:
        powers = (self.vlf_power, self.lf_power, self.hf_power, self.total_power)
        if any(p < 0.0 for p in powers):
            raise ParameterError("band powers must be non-negative")
        if self.vlf_power + self.lf_power + self.hf_power > self.total_power * (1.0 + 1e-9):
            raise ParameterError("band powers exceed total power")


@dataclass(frozen=True)
class Spectrum:
    """One-sided power spectral density on a uniform frequency grid."""

    freqs: np.ndarray
    psd: np.ndarray

    def __post_init__(self) -> None:
        freqs = np.asarray(self.freqs, dtype=np.float64)
        psd = np.asarray(self.psd, dtype=np.float64)
        if freqs.size != psd.size or freqs.size < 2:
            raise ParameterError("spectrum needs matching freqs and psd of length >= 2")
        if freqs[0] != 0.0 or not np.all(np.diff(freqs) > 0.0):
            raise ParameterError("frequency grid must increase strictly from 0")
        if np.any(psd < 0.0):
            raise ParameterError("power spectral density must be non-negative")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "psd", psd)


def clean_nn(
    iv: IntervalSeries,
    min_ms: float = NN_MIN_MS,
    max_ms: float = NN_MAX_MS,
    max_deviation: float = NN_MAX_DEVIATION,
    median_window: int = NN_MEDIAN_WINDOW,
) -> IntervalSeries:
    """Screen an interval series down to normal-to-normal intervals.

    An interval is rejected if it falls outside ``[min_ms, max_ms]`` or
    deviates from the median of the previous ``median_window`` accepted
    intervals by more than ``max_deviation`` (fractional). Anchors of
    rejected intervals are dropped; order is preserved.
    """
    if len(iv) == 0:
        raise InsufficientDataError("cannot clean an empty interval series")
    if median_window < 1:
        raise ParameterError("median window must be at least 1")
    kept: list[int] = []
    recent: list[float] = []
    for i, value in enumerate(iv.intervals_ms):
        if not min_ms <= value <= max_ms:
            continue
        if recent:
            med = float(np.median(recent[-median_window:]))
            if abs(value - med) > max_deviation * med:
                continue
        kept.append(i)
        recent.append(float(value))
    if not kept:
        raise EmptyAfterCleaningError("artifact screening rejected every interval")
    idx = np.asarray(kept, dtype=np.intp)
    return IntervalSeries(iv.intervals_ms[idx], iv.anchors_s[idx], iv.kind)


def time_domain(iv: IntervalSeries) -> TimeDomainIndices:
    """Mean heart rate, SDNN, RMSSD, and pNN50 of an interval series.

    SDNN is the sample standard deviation (divisor N-1). pNN50 counts
    successive differences strictly greater than 50 ms over the N-1
    successive pairs.
    """
    x = iv.intervals_ms
    if x.size < 2:
        raise InsufficientDataError(
            f"time-domain indices need at least 2 intervals, got {x.size}"
        )
    diffs = np.diff(x)
    return TimeDomainIndices(
        mean_hr=60000.0 / float(np.mean(x)),
        sdnn=float(np.std(x, ddof=1)),
        rmssd=float(np.sqrt(np.mean(diffs**2))),
        pnn50=100.0 * float(np.count_nonzero(np.abs(diffs) > 50.0)) / diffs.size,
    )


def resample_tachogram(iv: IntervalSeries, fs_resample: float = TACHOGRAM_FS) -> Signal:
    """Evenly resample the tachogram for spectral estimation.

    A natural cubic spline through (anchor, interval) is sampled uniformly
    over the anchor span, then linearly detrended. The result is invariant
    (up to rounding) under a constant shift of all anchors.
    """
    if len(iv) < 4:
        raise InsufficientDataError(
            f"tachogram resampling needs at least 4 intervals, got {len(iv)}"
        )
    if fs_resample <= 2.0 * HF_BAND[1]:
        raise ParameterError(
            f"resampling rate must exceed {2.0 * HF_BAND[1]} Hz, got {fs_resample}"
        )
    anchors = iv.anchors_s - iv.anchors_s[0]
    span = anchors[-1]
    if span < MIN_SPECTRAL_SPAN_S:
        warnings.warn(
            f"interval span of {span:.1f} s is under {MIN_SPECTRAL_SPAN_S:.0f} s; "
            "low-frequency power will be unreliable",
            ShortRecordingWarning,
            stacklevel=2,
        )
    spline = CubicSpline(anchors, iv.intervals_ms, bc_type="natural")
    n = int(np.floor(span * fs_resample)) + 1
    t = np.arange(n) / fs_resample
    y = detrend(spline(t), type="linear")
    return Signal(y, fs_resample, t0=iv.anchors_s[0])


def welch_psd(
    x: Signal,
    segment_s: float = WELCH_SEGMENT_S,
    overlap_fraction: float = WELCH_OVERLAP,
) -> Spectrum:
    """Averaged Hann-windowed periodogram, one-sided density scaling.

    The integral of the density over the frequency grid matches the mean
    square of the input up to spectral leakage. A signal shorter than one
    segment falls back to a single periodogram with a warning.
    """
    if not 0.0 <= overlap_fraction < 1.0:
        raise ParameterError(f"overlap fraction must be in [0, 1), got {overlap_fraction}")
    nperseg = int(round(segment_s * x.fs))
    if nperseg < 16:
        raise ParameterError(
            f"segment of {segment_s} s covers {nperseg} samples; at least 16 required"
        )
    if nperseg > len(x):
        warnings.warn(
            f"signal of {len(x)} samples is shorter than one {nperseg}-sample "
            "segment; falling back to a single periodogram",
            ShortRecordingWarning,
            stacklevel=2,
        )
        nperseg = len(x)
    noverlap = min(int(round(overlap_fraction * nperseg)), nperseg - 1)
    freqs, psd = welch(
        x.samples, fs=x.fs, window="hann", nperseg=nperseg, noverlap=noverlap, detrend=False
    )
    return Spectrum(freqs, psd)


def _band_integral(freqs: np.ndarray, psd: np.ndarray, lo: float, hi: float) -> float:
    # Trapezoidal integral over [lo, hi] with interpolated band edges, so
    # adjacent bands tile exactly.
    inner = (freqs > lo) & (freqs < hi)
    f = np.concatenate(([lo], freqs[inner], [hi]))
    p = np.concatenate(([np.interp(lo, freqs, psd)], psd[inner], [np.interp(hi, freqs, psd)]))
    return float(np.trapezoid(p, f))


def band_powers(
    s: Spectrum,
    vlf: tuple[float, float] = VLF_BAND,
    lf: tuple[float, float] = LF_BAND,
    hf: tuple[float, float] = HF_BAND,
) -> FreqDomainIndices:
    """Integrate the density over the VLF/LF/HF bands.

    ``total_power`` spans the union of the three bands. The LF/HF ratio is
    NaN when HF power is zero.
    """
    if s.freqs[-1] < hf[1]:
        raise ParameterError(
            f"spectrum ends at {s.freqs[-1]} Hz; must extend to {hf[1]} Hz"
        )
    vlf_p = _band_integral(s.freqs, s.psd, *vlf)
    lf_p = _band_integral(s.freqs, s.psd, *lf)
    hf_p = _band_integral(s.freqs, s.psd, *hf)
    total = _band_integral(s.freqs, s.psd, vlf[0], hf[1])
    ratio = lf_p / hf_p if hf_p > 0.0 else float("nan")
    return FreqDomainIndices(vlf_p, lf_p, hf_p, total, ratio)
