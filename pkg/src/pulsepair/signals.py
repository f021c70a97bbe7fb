"""Signal container and the heartbeat-enhancement preprocessing chains.

Both modalities share the same enhancement recipe: zero-phase band-pass
filtering followed by a five-point derivative, pointwise squaring, and a
moving-window integrator. The result is a non-negative envelope whose
lobes mark heartbeats; only band edges, gain, and integrator width differ
between ECG and BCG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, sosfiltfilt

from .errors import EmptyInputError, InputTooShortError, ParameterError

MODALITY_ECG = "ecg"
MODALITY_BCG = "bcg"

# Minimum sampling rate accepted by the preprocessing chains. Below this the
# ECG pass band crowds the Nyquist limit and QRS timing degrades.
MIN_PREPROCESS_FS = 100.0

ECG_INTEGRATE_WINDOW_S = 0.150
BCG_INTEGRATE_WINDOW_S = 0.250
DEFAULT_BCG_GAIN = 10.0

# Five-point derivative, y[n] = (2 x[n] + x[n-1] - x[n-3] - 2 x[n-4]) / 8,
# with zero-padded history for the first four samples.
_DERIVATIVE_KERNEL = np.array([2.0, 1.0, 0.0, -1.0, -2.0]) / 8.0


@dataclass(frozen=True)
class Signal:
    """A uniformly sampled amplitude series.

    Parameters
    ----------
    samples : array_like
        Amplitude values (millivolts for raw recordings, arbitrary units
        after any nonlinear stage).
    fs : float
        Sampling rate in Hz. Must be positive.
    t0 : float
        Time of the first sample in seconds.
    """

    samples: np.ndarray
    fs: float
    t0: float = 0.0

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ParameterError("signal samples must be one-dimensional")
        if samples.size == 0:
            raise EmptyInputError("signal has no samples")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("signal contains non-finite samples")
        fs = float(self.fs)
        if not fs > 0.0:
            raise ParameterError(f"sampling rate must be positive, got {fs}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "fs", fs)
        object.__setattr__(self, "t0", float(self.t0))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        """Sample timestamps in seconds."""
        return self.t0 + np.arange(self.samples.size) / self.fs

    @property
    def duration_s(self) -> float:
        return (self.samples.size - 1) / self.fs

    def with_samples(self, samples: np.ndarray) -> "Signal":
        """A new signal with the same time base and different samples."""
        return Signal(samples, self.fs, self.t0)


@dataclass(frozen=True)
class BandSpec:
    """Pass band and order of a Butterworth band-pass filter.

    ``order`` is the overall filter order of a single pass (an even number;
    ``order // 2`` biquad sections). The filter is applied forward-backward,
    so the effective magnitude response is the squared single-pass response.
    """

    lo: float
    hi: float
    order: int = 4

    def __post_init__(self) -> None:
        if not 0.0 < self.lo < self.hi:
            raise ParameterError(
                f"band edges must satisfy 0 < lo < hi, got ({self.lo}, {self.hi})"
            )
        if self.order < 2 or self.order % 2 != 0:
            raise ParameterError(f"filter order must be even and >= 2, got {self.order}")

    def validate_for(self, fs: float) -> None:
        """Raise ParameterError if the band does not fit under Nyquist."""
        if self.hi >= fs / 2.0:
            raise ParameterError(
                f"band upper edge {self.hi} Hz must lie below Nyquist ({fs / 2.0} Hz)"
            )


ECG_BAND = BandSpec(5.0, 20.0, 4)
BCG_BAND = BandSpec(0.1, 30.0, 4)
# Detection band inside the BCG pass band: keeps respiration out of the
# envelope while retaining the heartbeat energy.
BCG_DETECT_BAND = BandSpec(1.0, 10.0, 4)


@dataclass(frozen=True)
class PreprocessedSignal:
    """Band-passed signal plus its heartbeat envelope.

    ``filtered`` is the band-passed waveform used for peak refinement;
    ``integrated`` is the derivative -> square -> integrate envelope the
    detectors threshold. Both share length and sampling rate with the
    source recording.
    """

    filtered: Signal
    integrated: Signal
    source_fs: float
    modality: str

    def __post_init__(self) -> None:
        if self.modality not in (MODALITY_ECG, MODALITY_BCG):
            raise ParameterError(f"unknown modality {self.modality!r}")
        if len(self.filtered) != len(self.integrated):
            raise ParameterError("filtered and integrated signals differ in length")
        if not (self.filtered.fs == self.integrated.fs == self.source_fs):
            raise ParameterError("preprocessed stages must share the source sampling rate")
        if np.any(self.integrated.samples < 0.0):
            raise ParameterError("integrated envelope must be non-negative")


def _sos_for(band: BandSpec, fs: float) -> np.ndarray:
    return butter(band.order // 2, [band.lo, band.hi], btype="bandpass", fs=fs, output="sos")


def _filtfilt_padlen(sos: np.ndarray) -> int:
    # Start-up transient of one pass, tripled for the forward-backward edges.
    ntaps = 2 * sos.shape[0] + 1
    ntaps -= min((sos[:, 2] == 0).sum(), (sos[:, 5] == 0).sum())
    return 3 * int(ntaps)


def bandpass_filter(x: Signal, band: BandSpec) -> Signal:
    """Zero-phase Butterworth band-pass.

    The cascade is applied forward then backward, so the output has no
    phase distortion and the stop-band attenuation of two passes. Length,
    sampling rate, and start time are preserved.
    """
    band.validate_for(x.fs)
    sos = _sos_for(band, x.fs)
    padlen = _filtfilt_padlen(sos)
    if len(x) <= padlen:
        raise InputTooShortError(
            f"signal of {len(x)} samples is shorter than the filter start-up "
            f"transient of {padlen} samples"
        )
    return x.with_samples(sosfiltfilt(sos, x.samples, padlen=padlen))


def derivative(x: Signal) -> Signal:
    """Five-point derivative emphasizing steep slopes.

    Uses zero-padded history, so output length equals input length.
    """
    if len(x) < 5:
        raise InputTooShortError("derivative needs at least 5 samples")
    y = np.convolve(x.samples, _DERIVATIVE_KERNEL)[: len(x)]
    return x.with_samples(y)


def square(x: Signal) -> Signal:
    """Pointwise square; makes the series non-negative."""
    return x.with_samples(np.square(x.samples))


def moving_window_integrate(x: Signal, window_s: float) -> Signal:
    """Causal moving average over ``window_s`` seconds with zero-padded history."""
    if window_s <= 0.0:
        raise ParameterError(f"integrator window must be positive, got {window_s}")
    n = int(round(window_s * x.fs))
    if n < 1:
        raise ParameterError(f"integrator window {window_s} s is under one sample")
    if n > len(x):
        raise ParameterError(
            f"integrator window of {n} samples exceeds signal length {len(x)}"
        )
    y = np.convolve(x.samples, np.full(n, 1.0 / n))[: len(x)]
    return x.with_samples(y)


def _enhance(filtered: Signal, window_s: float) -> Signal:
    return moving_window_integrate(square(derivative(filtered)), window_s)


def preprocess_ecg(
    x: Signal,
    band: BandSpec = ECG_BAND,
    integrate_window_s: float = ECG_INTEGRATE_WINDOW_S,
) -> PreprocessedSignal:
    """Run the ECG enhancement chain (band-pass 5-20 Hz by default)."""
    if x.fs < MIN_PREPROCESS_FS:
        raise ParameterError(
            f"ECG preprocessing requires fs >= {MIN_PREPROCESS_FS} Hz, got {x.fs}"
        )
    filtered = bandpass_filter(x, band)
    return PreprocessedSignal(filtered, _enhance(filtered, integrate_window_s), x.fs, MODALITY_ECG)


def preprocess_bcg(
    x: Signal,
    gain: float = DEFAULT_BCG_GAIN,
    band: BandSpec = BCG_BAND,
    detect_band: BandSpec = BCG_DETECT_BAND,
    integrate_window_s: float = BCG_INTEGRATE_WINDOW_S,
) -> PreprocessedSignal:
    """Run the BCG enhancement chain.

    The raw signal is amplified by ``gain`` and band-passed to 0.1-30 Hz
    (the ``filtered`` output). A narrower detection band is then applied
    before the envelope stages so that respiration does not leak into the
    detector.
    """
    if gain <= 0.0:
        raise ParameterError(f"gain must be positive, got {gain}")
    if x.fs < MIN_PREPROCESS_FS:
        raise ParameterError(
            f"BCG preprocessing requires fs >= {MIN_PREPROCESS_FS} Hz, got {x.fs}"
        )
    filtered = bandpass_filter(x.with_samples(x.samples * gain), band)
    narrow = bandpass_filter(filtered, detect_band)
    return PreprocessedSignal(filtered, _enhance(narrow, integrate_window_s), x.fs, MODALITY_BCG)
