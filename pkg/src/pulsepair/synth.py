"""Synthetic paired ECG/BCG recordings with ground-truth beat times.

Beat trains carry controlled variability (sinusoidal LF/HF modulation of
the beat-to-beat gap plus white jitter); renderers lay analytic waveform
templates on those trains. Everything is a pure function of its profile,
with numpy's PCG64 generator supplying reproducible noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detect import KIND_ECG_R, BeatSeries
from .errors import ParameterError
from .signals import Signal

# Gaps below this are clamped; keeps trains physiological and detectable.
MIN_GAP_MS = 300.0

DEFAULT_FS = 250.0
DEFAULT_BCG_LATENCY_MS = 150.0
DEFAULT_ECG_AMPLITUDE_MV = 1.0
# Raw BCG sits in the tens of millivolts.
DEFAULT_BCG_AMPLITUDE_MV = 50.0

# ECG template: (offset s, width s, amplitude relative to the main peak)
# for the P, Q, R, S, and T waves. The R apex sits exactly on the beat time.
_ECG_WAVES = (
    (-0.200, 0.025, 0.12),
    (-0.030, 0.008, -0.15),
    (0.000, 0.012, 1.00),
    (0.030, 0.008, -0.22),
    (0.250, 0.070, 0.30),
)

# BCG template: a Gaussian-windowed cosine. The central positive lobe is the
# J wave; the symmetric negative side lobes play the I/K waves and the small
# outer positive lobes the H/L waves. Energy concentrates near the carrier.
_BCG_CARRIER_HZ = 5.0
_BCG_WIDTH_S = 0.080

# Each template bump is evaluated on a +/- 5 sigma slice.
_BUMP_SPAN_SIGMAS = 5.0


@dataclass(frozen=True)
class BeatTrainProfile:
    """Recipe for a beat train with controlled variability."""

    duration_s: float
    mean_rr_ms: float = 800.0
    lf_amp_ms: float = 0.0
    lf_freq_hz: float = 0.1
    hf_amp_ms: float = 0.0
    hf_freq_hz: float = 0.25
    jitter_ms: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.duration_s <= 0.0:
            raise ParameterError("duration must be positive")
        if not 300.0 <= self.mean_rr_ms <= 2000.0:
            raise ParameterError(
                f"mean gap must lie in [300, 2000] ms, got {self.mean_rr_ms}"
            )
        if self.lf_amp_ms < 0.0 or self.hf_amp_ms < 0.0 or self.jitter_ms < 0.0:
            raise ParameterError("modulation amplitudes must be non-negative")
        for freq in (self.lf_freq_hz, self.hf_freq_hz):
            if not 0.0 < freq < 0.5:
                raise ParameterError(f"modulation frequency {freq} Hz outside (0, 0.5)")


@dataclass(frozen=True)
class RenderProfile:
    """Waveform rendering parameters shared by both modalities."""

    fs: float = DEFAULT_FS
    noise_snr_db: float = math.inf
    bcg_latency_ms: float = DEFAULT_BCG_LATENCY_MS
    amplitude_mv: float = DEFAULT_ECG_AMPLITUDE_MV
    seed: int = 0

    def __post_init__(self) -> None:
        if self.fs < 100.0:
            raise ParameterError(f"rendering requires fs >= 100 Hz, got {self.fs}")
        if not 0.0 <= self.bcg_latency_ms <= 400.0:
            raise ParameterError(
                f"mechanical latency must lie in [0, 400] ms, got {self.bcg_latency_ms}"
            )
        if self.amplitude_mv <= 0.0:
            raise ParameterError("amplitude must be positive")


def generate_beat_times(p: BeatTrainProfile) -> BeatSeries:
    """Place beats iteratively from the modulated gap recipe.

    The gap after a beat at time t is
    ``mean_rr + lf_amp sin(2 pi f_lf t) + hf_amp sin(2 pi f_hf t) + jitter``,
    clamped to at least 300 ms. Deterministic for a given seed.
    """
    rng = np.random.default_rng(p.seed)
    times = [0.0]
    t = 0.0
    while True:
        gap_ms = (
            p.mean_rr_ms
            + p.lf_amp_ms * math.sin(2.0 * math.pi * p.lf_freq_hz * t)
            + p.hf_amp_ms * math.sin(2.0 * math.pi * p.hf_freq_hz * t)
            + rng.normal(0.0, p.jitter_ms)
        )
        t = t + max(gap_ms, MIN_GAP_MS) / 1000.0
        if t > p.duration_s:
            break
        times.append(t)
    if len(times) < 2:
        raise ParameterError("profile produces fewer than 2 beats")
    return BeatSeries(np.asarray(times), np.ones(len(times)), KIND_ECG_R)


def _add_bump(y: np.ndarray, fs: float, center: float, sigma: float, amp: float) -> None:
    lo = max(0, int(math.ceil((center - _BUMP_SPAN_SIGMAS * sigma) * fs)))
    hi = min(y.size, int(math.floor((center + _BUMP_SPAN_SIGMAS * sigma) * fs)) + 1)
    if lo >= hi:
        return
    t = np.arange(lo, hi) / fs - center
    y[lo:hi] += amp * np.exp(-0.5 * (t / sigma) ** 2)


def _add_wavelet(y: np.ndarray, fs: float, center: float, sigma: float, amp: float) -> None:
    lo = max(0, int(math.ceil((center - _BUMP_SPAN_SIGMAS * sigma) * fs)))
    hi = min(y.size, int(math.floor((center + _BUMP_SPAN_SIGMAS * sigma) * fs)) + 1)
    if lo >= hi:
        return
    t = np.arange(lo, hi) / fs - center
    y[lo:hi] += amp * np.exp(-0.5 * (t / sigma) ** 2) * np.cos(2.0 * math.pi * _BCG_CARRIER_HZ * t)


def _finish_render(template: np.ndarray, fs: float, snr_db: float, seed: int) -> Signal:
    if math.isinf(snr_db):
        return Signal(template, fs)
    rng = np.random.default_rng(seed)
    signal_power = float(np.mean(template**2))
    noise_std = math.sqrt(signal_power / (10.0 ** (snr_db / 10.0)))
    return Signal(template + rng.normal(0.0, noise_std, template.size), fs)


def _render_grid(beats: BeatSeries, fs: float, duration_s: float | None, tail_s: float) -> int:
    if len(beats) == 0:
        raise ParameterError("rendering needs at least one beat")
    if duration_s is None:
        duration_s = beats.times[-1] + tail_s
    elif beats.times[-1] > duration_s:
        raise ParameterError(
            f"last beat at {beats.times[-1]:.3f} s exceeds render duration {duration_s} s"
        )
    return int(round(duration_s * fs))


def render_ecg(beats: BeatSeries, r: RenderProfile, duration_s: float | None = None) -> Signal:
    """Render an ECG with the R apex of each complex on the beat time."""
    n = _render_grid(beats, r.fs, duration_s, tail_s=1.0)
    y = np.zeros(n)
    for beat in beats.times:
        for offset, sigma, rel_amp in _ECG_WAVES:
            _add_bump(y, r.fs, beat + offset, sigma, rel_amp)
    return _finish_render(y * r.amplitude_mv, r.fs, r.noise_snr_db, r.seed)


def render_bcg(beats: BeatSeries, r: RenderProfile, duration_s: float | None = None) -> Signal:
    """Render a BCG with the J apex at each beat time plus the mechanical latency."""
    latency_s = r.bcg_latency_ms / 1000.0
    n = _render_grid(beats, r.fs, duration_s, tail_s=1.0 + latency_s)
    y = np.zeros(n)
    for beat in beats.times:
        _add_wavelet(y, r.fs, beat + latency_s, _BCG_WIDTH_S, 1.0)
    return _finish_render(y * r.amplitude_mv, r.fs, r.noise_snr_db, r.seed)


@dataclass(frozen=True)
class SynthPair:
    """A paired recording: one beat train rendered through both modalities."""

    ecg: Signal
    bcg: Signal
    beats: BeatSeries
    latency_s: float

    @property
    def j_times(self) -> np.ndarray:
        """Ground-truth J-peak times (beat train shifted by the latency)."""
        return self.beats.times + self.latency_s


def synth_pair(
    train: BeatTrainProfile,
    fs: float = DEFAULT_FS,
    snr_db: float = math.inf,
    latency_ms: float = DEFAULT_BCG_LATENCY_MS,
    ecg_amplitude_mv: float = DEFAULT_ECG_AMPLITUDE_MV,
    bcg_amplitude_mv: float = DEFAULT_BCG_AMPLITUDE_MV,
) -> SynthPair:
    """One beat train rendered as a simultaneous ECG/BCG pair.

    The two renders use independent noise streams derived from the train
    seed, and share a common duration so the files align sample-for-sample.
    """
    beats = generate_beat_times(train)
    duration = train.duration_s + 1.0 + latency_ms / 1000.0
    ecg = render_ecg(
        beats,
        RenderProfile(fs, snr_db, latency_ms, ecg_amplitude_mv, seed=2 * train.seed + 1),
        duration_s=duration,
    )
    bcg = render_bcg(
        beats,
        RenderProfile(fs, snr_db, latency_ms, bcg_amplitude_mv, seed=2 * train.seed + 2),
        duration_s=duration,
    )
    return SynthPair(ecg, bcg, beats, latency_ms / 1000.0)
