import numpy as np
import pytest

from pulsepair import (
    BandSpec,
    EmptyInputError,
    InputTooShortError,
    ParameterError,
    Signal,
    bandpass_filter,
    derivative,
    moving_window_integrate,
    preprocess_bcg,
    preprocess_ecg,
    square,
    synth_pair,
)
from pulsepair.signals import ECG_BAND, _sos_for
from pulsepair.synth import BeatTrainProfile
from scipy.signal import sosfilt


def sine(freq, fs, duration=30.0, amp=1.0):
    t = np.arange(int(duration * fs)) / fs
    return Signal(amp * np.sin(2.0 * np.pi * freq * t), fs)


def steady_amplitude(y: Signal, freq: float) -> float:
    """Amplitude of the tone at `freq` via quadrature projection (mid-section)."""
    fs = y.fs
    lo, hi = int(5 * fs), int(25 * fs)
    n = hi - lo
    k = np.arange(lo, hi)
    phasor = np.exp(-2j * np.pi * freq * k / fs)
    return 2.0 * abs(np.dot(y.samples[lo:hi], phasor)) / n


def two_pass_gain(band: BandSpec, fs: float, freq: float) -> float:
    """Independent oracle: squared magnitude of the single-pass impulse response DFT."""
    imp = np.zeros(8192)
    imp[0] = 1.0
    h = sosfilt(_sos_for(band, fs), imp)
    k = np.arange(h.size)
    return abs(np.dot(h, np.exp(-2j * np.pi * freq * k / fs))) ** 2


class TestSignal:
    def test_rejects_empty(self):
        with pytest.raises(EmptyInputError):
            Signal([], 250.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ParameterError):
            Signal([1.0, np.nan], 250.0)

    def test_rejects_bad_fs(self):
        with pytest.raises(ParameterError):
            Signal([1.0, 2.0], 0.0)

    def test_times(self):
        x = Signal([1.0, 2.0, 3.0], 10.0, t0=1.0)
        assert np.allclose(x.times, [1.0, 1.1, 1.2])


class TestBandpass:
    def test_dc_rejected(self):
        x = Signal(np.ones(360 * 30), 360.0)
        y = bandpass_filter(x, BandSpec(5.0, 20.0, 4))
        mid = y.samples[360:-360]
        assert np.max(np.abs(mid)) < 1e-6

    def test_passband_tone_matches_impulse_response_oracle(self):
        band = BandSpec(5.0, 20.0, 4)
        y = bandpass_filter(sine(12.0, 360.0), band)
        measured = steady_amplitude(y, 12.0)
        predicted = two_pass_gain(band, 360.0, 12.0)
        assert 0.85 <= measured <= 1.0
        assert measured == pytest.approx(predicted, abs=1e-3)

    def test_stopband_tone_matches_impulse_response_oracle(self):
        band = BandSpec(5.0, 20.0, 4)
        y = bandpass_filter(sine(50.0, 360.0), band)
        measured = steady_amplitude(y, 50.0)
        predicted = two_pass_gain(band, 360.0, 50.0)
        assert measured < 0.1
        assert measured == pytest.approx(predicted, abs=1e-3)

    def test_band_invalid_for_fs(self):
        with pytest.raises(ParameterError):
            bandpass_filter(sine(10.0, 100.0), BandSpec(5.0, 60.0, 4))

    def test_input_too_short(self):
        with pytest.raises(InputTooShortError):
            bandpass_filter(Signal(np.ones(10), 360.0), BandSpec(5.0, 20.0, 4))

    def test_linearity(self):
        rng = np.random.default_rng(0)
        x = Signal(rng.normal(size=3000), 250.0)
        z = Signal(rng.normal(size=3000), 250.0)
        band = BandSpec(5.0, 20.0, 4)
        a, b = 2.5, -1.25
        combined = bandpass_filter(x.with_samples(a * x.samples + b * z.samples), band)
        separate = a * bandpass_filter(x, band).samples + b * bandpass_filter(z, band).samples
        scale = np.max(np.abs(separate))
        assert np.max(np.abs(combined.samples - separate)) / scale < 1e-9


class TestDerivative:
    def test_constant_gives_zero(self):
        y = derivative(Signal(np.full(100, 3.7), 100.0))
        assert np.max(np.abs(y.samples[4:])) < 1e-14

    def test_impulse_response(self):
        x = np.zeros(10)
        x[0] = 1.0
        y = derivative(Signal(x, 100.0))
        expected = [2 / 8, 1 / 8, 0.0, -1 / 8, -2 / 8, 0.0, 0.0, 0.0, 0.0, 0.0]
        assert np.array_equal(y.samples, expected)

    def test_ramp_steady_state(self):
        # (2n + (n-1) - (n-3) - 2(n-4)) / 8 = 1.25 for n >= 4
        y = derivative(Signal(np.arange(200, dtype=float), 100.0))
        assert np.all(y.samples[4:] == 1.25)

    def test_too_short(self):
        with pytest.raises(InputTooShortError):
            derivative(Signal(np.ones(4), 100.0))


class TestSquare:
    def test_values(self):
        y = square(Signal([-2.0, 0.0, 3.0], 10.0))
        assert np.array_equal(y.samples, [4.0, 0.0, 9.0])

    def test_zeros(self):
        y = square(Signal(np.zeros(5), 10.0))
        assert np.array_equal(y.samples, np.zeros(5))

    def test_matches_elementwise_multiply(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=500)
        y = square(Signal(x, 10.0))
        oracle = np.array([v * v for v in x])
        assert np.array_equal(y.samples, oracle)


class TestMovingWindowIntegrate:
    def test_constant_steady_state(self):
        y = moving_window_integrate(Signal(np.ones(100), 100.0), 0.07)
        assert np.allclose(y.samples[7:], 1.0, rtol=1e-12)

    def test_impulse_gives_rectangle(self):
        n = 7
        x = np.zeros(50)
        x[10] = float(n)
        y = moving_window_integrate(Signal(x, 100.0), n / 100.0)
        assert np.allclose(y.samples[10 : 10 + n], 1.0, rtol=1e-12)
        assert np.all(y.samples[:10] == 0.0)
        assert np.all(y.samples[10 + n :] == 0.0)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=300)
        n = 7
        y = moving_window_integrate(Signal(x, 100.0), n / 100.0)
        padded = np.concatenate([np.zeros(n - 1), x])
        oracle = np.array([padded[i : i + n].mean() for i in range(x.size)])
        assert np.allclose(y.samples, oracle, atol=1e-12)

    def test_window_longer_than_signal(self):
        with pytest.raises(ParameterError):
            moving_window_integrate(Signal(np.ones(10), 100.0), 1.0)

    def test_nonpositive_window(self):
        with pytest.raises(ParameterError):
            moving_window_integrate(Signal(np.ones(10), 100.0), 0.0)


def count_interior_lobes(envelope, fs, truth_times, mean_gap_s):
    """Contiguous regions above half the median per-beat envelope maximum.

    Scored over beats whose templates are fully on the sample grid (the
    train starts at t=0, so the first template is edge-clipped).
    """
    scored = truth_times[(truth_times >= 0.5) & (truth_times <= truth_times[-1] - 0.5)]
    half_gap = mean_gap_s / 2.0
    maxima = []
    for t in scored:
        lo, hi = int((t - half_gap) * fs), int((t + half_gap) * fs)
        maxima.append(envelope[lo:hi].max())
    threshold = 0.5 * np.median(maxima)
    lo = int((scored[0] - half_gap) * fs)
    hi = int((scored[-1] + half_gap) * fs)
    above = envelope[lo:hi] > threshold
    rises = int(above[0]) + int(np.count_nonzero(above[1:] & ~above[:-1]))
    return rises, scored.size


class TestPreprocessEcg:
    def test_one_lobe_per_beat(self):
        pair = synth_pair(BeatTrainProfile(duration_s=30.0, mean_rr_ms=800.0))
        pre = preprocess_ecg(pair.ecg)
        lobes, beats = count_interior_lobes(
            pre.integrated.samples, pair.ecg.fs, pair.beats.times, 0.8
        )
        assert lobes == beats

    def test_flatline_integrates_to_zero(self):
        pre = preprocess_ecg(Signal(np.ones(250 * 20), 250.0))
        assert np.max(pre.integrated.samples) < 1e-12

    def test_low_fs_rejected(self):
        with pytest.raises(ParameterError):
            preprocess_ecg(Signal(np.ones(5000), 50.0))


class TestPreprocessBcg:
    def test_gain_scales_filtered_peak(self):
        pair = synth_pair(BeatTrainProfile(duration_s=30.0, mean_rr_ms=800.0))
        pre = preprocess_bcg(pair.bcg, gain=10.0)
        peak = np.max(np.abs(pre.filtered.samples))
        # 50 mV template x10 gain, minus slight pass-band droop
        assert 0.85 * 500.0 <= peak <= 1.05 * 500.0

    def test_gain_squares_into_envelope(self):
        pair = synth_pair(BeatTrainProfile(duration_s=30.0, mean_rr_ms=800.0))
        p1 = preprocess_bcg(pair.bcg, gain=1.0)
        p10 = preprocess_bcg(pair.bcg, gain=10.0)
        mask = p1.integrated.samples > 1e-12
        ratio = p10.integrated.samples[mask] / p1.integrated.samples[mask]
        assert np.allclose(ratio, 100.0, rtol=1e-9)

    def test_one_lobe_per_beat(self):
        pair = synth_pair(BeatTrainProfile(duration_s=30.0, mean_rr_ms=800.0))
        pre = preprocess_bcg(pair.bcg)
        lobes, beats = count_interior_lobes(
            pre.integrated.samples, pair.bcg.fs, pair.j_times, 0.8
        )
        assert lobes == beats

    def test_nonpositive_gain_rejected(self):
        with pytest.raises(ParameterError):
            preprocess_bcg(Signal(np.ones(5000), 250.0), gain=0.0)


class TestChainInvariants:
    def test_length_and_fs_preserved(self):
        pair = synth_pair(BeatTrainProfile(duration_s=20.0, mean_rr_ms=800.0))
        for pre in (preprocess_ecg(pair.ecg), preprocess_bcg(pair.bcg)):
            assert len(pre.filtered) == len(pre.integrated) == len(pair.ecg)
            assert pre.filtered.fs == pre.integrated.fs == pair.ecg.fs

    def test_envelope_non_negative(self):
        pair = synth_pair(BeatTrainProfile(duration_s=20.0, mean_rr_ms=800.0), snr_db=10.0)
        assert np.all(preprocess_ecg(pair.ecg).integrated.samples >= 0.0)

    def test_chain_homogeneity(self):
        pair = synth_pair(BeatTrainProfile(duration_s=20.0, mean_rr_ms=800.0))
        alpha = 3.5
        base = preprocess_ecg(pair.ecg).integrated.samples
        scaled = preprocess_ecg(pair.ecg.with_samples(alpha * pair.ecg.samples)).integrated.samples
        ref = np.max(base)
        assert np.max(np.abs(scaled - alpha**2 * base)) / (alpha**2 * ref) < 1e-9

    def test_deterministic(self):
        pair = synth_pair(BeatTrainProfile(duration_s=20.0, mean_rr_ms=800.0), snr_db=15.0)
        a = preprocess_ecg(pair.ecg).integrated.samples
        b = preprocess_ecg(pair.ecg).integrated.samples
        assert np.array_equal(a, b)
