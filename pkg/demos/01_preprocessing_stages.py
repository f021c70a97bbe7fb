"""Walk a synthetic ECG/BCG pair through the enhancement chain.

Each modality goes band-pass -> derivative -> squaring -> moving-window
integration. The panels show how a raw waveform turns into the
non-negative envelope the beat detectors threshold: one clean lobe per
heartbeat, respiration and baseline drift gone.

Run from the repository root:

    python3 demos/01_preprocessing_stages.py
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from pulsepair import (
    BeatTrainProfile,
    derivative,
    moving_window_integrate,
    preprocess_bcg,
    square,
    synth_pair,
)
from pulsepair.signals import ECG_BAND, bandpass_filter

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# A 30-second pair at 75 bpm with mild variability and measurement noise.
profile = BeatTrainProfile(
    duration_s=30.0, mean_rr_ms=800.0, lf_amp_ms=30.0, hf_amp_ms=15.0,
    jitter_ms=10.0, seed=1,
)
pair = synth_pair(profile, snr_db=15.0)

# ECG: run the chain stage by stage so every intermediate is visible.
filtered = bandpass_filter(pair.ecg, ECG_BAND)
slope = derivative(filtered)
energy = square(slope)
envelope = moving_window_integrate(energy, 0.150)

stages = [
    (pair.ecg, "raw ECG (mV)"),
    (filtered, "band-passed 5-20 Hz"),
    (slope, "five-point derivative"),
    (energy, "squared"),
    (envelope, "moving-window integral (150 ms)"),
]

fig, axes = plt.subplots(len(stages), 1, figsize=(11, 9), sharex=True)
window = slice(int(5 * pair.ecg.fs), int(12 * pair.ecg.fs))
for ax, (signal, label) in zip(axes, stages):
    ax.plot(signal.times[window], signal.samples[window], lw=0.8)
    ax.set_ylabel(label, fontsize=8)
axes[-1].set_xlabel("time (s)")
fig.suptitle("ECG enhancement chain")
fig.tight_layout()
fig.savefig(OUT / "ecg_stages.png", dpi=120)
print(f"wrote {OUT / 'ecg_stages.png'}")

# BCG: same recipe behind preprocess_bcg, shown end to end. The J waves of
# the mechanical recoil ride ~150 ms after the electrical R peaks.
pre = preprocess_bcg(pair.bcg)
fig, axes = plt.subplots(3, 1, figsize=(11, 6), sharex=True)
axes[0].plot(pair.bcg.times[window], pair.bcg.samples[window], lw=0.8)
axes[0].set_ylabel("raw BCG (mV)", fontsize=8)
axes[1].plot(pre.filtered.times[window], pre.filtered.samples[window], lw=0.8)
axes[1].set_ylabel("gain x10, 0.1-30 Hz", fontsize=8)
axes[2].plot(pre.integrated.times[window], pre.integrated.samples[window], lw=0.8)
axes[2].set_ylabel("envelope (250 ms)", fontsize=8)
axes[2].set_xlabel("time (s)")
fig.suptitle("BCG enhancement chain")
fig.tight_layout()
fig.savefig(OUT / "bcg_stages.png", dpi=120)
print(f"wrote {OUT / 'bcg_stages.png'}")

print(f"{len(pair.beats)} ground-truth beats in {profile.duration_s:.0f} s")
