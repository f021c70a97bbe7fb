"""Pipeline configuration: every tunable default in one place.

Values can be overridden from a ``key=value`` text file (``#`` comments and
blank lines allowed), so analyses are reproducible from the file plus the
recording alone. ``config_hash`` fingerprints the effective values for
report provenance.
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .detect import DetectorConfig
from .errors import FormatError, ParameterError
from .signals import BandSpec

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class PipelineConfig:
    # preprocessing
    ecg_band_lo: float = 5.0
    ecg_band_hi: float = 20.0
    bcg_band_lo: float = 0.1
    bcg_band_hi: float = 30.0
    bcg_detect_lo: float = 1.0
    bcg_detect_hi: float = 10.0
    filter_order: int = 4
    bcg_gain: float = 10.0
    ecg_integrate_window_s: float = 0.150
    bcg_integrate_window_s: float = 0.250
    # detection
    ecg_refractory_s: float = 0.200
    bcg_refractory_s: float = 0.300
    ecg_refine_window_s: float = 0.075
    bcg_refine_window_s: float = 0.150
    searchback_factor: float = 1.66
    threshold_fraction: float = 0.25
    peak_update: float = 0.125
    warmup_s: float = 1.0
    # interval screening
    clean_nn: bool = True
    nn_min_ms: float = 300.0
    nn_max_ms: float = 2000.0
    nn_max_deviation: float = 0.20
    nn_median_window: int = 5
    # spectral analysis
    tachogram_fs: float = 4.0
    welch_segment_s: float = 120.0
    welch_overlap: float = 0.5
    vlf_lo_hz: float = 0.0033
    lf_lo_hz: float = 0.04
    hf_lo_hz: float = 0.15
    hf_hi_hz: float = 0.4

    def ecg_band(self) -> BandSpec:
        return BandSpec(self.ecg_band_lo, self.ecg_band_hi, self.filter_order)

    def bcg_band(self) -> BandSpec:
        return BandSpec(self.bcg_band_lo, self.bcg_band_hi, self.filter_order)

    def bcg_detect_band(self) -> BandSpec:
        return BandSpec(self.bcg_detect_lo, self.bcg_detect_hi, self.filter_order)

    def ecg_detector(self) -> DetectorConfig:
        return DetectorConfig(
            refractory_s=self.ecg_refractory_s,
            refine_window_s=self.ecg_refine_window_s,
            envelope_delay_s=self.ecg_integrate_window_s / 2.0,
            searchback_factor=self.searchback_factor,
            threshold_fraction=self.threshold_fraction,
            peak_update=self.peak_update,
            warmup_s=self.warmup_s,
        )

    def bcg_detector(self) -> DetectorConfig:
        return DetectorConfig(
            refractory_s=self.bcg_refractory_s,
            refine_window_s=self.bcg_refine_window_s,
            envelope_delay_s=self.bcg_integrate_window_s / 2.0,
            searchback_factor=self.searchback_factor,
            threshold_fraction=self.threshold_fraction,
            peak_update=self.peak_update,
            warmup_s=self.warmup_s,
        )

    def bands(self) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
        return (
            (self.vlf_lo_hz, self.lf_lo_hz),
            (self.lf_lo_hz, self.hf_lo_hz),
            (self.hf_lo_hz, self.hf_hi_hz),
        )

    def as_dict(self) -> dict[str, float | int | bool]:
        return dataclasses.asdict(self)


def _coerce(name: str, raw: str, target_type: type) -> float | int | bool:
    raw = raw.strip()
    if target_type is bool:
        lowered = raw.lower()
        if lowered in _TRUE_WORDS:
            return True
        if lowered in _FALSE_WORDS:
            return False
        raise FormatError(f"config key {name}: expected a boolean, got {raw!r}")
    try:
        if target_type is int:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise FormatError(f"config key {name}: expected a number, got {raw!r}") from exc


def config_from_mapping(overrides: Mapping[str, str]) -> PipelineConfig:
    """Build a config from string overrides, validating names and types."""
    fields = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}
    types = {"float": float, "int": int, "bool": bool}
    values: dict[str, float | int | bool] = {}
    for name, raw in overrides.items():
        if name not in fields:
            raise ParameterError(f"unknown config key {name!r}")
        values[name] = _coerce(name, str(raw), types[fields[name]])
    return PipelineConfig(**values)


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a ``key=value`` config file into a PipelineConfig."""
    overrides: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise FormatError(f"config line {lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        overrides[key.strip()] = value.strip()
    return config_from_mapping(overrides)


def config_hash(cfg: PipelineConfig) -> str:
    """Stable fingerprint of the effective configuration values."""
    payload = "\n".join(f"{k}={v!r}" for k, v in sorted(cfg.as_dict().items()))
    return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()
