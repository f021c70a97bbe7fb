"""ECG-vs-BCG agreement statistics: per-index differences, cohort
correlation, and Bland-Altman bias with 95% limits of agreement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InsufficientCohortError, SchemaError
from .hrv import FreqDomainIndices, TimeDomainIndices

INDEX_NAMES = (
    "mean_hr",
    "sdnn",
    "rmssd",
    "pnn50",
    "vlf_power",
    "lf_power",
    "hf_power",
    "total_power",
    "lf_hf_ratio",
)

INDEX_UNITS = {
    "mean_hr": "bpm",
    "sdnn": "ms",
    "rmssd": "ms",
    "pnn50": "percent",
    "vlf_power": "ms^2",
    "lf_power": "ms^2",
    "hf_power": "ms^2",
    "total_power": "ms^2",
    "lf_hf_ratio": "ratio",
}

TIME_DOMAIN_NAMES = INDEX_NAMES[:4]
FREQ_DOMAIN_NAMES = INDEX_NAMES[4:]

# Two-sided 95% normal quantile used for the limits of agreement.
_LIMITS_Z = 1.96


def index_map(time_idx: TimeDomainIndices, freq_idx: FreqDomainIndices | None = None) -> dict[str, float]:
    """Flatten index objects into the canonical name -> value mapping."""
    out = {
        "mean_hr": time_idx.mean_hr,
        "sdnn": time_idx.sdnn,
        "rmssd": time_idx.rmssd,
        "pnn50": time_idx.pnn50,
    }
    if freq_idx is not None:
        out.update(
            vlf_power=freq_idx.vlf_power,
            lf_power=freq_idx.lf_power,
            hf_power=freq_idx.hf_power,
            total_power=freq_idx.total_power,
            lf_hf_ratio=freq_idx.lf_hf_ratio,
        )
    return out


@dataclass(frozen=True)
class SubjectResult:
    """Both modalities' indices for one recording session."""

    subject_id: str
    ecg_time: TimeDomainIndices
    ecg_freq: FreqDomainIndices
    bcg_time: TimeDomainIndices
    bcg_freq: FreqDomainIndices

    def ecg_map(self) -> dict[str, float]:
        return index_map(self.ecg_time, self.ecg_freq)

    def bcg_map(self) -> dict[str, float]:
        return index_map(self.bcg_time, self.bcg_freq)


@dataclass(frozen=True)
class IndexDiffs:
    """Per-index absolute and relative differences for one subject.

    Relative differences use the first (ECG) side as reference and are
    omitted where the reference is zero; indices that are not finite on
    either side are omitted entirely.
    """

    abs_diff: dict[str, float]
    rel_diff: dict[str, float]


@dataclass(frozen=True)
class ComparisonReport:
    per_index_abs_diff: dict[str, float] = field(default_factory=dict)
    per_index_rel_diff: dict[str, float] = field(default_factory=dict)
    cohort_pearson_r: dict[str, float] = field(default_factory=dict)
    bland_altman: dict[str, tuple[float, float, float]] = field(default_factory=dict)


def compare_indices(ecg: Mapping[str, float], bcg: Mapping[str, float]) -> IndexDiffs:
    """Absolute and ECG-referenced relative differences, index by index."""
    if set(ecg) != set(bcg):
        missing = set(ecg) ^ set(bcg)
        raise SchemaError(f"index sets differ between modalities: {sorted(missing)}")
    abs_diff: dict[str, float] = {}
    rel_diff: dict[str, float] = {}
    for name in ecg:
        e, b = float(ecg[name]), float(bcg[name])
        if not (math.isfinite(e) and math.isfinite(b)):
            continue
        abs_diff[name] = abs(e - b)
        if e != 0.0:
            rel_diff[name] = abs(e - b) / abs(e)
    return IndexDiffs(abs_diff, rel_diff)


def _paired_vectors(
    results: Sequence[SubjectResult], name: str
) -> tuple[np.ndarray, np.ndarray]:
    e = np.array([r.ecg_map()[name] for r in results])
    b = np.array([r.bcg_map()[name] for r in results])
    ok = np.isfinite(e) & np.isfinite(b)
    return e[ok], b[ok]


def correlate_cohort(results: Sequence[SubjectResult]) -> dict[str, float]:
    """Pearson correlation of each index across the cohort.

    Indices with fewer than 3 finite pairs or zero variance on either side
    are reported absent.
    """
    if len(results) < 3:
        raise InsufficientCohortError(
            f"correlation needs at least 3 subjects, got {len(results)}"
        )
    out: dict[str, float] = {}
    for name in INDEX_NAMES:
        e, b = _paired_vectors(results, name)
        if e.size < 3:
            continue
        de = e - e.mean()
        db = b - b.mean()
        denom = math.sqrt(float(np.sum(de**2)) * float(np.sum(db**2)))
        if denom == 0.0:
            continue
        out[name] = float(np.sum(de * db)) / denom
    return out


def bland_altman(results: Sequence[SubjectResult]) -> dict[str, tuple[float, float, float]]:
    """Per-index (bias, lower limit, upper limit) of the ECG - BCG differences."""
    if len(results) < 2:
        raise InsufficientCohortError(
            f"Bland-Altman needs at least 2 subjects, got {len(results)}"
        )
    out: dict[str, tuple[float, float, float]] = {}
    for name in INDEX_NAMES:
        e, b = _paired_vectors(results, name)
        if e.size < 2:
            continue
        d = e - b
        bias = float(np.mean(d))
        spread = _LIMITS_Z * float(np.std(d, ddof=1))
        out[name] = (bias, bias - spread, bias + spread)
    return out


def compare_cohort(results: Sequence[SubjectResult]) -> ComparisonReport:
    """Aggregate a cohort: mean per-index differences, correlations, limits.

    The per-index difference maps hold the cohort means of the per-subject
    absolute and relative differences.
    """
    if len(results) < 3:
        raise InsufficientCohortError(
            f"cohort comparison needs at least 3 subjects, got {len(results)}"
        )
    abs_acc: dict[str, list[float]] = {}
    rel_acc: dict[str, list[float]] = {}
    for r in results:
        diffs = compare_indices(r.ecg_map(), r.bcg_map())
        for name, value in diffs.abs_diff.items():
            abs_acc.setdefault(name, []).append(value)
        for name, value in diffs.rel_diff.items():
            rel_acc.setdefault(name, []).append(value)
    return ComparisonReport(
        per_index_abs_diff={k: float(np.mean(v)) for k, v in abs_acc.items()},
        per_index_rel_diff={k: float(np.mean(v)) for k, v in rel_acc.items()},
        cohort_pearson_r=correlate_cohort(results),
        bland_altman=bland_altman(results),
    )
