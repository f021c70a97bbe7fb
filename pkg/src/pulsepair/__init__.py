"""pulsepair: paired ECG/BCG heartbeat detection, HRV indices, and agreement analysis."""

from ._version import __version__
from .agreement import (
    INDEX_NAMES,
    ComparisonReport,
    IndexDiffs,
    SubjectResult,
    bland_altman,
    compare_cohort,
    compare_indices,
    correlate_cohort,
    index_map,
)
from .config import PipelineConfig, config_hash, load_config
from .detect import (
    BeatSeries,
    DetectorConfig,
    MatchResult,
    bcg_detector_config,
    beats_to_intervals,
    detect_j_peaks,
    detect_qrs,
    ecg_detector_config,
    match_beats,
    mean_heart_rate,
)
from .errors import (
    EmptyAfterCleaningError,
    EmptyInputError,
    FormatError,
    InputTooShortError,
    InsufficientBeatsError,
    InsufficientCohortError,
    InsufficientDataError,
    ParameterError,
    PulsePairError,
    SchemaError,
    ShortRecordingWarning,
)
from .hrv import (
    FreqDomainIndices,
    IntervalSeries,
    Spectrum,
    TimeDomainIndices,
    band_powers,
    clean_nn,
    resample_tachogram,
    time_domain,
    welch_psd,
)
from .io import (
    RecordingFile,
    read_beats,
    read_json,
    read_signal,
    write_beats,
    write_json,
    write_signal,
)
from .pipeline import (
    ModalityArtifacts,
    PipelineResult,
    analyze_signal,
    emit_plot_data,
    run_pipeline,
)
from .signals import (
    BandSpec,
    PreprocessedSignal,
    Signal,
    bandpass_filter,
    derivative,
    moving_window_integrate,
    preprocess_bcg,
    preprocess_ecg,
    square,
)
from .synth import (
    BeatTrainProfile,
    RenderProfile,
    SynthPair,
    generate_beat_times,
    render_bcg,
    render_ecg,
    synth_pair,
)

__all__ = [name for name in dir() if not name.startswith("_")]
