"""Exception and warning types shared across the package."""


class PulsePairError(Exception):
    """Base class for all pulsepair errors."""


class ParameterError(PulsePairError, ValueError):
    """An argument or configuration value is outside its valid range."""


class InputTooShortError(ParameterError):
    """A signal is too short for the requested operation."""


class FormatError(PulsePairError, ValueError):
    """An input file does not satisfy its format contract."""


class EmptyInputError(FormatError):
    """An input file or signal contains no data."""


class SchemaError(PulsePairError, ValueError):
    """Two structures that must share a schema do not."""


class InsufficientBeatsError(PulsePairError):
    """Too few detected beats to continue the analysis."""


class InsufficientDataError(PulsePairError):
    """Too few intervals for the requested statistic."""


class EmptyAfterCleaningError(InsufficientDataError):
    """Artifact screening rejected every interval."""


class InsufficientCohortError(PulsePairError):
    """Too few subjects for a cohort statistic."""


class ShortRecordingWarning(UserWarning):
    """The recording is shorter than recommended for the requested estimate."""
