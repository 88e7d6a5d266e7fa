"""Exception types shared across the package."""


class ZipfvecError(Exception):
    """Base class for package-specific failures."""


class EmptyVocabularyError(ZipfvecError, ValueError):
    """Every word fell below the min_count threshold."""


class InsufficientDataError(ZipfvecError, ValueError):
    """Not enough data points for the requested estimate."""


class DegenerateFitError(ZipfvecError, ValueError):
    """The count table admits no meaningful power-law fit."""


class UndefinedCorrelationError(ZipfvecError, ValueError):
    """Correlation undefined (zero variance or too few pairs)."""


class TrainingDivergedError(ZipfvecError, RuntimeError):
    """NaN/Inf detected in the embedding matrices."""


class DataFormatError(ZipfvecError, ValueError):
    """A data file does not match its documented format."""
