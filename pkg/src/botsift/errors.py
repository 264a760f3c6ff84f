"""Exception types shared across the package."""


class BotsiftError(Exception):
    """Base class for all botsift errors."""


class ConfigError(BotsiftError):
    """Invalid configuration (unknown keys, unsupported values)."""


class MalformedJson(BotsiftError):
    """Input is not valid JSON or lacks the required structure."""


class MissingCountField(BotsiftError):
    """A required count field is absent from an account document."""

    def __init__(self, field: str):
        super().__init__(f"missing required count field: {field}")
        self.field = field


class NegativeCount(BotsiftError):
    """A count field carries a negative value."""

    def __init__(self, field: str, value: int | None = None):
        detail = f" (got {value})" if value is not None else ""
        super().__init__(f"negative count in field: {field}{detail}")
        self.field = field


class UnlabeledRecord(BotsiftError):
    """An operation requiring labels met an unlabeled record."""


class TrainSizeTooLarge(BotsiftError):
    """Requested training-set size exceeds the dataset size."""


class IoFailure(BotsiftError):
    """A filesystem read or write failed."""


class TransientSourceFailure(BotsiftError):
    """An account-source call failed but may succeed when retried."""


class UnknownAccount(BotsiftError):
    """The account source has no record of the requested id."""


class CorruptCheckpoint(BotsiftError):
    """A checkpoint file is truncated, unparseable, or wrongly versioned."""


class EmptyFit(BotsiftError):
    """Normalization statistics requested over zero rows."""


class BelowFittedMin(BotsiftError):
    """A value fell below the fitted column minimum under reject policy."""


class DimensionMismatch(BotsiftError):
    """Input dimensionality does not match the model architecture."""


class NonFiniteLoss(BotsiftError):
    """Training loss or parameters became NaN/inf (divergent run)."""


class SchemaMismatch(BotsiftError):
    """A serialized model carries an unsupported schema version or shape."""


class LengthMismatch(BotsiftError):
    """Paired sequences have different lengths."""


class EmptyInput(BotsiftError):
    """An operation requiring data received none."""


class EmptyMatrix(BotsiftError):
    """A confusion matrix with zero total cannot be evaluated."""
