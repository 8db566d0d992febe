"""Exception types shared across the package."""


class DiagnosisError(Exception):
    """Base class for every error this package raises on purpose."""


class InvalidParameterError(DiagnosisError):
    """A numeric or structural argument is outside its allowed range."""


class InvalidTimeError(DiagnosisError):
    """A timestamp runs backwards or precedes the commissioning epoch."""


class IncompleteInputError(DiagnosisError):
    """A simulation or observation does not assign every input variable."""


class InconsistentObservationError(DiagnosisError):
    """No candidate can produce the observed values.

    Under fully specified fault behavior this means the model itself is
    wrong, so the condition is surfaced as an error instead of an
    unnormalizable belief.
    """


class ModelTooLargeError(DiagnosisError):
    """Exact enumeration would exceed the configured candidate cap."""


class InvalidComponentError(DiagnosisError):
    """A component id does not exist in the model."""


class InvalidDecisionError(DiagnosisError):
    """A composite decision does not cover the model's components."""


class ModelFormatError(DiagnosisError):
    """A model or scenario document does not match the expected schema."""


class EventError(DiagnosisError):
    """An event in a script could not be applied; carries the event index."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"event {index}: {cause}")
        self.index = index
        self.cause = cause
