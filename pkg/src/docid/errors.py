"""Exception hierarchy shared by all docid modules.

ValidationError subclasses map to CLI exit code 2, RuntimeFailure
subclasses to exit code 3.
"""


class DocidError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DocidError):
    """Bad user input: files, schemas, parameters."""


class RuntimeFailure(DocidError):
    """Failure while processing otherwise valid input."""


# -- imaging ----------------------------------------------------------------

class IoError(ValidationError):
    """File missing or unreadable."""


class DecodeError(ValidationError):
    """Unsupported or corrupt image format."""


class OutOfBounds(ValidationError):
    """Crop rectangle not fully inside the image."""


class ImageTooSmall(ValidationError):
    """Image below the minimum size an operation supports."""


# -- descriptors / similarity ------------------------------------------------

class ZeroVector(RuntimeFailure):
    """Cosine similarity is undefined for a zero vector."""


# -- fuzzy inference ----------------------------------------------------------

class NoRuleFired(RuntimeFailure):
    """Aggregated output area is zero: no rule matched the inputs."""


class UnknownColor(RuntimeFailure):
    """Color naming failed because no fuzzy rule fired."""


# -- calibration ---------------------------------------------------------------

class DegenerateDistribution(RuntimeFailure):
    """All raw scores equal: population sigma is zero."""


class InsufficientData(ValidationError):
    """Too few samples to fit the calibration model."""


class SingleClassData(ValidationError):
    """Calibration fit needs both labels present."""


class SchemaError(ValidationError):
    """Serialized file does not match the expected schema."""


class MissingCalibration(ValidationError):
    """Strategy needs a trained calibration model and none was given."""


# -- text matching -------------------------------------------------------------

class ProviderUnavailable(RuntimeFailure):
    """Text provider could not be reached."""


class ProviderError(RuntimeFailure):
    """Text provider reached but returned a failure."""


# -- fusion / evaluation ---------------------------------------------------------

class EmptyOutcome(ValidationError):
    """Fusion needs non-empty classifier outcomes."""


class EmptyInput(ValidationError):
    """Evaluation input sequence is empty."""


class SingleClassInput(ValidationError):
    """Evaluation needs both labels (or two classes) present."""


# -- enrollment -------------------------------------------------------------------

class DuplicateClassId(ValidationError):
    """Manifest declares the same class id twice."""


class KeywordSubsetWarning(UserWarning):
    """One class's keyword set subsumes another's; text match cannot separate them."""
