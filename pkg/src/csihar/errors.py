"""Exception types shared across the toolkit."""


class CsiharError(Exception):
    """Base class for all toolkit errors."""


class MalformedCsv(CsiharError):
    """A sample or feature file does not follow the documented format."""


class LabelMismatch(CsiharError):
    """Rows of one sample file disagree on the activity label."""


class UnknownLabel(CsiharError):
    """A label token is not part of the accepted vocabulary."""


class EmptyInput(CsiharError):
    """An operation received zero samples or rows."""


class BadFraction(CsiharError, ValueError):
    """test_fraction outside the open interval (0, 1)."""


class TooFewRows(CsiharError, ValueError):
    """Not enough rows for the requested fold count."""


class RowCountMismatch(CsiharError):
    """Data file and label file disagree on the number of rows."""


class RaggedRows(CsiharError):
    """External feature files must be rectangular."""


class IoFailure(CsiharError):
    """Filesystem write or read failed."""


class BadConfig(CsiharError, ValueError):
    """Synthetic generator configuration violates its invariants."""


class NotBinary(CsiharError, ValueError):
    """The SVM trainer requires exactly two classes."""


class WidthMismatch(CsiharError, ValueError):
    """Prediction rows are not the width the model was trained on."""


class LengthMismatch(CsiharError, ValueError):
    """Actual and predicted label sequences have different lengths."""


class EmptyMatrix(CsiharError, ValueError):
    """A confusion matrix with zero total has no defined metrics."""


class ProtocolMismatch(CsiharError, ValueError):
    """Two experiment results use different protocols and cannot be compared."""


class DegenerateData(CsiharError, ValueError):
    """Training data has zero rows."""


class CorruptModel(CsiharError):
    """A model file failed to parse or validate."""


class VersionMismatch(CsiharError):
    """A model file declares an unsupported format version."""
