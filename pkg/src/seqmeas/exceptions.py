"""Exception hierarchy shared by every layer of the package."""


class SeqmeasError(Exception):
    """Base class for all domain errors raised by seqmeas."""


class DimensionMismatchError(SeqmeasError, ValueError):
    """Two objects live in Hilbert spaces of different dimension."""


class NotNormalizedError(SeqmeasError, ValueError):
    """A state vector does not have unit norm."""


class NullVectorError(SeqmeasError, ValueError):
    """Normalization was requested for a vector of (numerically) zero norm."""


class NotHermitianError(SeqmeasError, ValueError):
    pass


class NotOrthonormalError(SeqmeasError, ValueError):
    pass


class ImpossibleOutcomeError(SeqmeasError, ValueError):
    """The requested outcome has zero probability for the given state."""


class CapacityError(SeqmeasError):
    """The device is too large for exact enumeration."""


class UnknownLabelError(SeqmeasError, KeyError):
    pass


class ResolutionError(SeqmeasError, ValueError):
    """Resolution amplitudes violate a structural requirement.

    ``column`` holds the index of the offending true-value column when the
    failure can be pinned to one.
    """

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class ConfigError(SeqmeasError, ValueError):
    """A scenario configuration document could not be parsed.

    ``field`` names the offending entry using a dotted path such as
    ``measurement_states[2].amplitudes``.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
