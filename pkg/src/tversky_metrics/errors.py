"""Exception hierarchy shared by all modules."""


class TverskyError(ValueError):
    """Base class for domain errors raised by this package."""


class UniverseTooSmall(TverskyError):
    pass


class UndefinedValue(TverskyError):
    """A measure has no value at the given arguments (0/0)."""


class GroundTooLarge(TverskyError):
    pass


class NotInRegime(TverskyError):
    """A counterexample construction was asked for outside its parameter range."""


class DomainError(TverskyError):
    pass


class DuplicateLabel(TverskyError):
    pass


class MatrixInvalid(TverskyError):
    pass


class MalformedFasta(TverskyError):
    pass


class MalformedNewick(TverskyError):
    pass
