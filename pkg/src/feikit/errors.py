"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for bad input,
3 for a size cap, 4 for a violated internal invariant.
"""


class FeikitError(Exception):
    exit_code = 2


class BadParams(FeikitError):
    pass


class SizeLimit(FeikitError):
    exit_code = 3


class InvariantViolation(FeikitError):
    """A proved inequality or structural identity failed. Always a bug."""

    exit_code = 4


class NotBooleanValued(FeikitError):
    pass


class ConstantFunction(FeikitError):
    pass


class NotMonochromatic(FeikitError):
    def __init__(self, message, cell=None, point=None):
        super().__init__(message)
        self.cell = cell
        self.point = point


class NotAPartition(FeikitError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class LengthMismatch(FeikitError):
    pass


class Infeasible(FeikitError):
    pass


class ParseError(FeikitError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DuplicateLiteral(ParseError):
    pass


class NotFlat(FeikitError):
    pass


class NotOneEighthApprox(FeikitError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConfigError(FeikitError):
    pass
