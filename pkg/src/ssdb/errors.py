"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`SsdbError`;
the CLI maps all of them to exit code 2 and reports the class name.
"""


class SsdbError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SsdbError, ValueError):
    pass


class NotSymmetric(SsdbError, ValueError):
    pass


class NotInvolutive(SsdbError, ValueError):
    pass


class SpaceMismatch(SsdbError, ValueError):
    pass


class NotQPositive(SsdbError):
    pass


class NotQNegative(SsdbError):
    pass


class ComplementNotQNegative(SsdbError):
    pass


class IndefiniteDomain(SsdbError):
    pass


class SingularSystem(SsdbError):
    pass


class NotMonotone(SsdbError):
    pass


class NotMonotoneMatrix(SsdbError):
    pass


class ParseError(SsdbError, ValueError):
    pass
