"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures to the
documented process status without inspecting messages.
"""


class SoficLyapError(Exception):
    exit_code = 1


class InvalidInputError(SoficLyapError, ValueError):
    exit_code = 2


class EmptyShiftError(InvalidInputError):
    """All bi-infinite walks were eliminated."""


class OrderTooSmallError(InvalidInputError):
    pass


class InvalidPositionError(InvalidInputError):
    pass


class InadmissibleWordError(InvalidInputError):
    pass


class TemplateMismatchError(InvalidInputError):
    """A template kind was used outside the regime where its encoding is exact."""


class InvalidCertificateError(InvalidInputError):
    pass


class DegenerateCertificateError(SoficLyapError):
    exit_code = 3


class NoCertificateError(SoficLyapError):
    exit_code = 3


class InconclusiveError(SoficLyapError):
    exit_code = 4
