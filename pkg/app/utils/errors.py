class SftDegreeError(Exception):
    """Root of every error raised on purpose by this package."""

    exit_code = 1


class InvalidInputError(SftDegreeError, ValueError):
    exit_code = 2


class InfiniteRepresentationError(InvalidInputError):
    """The presentation's finite-representation subgraph F is infinite."""


class UndefinedTermError(InvalidInputError):
    """An empirical degree term needs ln of a non-positive quantity."""


class ResourceCapError(SftDegreeError, RuntimeError):
    exit_code = 3

    def __init__(self, what, attempted, cap):
        self.what = what
        self.attempted = attempted
        self.cap = cap
        super().__init__(f"{what}: {attempted} exceeds cap {cap}")


class NumericalError(SftDegreeError, ArithmeticError):
    exit_code = 4


class InexactDivisionError(NumericalError):
    pass
