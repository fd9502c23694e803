"""Exception hierarchy shared by all modules."""


class PadicError(Exception):
    """Base class for every error raised by this package."""


# arithmetic

class DivisionByZero(PadicError, ZeroDivisionError):
    pass


class PrecisionUnderflow(PadicError, ArithmeticError):
    """Cancellation left fewer guaranteed digits than the context floor."""


class PrecisionExceeded(PadicError, ValueError):
    """A query asked for more digits than the value carries."""


class ZeroHasNoDigits(PadicError, ValueError):
    pass


class OutOfDomain(PadicError, ValueError):
    """Argument outside the convergence ball of a series."""


class NotAResidue(PadicError, ValueError):
    pass


class NotASquare(PadicError, ValueError):
    pass


class ZeroInput(PadicError, ValueError):
    pass


# model / solver

class CouplingOutOfRange(PadicError, ValueError):
    pass


class WrongOrder(PadicError, ValueError):
    pass


class DeltaNotSquare(PadicError, ValueError):
    pass


class RootDoesNotExist(PadicError, LookupError):
    pass


class NoSolution(PadicError, ValueError):
    pass


# trees and measures

class TooLarge(PadicError, ValueError):
    pass


class RegionMismatch(PadicError, ValueError):
    pass


class DegenerateNormalizer(PadicError, ArithmeticError):
    """The partition function cannot be certified nonzero."""


class MissingChildren(PadicError, LookupError):
    pass


class OrderTooSmall(PadicError, ValueError):
    pass
