"""Exception hierarchy.

Every error raised by the library derives from :class:`BendingError` so
callers (and the CLI) can separate library failures from programming bugs.
"""


class BendingError(Exception):
    """Base class for all library errors."""


class InputError(BendingError):
    """Malformed user input (bad shapes, bad JSON documents)."""


class DimensionError(InputError, ValueError):
    pass


class WordError(InputError, KeyError):
    pass


class OrderError(InputError, ValueError):
    pass


class CollinearityError(BendingError, ValueError):
    pass


class DegenerateCrossRatio(BendingError, ZeroDivisionError):
    pass


class DegenerateLine(BendingError, ValueError):
    pass


class DomainError(BendingError, ValueError):
    """A point was expected to be interior to a domain and is not."""


class ZeroVector(BendingError, ValueError):
    pass


class ContainmentError(BendingError):
    pass


class DegenerateSection(BendingError, ValueError):
    pass


class LatticeError(BendingError, ValueError):
    pass


class NotYetDeep(BendingError):
    """The base point of a cusp simplex is not deep enough in the cusp."""


class IllFormedBending(BendingError):
    pass


class NotInCentralizer(BendingError):
    pass


class OrientationError(BendingError):
    pass


class NormalFormFailure(BendingError):
    pass


class SandwichFailure(BendingError):
    pass


class ModelError(BendingError):
    pass


class UnsupportedPlot(InputError):
    pass
