"""Exception hierarchy.

Every numerical failure raised by the package derives from
:class:`EllipseLabError`; the CLI maps these to exit code 1 and prints
the class name.
"""


class EllipseLabError(Exception):
    """Base class for all package errors."""


# geometry
class DegenerateEllipse(EllipseLabError, ValueError):
    pass


class OutOfRange(EllipseLabError, ValueError):
    pass


# billiard / levels
class GlancingRay(EllipseLabError, ValueError):
    """The ray is tangent to the boundary, so the billiard map has no chord."""


class SeparatrixLevel(EllipseLabError, ValueError):
    """Level too close to I = 1 for the requested operation."""


class OutOfActionInterval(EllipseLabError, ValueError):
    pass


# actions
class DivisionDegenerate(EllipseLabError, ValueError):
    pass


class OutOfSector(EllipseLabError, ValueError):
    pass


# 1D solvers
class TruncationNotConverged(EllipseLabError, RuntimeError):
    pass


class GridTooCoarse(EllipseLabError, ValueError):
    pass


class ShootingBracketFailed(EllipseLabError, RuntimeError):
    pass


class NotACharacteristicValue(EllipseLabError, ValueError):
    pass


# spectrum
class NoBracket(EllipseLabError, RuntimeError):
    pass


class MultipleRoots(EllipseLabError, RuntimeError):
    """More than one sign change of the gap function inside a bracket."""


# cauchy / rigidity
class KindMismatch(EllipseLabError, ValueError):
    pass


class NotSymmetric(EllipseLabError, ValueError):
    pass


# oracle2d
class SolverStagnated(EllipseLabError, RuntimeError):
    pass


class SymbolSyntaxError(EllipseLabError, ValueError):
    pass
