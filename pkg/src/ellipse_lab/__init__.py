"""Numerical laboratory for the classical and quantum elliptical billiard."""

__version__ = "0.1.0"

from .actions import Branch, action_angular, action_radial, action_ratio_A0, actions, invert_A0, sector
from .billiard import (
    BoundaryPhasePoint,
    billiard_step,
    iterate,
    level_integral,
    leray_mass,
    rotation_number,
)
from .errors import EllipseLabError
from .geometry import EllipseGeometry, make_ellipse
from .mathieu import BC, AngularMode, Parity, RadialMode, angular_characteristic, radial_characteristic
from .spectrum import EigenvalueRecord, SymmetryClass, build_ladder, enumerate_spectrum, solve_intersection

__all__ = [
    "__version__",
    "BC",
    "AngularMode",
    "BoundaryPhasePoint",
    "Branch",
    "EigenvalueRecord",
    "EllipseGeometry",
    "EllipseLabError",
    "Parity",
    "RadialMode",
    "SymmetryClass",
    "action_angular",
    "action_radial",
    "action_ratio_A0",
    "actions",
    "angular_characteristic",
    "billiard_step",
    "build_ladder",
    "enumerate_spectrum",
    "invert_A0",
    "iterate",
    "level_integral",
    "leray_mass",
    "make_ellipse",
    "radial_characteristic",
    "rotation_number",
    "sector",
    "solve_intersection",
]
