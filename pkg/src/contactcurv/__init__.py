"""Horizontal curvature invariants of surfaces in three-dimensional contact groups."""

from .errors import *  # noqa: F401,F403
from .groups import builtin_model, GroupModel, StructureConstants
from .jets import ScalarField
from .surface import curvatures, horizontal_data

__version__ = "0.1.0"
