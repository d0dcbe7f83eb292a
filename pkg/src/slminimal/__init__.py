"""Minimal-surface geometry in the homogeneous space SL2~(R) = E(-1, tau)."""

from .errors import SLMinimalError
from .geometry import (
    INFINITY,
    Model,
    MoebiusIsometry,
    Point3,
    apply_isometry,
    apply_isometry_boundary,
    metric_at,
    polar_metric_at,
    to_cylinder,
    to_half_space,
)

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "Model",
    "MoebiusIsometry",
    "Point3",
    "SLMinimalError",
    "apply_isometry",
    "apply_isometry_boundary",
    "metric_at",
    "polar_metric_at",
    "to_cylinder",
    "to_half_space",
]
