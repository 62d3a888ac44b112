"""Explicit near-isometries between Fenchel-Nielsen surfaces and their distortion."""

from .composite import MODES, MapResult, PiecewiseMap, compose_f, continuity_residuals
from .distortion import DistortionReport, distortion, sample_points
from .smoothing import SmoothedMap, SmoothingDeviation, deviation, smooth, vertex_ball_radius
from .stretch import PolarChart, StretchMap, stretch_eval, stretch_jacobian
from .twist import TwistMap, collar_width, twist_eval, twist_jacobian

__all__ = [
    "MODES", "MapResult", "PiecewiseMap", "compose_f", "continuity_residuals",
    "DistortionReport", "distortion", "sample_points",
    "SmoothedMap", "SmoothingDeviation", "deviation", "smooth", "vertex_ball_radius",
    "PolarChart", "StretchMap", "stretch_eval", "stretch_jacobian",
    "TwistMap", "collar_width", "twist_eval", "twist_jacobian",
]
