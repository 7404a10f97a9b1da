"""Star-tracker image simulation and streak-detection benchmarking.

Simulates space-based optical frames (stars as PSF dots, resident space
objects as PSF-convolved streaks), writes auto-annotated datasets, and
scores detection files with an IoU / average-precision harness.  A
classical training-free detector closes the loop without any neural
network.
"""

__version__ = "0.1.0"

from .catalog import RsoEntry, StarEntry, TleRecord
from .evaluation import Detection, MetricsReport
from .photometry import RadiometryConfig
from .render import Frame, NoiseConfig, Scene, StreakAnnotation
from .sensor_geometry import Attitude, SensorModel

__all__ = [
    "Attitude",
    "Detection",
    "Frame",
    "MetricsReport",
    "NoiseConfig",
    "RadiometryConfig",
    "RsoEntry",
    "Scene",
    "SensorModel",
    "StarEntry",
    "StreakAnnotation",
    "TleRecord",
]
