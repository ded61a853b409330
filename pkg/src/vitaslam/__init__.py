"""Visuo-tactile SLAM: view and whisker templates fused in a pose-cell
attractor, an experience map with graph relaxation, and a small simulated
arena to drive it."""

from .config import Config, load_config
from .geometry import Pose, Twist
from .pipeline import RunConfig, RunReport, compare, run, run_log

__version__ = "0.1.0"

__all__ = ["Config", "load_config", "Pose", "Twist", "RunConfig", "RunReport",
           "compare", "run", "run_log"]
