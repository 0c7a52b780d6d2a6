"""Optimal plastic design of planar steel frames with nested genetic algorithms."""
from .config import ConfigError, fixture_problem, load_problem, parse_problem
from .fitness import FitnessBreakdown, evaluate_profile_chromosome
from .model import DesignProblem, frame_mass, max_mass, plastic_moment
from .orchestrator import run_design, timing_report

__all__ = [
    "ConfigError",
    "DesignProblem",
    "FitnessBreakdown",
    "evaluate_profile_chromosome",
    "fixture_problem",
    "frame_mass",
    "load_problem",
    "max_mass",
    "parse_problem",
    "plastic_moment",
    "run_design",
    "timing_report",
]

__version__ = "0.1.0"
