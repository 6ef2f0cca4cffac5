"""Compact finite-difference solver for damped Euler-Bernoulli beams and plates."""

from .damping import DampingLaw, law_from_spec, q_coefficient, simpson_1d, simpson_2d
from .expr import DomainError, ParseError, evaluate, parse
from .mesh import Grid1D, Grid2D, TimeGrid, inner, norm, sample
from .stepper1d import EnergyRecord, Problem1D, StabilityReport
from .stepper2d import Problem2D

__version__ = "0.1.0"

__all__ = [
    "DampingLaw",
    "DomainError",
    "EnergyRecord",
    "Grid1D",
    "Grid2D",
    "ParseError",
    "Problem1D",
    "Problem2D",
    "StabilityReport",
    "TimeGrid",
    "evaluate",
    "inner",
    "law_from_spec",
    "norm",
    "parse",
    "q_coefficient",
    "sample",
    "simpson_1d",
    "simpson_2d",
]
