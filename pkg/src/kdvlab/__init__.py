"""Finite-difference laboratory for the KdV (k=1) and modified KdV (k=2)
equations: a stabilized semi-discrete scheme, its implicit Euler/Newton time
discretization, reference solutions and the experiment drivers."""

from .exact import SolitonParams, TsutsumiParams, delta_mass, miura_transform, soliton, tsutsumi_data
from .grid import Boundary, Grid, GridFunction
from .rhs import ModelParams
from .stepper import StepperConfig, StepFailure, run, step

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "Grid",
    "GridFunction",
    "ModelParams",
    "SolitonParams",
    "StepFailure",
    "StepperConfig",
    "TsutsumiParams",
    "delta_mass",
    "miura_transform",
    "run",
    "soliton",
    "step",
    "tsutsumi_data",
]
