"""Numerical two-solution solver for doubly weighted nonlocal elliptic problems.

The package discretizes the concave-convex problem

    -Delta u + V(x) u = lambda a(x)|u|^{q-2}u + Phi[u](x) b(x)|u|^{p-2}u

on a truncated box, evaluates the energy with its doubly weighted nonlocal
term, works out the fibering-map algebra in closed form, estimates the two
extremal parameter values by minimizing the nonlinear Rayleigh quotients, and
finds the ground/bound state pair on the two Nehari branches for admissible
lambda.
"""

from .descent import DescentOptions, MaxIterationsError, NonfiniteValueError
from .fibering import (
    FiberTriple,
    FiberingReport,
    ManifoldClass,
    fiber_constants,
    lambda_e,
    lambda_n,
    nehari_roots,
    t_e,
    t_n,
)
from .functional import Coefficients, EnergyBreakdown, classify, energy, fiber_triple
from .grid import GridSpec, gaussian_bump, read_field, write_field
from .model import ModelParams, PotentialSpec, validate_hypotheses
from .rayleigh import (
    ExtremalEstimate,
    estimate_lambda_star,
    estimate_lambda_star_lower,
    extremal_residual,
    minimize_lambda_e,
    minimize_lambda_n,
)
from .solver import (
    NehariSolution,
    NoRootsError,
    TrichotomyReport,
    minimize_on_nplus,
    minimize_on_nminus,
    trichotomy_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "Coefficients",
    "DescentOptions",
    "EnergyBreakdown",
    "ExtremalEstimate",
    "FiberTriple",
    "FiberingReport",
    "GridSpec",
    "ManifoldClass",
    "MaxIterationsError",
    "ModelParams",
    "NehariSolution",
    "NoRootsError",
    "NonfiniteValueError",
    "PotentialSpec",
    "TrichotomyReport",
    "classify",
    "energy",
    "estimate_lambda_star",
    "estimate_lambda_star_lower",
    "extremal_residual",
    "fiber_constants",
    "fiber_triple",
    "gaussian_bump",
    "lambda_e",
    "lambda_n",
    "minimize_lambda_e",
    "minimize_lambda_n",
    "minimize_on_nplus",
    "minimize_on_nminus",
    "nehari_roots",
    "read_field",
    "t_e",
    "t_n",
    "trichotomy_experiment",
    "validate_hypotheses",
    "write_field",
]
