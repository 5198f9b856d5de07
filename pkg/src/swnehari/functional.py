"""Energy functional, its first variation and the second-derivative slope.

For coefficients (V, a, b) sampled on a grid, the discrete energy is

    J_lam(u) = 1/2 ||u||^2 - (lam/q) A(u) - 1/(2p) B(u),

with ||u||^2 the H1_V norm, A(u) = integral a|u|^q and B(u) the nonlocal
interaction energy.  ``residual`` assembles the strong-form gradient field
whose L2 pairing with any test field equals the exact Gateaux derivative of
the discrete energy (the Laplacian is the quadrature adjoint of the gradient
stencil, see grid.neg_laplacian).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fibering, steinweiss
from .grid import GridSpec, h1v_norm_sq, integrate, neg_laplacian
from .model import ModelParams, PotentialSpec, sample_potential

__all__ = [
    "Coefficients",
    "EnergyBreakdown",
    "a_value",
    "h_value",
    "energy",
    "slope",
    "second_along",
    "residual",
    "residual_norm",
    "fiber_triple",
    "classify",
]


@dataclass(frozen=True)
class Coefficients:
    """One discrete problem: grid plus sampled V, a, b and the parameters."""

    grid: GridSpec
    params: ModelParams
    v_pot: np.ndarray
    a_pot: np.ndarray
    b_pot: np.ndarray

    @classmethod
    def assemble(cls, params: ModelParams, grid: GridSpec) -> "Coefficients":
        """Sample the model's potential families on the grid.

        V is the constant v0; a and b are the inverse-quadratic-decay family
        with rates gamma1, gamma2 and unit coefficient.
        """
        r2 = grid.radius_sq()
        v = sample_potential(PotentialSpec("constant", params.v0), r2)
        a = sample_potential(PotentialSpec("inverse-quadratic-decay", 1.0, params.gamma1), r2)
        b = sample_potential(PotentialSpec("inverse-quadratic-decay", 1.0, params.gamma2), r2)
        return cls(grid, params, v, a, b)

    def norm_sq(self, u: np.ndarray) -> float:
        return h1v_norm_sq(self.grid, u, self.v_pot)

    def norm(self, u: np.ndarray) -> float:
        return float(np.sqrt(self.norm_sq(u)))


@dataclass(frozen=True)
class EnergyBreakdown:
    norm_sq: float
    a_val: float
    b_val: float
    j_val: float

    def to_dict(self) -> dict:
        return {
            "norm_sq": self.norm_sq,
            "A": self.a_val,
            "B": self.b_val,
            "J": self.j_val,
        }


def _concave_power(u: np.ndarray, q: float) -> np.ndarray:
    # |u|^{q-2} u with the value 0 at u = 0; for q = 1 this is sign(u) with
    # sign(0) = 0, relying on 0**0 == 1 in numpy
    return np.sign(u) * np.abs(u) ** (q - 1.0)


def a_value(c: Coefficients, u: np.ndarray) -> float:
    """Concave-term mass A(u) = integral a |u|^q."""
    return integrate(c.grid, c.a_pot * np.abs(u) ** c.params.q)


def h_value(c: Coefficients, u: np.ndarray, phi: np.ndarray) -> float:
    """Pairing H(u, phi) = integral a |u|^{q-2} u phi; H(u,u) = A(u)."""
    return integrate(c.grid, c.a_pot * _concave_power(u, c.params.q) * phi)


def energy(c: Coefficients, u: np.ndarray, lam: float) -> EnergyBreakdown:
    ns = c.norm_sq(u)
    a = a_value(c, u)
    b = steinweiss.b_value(c.grid, u, c.b_pot, c.params)
    j = 0.5 * ns - (lam / c.params.q) * a - b / (2.0 * c.params.p)
    return EnergyBreakdown(ns, a, b, j)


def slope(c: Coefficients, u: np.ndarray, lam: float) -> float:
    """J'(u)u = ||u||^2 - lam A(u) - B(u); zero characterizes the Nehari set."""
    return (
        c.norm_sq(u)
        - lam * a_value(c, u)
        - steinweiss.b_value(c.grid, u, c.b_pot, c.params)
    )


def second_along(c: Coefficients, u: np.ndarray, lam: float) -> float:
    """J''(u)(u,u) = ||u||^2 - lam(q-1)A(u) - (2p-1)B(u)."""
    return (
        c.norm_sq(u)
        - lam * (c.params.q - 1.0) * a_value(c, u)
        - (2.0 * c.params.p - 1.0) * steinweiss.b_value(c.grid, u, c.b_pot, c.params)
    )


def residual(c: Coefficients, u: np.ndarray, lam: float) -> np.ndarray:
    """Strong-form gradient field r with integrate(r*phi) = J'(u)phi exactly."""
    p, q = c.params.p, c.params.q
    lin = neg_laplacian(c.grid, u) + c.v_pot * u
    concave = c.a_pot * _concave_power(u, q)
    phi_u = steinweiss.choquard_field(c.grid, u, c.b_pot, c.params)
    convex = phi_u * c.b_pot * np.sign(u) * np.abs(u) ** (p - 1.0)
    return lin - lam * concave - convex


def residual_norm(c: Coefficients, u: np.ndarray, lam: float) -> float:
    r = residual(c, u, lam)
    return float(np.sqrt(integrate(c.grid, r * r)))


def fiber_triple(c: Coefficients, u: np.ndarray) -> fibering.FiberTriple:
    return fibering.FiberTriple(
        c.norm_sq(u),
        a_value(c, u),
        steinweiss.b_value(c.grid, u, c.b_pot, c.params),
    )


def classify(c: Coefficients, u: np.ndarray, lam: float) -> fibering.ManifoldClass:
    """Nehari classification of a field at parameter lam."""
    if not np.any(u):
        raise ValueError("classify requires a nonzero field")
    return fibering.classify_triple(fiber_triple(c, u), lam, c.params.p, c.params.q)
