"""Continuum model parameters, derived exponents, hypothesis checks and potentials.

The problem on R^N is

    -Delta u + V(x) u = lambda a(x)|u|^{q-2}u + Phi[u](x) b(x)|u|^{p-2}u ,

with the nonlocal factor Phi[u] produced by the doubly weighted kernel
|x|^{-alpha} |x-y|^{-mu} |y|^{-alpha}.  This module owns every continuum
parameter, the derived exponent algebra, the closed-form admissibility checks
for the potential families a, b and the bounded potential V.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

__all__ = [
    "ModelParams",
    "PotentialSpec",
    "HypothesisCheck",
    "ValidationReport",
    "critical_exponents",
    "sobolev_exponent",
    "integrability_indices",
    "validate_hypotheses",
    "eval_potential",
    "sample_potential",
]

# relative surplus used to realize "b in L^{sigma+eta} for eta small"
ETA0 = 1e-2


@dataclass(frozen=True)
class ModelParams:
    """All continuum parameters of one problem instance.

    ``dim_n`` is the space dimension N, ``alpha``/``mu`` the weight and kernel
    exponents, ``p``/``q`` the convex/concave powers, ``lam`` the bifurcation
    parameter.  ``v0``/``v_inf`` bound the potential V, ``gamma1``/``gamma2``
    are the decay rates of the potentials a and b, ``beta`` the integrability
    index used by the regularity hypothesis.
    """

    dim_n: int
    alpha: float
    mu: float
    p: float
    q: float
    lam: float
    v0: float = 1.0
    v_inf: float = 1.0
    gamma1: float = 2.0
    gamma2: float = 2.0
    beta: float = 10.0

    def __post_init__(self) -> None:
        if self.dim_n < 1:
            raise ValueError(f"dim_n must be positive, got {self.dim_n}")
        if self.alpha < 0 or self.mu < 0:
            raise ValueError("alpha and mu must be nonnegative")
        if self.v0 <= 0:
            raise ValueError("v0 must be positive")

    def with_lambda(self, lam: float) -> "ModelParams":
        return replace(self, lam=lam)


@dataclass(frozen=True)
class PotentialSpec:
    """One closed-form potential: c (constant) or c*(1+|x|^2)^(-decay)."""

    family: Literal["constant", "inverse-quadratic-decay"]
    coefficient: float
    decay: float = 0.0

    def __post_init__(self) -> None:
        if self.coefficient <= 0:
            raise ValueError("potential coefficient must be positive")
        if self.decay < 0:
            raise ValueError("decay exponent must be nonnegative")
        if self.family not in ("constant", "inverse-quadratic-decay"):
            raise ValueError(f"unknown potential family {self.family!r}")


def critical_exponents(params: ModelParams) -> tuple[float, float]:
    """Lower/upper admissible bounds for the convex power p.

    Returns ((2N-2a-mu)/N, (2N-2a-mu)/(N-2)).  Requires N >= 3; for N < 3 the
    upper exponent degenerates and the hypotheses are void.
    """
    n = params.dim_n
    if n < 3:
        raise ValueError(f"critical exponents need dim_n >= 3, got {n}")
    num = 2.0 * n - 2.0 * params.alpha - params.mu
    return num / n, num / (n - 2)


def sobolev_exponent(dim_n: int) -> float:
    """Critical Sobolev exponent 2N/(N-2)."""
    if dim_n < 3:
        raise ValueError(f"Sobolev exponent needs dim_n >= 3, got {dim_n}")
    return 2.0 * dim_n / (dim_n - 2)


def integrability_indices(params: ModelParams) -> tuple[float, float]:
    """Lebesgue indices (r, sigma) required of the potentials a and b."""
    n = params.dim_n
    two_star = sobolev_exponent(n)
    r = two_star / (two_star - params.q)
    denom = 2.0 * n - 2.0 * params.alpha - params.mu - params.p * (n - 2)
    if denom <= 0:
        raise ValueError(
            "sigma undefined: p is at or above the upper critical exponent "
            f"(denominator {denom:.6g} <= 0)"
        )
    sigma = 2.0 * n / denom
    return r, sigma


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    detail: dict[str, float] = field(default_factory=dict)
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[HypothesisCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "detail": {k: float(v) for k, v in c.detail.items()},
                    "note": c.note,
                }
                for c in self.checks
            ],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def validate_hypotheses(params: ModelParams) -> ValidationReport:
    """Check the structural hypotheses H1-H4 in closed form.

    The potentials a, b are the decay family with rates gamma1, gamma2 and
    V is the constant v0, so every Lebesgue-membership requirement reduces to
    an inequality between a decay rate and a computable threshold.  Failures
    are recorded in the report, never raised.
    """
    n, al, mu = params.dim_n, params.alpha, params.mu
    p, q = params.p, params.q
    checks: list[HypothesisCheck] = []

    # H1: positive bounded potential, admissible weight/kernel exponents
    h1_ok = (
        n >= 3
        and params.lam > 0
        and 0 < al < n
        and 0 < mu < n
        and 0 < 2 * al + mu < n
        and 0 < params.v0 <= params.v_inf
    )
    checks.append(
        HypothesisCheck(
            "H1",
            bool(h1_ok),
            {
                "dim_n": n,
                "alpha": al,
                "mu": mu,
                "two_alpha_plus_mu": 2 * al + mu,
                "lambda": params.lam,
                "v0": params.v0,
                "v_inf": params.v_inf,
            },
            "requires N>=3, lambda>0, 0<alpha<N, 0<mu<N, 0<2*alpha+mu<N, 0<V0<=Vinf",
        )
    )

    if n >= 3:
        lo, hi = critical_exponents(params)
    else:
        lo, hi = float("nan"), float("nan")
    h2_ok = n >= 3 and 1 <= q < 2 and lo < p < hi
    checks.append(
        HypothesisCheck(
            "H2",
            bool(h2_ok),
            {"q": q, "p": p, "p_lower": lo, "p_upper": hi},
            "requires 1<=q<2 and p strictly between the two critical exponents",
        )
    )

    if h1_ok and h2_ok:
        r, sigma = integrability_indices(params)
        thr_a_r = n / (2 * r)  # == (2N - q(N-2))/4
        thr_b_sigma = max(n / (2 * sigma), n / (2 * sigma * (1 + ETA0)))
        h3_ok = params.gamma1 > thr_a_r and params.gamma2 > thr_b_sigma
        checks.append(
            HypothesisCheck(
                "H3",
                bool(h3_ok),
                {
                    "r": r,
                    "sigma": sigma,
                    "gamma1": params.gamma1,
                    "gamma1_threshold": thr_a_r,
                    "gamma2": params.gamma2,
                    "gamma2_threshold": thr_b_sigma,
                },
                "decay-family membership a in L^r, b in L^sigma cap L^(sigma(1+eta0))",
            )
        )

        two_star = sobolev_exponent(n)
        beta_denom = 4.0 - (n - 2) * (p - 2)
        beta_thr = 2.0 * n / beta_denom if beta_denom > 0 else float("inf")
        gamma_denom = params.beta * (2 - (n - 2) * (p - 1) + (n - 2 * al - mu)) - n
        gamma = n * params.beta / gamma_denom if gamma_denom > 0 else float("inf")
        p_floor = 2.0 * (n - 2 * al - mu) / (n - 2) - two_star / params.beta
        thr_a_n2 = 1.0  # a in L^{N/2} for the decay family
        thr_b_h4 = max(n / (2 * params.beta), n / (2 * gamma) if np.isfinite(gamma) else float("inf"))
        h4_ok = (
            beta_denom > 0
            and params.beta > beta_thr
            and gamma_denom > 0
            and params.gamma1 > thr_a_n2
            and params.gamma2 > thr_b_h4
            and p > p_floor
        )
        checks.append(
            HypothesisCheck(
                "H4",
                bool(h4_ok),
                {
                    "beta": params.beta,
                    "beta_threshold": beta_thr,
                    "gamma": gamma,
                    "gamma_denominator": gamma_denom,
                    "gamma1": params.gamma1,
                    "gamma1_threshold": thr_a_n2,
                    "gamma2": params.gamma2,
                    "gamma2_threshold": thr_b_h4,
                    "p": p,
                    "p_floor": p_floor,
                },
                "regularity hypothesis: a in L^{N/2}, b in L^beta cap L^gamma, "
                "p above the beta-dependent floor",
            )
        )
    else:
        checks.append(HypothesisCheck("H3", False, {}, "skipped: H1/H2 failed"))
        checks.append(HypothesisCheck("H4", False, {}, "skipped: H1/H2 failed"))

    return ValidationReport(tuple(checks))


def eval_potential(spec: PotentialSpec, x) -> float:
    """Evaluate the potential at one point x (any array-like of coordinates)."""
    if spec.family == "constant":
        return spec.coefficient
    r2 = float(np.sum(np.asarray(x, dtype=float) ** 2))
    return spec.coefficient * (1.0 + r2) ** (-spec.decay)


def sample_potential(spec: PotentialSpec, radius_sq: np.ndarray) -> np.ndarray:
    """Sample the potential on a grid described by its |x|^2 array."""
    if spec.family == "constant":
        return np.full_like(radius_sq, spec.coefficient)
    return spec.coefficient * (1.0 + radius_sq) ** (-spec.decay)
