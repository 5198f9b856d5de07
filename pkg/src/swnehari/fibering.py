"""Closed-form fibering algebra over the scalar triple (||u||^2, A(u), B(u)).

Along a ray t -> tu, both nonlinear quotients reduce to explicit scalar
functions of t.  The Nehari quotient

    Q_n(t) = (t^{2-q} s - t^{2p-q} b) / a,   s = ||u||^2, a = A(u), b = B(u),

is strictly unimodal with peak value Lambda_n at t_n, and the zero-energy
quotient Q_e peaks at t_e = p^{1/(2p-2)} t_n with proportional peak value
Lambda_e.  Solving Q_n(t) = lam gives the two Nehari projection scales
t_plus < t_n < t_minus whenever lam < Lambda_n.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

__all__ = [
    "FiberTriple",
    "FiberConstants",
    "fiber_constants",
    "q_n",
    "q_n_prime",
    "q_e",
    "q_e_prime",
    "t_n",
    "t_e",
    "lambda_n",
    "lambda_e",
    "NehariRoots",
    "nehari_roots",
    "ManifoldClass",
    "classify_triple",
    "FiberingReport",
    "fibering_report",
]

TANGENT_BAND = 1e-12  # relative dead band around lam == Lambda_n
ROOT_EPS = 1e-30  # lower bracket for the small root
ROOT_ITER = 200
SLOPE_TOL = 1e-8  # |J'(u)u| <= SLOPE_TOL * ||u||^2 counts as on-manifold
SECOND_TOL = 1e-8  # dead band for the N0 classification, relative to ||u||^2


@dataclass(frozen=True)
class FiberTriple:
    """Scalar data of one direction: norm_sq > 0, a_val > 0, b_val > 0."""

    norm_sq: float
    a_val: float
    b_val: float

    def __post_init__(self) -> None:
        if not (self.norm_sq > 0 and self.a_val > 0 and self.b_val > 0):
            raise ValueError(
                "fiber triple must be strictly positive, got "
                f"({self.norm_sq}, {self.a_val}, {self.b_val})"
            )


@dataclass(frozen=True)
class FiberConstants:
    c_pq: float
    c_tilde_pq: float
    ratio: float  # c_tilde / c = q p^{(2-q)/(2(p-1))} / 2, in (0, 1)


def _check_powers(p: float, q: float) -> None:
    if not 1 <= q < 2:
        raise ValueError(f"concave power must satisfy 1 <= q < 2, got {q}")
    if p <= 1:
        raise ValueError(f"convex power must exceed 1, got {p}")


def fiber_constants(p: float, q: float) -> FiberConstants:
    """Peak-value constants of the two fibering quotients and their ratio."""
    _check_powers(p, q)
    e = (2.0 - q) / (2.0 * p - 2.0)
    c_pq = ((2.0 - q) / (2.0 * p - q)) ** e * (2.0 * p - 2.0) / (2.0 * p - q)
    ratio = q * p**e / 2.0
    return FiberConstants(c_pq, ratio * c_pq, ratio)


def q_n(t: float, triple: FiberTriple, p: float, q: float) -> float:
    """Nehari quotient along the ray; Q_n(0) = 0 for q < 2."""
    if t == 0:
        return 0.0
    return (t ** (2 - q) * triple.norm_sq - t ** (2 * p - q) * triple.b_val) / triple.a_val


def q_n_prime(t: float, triple: FiberTriple, p: float, q: float) -> float:
    return (
        (2 - q) * t ** (1 - q) * triple.norm_sq
        - (2 * p - q) * t ** (2 * p - q - 1) * triple.b_val
    ) / triple.a_val


def q_e(t: float, triple: FiberTriple, p: float, q: float) -> float:
    """Zero-energy quotient along the ray; Q_e(0) = 0 for q < 2."""
    if t == 0:
        return 0.0
    return (
        q
        * (0.5 * t ** (2 - q) * triple.norm_sq - t ** (2 * p - q) * triple.b_val / (2 * p))
        / triple.a_val
    )


def q_e_prime(t: float, triple: FiberTriple, p: float, q: float) -> float:
    return (
        q
        * (
            0.5 * (2 - q) * t ** (1 - q) * triple.norm_sq
            - (2 * p - q) / (2 * p) * t ** (2 * p - q - 1) * triple.b_val
        )
        / triple.a_val
    )


def t_n(triple: FiberTriple, p: float, q: float) -> float:
    """Unique maximizer of Q_n."""
    _check_powers(p, q)
    return ((2 - q) * triple.norm_sq / ((2 * p - q) * triple.b_val)) ** (1.0 / (2 * p - 2))


def t_e(triple: FiberTriple, p: float, q: float) -> float:
    """Unique maximizer of Q_e, equal to p^{1/(2p-2)} t_n."""
    _check_powers(p, q)
    return (p * (2 - q) * triple.norm_sq / ((2 * p - q) * triple.b_val)) ** (1.0 / (2 * p - 2))


def lambda_n(triple: FiberTriple, p: float, q: float) -> float:
    """Peak value of Q_n.

    The closed form carries norm_sq = ||u||^2, so the exponent is half the
    value it would take on ||u|| itself.
    """
    cst = fiber_constants(p, q)
    e = (2.0 - q) / (2.0 * p - 2.0)
    return (
        cst.c_pq
        * triple.norm_sq ** ((2 * p - q) / (2 * (p - 1)))
        / (triple.a_val * triple.b_val**e)
    )


def lambda_e(triple: FiberTriple, p: float, q: float) -> float:
    """Peak value of Q_e, computed from its own closed form."""
    cst = fiber_constants(p, q)
    e = (2.0 - q) / (2.0 * p - 2.0)
    return (
        cst.c_tilde_pq
        * triple.norm_sq ** ((2 * p - q) / (2 * (p - 1)))
        / (triple.a_val * triple.b_val**e)
    )


@dataclass(frozen=True)
class NehariRoots:
    kind: str  # "two" | "tangent" | "none"
    t_plus: Optional[float] = None
    t_minus: Optional[float] = None
    t_peak: float = 0.0


def _bisect(f, lo: float, hi: float, f_lo_sign: float) -> float:
    # f has opposite signs at lo/hi; 200 halvings reach machine resolution
    for _ in range(ROOT_ITER):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if val == 0.0:
            return mid
        if (val > 0) == (f_lo_sign > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def nehari_roots(triple: FiberTriple, lam: float, p: float, q: float) -> NehariRoots:
    """Solve Q_n(t) = lam: two roots bracketing t_n, a tangency, or nothing."""
    if lam <= 0:
        raise ValueError(f"nehari_roots needs lam > 0, got {lam}")
    peak_t = t_n(triple, p, q)
    peak = lambda_n(triple, p, q)
    if abs(lam - peak) <= TANGENT_BAND * peak:
        return NehariRoots("tangent", t_peak=peak_t)
    if lam > peak:
        return NehariRoots("none", t_peak=peak_t)

    def f(t: float) -> float:
        return q_n(t, triple, p, q) - lam

    # Q_n < lam near 0, > lam at the peak, -> -inf at infinity
    t_plus = _bisect(f, ROOT_EPS, peak_t, -1.0)
    hi = 2.0 * peak_t
    while f(hi) >= 0:
        hi *= 2.0
    t_minus = _bisect(f, peak_t, hi, +1.0)
    return NehariRoots("two", t_plus=t_plus, t_minus=t_minus, t_peak=peak_t)


class ManifoldClass(Enum):
    NPLUS = "N+"
    NMINUS = "N-"
    NZERO = "N0"
    OFF_MANIFOLD = "off-manifold"


def classify_triple(triple: FiberTriple, lam: float, p: float, q: float) -> ManifoldClass:
    """Nehari membership and branch from the scalar triple.

    Off the manifold when the slope exceeds SLOPE_TOL * ||u||^2; on it, the
    sign of J''(u)(u,u) with a SECOND_TOL * ||u||^2 dead band picks the branch.
    """
    s, a, b = triple.norm_sq, triple.a_val, triple.b_val
    slope = s - lam * a - b
    if abs(slope) > SLOPE_TOL * s:
        return ManifoldClass.OFF_MANIFOLD
    second = s - lam * (q - 1.0) * a - (2.0 * p - 1.0) * b
    band = SECOND_TOL * s
    if second > band:
        return ManifoldClass.NPLUS
    if second < -band:
        return ManifoldClass.NMINUS
    return ManifoldClass.NZERO


@dataclass(frozen=True)
class FiberingReport:
    t_n: float
    t_e: float
    lambda_n: float
    lambda_e: float
    roots: Optional[tuple[float, float]] = None

    def to_dict(self) -> dict:
        out = {
            "t_n": self.t_n,
            "t_e": self.t_e,
            "lambda_n": self.lambda_n,
            "lambda_e": self.lambda_e,
        }
        if self.roots is not None:
            out["t_plus"], out["t_minus"] = self.roots
        return out


def fibering_report(
    triple: FiberTriple, p: float, q: float, lam: Optional[float] = None
) -> FiberingReport:
    roots = None
    if lam is not None:
        sol = nehari_roots(triple, lam, p, q)
        if sol.kind == "two":
            roots = (sol.t_plus, sol.t_minus)
    return FiberingReport(
        t_n(triple, p, q),
        t_e(triple, p, q),
        lambda_n(triple, p, q),
        lambda_e(triple, p, q),
        roots,
    )
