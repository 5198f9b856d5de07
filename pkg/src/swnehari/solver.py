"""Ground and bound states by descent over Nehari-projected directions.

For lam below the upper extremal value every direction w projects onto both
Nehari branches at the scales t_plus(w) < t_minus(w) solving Q_n(t) = lam, so
the constrained minimizations reduce to sphere descent on

    F(w) = J_lam(t(w) w),   t = t_plus (ground state) or t_minus (bound state).

Since J'(tw)(tw) = 0 at the projection scale, the reduced gradient is just t
times the full residual field at the projected point, and a converged descent
kills the entire gradient, not only the slope.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import fibering, steinweiss
from .descent import (
    DescentOptions,
    MaxIterationsError,
    NonfiniteValueError,
    normalize_h1v,
    smooth_noise,
    sphere_descent,
)
from .fibering import FiberTriple, ManifoldClass
from .functional import (
    Coefficients,
    a_value,
    energy,
    fiber_triple,
    residual_norm,
    second_along,
    slope,
)
from .grid import gaussian_bump, integrate, neg_laplacian

__all__ = [
    "NoRootsError",
    "NehariSolution",
    "minimize_on_nplus",
    "minimize_on_nminus",
    "TrichotomyRow",
    "TrichotomyReport",
    "trichotomy_experiment",
    "TRICHOTOMY_TOL",
]

TRICHOTOMY_TOL = 1e-3  # |J(v)| <= tol * ||v||^2 counts as the zero-energy case


class NoRootsError(RuntimeError):
    """Raised when no admissible direction projects onto the requested branch."""


@dataclass
class NehariSolution:
    field: np.ndarray
    lam: float
    energy: float
    slope: float
    second: float
    residual_norm: float
    manifold: ManifoldClass
    positivity_min: float
    norm: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "energy": self.energy,
            "slope": self.slope,
            "second": self.second,
            "residual_norm": self.residual_norm,
            "manifold": self.manifold.value,
            "positivity_min": self.positivity_min,
            "norm": self.norm,
            "iterations": self.iterations,
        }


def _branch_evaluate(c: Coefficients, lam: float, branch: ManifoldClass):
    p, q = c.params.p, c.params.q
    kernel = steinweiss.riesz_kernel(c.grid, c.params.mu)
    wgt = c.grid.radius_sq() ** (-c.params.alpha / 2)

    def evaluate(w: np.ndarray, need_grad: bool):
        s = c.norm_sq(w)
        a = a_value(c, w)
        f = steinweiss.weighted_density(c.grid, w, c.b_pot, c.params)
        conv = steinweiss.riesz_convolve(kernel, f)
        b = integrate(c.grid, f * conv)
        if not (s > 0 and a > 0 and b > 0):
            return float("inf"), None
        triple = FiberTriple(s, a, b)
        roots = fibering.nehari_roots(triple, lam, p, q)
        if roots.kind != "two":
            return float("inf"), None
        t = roots.t_plus if branch is ManifoldClass.NPLUS else roots.t_minus
        jval = 0.5 * t * t * s - (lam / q) * t**q * a - t ** (2 * p) * b / (2 * p)
        if not need_grad:
            return float(jval), None
        # residual at the projected point, assembled from w-quantities by
        # homogeneity: Phi[tw] = t^p Phi[w] etc.
        lin = neg_laplacian(c.grid, w) + c.v_pot * w
        concave = c.a_pot * np.sign(w) * np.abs(w) ** (q - 1.0)
        convex = wgt * conv * c.b_pot * np.sign(w) * np.abs(w) ** (p - 1.0)
        r_proj = t * lin - lam * t ** (q - 1) * concave - t ** (2 * p - 1) * convex
        return float(jval), t * r_proj

    return evaluate


def _project(c: Coefficients, w: np.ndarray, lam: float, branch: ManifoldClass) -> tuple[float, FiberTriple]:
    triple = fiber_triple(c, w)
    roots = fibering.nehari_roots(triple, lam, c.params.p, c.params.q)
    if roots.kind != "two":
        raise NoRootsError(
            f"direction has peak quotient {fibering.lambda_n(triple, c.params.p, c.params.q):.6g} "
            f"<= lam = {lam:.6g}"
        )
    t = roots.t_plus if branch is ManifoldClass.NPLUS else roots.t_minus
    return t, triple


def _default_init(c: Coefficients, branch: ManifoldClass, opts: DescentOptions) -> np.ndarray:
    bump = gaussian_bump(c.grid, width=1.0)
    if branch is ManifoldClass.NMINUS:
        # multiplicative perturbation keeps the start positive while breaking
        # the symmetry that could pin the descent on a saddle
        rng = np.random.default_rng(opts.seed + 1)
        return bump * (1.0 + 0.3 * smooth_noise(c.grid, rng))
    return bump


def _minimize_branch(
    c: Coefficients,
    lam: float,
    branch: ManifoldClass,
    init: Optional[np.ndarray],
    opts: DescentOptions,
) -> NehariSolution:
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    evaluate = _branch_evaluate(c, lam, branch)

    def residual_ok(w: np.ndarray) -> bool:
        t, _ = _project(c, w, lam, branch)
        u = t * w
        return residual_norm(c, u, lam) <= opts.residual_tol * c.norm(u)

    w0 = init if init is not None else _default_init(c, branch, opts)
    rng = np.random.default_rng(opts.seed + (11 if branch is ManifoldClass.NPLUS else 13))
    last_err: Exception | None = None
    for attempt in range(opts.restarts + 1):
        try:
            res = sphere_descent(c, evaluate, w0, opts, extra_stop=residual_ok)
            break
        except (NonfiniteValueError, NoRootsError) as err:
            last_err = err
            w0 = gaussian_bump(c.grid, width=1.0) * (1.0 + 0.3 * smooth_noise(c.grid, rng))
    else:
        raise NoRootsError(
            f"no start projected onto {branch.value} at lam={lam:.6g} "
            f"after {opts.restarts + 1} attempts: {last_err}"
        )

    # positivity polish: a converged direction with sign changes restarts
    # from its absolute value, which can only lower the reduced energy
    for _ in range(2):
        if float(np.min(res.w)) >= 0.0:
            break
        res = sphere_descent(c, evaluate, np.abs(res.w), opts, extra_stop=residual_ok)

    t, _ = _project(c, res.w, lam, branch)
    u = np.abs(t * res.w)  # nonnegative representative; J, slope, second are even
    eb = energy(c, u, lam)
    sl = eb.norm_sq - lam * eb.a_val - eb.b_val
    sec = eb.norm_sq - lam * (c.params.q - 1) * eb.a_val - (2 * c.params.p - 1) * eb.b_val
    rn = residual_norm(c, u, lam)
    norm = float(np.sqrt(eb.norm_sq))

    if abs(sl) > fibering.SLOPE_TOL * eb.norm_sq:
        raise MaxIterationsError(
            f"projected point left the Nehari set: slope {sl:.3e} vs ||u||^2 {eb.norm_sq:.3e}"
        )
    if branch is ManifoldClass.NPLUS and not (sec > 0 and eb.j_val < 0):
        raise MaxIterationsError(
            f"ground-state invariants violated: second={sec:.3e}, energy={eb.j_val:.3e}"
        )
    if branch is ManifoldClass.NMINUS and not sec < 0:
        raise MaxIterationsError(f"bound-state invariant violated: second={sec:.3e}")

    return NehariSolution(
        field=u,
        lam=lam,
        energy=eb.j_val,
        slope=sl,
        second=sec,
        residual_norm=rn,
        manifold=branch,
        positivity_min=float(np.min(u)),
        norm=norm,
        iterations=res.iterations,
    )


def minimize_on_nplus(
    c: Coefficients,
    lam: float,
    init: Optional[np.ndarray] = None,
    opts: DescentOptions | None = None,
) -> NehariSolution:
    """Ground state: minimize J over the N+ branch (negative energy)."""
    return _minimize_branch(c, lam, ManifoldClass.NPLUS, init, opts or DescentOptions(max_iter=10000))


def minimize_on_nminus(
    c: Coefficients,
    lam: float,
    init: Optional[np.ndarray] = None,
    opts: DescentOptions | None = None,
) -> NehariSolution:
    """Bound state: minimize J over the N- branch."""
    return _minimize_branch(c, lam, ManifoldClass.NMINUS, init, opts or DescentOptions(max_iter=10000))


def _best_solution(
    c: Coefficients,
    lam: float,
    branch: ManifoldClass,
    inits: Sequence[Optional[np.ndarray]],
    opts: DescentOptions,
) -> NehariSolution:
    best: NehariSolution | None = None
    last_err: Exception | None = None
    for w0 in inits:
        try:
            sol = _minimize_branch(c, lam, branch, w0, opts)
        except (NoRootsError, MaxIterationsError, NonfiniteValueError) as err:
            last_err = err
            continue
        if best is None or sol.energy < best.energy:
            best = sol
    if best is None:
        raise NoRootsError(f"all starts failed on {branch.value} at lam={lam:.6g}: {last_err}")
    return best


@dataclass
class TrichotomyRow:
    lam: float
    lam_over_lambda_star: float
    j_u: float
    j_v: float
    second_u: float
    second_v: float
    predicted_sign: int
    observed_sign: int
    match: bool
    error: str = ""


@dataclass
class TrichotomyReport:
    lambda_star: float
    lambda_star_lower: float
    tol: float
    rows: list[TrichotomyRow] = field(default_factory=list)

    @property
    def all_match(self) -> bool:
        return all(r.match for r in self.rows)

    @property
    def any_succeeded(self) -> bool:
        return any(not r.error for r in self.rows)

    def csv_lines(self) -> list[str]:
        lines = [
            "lambda,lambda_over_lambda_star,J_u,J_v,second_u,second_v,"
            "predicted_sign,observed_sign,match"
        ]
        for r in self.rows:
            lines.append(
                f"{r.lam:.17g},{r.lam_over_lambda_star:.17g},{r.j_u:.17g},{r.j_v:.17g},"
                f"{r.second_u:.17g},{r.second_v:.17g},{r.predicted_sign},{r.observed_sign},"
                f"{str(r.match).lower()}"
            )
        return lines


def predicted_energy_sign(lam: float, lambda_star_lower: float) -> int:
    """Sign of J(v_lam) predicted by comparing lam against the lower extremal value."""
    if abs(lam - lambda_star_lower) <= 1e-9 * lambda_star_lower:
        return 0
    return 1 if lam < lambda_star_lower else -1


def trichotomy_experiment(
    c: Coefficients,
    lam_list: Iterable[float],
    lambda_star: float,
    lambda_star_lower: float,
    opts: DescentOptions | None = None,
    extra_inits: Sequence[np.ndarray] = (),
    tol: float = TRICHOTOMY_TOL,
) -> TrichotomyReport:
    """Solve both branches per lam and compare the sign of J(v) to prediction.

    ``extra_inits`` (typically the lower-extremal minimizer direction) join
    the default start for each branch; the lowest-energy converged solution
    wins, which matters on N- where directions on either side of the
    zero-energy threshold coexist.  Per-lam failures are recorded, not raised.
    """
    opts = opts or DescentOptions(max_iter=10000)
    report = TrichotomyReport(lambda_star, lambda_star_lower, tol)
    inits: list[Optional[np.ndarray]] = [None] + [normalize_h1v(c, w) for w in extra_inits]
    for lam in lam_list:
        try:
            u_sol = _best_solution(c, lam, ManifoldClass.NPLUS, inits, opts)
            v_sol = _best_solution(c, lam, ManifoldClass.NMINUS, inits, opts)
        except (NoRootsError, MaxIterationsError, NonfiniteValueError) as err:
            report.rows.append(
                TrichotomyRow(
                    lam, lam / lambda_star, float("nan"), float("nan"), float("nan"),
                    float("nan"), predicted_energy_sign(lam, lambda_star_lower), 0,
                    False, error=str(err),
                )
            )
            continue
        predicted = predicted_energy_sign(lam, lambda_star_lower)
        v_scale = v_sol.norm**2
        if abs(v_sol.energy) <= tol * v_scale:
            observed = 0
        else:
            observed = 1 if v_sol.energy > 0 else -1
        report.rows.append(
            TrichotomyRow(
                lam,
                lam / lambda_star,
                u_sol.energy,
                v_sol.energy,
                u_sol.second,
                v_sol.second,
                predicted,
                observed,
                predicted == observed,
            )
        )
    return report
