"""Preconditioned projected descent on the H1_V unit sphere.

Both extremal-value estimation and the Nehari solves minimize a
zero-homogeneous objective over directions, so the natural domain is the unit
sphere of the H1_V norm.  Steps are steepest descent in the metric of the
constant-coefficient operator (-Delta_h + V0), whose exact inverse is applied
through the eigenbasis of the one-dimensional stencil, followed by tangent
projection, backtracking Armijo and renormalization.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .functional import Coefficients
from .grid import GridSpec, h1v_inner, integrate

__all__ = [
    "DescentOptions",
    "DescentResult",
    "MaxIterationsError",
    "NonfiniteValueError",
    "H1Preconditioner",
    "h1_preconditioner",
    "normalize_h1v",
    "smooth_noise",
    "sphere_descent",
]


class MaxIterationsError(RuntimeError):
    pass


class NonfiniteValueError(RuntimeError):
    pass


@dataclass(frozen=True)
class DescentOptions:
    tol: float = 1e-7
    max_iter: int = 5000
    armijo_c: float = 1e-4
    shrink: float = 0.5
    step0: float = 1.0
    min_step: float = 1e-18
    multistart: int = 5
    restarts: int = 3
    residual_tol: float = 5e-7
    seed: int = 0

    def replace(self, **kw) -> "DescentOptions":
        from dataclasses import replace

        return replace(self, **kw)


@dataclass
class DescentResult:
    w: np.ndarray
    value: float
    iterations: int
    grad_norm: float
    history: list[tuple[int, float]] = field(default_factory=list)


class H1Preconditioner:
    """Exact inverse of (-Delta_h + v0) via the 1D stencil eigenbasis."""

    def __init__(self, spec: GridSpec, v0: float):
        from .grid import _second_matrix

        if v0 <= 0:
            raise ValueError("preconditioner needs v0 > 0")
        self.spec = spec
        lam, qmat = np.linalg.eigh(_second_matrix(spec.points_per_axis, spec.h))
        self._qmat = qmat
        denom = np.zeros(spec.shape)
        for axis in range(spec.dim):
            shape = [1] * spec.dim
            shape[axis] = spec.points_per_axis
            denom = denom + lam.reshape(shape)
        self._denom = denom + v0

    def _along(self, mat: np.ndarray, f: np.ndarray, axis: int) -> np.ndarray:
        moved = np.moveaxis(f, axis, -1)
        return np.moveaxis(moved @ mat.T, -1, axis)

    def apply(self, f: np.ndarray) -> np.ndarray:
        out = f
        for axis in range(self.spec.dim):
            out = self._along(self._qmat.T, out, axis)
        out = out / self._denom
        for axis in range(self.spec.dim):
            out = self._along(self._qmat, out, axis)
        return out


@lru_cache(maxsize=None)
def h1_preconditioner(spec: GridSpec, v0: float) -> H1Preconditioner:
    return H1Preconditioner(spec, v0)


def normalize_h1v(c: Coefficients, u: np.ndarray) -> np.ndarray:
    n = c.norm(u)
    if n == 0 or not np.isfinite(n):
        raise ValueError("cannot normalize a zero or non-finite field")
    return u / n


def smooth_noise(spec: GridSpec, rng: np.random.Generator) -> np.ndarray:
    """Smoothed white noise with unit sup norm, for perturbed starts."""
    raw = h1_preconditioner(spec, 1.0).apply(rng.standard_normal(spec.shape))
    return raw / np.max(np.abs(raw))


def sphere_descent(
    c: Coefficients,
    evaluate: Callable[[np.ndarray, bool], tuple[float, Optional[np.ndarray]]],
    w0: np.ndarray,
    opts: DescentOptions,
    extra_stop: Optional[Callable[[np.ndarray], bool]] = None,
) -> DescentResult:
    """Minimize a zero-homogeneous objective over the H1_V unit sphere.

    ``evaluate(w, need_grad)`` returns ``(value, grad)`` where ``grad`` is the
    L2 representer of the differential (``integrate(grad * phi)`` is the
    directional derivative along phi) or None when not requested; it may
    return ``(inf, None)`` for directions where the objective is undefined,
    which the line search treats as a rejected step.  Convergence requires
    the L2 gradient norm to drop below ``opts.tol`` and, when given,
    ``extra_stop`` to pass.
    """
    pre = h1_preconditioner(c.grid, c.params.v0)
    w = normalize_h1v(c, w0)
    val, g = evaluate(w, True)
    if not np.isfinite(val) or g is None:
        raise NonfiniteValueError("objective undefined at the initial direction")
    history = [(0, val)]
    gnorm = float(np.sqrt(integrate(c.grid, g * g)))
    w_prev: Optional[np.ndarray] = None
    g_prev: Optional[np.ndarray] = None

    for it in range(1, opts.max_iter + 1):
        if gnorm <= opts.tol and (extra_stop is None or extra_stop(w)):
            return DescentResult(w, val, it - 1, gnorm, history)

        d = -pre.apply(g)
        d = d - (h1v_inner(c.grid, w, d, c.v_pot) / c.norm_sq(w)) * w
        dslope = integrate(c.grid, g * d)
        if dslope >= 0:
            # numerically flat; fall back to the raw tangential gradient
            d = -(g - (h1v_inner(c.grid, w, g, c.v_pot) / c.norm_sq(w)) * w)
            dslope = integrate(c.grid, g * d)
            if dslope >= 0:
                if extra_stop is None or extra_stop(w):
                    return DescentResult(w, val, it - 1, gnorm, history)
                raise MaxIterationsError(
                    f"descent stalled at iteration {it} with grad norm {gnorm:.3e}"
                )

        step = _spectral_step(c, w, g, w_prev, g_prev) if w_prev is not None else opts.step0
        accepted = False
        while step >= opts.min_step:
            cand = normalize_h1v(c, w + step * d)
            cand_val, _ = evaluate(cand, False)
            if np.isfinite(cand_val) and cand_val <= val + opts.armijo_c * step * dslope:
                accepted = True
                break
            step *= opts.shrink
        if not accepted:
            if (extra_stop is None or extra_stop(w)) and gnorm <= 10 * opts.tol:
                return DescentResult(w, val, it - 1, gnorm, history)
            raise MaxIterationsError(
                f"line search stalled at iteration {it} with grad norm {gnorm:.3e}"
            )

        w_prev, g_prev = w, g
        w = cand
        val, g = evaluate(w, True)
        if not np.isfinite(val) or g is None:
            raise NonfiniteValueError(f"objective became non-finite at iteration {it}")
        history.append((it, val))
        gnorm = float(np.sqrt(integrate(c.grid, g * g)))

    if gnorm <= opts.tol and (extra_stop is None or extra_stop(w)):
        return DescentResult(w, val, opts.max_iter, gnorm, history)
    raise MaxIterationsError(
        f"no convergence in {opts.max_iter} iterations (grad norm {gnorm:.3e})"
    )


def _spectral_step(c, w, g, w_prev, g_prev) -> float:
    """Barzilai-Borwein trial step for the preconditioned direction.

    Measures the secant pair in the metric of the preconditioner's inverse
    (-Delta_h + v0); Armijo backtracking still guards every step, so this is
    only a warm start that replaces the fixed unit trial.
    """
    from .grid import neg_laplacian

    s = w - w_prev
    y = g - g_prev
    denom = integrate(c.grid, s * y)
    if denom <= 0 or not np.isfinite(denom):
        return 1.0
    num = integrate(c.grid, s * neg_laplacian(c.grid, s)) + c.params.v0 * integrate(c.grid, s * s)
    step = num / denom
    if not np.isfinite(step) or step <= 0:
        return 1.0
    return float(min(max(step, 1e-8), 1e8))
