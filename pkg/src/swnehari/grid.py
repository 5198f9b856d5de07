"""Cell-centered tensor grid on a truncated box, quadrature and H1_V algebra.

Fields are plain ``numpy`` arrays of shape ``(M,)*d`` aligned to the nodes
``-L + (i+1/2)h``, ``h = 2L/M``.  With M even no node hits the origin, so the
singular weight |x|^(-alpha) is always finite.  All integrals are midpoint
sums; the discrete Laplacian is the quadrature adjoint of the gradient
stencil, which makes ``integrate(residual*phi)`` the exact Gateaux derivative
of the discrete energy.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "GridSpec",
    "integrate",
    "gradient",
    "neg_laplacian",
    "h1v_inner",
    "h1v_norm_sq",
    "h1v_norm",
    "gaussian_bump",
    "write_field",
    "read_field",
    "field_to_csv",
]

_FIELD_HEADER = struct.Struct("<IdI")  # dim_d, half_width_L, points_per_axis_M


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered grid with M points per axis on [-L, L]^d."""

    half_width: float
    points_per_axis: int
    dim: int

    def __post_init__(self) -> None:
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.points_per_axis < 4 or self.points_per_axis % 2:
            raise ValueError("points_per_axis must be an even integer >= 4")
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def n_nodes(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    def axis(self) -> np.ndarray:
        m = self.points_per_axis
        return -self.half_width + (np.arange(m) + 0.5) * self.h

    def radius_sq(self) -> np.ndarray:
        ax2 = self.axis() ** 2
        grids = np.ix_(*([ax2] * self.dim))
        out = np.zeros(self.shape)
        for g in grids:
            out = out + g
        return out

    def coords(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        ax = self.axis()
        return list(np.meshgrid(*([ax] * self.dim), indexing="ij", sparse=True))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)


@lru_cache(maxsize=None)
def _diff_matrix(m: int, h: float) -> np.ndarray:
    """Dense 1D first-derivative stencil: central interior, one-sided faces.

    Both parts are second order, and exact on linear data, so gradients of
    affine fields are exact everywhere including the boundary rows.
    """
    d = np.zeros((m, m))
    for i in range(1, m - 1):
        d[i, i - 1] = -0.5
        d[i, i + 1] = 0.5
    d[0, 0], d[0, 1], d[0, 2] = -1.5, 2.0, -0.5
    d[-1, -1], d[-1, -2], d[-1, -3] = 1.5, -2.0, 0.5
    return d / h


@lru_cache(maxsize=None)
def _second_matrix(m: int, h: float) -> np.ndarray:
    """1D part of the adjoint Laplacian, D^T D for the stencil above."""
    d = _diff_matrix(m, h)
    return d.T @ d


def _apply_along(mat: np.ndarray, f: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(f, axis, -1)
    return np.moveaxis(moved @ mat.T, -1, axis)


def integrate(spec: GridSpec, f: np.ndarray) -> float:
    """Midpoint quadrature: h^d * sum of nodal values."""
    return spec.cell_volume * float(np.sum(f))


def gradient(spec: GridSpec, f: np.ndarray) -> list[np.ndarray]:
    d = _diff_matrix(spec.points_per_axis, spec.h)
    return [_apply_along(d, f, axis) for axis in range(spec.dim)]


def neg_laplacian(spec: GridSpec, f: np.ndarray) -> np.ndarray:
    """-Delta_h f with -Delta_h = sum_a D_a^T D_a.

    This is the unique operator with integrate((-Delta_h f) * g) equal to
    integrate(grad f . grad g) for all g, i.e. the discrete weak Laplacian.
    """
    d2 = _second_matrix(spec.points_per_axis, spec.h)
    out = np.zeros_like(f)
    for axis in range(spec.dim):
        out += _apply_along(d2, f, axis)
    return out


def h1v_inner(spec: GridSpec, u: np.ndarray, w: np.ndarray, v_pot: np.ndarray) -> float:
    gu = gradient(spec, u)
    gw = gradient(spec, w)
    dens = v_pot * u * w
    for a, b in zip(gu, gw):
        dens = dens + a * b
    return integrate(spec, dens)


def h1v_norm_sq(spec: GridSpec, u: np.ndarray, v_pot: np.ndarray) -> float:
    dens = v_pot * u * u
    for a in gradient(spec, u):
        dens = dens + a * a
    return integrate(spec, dens)


def h1v_norm(spec: GridSpec, u: np.ndarray, v_pot: np.ndarray) -> float:
    return float(np.sqrt(h1v_norm_sq(spec, u, v_pot)))


def gaussian_bump(spec: GridSpec, width: float = 1.0, center: float = 0.0) -> np.ndarray:
    """exp(-|x - c|^2 / width^2), the default initial profile."""
    ax = spec.axis()
    one_d = [np.exp(-((ax - center) ** 2) / width**2)] * spec.dim
    out = np.ones(spec.shape)
    for axis, g in enumerate(one_d):
        shape = [1] * spec.dim
        shape[axis] = spec.points_per_axis
        out = out * g.reshape(shape)
    return out


def write_field(path, spec: GridSpec, f: np.ndarray) -> None:
    """Binary layout: header (dim, L, M) then float64 little-endian, row-major."""
    if f.shape != spec.shape:
        raise ValueError(f"field shape {f.shape} does not match grid {spec.shape}")
    with open(path, "wb") as fh:
        fh.write(_FIELD_HEADER.pack(spec.dim, spec.half_width, spec.points_per_axis))
        fh.write(np.ascontiguousarray(f, dtype="<f8").tobytes())


def read_field(path) -> tuple[GridSpec, np.ndarray]:
    with open(path, "rb") as fh:
        dim, half_width, m = _FIELD_HEADER.unpack(fh.read(_FIELD_HEADER.size))
        spec = GridSpec(half_width, m, dim)
        payload = fh.read(8 * spec.n_nodes)
    values = np.frombuffer(payload, dtype="<f8").reshape(spec.shape).astype(float)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"field file {path} contains non-finite entries")
    return spec, values


def field_to_csv(path, spec: GridSpec, f: np.ndarray) -> None:
    cols = np.meshgrid(*([spec.axis()] * spec.dim), indexing="ij")
    header = ",".join(f"x{i + 1}" for i in range(spec.dim)) + ",value"
    data = np.column_stack([c.ravel() for c in cols] + [f.ravel()])
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")
