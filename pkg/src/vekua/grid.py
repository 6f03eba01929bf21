"""Uniform symmetric grids with finite-difference and quadrature primitives.

Everything downstream lives on a tensor-product grid over the rectangle
``[-a1, a1] x [-a2, a2]``.  Node counts are odd so that the origin is a grid
node; the origin is the default base point of every cumulative integral and
path integral.  All derivative stencils are second order: central differences
on interior nodes and one-sided three/four-point formulas on the boundary.
Quadrature is the composite trapezoid rule throughout, so antiderivatives
exist at every node and share the O(h^2) order of the stencils.

Fields are plain ``numpy`` arrays of shape ``(gx.n, gy.n)`` indexed as
``f[ix, iy]``.  Residual norms are meant to be taken on interior nodes only
(boundary values of second-derivative quantities are best-effort one-sided
values); use :func:`interior_max` with an appropriate margin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import GridShapeError

__all__ = [
    "Grid1D",
    "Grid2D",
    "PathSpec",
    "cumulative_integral",
    "d_x",
    "d_y",
    "d_z",
    "d_zbar",
    "laplacian",
    "lpath_field",
    "lpath_complex",
    "path_integral",
    "interior",
    "interior_max",
]


@dataclass(eq=False)
class Grid1D:
    """Uniform grid with an odd number of nodes on ``[-half_width, half_width]``.

    The node count must be odd (and at least 3) so that 0 is a node: the
    normalization chi(0) = 0 and every origin-based integral depend on it.
    """

    half_width: float
    n: int
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"node count must be odd and >= 3, got {self.n}")
        # index arithmetic keeps the nodes exactly antisymmetric about 0
        self.nodes = (np.arange(self.n) - (self.n - 1) // 2) * self.h

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def center(self) -> int:
        """Index of the node at 0."""
        return (self.n - 1) // 2

    def index_of(self, value: float) -> int:
        """Index of the node at ``value``; raises if ``value`` is off-grid."""
        i = int(round((value + self.half_width) / self.h))
        if i < 0 or i >= self.n or abs(self.nodes[i] - value) > 1e-9 * max(self.h, 1.0):
            raise ValueError(f"{value} is not a node of {self}")
        return i

    def check(self, samples) -> np.ndarray:
        samples = np.asarray(samples)
        if samples.shape[0] != self.n:
            raise GridShapeError(
                f"expected {self.n} samples along the grid, got shape {samples.shape}"
            )
        return samples

    def refined(self) -> "Grid1D":
        """Same interval with the spacing halved (2n - 1 nodes)."""
        return Grid1D(self.half_width, 2 * self.n - 1)

    def __repr__(self):  # keep ndarray out of the repr
        return f"Grid1D(half_width={self.half_width}, n={self.n})"


@dataclass(eq=False)
class Grid2D:
    """Tensor product of two symmetric 1-D grids; domain ``[-a1,a1] x [-a2,a2]``."""

    gx: Grid1D
    gy: Grid1D

    @classmethod
    def square(cls, half_width: float, n: int) -> "Grid2D":
        return cls(Grid1D(half_width, n), Grid1D(half_width, n))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.gx.n, self.gy.n)

    @property
    def center(self) -> tuple[int, int]:
        return (self.gx.center, self.gy.center)

    @property
    def hmax(self) -> float:
        return max(self.gx.h, self.gy.h)

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``X``, ``Y`` of shape ``(gx.n, gy.n)``."""
        return np.meshgrid(self.gx.nodes, self.gy.nodes, indexing="ij")

    def zmesh(self) -> np.ndarray:
        x, y = self.meshes()
        return x + 1j * y

    def check(self, f) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != self.shape:
            raise GridShapeError(f"expected field of shape {self.shape}, got {f.shape}")
        return f

    def refined(self) -> "Grid2D":
        return Grid2D(self.gx.refined(), self.gy.refined())


@dataclass(frozen=True)
class PathSpec:
    """Axis-parallel L-path: from ``start`` first along x at fixed y, then along y."""

    start: tuple[float, float]
    end: tuple[float, float]


def cumulative_integral(grid: Grid1D, samples, origin_index: int | None = None, axis: int = 0):
    """Cumulative trapezoid antiderivative vanishing at ``origin_index``.

    Works on real or complex samples and on multi-dimensional arrays
    (integrated along ``axis``).  Exact for constant and affine integrands.
    """
    y = np.asarray(samples)
    if y.shape[axis] != grid.n:
        raise GridShapeError(
            f"expected {grid.n} samples along axis {axis}, got shape {y.shape}"
        )
    if origin_index is None:
        origin_index = grid.center
    if not 0 <= origin_index < grid.n:
        raise ValueError(f"origin index {origin_index} out of range [0, {grid.n})")
    acc = cumulative_trapezoid(y, dx=grid.h, initial=0.0, axis=axis)
    return acc - np.take(acc, [origin_index], axis=axis)


def _first_derivative(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    f = np.asarray(f)
    if f.shape[axis] < 3:
        raise GridShapeError("need at least 3 nodes to differentiate")
    out = np.empty_like(f, dtype=np.result_type(f.dtype, np.float64))
    fm = np.moveaxis(f, axis, 0)
    om = np.moveaxis(out, axis, 0)
    om[1:-1] = (fm[2:] - fm[:-2]) / (2.0 * h)
    om[0] = (-3.0 * fm[0] + 4.0 * fm[1] - fm[2]) / (2.0 * h)
    om[-1] = (3.0 * fm[-1] - 4.0 * fm[-2] + fm[-3]) / (2.0 * h)
    return out


def _second_derivative(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    f = np.asarray(f)
    if f.shape[axis] < 3:
        raise GridShapeError("need at least 3 nodes for a second derivative")
    out = np.empty_like(f, dtype=np.result_type(f.dtype, np.float64))
    fm = np.moveaxis(f, axis, 0)
    om = np.moveaxis(out, axis, 0)
    h2 = h * h
    om[1:-1] = (fm[2:] - 2.0 * fm[1:-1] + fm[:-2]) / h2
    if f.shape[axis] >= 4:
        om[0] = (2.0 * fm[0] - 5.0 * fm[1] + 4.0 * fm[2] - fm[3]) / h2
        om[-1] = (2.0 * fm[-1] - 5.0 * fm[-2] + 4.0 * fm[-3] - fm[-4]) / h2
    else:
        # 3-node grid: only the central value exists; replicate it.
        om[0] = om[1]
        om[-1] = om[1]
    return out


def d_x(grid: Grid2D, f) -> np.ndarray:
    """First derivative along x, second order everywhere."""
    return _first_derivative(grid.check(f), grid.gx.h, axis=0)


def d_y(grid: Grid2D, f) -> np.ndarray:
    """First derivative along y, second order everywhere."""
    return _first_derivative(grid.check(f), grid.gy.h, axis=1)


def d_z(grid: Grid2D, f) -> np.ndarray:
    """Wirtinger derivative (d/dx - i d/dy)/2."""
    return 0.5 * (d_x(grid, f) - 1j * d_y(grid, f))


def d_zbar(grid: Grid2D, f) -> np.ndarray:
    """Conjugate Wirtinger derivative (d/dx + i d/dy)/2."""
    return 0.5 * (d_x(grid, f) + 1j * d_y(grid, f))


def laplacian(grid: Grid2D, f) -> np.ndarray:
    """Five-point Laplacian on interior nodes.

    Boundary values are filled with one-sided second-derivative stencils so
    that compositions never see NaNs, but they are not part of this module's
    accuracy contract: exclude them from norms (see :func:`interior_max`).
    """
    f = grid.check(f)
    return _second_derivative(f, grid.gx.h, axis=0) + _second_derivative(f, grid.gy.h, axis=1)


def interior(f: np.ndarray, margin: int = 1) -> np.ndarray:
    """View of ``f`` with ``margin`` rows/columns stripped from every side."""
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if margin == 0:
        return np.asarray(f)
    f = np.asarray(f)
    if min(f.shape[:2]) <= 2 * margin:
        raise GridShapeError(f"field of shape {f.shape} has no interior at margin {margin}")
    return f[margin:-margin, margin:-margin]


def interior_max(f: np.ndarray, margin: int = 1) -> float:
    """Max absolute value over interior nodes."""
    return float(np.max(np.abs(interior(f, margin))))


def lpath_field(
    grid: Grid2D,
    f1,
    f2,
    origin: tuple[int, int] | None = None,
    sign: float = 1.0,
    order: str = "xy",
) -> np.ndarray:
    """``2 * (int f1 dx + sign * int f2 dy)`` along L-paths to every node.

    The path runs from the origin node first along x at fixed y, then along
    y at fixed x (``order="xy"``; ``"yx"`` swaps the legs).  With
    ``sign=+1`` this is the gradient-reconstruction integral for the
    conjugate Wirtinger derivative of a real field, with ``sign=-1`` the one
    for the plain Wirtinger derivative.
    """
    f1 = grid.check(f1)
    f2 = grid.check(f2)
    if origin is None:
        origin = grid.center
    i0, j0 = origin
    if order == "xy":
        leg_x = cumulative_integral(grid.gx, f1[:, j0], i0)
        leg_y = cumulative_integral(grid.gy, f2, j0, axis=1)
        total = leg_x[:, None] + sign * leg_y
    elif order == "yx":
        leg_y = cumulative_integral(grid.gy, f2[i0, :], j0)
        leg_x = cumulative_integral(grid.gx, f1, i0, axis=0)
        total = sign * leg_y[None, :] + leg_x
    else:
        raise ValueError(f"unknown leg order {order!r}")
    return 2.0 * total


def lpath_complex(grid: Grid2D, w, origin: tuple[int, int] | None = None) -> np.ndarray:
    """Complex line integral ``int w dzeta`` along L-paths to every node."""
    w = grid.check(w)
    if origin is None:
        origin = grid.center
    i0, j0 = origin
    leg_x = cumulative_integral(grid.gx, w[:, j0], i0)
    leg_y = cumulative_integral(grid.gy, w, j0, axis=1)
    return leg_x[:, None] + 1j * leg_y


def path_integral(grid: Grid2D, f1, f2, path: PathSpec, sign: float = 1.0) -> float:
    """Single L-path value of ``2 * (int f1 dx + sign * int f2 dy)``.

    Both endpoints must be grid nodes.
    """
    i0 = grid.gx.index_of(path.start[0])
    j0 = grid.gy.index_of(path.start[1])
    i1 = grid.gx.index_of(path.end[0])
    j1 = grid.gy.index_of(path.end[1])
    values = lpath_field(grid, f1, f2, origin=(i0, j0), sign=sign)
    return float(np.real(values[i1, j1]))


