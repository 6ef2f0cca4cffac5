"""Uniform grids on the unit interval/square and discrete inner products/norms.

Grid functions are plain float64 arrays over the full closed grid
(including boundary nodes, which are kept at exact zero) so stencil code
can read neighbors without index guards.  A 1D grid with parameter J has
2J+1 nodes x_j = j*h, h = 1/(2J); the even node count is what makes the
Simpson-type weighted norms below well defined.

Norms (interior sums only; u denotes the grid function):

    l2    sqrt(h * sum u_j^2)                       ditto with h1*h2 in 2D
    inf   max |u_j|
    a     sqrt(2h * sum_{odd j} u_j^2)                             1D only
    b     sqrt(2/3 ||u||^2 + 1/3 ||u||_a^2)                        1D only
    e     2/3 sqrt(h1 h2 sum (u_ee'^2 + u_oe'^2 + 3 u_oo'^2))      2D only
    f     sqrt(4/9 ||u||^2 + ||u||_e^2)                            2D only

where in the e-norm the sum runs over panel-indexed pairs
(even,odd), (odd,even), (odd,odd).  The squares of the b and f norms
coincide with composite Simpson quadrature of u^2 (see damping module).
"""
from __future__ import annotations

import dataclasses

import numpy as np

from . import expr as expr_mod

__all__ = [
    "Grid1D",
    "Grid2D",
    "TimeGrid",
    "grid1d",
    "grid2d",
    "zeros",
    "sample",
    "inner",
    "norm",
]


@dataclasses.dataclass
class Grid1D:
    """Uniform mesh on [0, 1] with 2J+1 nodes."""

    J: int

    def __post_init__(self):
        if self.J < 2:
            raise ValueError("Grid1D requires J >= 2")
        self.h = 1.0 / (2 * self.J)
        self.nodes = np.linspace(0.0, 1.0, 2 * self.J + 1)

    @property
    def shape(self) -> tuple[int]:
        return (2 * self.J + 1,)


@dataclasses.dataclass
class Grid2D:
    """Uniform mesh on [0, 1]^2 with (2J1+1) x (2J2+1) nodes."""

    J1: int
    J2: int

    def __post_init__(self):
        if self.J1 < 2 or self.J2 < 2:
            raise ValueError("Grid2D requires J1, J2 >= 2")
        self.h1 = 1.0 / (2 * self.J1)
        self.h2 = 1.0 / (2 * self.J2)
        self.xs = np.linspace(0.0, 1.0, 2 * self.J1 + 1)
        self.ys = np.linspace(0.0, 1.0, 2 * self.J2 + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.J1 + 1, 2 * self.J2 + 1)


@dataclasses.dataclass
class TimeGrid:
    """Uniform partition t_n = n*tau, 0 <= n <= N+1, with tau = T/(N+1).

    The final index N+1 lands exactly on T, which keeps terminal fields of
    an N-step run and its doubled (2N-step) refinement at the same time.
    """

    N: int
    T: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("TimeGrid requires N >= 1")
        if self.T <= 0:
            raise ValueError("TimeGrid requires T > 0")
        self.tau = self.T / (self.N + 1)

    def t(self, n: int) -> float:
        return n * self.tau


Grid = Grid1D | Grid2D

_GRID1_CACHE: dict[int, Grid1D] = {}
_GRID2_CACHE: dict[tuple[int, int], Grid2D] = {}


def grid1d(J: int) -> Grid1D:
    """Cached Grid1D accessor (grids are immutable by convention)."""
    g = _GRID1_CACHE.get(J)
    if g is None:
        g = _GRID1_CACHE[J] = Grid1D(J)
    return g


def grid2d(J1: int, J2: int) -> Grid2D:
    g = _GRID2_CACHE.get((J1, J2))
    if g is None:
        g = _GRID2_CACHE[(J1, J2)] = Grid2D(J1, J2)
    return g


def zeros(grid: Grid) -> np.ndarray:
    return np.zeros(grid.shape)


def _eval_on(f, xs, ys, t):
    if hasattr(f, "_eval"):  # expression tree
        return expr_mod.evaluate(f, x=xs, y=ys if ys is not None else 0.0, t=t)
    if ys is None:
        return f(xs, t)
    return f(xs, ys, t)


def sample(grid: Grid, f, t: float = 0.0) -> np.ndarray:
    """Evaluate ``f`` at the nodes; boundary values are forced to exact zero.

    ``f`` may be an expression tree or a callable ``f(x, t)`` / ``f(x, y, t)``
    accepting numpy arrays.  Domain errors are re-raised with the offending
    node's location.
    """
    if isinstance(grid, Grid1D):
        xs, ys = grid.nodes, None
    else:
        xs, ys = np.meshgrid(grid.xs, grid.ys, indexing="ij")
    try:
        values = _eval_on(f, xs, ys, t)
    except expr_mod.DomainError:
        _locate_domain_error(grid, f, t)
        raise
    out = np.zeros(grid.shape)
    out[...] = np.broadcast_to(np.asarray(values, dtype=np.float64), grid.shape)
    if isinstance(grid, Grid1D):
        out[0] = out[-1] = 0.0
    else:
        out[0, :] = out[-1, :] = 0.0
        out[:, 0] = out[:, -1] = 0.0
    return out


def _locate_domain_error(grid, f, t):
    """Re-evaluate pointwise to name the first failing node."""
    if isinstance(grid, Grid1D):
        for x in grid.nodes:
            try:
                _eval_on(f, np.float64(x), None, t)
            except expr_mod.DomainError as exc:
                raise expr_mod.DomainError(f"{exc} at x={x}, t={t}") from None
    else:
        for x in grid.xs:
            for y in grid.ys:
                try:
                    _eval_on(f, np.float64(x), np.float64(y), t)
                except expr_mod.DomainError as exc:
                    raise expr_mod.DomainError(
                        f"{exc} at x={x}, y={y}, t={t}"
                    ) from None


def _check(grid: Grid, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    if u.shape != grid.shape:
        raise ValueError(f"grid mismatch: grid shape {grid.shape}, values {u.shape}")
    return u


def inner(grid: Grid, u: np.ndarray, v: np.ndarray) -> float:
    """Discrete L2 inner product over interior nodes."""
    u = _check(grid, u)
    v = _check(grid, v)
    if isinstance(grid, Grid1D):
        return grid.h * float(np.dot(u[1:-1], v[1:-1]))
    return grid.h1 * grid.h2 * float(np.sum(u[1:-1, 1:-1] * v[1:-1, 1:-1]))


def norm(grid: Grid, u: np.ndarray, kind: str = "l2") -> float:
    """Discrete norm of the given kind; see the module docstring for formulas."""
    u = _check(grid, u)
    kind = kind.lower()
    if isinstance(grid, Grid1D):
        if kind == "l2":
            return float(np.sqrt(grid.h * np.dot(u[1:-1], u[1:-1])))
        if kind == "inf":
            return float(np.max(np.abs(u[1:-1])))
        if kind == "a":
            odd = u[1:-1:2]
            return float(np.sqrt(2.0 * grid.h * np.dot(odd, odd)))
        if kind == "b":
            l2 = norm(grid, u, "l2")
            a = norm(grid, u, "a")
            return float(np.sqrt((2.0 / 3.0) * l2 * l2 + (1.0 / 3.0) * a * a))
        raise ValueError(f"norm kind {kind!r} not defined on a 1D grid")
    if kind == "l2":
        w = u[1:-1, 1:-1]
        return float(np.sqrt(grid.h1 * grid.h2 * np.sum(w * w)))
    if kind == "inf":
        return float(np.max(np.abs(u[1:-1, 1:-1])))
    if kind == "e":
        eo = u[0:-1:2, 1::2]  # (even, odd) node pairs
        oe = u[1::2, 0:-1:2]
        oo = u[1::2, 1::2]
        s = float(np.sum(eo * eo) + np.sum(oe * oe) + 3.0 * np.sum(oo * oo))
        return float((2.0 / 3.0) * np.sqrt(grid.h1 * grid.h2 * s))
    if kind == "f":
        l2 = norm(grid, u, "l2")
        e = norm(grid, u, "e")
        return float(np.sqrt((4.0 / 9.0) * l2 * l2 + e * e))
    raise ValueError(f"norm kind {kind!r} not defined on a 2D grid")
