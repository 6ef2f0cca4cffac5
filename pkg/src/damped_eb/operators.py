"""Compact difference operators and the banded/iterative solvers they need.

1D, on grid functions u (length 2J+1, zero boundary):

    A u |_j = (u_{j+1} + 10 u_j + u_{j-1}) / 12      "compact average"
    D u |_j = (u_{j+1} - 2 u_j + u_{j-1}) / h^2      second difference

Both are polynomials in the same Dirichlet tridiagonal matrix, so they
commute; the implicit time step reduces to one SPD pentadiagonal solve
with matrix a*A^2 + (1/2)*D^2.

2D (tensor products along the two axes):

    H u = A_x (B_y u)                  with B the y-direction compact average
    Phi u = B_y (Dx u) + A_x (Dy u)

The 2D step operator a*H^2 + (1/2)*Phi^2 is applied matrix-free (banded
sweeps) and solved by conjugate gradients with a Jacobi preconditioner.
"""
from __future__ import annotations

import dataclasses

import numpy as np
from scipy import linalg as sla

from .mesh import Grid1D

__all__ = [
    "Tridiag",
    "StepMatrix1D",
    "StepOperator2D",
    "IterationError",
    "apply_A",
    "apply_D",
    "solve_A",
    "apply_H",
    "apply_Phi",
    "solve_H",
    "build_step_matrix_1d",
    "solve_step_1d",
    "solve_step_2d",
]


class IterationError(RuntimeError):
    """Iterative solve hit the iteration cap before reaching tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclasses.dataclass
class Tridiag:
    """Symmetric-pattern tridiagonal matrix over interior nodes."""

    sub: np.ndarray
    main: np.ndarray
    sup: np.ndarray

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.main)
            + np.diag(self.sub, -1)
            + np.diag(self.sup, 1)
        )

    def apply(self, x: np.ndarray) -> np.ndarray:
        out = self.main * x
        out[1:] += self.sub * x[:-1]
        out[:-1] += self.sup * x[1:]
        return out


def compact_tridiag(m: int) -> Tridiag:
    """Interior matrix of the compact average A (size m = 2J-1)."""
    off = np.full(m - 1, 1.0 / 12.0)
    return Tridiag(off, np.full(m, 10.0 / 12.0), off)


def second_diff_tridiag(m: int, h: float) -> Tridiag:
    """Interior matrix of the second difference D."""
    off = np.full(m - 1, 1.0 / (h * h))
    return Tridiag(off, np.full(m, -2.0 / (h * h)), off)


# ---------------------------------------------------------------------------
# 1D stencil application

def apply_A(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    out[1:-1] = (u[2:] + 10.0 * u[1:-1] + u[:-2]) / 12.0
    return out


def apply_D(u: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(u)
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    return out


_COMPACT_FACTORS: dict[int, np.ndarray] = {}


def _compact_factor(m: int) -> np.ndarray:
    """Cached banded Cholesky factor of A (strictly diagonally dominant SPD)."""
    fac = _COMPACT_FACTORS.get(m)
    if fac is None:
        ab = np.zeros((2, m))
        ab[0, 1:] = 1.0 / 12.0
        ab[1, :] = 10.0 / 12.0
        fac = sla.cholesky_banded(ab, check_finite=False)
        _COMPACT_FACTORS[m] = fac
    return fac


def solve_A(b: np.ndarray) -> np.ndarray:
    """Solve A u = b for u with zero boundary (tridiagonal elimination)."""
    out = np.zeros_like(b)
    out[1:-1] = sla.cho_solve_banded(
        (_compact_factor(b.shape[0] - 2), False), b[1:-1], check_finite=False
    )
    return out


# ---------------------------------------------------------------------------
# 1D implicit step matrix: a*A^2 + (1/2)*D^2, pentadiagonal SPD for a > 0

@dataclasses.dataclass
class StepMatrix1D:
    a: float
    h: float
    ab: np.ndarray  # upper banded storage (3, m) for solveh_banded


_PENTA_TEMPLATES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _penta_templates(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Banded layouts of A^2 and of h^4 * D^2 over the interior (size m)."""
    cached = _PENTA_TEMPLATES.get(m)
    if cached is not None:
        return cached
    # A^2 = I + (h^2/6) D_scaled + (h^4/144) D_scaled^2 with D_scaled = h^2 D;
    # written out: main 17/24 (101/144 at the ends), off1 5/36, off2 1/144.
    a2 = np.zeros((3, m))
    a2[2, :] = 17.0 / 24.0
    a2[2, [0, -1]] = 101.0 / 144.0
    a2[1, 1:] = 5.0 / 36.0
    a2[0, 2:] = 1.0 / 144.0
    # (h^2 D)^2: main 6 (5 at the ends), off1 -4, off2 1
    t2 = np.zeros((3, m))
    t2[2, :] = 6.0
    t2[2, [0, -1]] = 5.0
    t2[1, 1:] = -4.0
    t2[0, 2:] = 1.0
    _PENTA_TEMPLATES[m] = (a2, t2)
    return a2, t2


def build_step_matrix_1d(a: float, grid: Grid1D) -> StepMatrix1D:
    if a <= 0:
        raise ValueError("step matrix requires a > 0")
    m = 2 * grid.J - 1
    a2, t2 = _penta_templates(m)
    h4 = grid.h ** 4
    return StepMatrix1D(a, grid.h, a * a2 + (0.5 / h4) * t2)


def solve_step_1d(matrix: StepMatrix1D, rhs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rhs)
    out[1:-1] = sla.solveh_banded(matrix.ab, rhs[1:-1], check_finite=False)
    return out


# ---------------------------------------------------------------------------
# 2D operators (tensor sweeps over full arrays with zero boundary)

def _compact_along(u: np.ndarray, axis: int) -> np.ndarray:
    out = np.zeros_like(u)
    if axis == 0:
        out[1:-1, :] = (u[2:, :] + 10.0 * u[1:-1, :] + u[:-2, :]) / 12.0
    else:
        out[:, 1:-1] = (u[:, 2:] + 10.0 * u[:, 1:-1] + u[:, :-2]) / 12.0
    return out


def _diff_along(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.zeros_like(u)
    if axis == 0:
        out[1:-1, :] = (u[2:, :] - 2.0 * u[1:-1, :] + u[:-2, :]) / (h * h)
    else:
        out[:, 1:-1] = (u[:, 2:] - 2.0 * u[:, 1:-1] + u[:, :-2]) / (h * h)
    return out


def _steps(shape: tuple[int, int]) -> tuple[float, float]:
    return 1.0 / (shape[0] - 1), 1.0 / (shape[1] - 1)


def apply_H(u: np.ndarray) -> np.ndarray:
    """H = A_x B_y; sweep order is immaterial (the factors commute)."""
    return _compact_along(_compact_along(u, 1), 0)


def apply_Phi(u: np.ndarray) -> np.ndarray:
    """Phi = B_y Dx + A_x Dy (mesh widths inferred from the unit square)."""
    h1, h2 = _steps(u.shape)
    return _compact_along(_diff_along(u, 0, h1), 1) + _compact_along(
        _diff_along(u, 1, h2), 0
    )


def solve_H(b: np.ndarray) -> np.ndarray:
    """Solve H u = b via one tridiagonal sweep per direction."""
    m1, m2 = b.shape[0] - 2, b.shape[1] - 2
    w = sla.cho_solve_banded((_compact_factor(m1), False), b[1:-1, 1:-1], check_finite=False)
    u = sla.cho_solve_banded((_compact_factor(m2), False), w.T, check_finite=False).T
    out = np.zeros_like(b)
    out[1:-1, 1:-1] = u
    return out


# ---------------------------------------------------------------------------
# 2D implicit step operator: a*H^2 + (1/2)*Phi^2, solved matrix-free by PCG

_DIAG_PIECES: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _diag_pieces(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """diag(A^2), diag(D^2)*h^4, diag(D A)*h^2 for the interior 1D factors."""
    cached = _DIAG_PIECES.get(m)
    if cached is None:
        nbr = np.full(m, 2.0)
        nbr[[0, -1]] = 1.0
        d_a2 = (10.0 / 12.0) ** 2 + nbr * (1.0 / 12.0) ** 2
        d_t2 = 4.0 + nbr
        d_ta = (nbr - 20.0) / 12.0
        cached = (d_a2, d_t2, d_ta)
        _DIAG_PIECES[m] = cached
    return cached


class StepOperator2D:
    """Matrix-free application of a*H^2 + (1/2)*Phi^2 with Jacobi diagonal.

    Symmetric positive definite as a bilinear form for a > 0:
    H^2 = A^2 (x) B^2 and Phi^2 expand into Kronecker products of SPD
    one-dimensional factors.
    """

    def __init__(self, a: float, shape: tuple[int, int]):
        if a <= 0:
            raise ValueError("step operator requires a > 0")
        self.a = a
        self.shape = shape
        h1, h2 = _steps(shape)
        m1, m2 = shape[0] - 2, shape[1] - 2
        da1, dt1, dta1 = _diag_pieces(m1)
        da2, dt2, dta2 = _diag_pieces(m2)
        dt1 = dt1 / h1 ** 4
        dta1 = dta1 / h1 ** 2
        dt2 = dt2 / h2 ** 4
        dta2 = dta2 / h2 ** 2
        # diag of Phi^2 = diag(D1^2 x A2^2) + 2 diag(D1 A1 x D2 A2) + diag(A1^2 x D2^2)
        self.diagonal = a * np.outer(da1, da2) + 0.5 * (
            np.outer(dt1, da2) + 2.0 * np.outer(dta1, dta2) + np.outer(da1, dt2)
        )
        self._buf = np.zeros(shape)

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.a * apply_H(apply_H(u)) + 0.5 * apply_Phi(apply_Phi(u))

    def apply_interior(self, x: np.ndarray) -> np.ndarray:
        buf = self._buf
        buf[1:-1, 1:-1] = x
        return self.apply(buf)[1:-1, 1:-1]


def solve_step_2d(
    a: float,
    rhs: np.ndarray,
    tol: float = 1e-12,
    x0: np.ndarray | None = None,
    max_iter: int | None = None,
) -> np.ndarray:
    """Solve (a*H^2 + (1/2)*Phi^2) u = rhs by Jacobi-preconditioned CG.

    Converged when the relative residual drops to ``tol``.  Raises
    :class:`IterationError` past the iteration cap (default 10x the
    interior dimension).
    """
    op = StepOperator2D(a, rhs.shape)
    b = rhs[1:-1, 1:-1]
    out = np.zeros_like(rhs)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return out
    x = np.zeros_like(b) if x0 is None else x0[1:-1, 1:-1].copy()
    r = b - op.apply_interior(x)
    invdiag = 1.0 / op.diagonal
    cap = max_iter if max_iter is not None else 10 * b.size
    rnorm = float(np.linalg.norm(r))
    if rnorm <= tol * bnorm:
        out[1:-1, 1:-1] = x
        return out
    z = r * invdiag
    p = z.copy()
    rz = float(np.sum(r * z))
    for _ in range(cap):
        ap = op.apply_interior(p)
        alpha = rz / float(np.sum(p * ap))
        x += alpha * p
        r -= alpha * ap
        rnorm = float(np.linalg.norm(r))
        if rnorm <= tol * bnorm:
            out[1:-1, 1:-1] = x
            return out
        z = r * invdiag
        rz_new = float(np.sum(r * z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise IterationError(
        f"conjugate gradient stalled at relative residual {rnorm / bnorm:.3e} "
        f"after {cap} iterations (tol {tol:.1e})",
        residual=rnorm / bnorm,
        iterations=cap,
    )
