"""Dense-matrix oracles used by the tests.

Everything here is assembled independently of the package's banded and
matrix-free solvers: plain dense matrices via numpy, solved monolithically
with numpy.linalg.  Interior dimension stays small (<= 200).
"""
import numpy as np


def dense_compact(m: int) -> np.ndarray:
    """Interior matrix of the (1, 10, 1)/12 compact average."""
    return (
        np.diag(np.full(m, 10.0))
        + np.diag(np.ones(m - 1), 1)
        + np.diag(np.ones(m - 1), -1)
    ) / 12.0


def dense_second_diff(m: int, h: float) -> np.ndarray:
    return (
        np.diag(np.full(m, -2.0))
        + np.diag(np.ones(m - 1), 1)
        + np.diag(np.ones(m - 1), -1)
    ) / (h * h)


def dense_H(m1: int, m2: int) -> np.ndarray:
    return np.kron(dense_compact(m1), dense_compact(m2))


def dense_Phi(m1: int, m2: int, h1: float, h2: float) -> np.ndarray:
    return np.kron(dense_second_diff(m1, h1), dense_compact(m2)) + np.kron(
        dense_compact(m1), dense_second_diff(m2, h2)
    )


def block_step_1d(U_prev, U_curr, V_prev, V_curr, f_n, tau, q, h):
    """One scheme step solved as the monolithic 2x2 block system.

    Unknowns (U^{n+1}, V^{n+1}); equations are the coupled update
        a A U + (1/2) D V = A f + (2/tau^2) A U^n - (1/tau^2 - q/2tau) A U^{n-1} - (1/2) D V^{n-1}
        -D U + A V       = A V^{n-1} - D U^{n-1}
    with a = 1/tau^2 + q/(2 tau).
    """
    m = U_curr.shape[0] - 2
    A = dense_compact(m)
    D = dense_second_diff(m, h)
    a = 1.0 / tau**2 + q / (2.0 * tau)
    blk = np.block([[a * A, 0.5 * D], [-D, A]])
    rhs1 = (
        A @ f_n[1:-1]
        + (2.0 / tau**2) * (A @ U_curr[1:-1])
        - (1.0 / tau**2 - q / (2.0 * tau)) * (A @ U_prev[1:-1])
        - 0.5 * (D @ V_prev[1:-1])
    )
    rhs2 = A @ V_prev[1:-1] - D @ U_prev[1:-1]
    sol = np.linalg.solve(blk, np.concatenate([rhs1, rhs2]))
    U_new = np.zeros_like(U_curr)
    V_new = np.zeros_like(U_curr)
    U_new[1:-1] = sol[:m]
    V_new[1:-1] = sol[m:]
    return U_new, V_new


def block_step_2d(U_prev, U_curr, V_prev, V_curr, f_n, tau, q, h1, h2):
    """2D analogue of :func:`block_step_1d` with H and Phi dense."""
    m1, m2 = U_curr.shape[0] - 2, U_curr.shape[1] - 2
    H = dense_H(m1, m2)
    Phi = dense_Phi(m1, m2, h1, h2)
    a = 1.0 / tau**2 + q / (2.0 * tau)
    blk = np.block([[a * H, 0.5 * Phi], [-Phi, H]])
    vec = lambda w: w[1:-1, 1:-1].ravel()
    rhs1 = (
        H @ vec(f_n)
        + (2.0 / tau**2) * (H @ vec(U_curr))
        - (1.0 / tau**2 - q / (2.0 * tau)) * (H @ vec(U_prev))
        - 0.5 * (Phi @ vec(V_prev))
    )
    rhs2 = H @ vec(V_prev) - Phi @ vec(U_prev)
    sol = np.linalg.solve(blk, np.concatenate([rhs1, rhs2]))
    n = m1 * m2
    U_new = np.zeros_like(U_curr)
    V_new = np.zeros_like(U_curr)
    U_new[1:-1, 1:-1] = sol[:n].reshape(m1, m2)
    V_new[1:-1, 1:-1] = sol[n:].reshape(m1, m2)
    return U_new, V_new


def random_gridfn_1d(rng, J: int) -> np.ndarray:
    u = np.zeros(2 * J + 1)
    u[1:-1] = rng.standard_normal(2 * J - 1)
    return u


def random_gridfn_2d(rng, J1: int, J2: int) -> np.ndarray:
    u = np.zeros((2 * J1 + 1, 2 * J2 + 1))
    u[1:-1, 1:-1] = rng.standard_normal((2 * J1 - 1, 2 * J2 - 1))
    return u
