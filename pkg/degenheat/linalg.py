"""
Sparse symmetric positive-definite linear algebra.

Holds the CSR operator type shared by every implicit step, the diagonal shift
used to build ``1/dt + A + lambda*a`` and a Jacobi-preconditioned conjugate
gradient solver. A small dense solver is kept as a test oracle.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from .exceptions import SolverConvergenceError, UsageError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """
    Square CSR matrix with canonical storage.

    The wrapped matrix has sorted column indices, no stored zeros and a
    structurally symmetric pattern. It is copied on construction and never
    mutated afterwards, so operators can be shared between threads.
    """

    matrix: sparse.csr_matrix

    def __post_init__(self):
        matrix = sparse.csr_matrix(self.matrix, dtype=np.float64, copy=True)
        if matrix.shape[0] != matrix.shape[1]:
            raise UsageError(f"Operator must be square, got shape {matrix.shape}")
        matrix.eliminate_zeros()
        matrix.sort_indices()
        pattern = matrix.copy()
        pattern.data = np.ones_like(pattern.data)
        if (pattern != pattern.T).nnz:
            raise UsageError("Operator pattern is not structurally symmetric")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def indptr(self) -> np.ndarray:
        return self.matrix.indptr

    @property
    def indices(self) -> np.ndarray:
        return self.matrix.indices

    @property
    def data(self) -> np.ndarray:
        return self.matrix.data

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def restrict(self, mask: np.ndarray) -> "SparseOperator":
        """Principal submatrix on the rows and columns selected by a boolean ``mask``."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.dimension,):
            raise UsageError(
                f"Mask of shape {mask.shape} does not match operator dimension {self.dimension}"
            )
        if mask.all():
            return self
        return SparseOperator(self.matrix[mask][:, mask])

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True)
class SolveStats:
    """
    Outcome of a conjugate gradient solve.

    Attributes
    ----------
    iterations : int
        Iterations performed.
    residual : float
        Final relative residual ``||b - Ax|| / ||b||``, recomputed from ``x``.
    residual_history : tuple of float
        Recursive relative residual after each iteration, starting with the
        residual of the initial guess.
    """

    iterations: int
    residual: float
    residual_history: Tuple[float, ...] = ()


def add_diagonal(operator: SparseOperator, diagonal: np.ndarray) -> SparseOperator:
    """
    Add a non-negative vector to the diagonal of ``operator``.

    Parameters
    ----------
    operator : SparseOperator
        Operator to shift.
    diagonal : np.ndarray
        One entry per row, all ``>= 0``.

    Returns
    -------
    SparseOperator
        ``operator + diag(diagonal)``.
    """
    diagonal = np.asarray(diagonal, dtype=np.float64)
    if diagonal.shape != (operator.dimension,):
        raise UsageError(
            f"Diagonal of length {diagonal.size} does not match operator dimension {operator.dimension}"
        )
    if np.any(diagonal < 0) or not np.all(np.isfinite(diagonal)):
        raise UsageError("Diagonal shift must be finite and non-negative")
    return SparseOperator(operator.matrix + sparse.diags(diagonal, format="csr"))


def cg_solve(
    operator: SparseOperator,
    rhs: np.ndarray,
    tol: float = DEFAULT_TOL,
    maxiter: Optional[int] = None,
    x0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, SolveStats]:
    """
    Solve ``operator @ x = rhs`` by Jacobi-preconditioned conjugate gradients.

    Parameters
    ----------
    operator : SparseOperator
        Symmetric positive-definite operator.
    rhs : np.ndarray
        Right-hand side.
    tol : float
        Relative residual target, in ``(0, 1)``.
    maxiter : int, optional
        Iteration cap, defaults to ``10 * n``.
    x0 : np.ndarray, optional
        Initial guess, defaults to zero.

    Returns
    -------
    tuple
        ``(x, SolveStats)`` with ``||rhs - operator @ x|| <= tol * ||rhs||``.

    Raises
    ------
    SolverConvergenceError
        If the tolerance is not met within ``maxiter`` iterations. The error
        carries the best iterate and its true relative residual.
    """
    n = operator.dimension
    b = np.asarray(rhs, dtype=np.float64)
    if b.shape != (n,):
        raise UsageError(f"Right-hand side of shape {b.shape} does not match dimension {n}")
    if not 0.0 < tol < 1.0:
        raise UsageError(f"Tolerance must lie in (0, 1), got {tol}")
    if maxiter is None:
        maxiter = 10 * n
    if maxiter < 1:
        raise UsageError(f"maxiter must be at least 1, got {maxiter}")

    diag = operator.diagonal()
    if np.any(diag <= 0):
        raise UsageError("Operator has a non-positive diagonal entry; it is not positive definite")
    inv_diag = 1.0 / diag

    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return np.zeros(n), SolveStats(0, 0.0, (0.0,))

    def true_residual(v: np.ndarray) -> float:
        return float(np.linalg.norm(b - operator.matvec(v)) / b_norm)

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    r = b - operator.matvec(x)
    res = np.linalg.norm(r) / b_norm
    history = [res]
    if res <= tol:
        return x, SolveStats(0, res, tuple(history))
    # best is ranked by true residual; candidate by recursive residual since the last restart
    best_x, best_res = x.copy(), res
    candidate_x, candidate_res = None, np.inf

    def settle_candidate():
        nonlocal best_x, best_res, candidate_x, candidate_res
        if candidate_x is not None:
            checked = true_residual(candidate_x)
            if checked < best_res:
                best_x, best_res = candidate_x, checked
        candidate_x, candidate_res = None, np.inf

    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    for iteration in range(1, maxiter + 1):
        q = operator.matvec(p)
        pq = p @ q
        if pq <= 0:
            raise UsageError("Operator is not positive definite (p.Ap <= 0)")
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        res = np.linalg.norm(r) / b_norm
        history.append(res)

        if res <= tol:
            # recursive residual drifts from the true one; confirm before returning
            r = b - operator.matvec(x)
            res = np.linalg.norm(r) / b_norm
            if res <= tol:
                logger.debug(f"CG converged in {iteration} iterations, residual {res:.3e}")
                return x, SolveStats(iteration, res, tuple(history))
            settle_candidate()
            if res < best_res:
                best_x, best_res = x.copy(), res
            z = inv_diag * r
            p = z.copy()
            rz = r @ z
            continue

        if res < candidate_res:
            candidate_x, candidate_res = x.copy(), res

        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new

    settle_candidate()
    final = true_residual(x)
    if final < best_res:
        best_x, best_res = x.copy(), final
    raise SolverConvergenceError(
        f"CG did not reach tolerance {tol:.1e} in {maxiter} iterations "
        f"(best true relative residual {best_res:.3e})",
        best_x,
        best_res,
        maxiter,
    )


def dense_solve(operator: SparseOperator, rhs: np.ndarray) -> np.ndarray:
    """Direct dense solve, used as a reference for small systems."""
    return np.linalg.solve(operator.to_dense(), np.asarray(rhs, dtype=np.float64))
