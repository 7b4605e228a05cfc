"""Matrix-free operators, conjugate gradients and the Kronecker sandwich."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LinearOperator:
    """A square linear map on R^k known only through its action."""

    dim: int
    apply: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.apply(x)

    @classmethod
    def from_matrix(cls, M) -> "LinearOperator":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("operator matrix must be square")
        return cls(M.shape[0], lambda x: M @ x)

    def to_dense(self) -> np.ndarray:
        """Assemble the k x k matrix column by column (test sizes only)."""
        eye = np.eye(self.dim)
        return np.column_stack([self.apply(eye[:, j]) for j in range(self.dim)])


@dataclass(frozen=True)
class CgReport:
    iterations: int
    final_relative_residual: float
    converged: bool


def conjugate_gradient(op, b, tol=1e-8, max_iter=None, x0=None, preconditioner=None):
    """Solve ``op(x) = b`` for a symmetric positive (semi)definite operator.

    Parameters
    ----------
    op : LinearOperator or callable
        Action of the system matrix on a k-vector.
    b : ndarray, shape (k,)
        Right-hand side.
    tol : float
        Target relative residual ``||op(x) - b|| / ||b||``.
    max_iter : int, optional
        Iteration cap, ``10 * k`` by default.
    x0 : ndarray, optional
        Starting guess, zero by default.
    preconditioner : LinearOperator or callable, optional
        Symmetric positive definite approximation of the inverse of
        ``op``. The stopping rule still uses the unpreconditioned residual.

    Returns
    -------
    x : ndarray
        The converged iterate, or the iterate with the smallest residual
        seen when the cap is hit.
    report : CgReport

    Notes
    -----
    Convergence is always confirmed on the true residual. If the
    recursively updated residual has drifted, the iteration restarts from
    the current iterate instead of stopping.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 1:
        raise ValueError("b must be a vector")
    if not np.all(np.isfinite(b)):
        raise FloatingPointError("non-finite entries in right-hand side")
    k = b.shape[0]
    apply = op.apply if isinstance(op, LinearOperator) else op
    if max_iter is None:
        max_iter = 10 * k
    if tol <= 0 or max_iter <= 0:
        raise ValueError("tol and max_iter must be positive")

    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(k), CgReport(0, 0.0, True)

    if preconditioner is None:
        precond = lambda r: r
    else:
        precond = preconditioner.apply if isinstance(preconditioner, LinearOperator) else preconditioner

    x = np.zeros(k) if x0 is None else np.array(x0, dtype=float)
    r = b - apply(x) if x0 is not None else b.copy()
    best_x, best_res = x.copy(), np.linalg.norm(r) / bnorm
    if best_res <= tol:
        return x, CgReport(0, float(best_res), True)
    z = precond(r)
    p = z.copy()
    rz = r @ z

    it = 0
    while it < max_iter:
        Ap = apply(p)
        pAp = p @ Ap
        if not np.isfinite(pAp):
            raise FloatingPointError(f"non-finite curvature at CG iteration {it}")
        if pAp == 0.0:
            # breakdown: search direction carries no curvature
            break
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        it += 1
        res = np.linalg.norm(r) / bnorm
        if not np.isfinite(res):
            raise FloatingPointError(f"non-finite residual at CG iteration {it}")
        if res <= tol:
            r = b - apply(x)
            res = np.linalg.norm(r) / bnorm
            if res <= tol:
                return x, CgReport(it, float(res), True)
            # recursive residual drifted: restart from the true one
            z = precond(r)
            p = z.copy()
            rz = r @ z
            continue
        if res < best_res:
            best_x, best_res = x.copy(), res
        z = precond(r)
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new

    true_res = np.linalg.norm(b - apply(best_x)) / bnorm
    warnings.warn(
        f"CG stopped after {it} iterations at relative residual {true_res:.3e} (tol {tol:.1e})",
        ConvergenceWarning,
        stacklevel=2,
    )
    return best_x, CgReport(it, float(true_res), False)


def sandwich_apply(L, X, R):
    """Return ``L @ X @ R.T``.

    With row-major vectorisation this is the action of ``kron(L, R)`` on
    ``X.ravel()``, computed in O(v^3) time without forming the Kronecker
    product.
    """
    L, X, R = (np.asarray(m, dtype=float) for m in (L, X, R))
    for name, m in (("L", L), ("X", X), ("R", R)):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not (L.shape == X.shape == R.shape):
        raise ValueError(f"dimension mismatch: {L.shape}, {X.shape}, {R.shape}")
    return L @ X @ R.T
