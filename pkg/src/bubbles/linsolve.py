"""Dense complex linear solves with residual control and condition estimates.

Thin wrapper over LAPACK (via scipy): LU with partial pivoting, a 1-norm
reciprocal-condition estimate, and iterative refinement (up to a few sweeps)
when the first residual misses the requested tolerance.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

__all__ = ["DenseSolveResult", "solve_dense", "NumericallySingularError"]


class NumericallySingularError(RuntimeError):
    """Factorization failed or the solution is numerically meaningless.

    Carries ``condition_estimate`` (may be ``inf``)."""

    def __init__(self, message: str, condition_estimate: float = float("inf")):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class DenseSolveResult:
    """Solution plus diagnostics of one dense solve."""

    def __init__(self, x: np.ndarray, residual: float, condition_estimate: float):
        self.x = x
        self.residual = residual
        self.condition_estimate = condition_estimate


def _condition_estimate(a: np.ndarray, lu: np.ndarray, piv: np.ndarray) -> float:
    anorm = float(np.linalg.norm(a, 1))
    if np.iscomplexobj(lu):
        rcond, info = lapack.zgecon(lu, anorm, norm="1")
    else:
        rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond == 0.0:
        return float("inf")
    return 1.0 / float(rcond)


_MAX_REFINEMENTS = 4


def solve_dense(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> DenseSolveResult:
    """Solve ``a x = b`` by LU with partial pivoting.

    The relative residual ``||a x - b|| / ||b||`` is measured in the 2-norm;
    iterative refinement runs while it exceeds ``tol`` (at most a few sweeps),
    and :class:`NumericallySingularError` is raised if it still does.
    """
    a = np.ascontiguousarray(a)
    b = np.asarray(b)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return DenseSolveResult(np.zeros_like(b, dtype=a.dtype), 0.0, 0.0)
    try:
        lu, piv = lu_factor(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises ValueError
        raise NumericallySingularError(f"LU factorization failed: {exc}") from exc
    cond = _condition_estimate(a, lu, piv)
    x = lu_solve((lu, piv), b)
    residual = float(np.linalg.norm(a @ x - b)) / bnorm
    for _ in range(_MAX_REFINEMENTS):
        if not np.isfinite(residual) or residual <= tol:
            break
        x = x + lu_solve((lu, piv), b - a @ x)
        new_residual = float(np.linalg.norm(a @ x - b)) / bnorm
        if not new_residual < residual:
            residual = new_residual
            break
        residual = new_residual
    if not np.isfinite(residual) or residual > tol:
        raise NumericallySingularError(
            f"solve did not reach residual {tol:g} (got {residual:g})",
            condition_estimate=cond,
        )
    return DenseSolveResult(x, residual, cond)
