"""Dense linear-algebra helpers shared across the estimator modules.

Every estimator formula in the package reduces to solves against
symmetric positive definite matrices. These wrappers keep the
Cholesky-based solve path and the symmetrize-after-compute convention
in one place so round-off asymmetry never leaks into the eigenvalue
tests downstream.
"""

import numpy as np
from scipy import linalg as sla

from .exceptions import NumericalError


def symmetrize(M):
    """Return (M + M') / 2."""
    return 0.5 * (M + M.T)


def spd_factor(M, name="matrix"):
    """Cholesky factor of a symmetric positive definite matrix.

    The result is the opaque factor accepted by scipy's cho_solve.
    Raises NumericalError when the factorization breaks down, i.e. the
    matrix is not positive definite at working precision.
    """
    try:
        return sla.cho_factor(M, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"{name} is not positive definite") from exc


def spd_solve(factor, B):
    """Solve M X = B given the factor from spd_factor(M)."""
    return sla.cho_solve(factor, B)


def spd_inverse(M, name="matrix"):
    """Explicit inverse of a symmetric positive definite matrix.

    Solves against the identity rather than calling a general inverse;
    used only where the inverse itself is the quantity being reported.
    """
    factor = spd_factor(M, name=name)
    return symmetrize(sla.cho_solve(factor, np.eye(M.shape[0])))
