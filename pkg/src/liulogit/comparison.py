"""Mean-squared-error matrix comparisons between estimator reports.

The operative criterion is the Loewner order: estimator B beats A when
MSE(A) - MSE(B) is positive (semi-)definite. Two predicates implement
it. The direct one thresholds the smallest eigenvalue of the
difference. The spectral one uses the classical equivalence

    M > 0, N >= 0:  M - N > 0  iff  lambda_max(N M^{-1}) < 1,

computed as a symmetric-definite generalized eigenproblem N v = lambda
M v so the possibly ill-conditioned M is never inverted explicitly.
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from ._linalg import spd_factor, spd_solve, symmetrize
from ._validation import as_float_matrix, check_square
from .exceptions import NumericalError
from .shrinkage import (
    EstimatorReport,
    almost_unbiased_filter,
    check_liu_d,
    _require_converged,
    _restriction_solves,
)

# eigenvalues are judged relative to the spectral norm at this tolerance
PD_RTOL = 1e-10

# width of the lambda_max band around 1 treated as the semi-definite boundary
BOUNDARY_ATOL = 1e-8


class Superiority(enum.Enum):
    B_SUPERIOR = "B-superior"
    A_SUPERIOR_OR_INCOMPARABLE = "A-superior-or-incomparable"
    INDEFINITE = "indefinite"


@dataclass(frozen=True)
class ComparisonVerdict:
    """Outcome of comparing two estimator reports.

    pair : (name of A, name of B).
    difference : MSE(A) - MSE(B), symmetrized.
    lambda_max : largest generalized eigenvalue of the pencil
        (MSE(B), MSE(A)), or None when MSE(A) was not positive definite.
    superior : the trichotomy verdict. B-superior means B's MSE is
        dominated: the difference is positive definite, or positive
        semi-definite with a materially positive trace (rank-deficient
        dominance, the situation restricted-versus-unrestricted pairs
        produce).
    certificate : human-readable statement of the predicate that fired.
    """

    pair: tuple
    difference: np.ndarray
    lambda_max: float | None
    superior: Superiority
    certificate: str


def is_positive_definite(M, tol=PD_RTOL):
    """True iff the smallest eigenvalue of sym(M) exceeds tol * ||M||_2."""
    M = symmetrize(check_square(as_float_matrix(M, "M"), "M"))
    eigs = np.linalg.eigvalsh(M)
    scale = max(abs(float(eigs[0])), abs(float(eigs[-1])))
    return bool(eigs[0] > tol * scale)


def lemma2_check(M, N):
    """Spectral dominance test for M > 0, N >= 0.

    Returns (M - N is positive definite, lambda_max) with lambda_max the
    largest eigenvalue of N M^{-1}, computed from the symmetric-definite
    generalized problem N v = lambda M v. Raises NumericalError when M
    is not positive definite.
    """
    M = symmetrize(check_square(as_float_matrix(M, "M"), "M"))
    N = symmetrize(check_square(as_float_matrix(N, "N"), "N"))
    if M.shape != N.shape:
        raise ValueError(f"shape mismatch: M is {M.shape}, N is {N.shape}")
    try:
        values = sla.eigh(N, M, eigvals_only=True)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise NumericalError("M is not positive definite") from exc
    lambda_max = float(values[-1])
    return lambda_max < 1.0, lambda_max


def compare(a, b, boundary_tol=BOUNDARY_ATOL, pd_tol=PD_RTOL):
    """Verdict on whether report ``b``'s estimator is MSE-superior to ``a``'s.

    Applies the spectral test with U = a.mse_matrix and V = b.mse_matrix
    when U is positive definite: lambda_max(V U^{-1}) < 1 certifies a
    positive definite difference. A lambda_max within ``boundary_tol``
    of 1 sends the decision to the eigenvalues of the difference itself,
    where a positive semi-definite difference with materially positive
    trace is still ruled B-superior (with its numerical rank in the
    certificate) and anything else is indefinite. lambda_max above the
    band means the difference is not positive semi-definite.
    """
    if not isinstance(a, EstimatorReport) or not isinstance(b, EstimatorReport):
        raise TypeError("compare takes two EstimatorReports")
    if a.mse_matrix.shape != b.mse_matrix.shape:
        raise ValueError("reports have different dimensions")
    U = symmetrize(a.mse_matrix)
    V = symmetrize(b.mse_matrix)
    diff = symmetrize(U - V)
    pair = (a.name, b.name)
    scale = max(
        abs(float(np.linalg.eigvalsh(U)[-1])),
        abs(float(np.linalg.eigvalsh(V)[-1])),
    )

    try:
        _, lambda_max = lemma2_check(U, V)
    except NumericalError:
        # MSE(A) not positive definite: fall back to the direct test
        eigs = np.linalg.eigvalsh(diff)
        if eigs[0] > pd_tol * scale:
            verdict = Superiority.B_SUPERIOR
            cert = "direct eigenvalue test: difference is positive definite"
        elif eigs[-1] < -pd_tol * scale:
            verdict = Superiority.A_SUPERIOR_OR_INCOMPARABLE
            cert = "direct eigenvalue test: difference is negative definite"
        else:
            verdict = Superiority.INDEFINITE
            cert = "MSE(A) is not positive definite and the difference is indefinite"
        return ComparisonVerdict(pair, diff, None, verdict, cert)

    if lambda_max < 1.0 - boundary_tol:
        verdict = Superiority.B_SUPERIOR
        cert = (
            f"lambda_max(V U^-1) = {lambda_max:.6g} < 1: "
            "difference is positive definite"
        )
    elif lambda_max <= 1.0 + boundary_tol:
        eigs = np.linalg.eigvalsh(diff)
        material = pd_tol * scale
        if eigs[0] >= -material and float(np.sum(eigs)) > material:
            rank = int(np.sum(eigs > material))
            verdict = Superiority.B_SUPERIOR
            cert = (
                f"lambda_max(V U^-1) = {lambda_max:.6g} at the boundary; "
                f"difference is positive semi-definite with numerical rank {rank}"
            )
        else:
            verdict = Superiority.INDEFINITE
            cert = (
                f"lambda_max(V U^-1) = {lambda_max:.6g} at the boundary with "
                "no materially positive direction"
            )
    else:
        verdict = Superiority.A_SUPERIOR_OR_INCOMPARABLE
        cert = (
            f"lambda_max(V U^-1) = {lambda_max:.6g} > 1: "
            "difference is not positive semi-definite"
        )
    return ComparisonVerdict(pair, diff, lambda_max, verdict, cert)


def aulle_vs_sraulle_gap(fit, restriction, d):
    """MSE(AULLE) - MSE(SRAULLE) via the bias-cancelling identity.

    Both estimators carry the same bias (W_d - I) beta_ref, so the MSE
    difference collapses to W_d (C^{-1} - R) W_d' with R the restricted
    covariance, and

        C^{-1} - R = G S^{-1} G',   G = C^{-1} H',  S = Psi + H C^{-1} H'.

    Building the result as (W_d G) S^{-1} (W_d G)' keeps it positive
    semi-definite by construction with rank q = rank(H); its trace is
    strictly positive whenever the restriction is non-empty.
    """
    _require_converged(fit)
    d = check_liu_d(d, allow_limit=True)
    W = almost_unbiased_filter(fit.C, d)
    _, G, s_factor = _restriction_solves(fit, restriction)
    # s_factor wraps the lower Cholesky factor L of S (S = L L'), so
    # M S^{-1} M' = (M L^{-T})(M L^{-T})' is an explicit Gram matrix
    L = np.tril(s_factor[0])
    T = sla.solve_triangular(L, (W @ G).T, lower=True).T
    return symmetrize(T @ T.T)
