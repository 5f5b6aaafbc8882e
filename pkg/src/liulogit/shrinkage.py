"""Shrinkage filters, stochastic linear restrictions, and exact
mean-squared-error reports for the five logistic estimators.

All estimators are built on a converged maximum likelihood fit with
information matrix C = X'WX and estimate b:

    MLE      b                 unbiased, covariance C^{-1}
    LLE      Z_d b             Z_d = (C + I)^{-1}(C + dI)
    AULLE    W_d b             W_d = I - (1 - d)^2 (C + I)^{-2}
    SRMLE    b corrected toward stochastic prior information
             h = H beta + v with Cov(v) = Psi
    SRAULLE  W_d applied to the SRMLE

Each ``*_report`` function returns the point estimate together with its
exact bias vector, covariance, MSE matrix (covariance plus bias outer
product) and scalar MSE (the trace), evaluated at a caller-supplied
reference coefficient vector ``beta_ref``: the true coefficients in a
simulation, or a plug-in estimate on real data.
"""

from dataclasses import dataclass

import numpy as np

from ._linalg import spd_factor, spd_inverse, spd_solve, symmetrize
from ._validation import as_float_matrix, as_float_vector, check_square, check_symmetric
from .exceptions import NumericalError
from .model import MleFit

# row order used by every table in the package
ESTIMATOR_NAMES = ("MLE", "LLE", "AULLE", "SRMLE", "SRAULLE")

# the two covariance forms of the restricted estimator must agree this well
COVARIANCE_FORMS_RTOL = 1e-8


def check_liu_d(d, allow_limit=False):
    """Validate the shrinkage parameter d.

    The statistically meaningful range is 0 < d < 1. With
    ``allow_limit`` the degenerate value d = 1 is also accepted; both
    filters are the identity there, so the shrunken estimators collapse
    onto their unshrunken parents.
    """
    d = float(d)
    if allow_limit:
        if not 0.0 < d <= 1.0:
            raise ValueError(f"d must lie in (0, 1], got {d!r}")
    elif not 0.0 < d < 1.0:
        raise ValueError(f"d must lie in (0, 1), got {d!r}")
    return d


def shifted_inverse(C):
    """(C + I)^{-1} for symmetric positive semi-definite C."""
    C = check_square(as_float_matrix(C, "C"), "C")
    return spd_inverse(symmetrize(C) + np.eye(C.shape[0]), name="C + I")


def liu_filter(C, d):
    """Shrinkage filter Z_d = (C + I)^{-1}(C + dI) = I - (1 - d)(C + I)^{-1}.

    Total in d: any real value is accepted, the filter is simply the
    identity minus (1 - d) times the shifted inverse. For 0 < d < 1 each
    eigenvalue lambda of C maps to (lambda + d) / (lambda + 1) in (0, 1).
    """
    inv = shifted_inverse(C)
    Z = np.eye(inv.shape[0]) - (1.0 - float(d)) * inv
    return symmetrize(Z)


def almost_unbiased_filter(C, d):
    """Bias-reducing filter W_d = I - (1 - d)^2 (C + I)^{-2}.

    Satisfies W_d = I - (I - Z_d)^2 with the plain shrinkage filter Z_d,
    hence the leading-order bias of the shrunken estimate cancels.
    Total in d, like liu_filter.
    """
    inv = shifted_inverse(C)
    W = np.eye(inv.shape[0]) - (1.0 - float(d)) ** 2 * (inv @ inv)
    return symmetrize(W)


@dataclass(frozen=True)
class StochasticRestriction:
    """Stochastic prior information h = H beta + v with Cov(v) = Psi.

    H : array of shape (q, p), full row rank, q <= p.
    h : array of shape (q,).
    psi : array of shape (q, q), symmetric positive definite.
    """

    H: np.ndarray
    h: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        H = as_float_matrix(self.H, "H")
        h = as_float_vector(self.h, "h")
        psi = as_float_matrix(self.psi, "psi")
        q, p = H.shape
        if q < 1:
            raise ValueError("H must have at least one row")
        if q > p:
            raise ValueError(f"more restrictions than coefficients: q={q}, p={p}")
        if h.shape[0] != q:
            raise ValueError(f"H has {q} rows but h has length {h.shape[0]}")
        if psi.shape != (q, q):
            raise ValueError(f"psi must have shape ({q}, {q}), got {psi.shape}")
        if np.linalg.matrix_rank(H) < q:
            raise ValueError("H must have full row rank")
        check_symmetric(psi, "psi")
        psi = symmetrize(psi)
        try:
            np.linalg.cholesky(psi)
        except np.linalg.LinAlgError as exc:
            raise ValueError("psi must be positive definite") from exc
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "psi", psi)

    @property
    def q(self):
        return self.H.shape[0]

    @property
    def p(self):
        return self.H.shape[1]

    def psi_cholesky(self):
        """Lower Cholesky factor of Psi, for sampling the disturbance."""
        return np.linalg.cholesky(self.psi)


@dataclass(frozen=True)
class EstimatorReport:
    """Point estimate with its exact first and second moment summaries.

    mse_matrix = covariance + bias bias' and smse = trace(mse_matrix)
    hold by construction.
    """

    name: str
    beta: np.ndarray
    bias: np.ndarray
    covariance: np.ndarray
    mse_matrix: np.ndarray
    smse: float


def _report(name, beta, bias, covariance):
    cov = symmetrize(covariance)
    mse = symmetrize(cov + np.outer(bias, bias))
    return EstimatorReport(
        name=name,
        beta=beta,
        bias=bias,
        covariance=cov,
        mse_matrix=mse,
        smse=float(np.trace(mse)),
    )


def _require_converged(fit):
    if not isinstance(fit, MleFit):
        raise TypeError("fit must be an MleFit")
    if not fit.converged:
        raise ValueError(
            f"the maximum likelihood fit did not converge "
            f"(score norm {fit.score_norm:.3e} after {fit.iterations} iterations)"
        )


def _check_beta_ref(beta_ref, p):
    beta_ref = as_float_vector(beta_ref, "beta_ref")
    if beta_ref.shape[0] != p:
        raise ValueError(f"beta_ref must have length {p}, got {beta_ref.shape[0]}")
    return beta_ref


def mle_report(fit):
    """Report for the unshrunken estimate: covariance = MSE = C^{-1}."""
    _require_converged(fit)
    cov = spd_inverse(fit.C, name="C")
    return _report("MLE", fit.beta_hat.copy(), np.zeros(fit.p), cov)


def lle_report(fit, d, beta_ref):
    """Report for the shrunken estimate Z_d b.

    bias = (Z_d - I) beta_ref, covariance = Z_d C^{-1} Z_d'.
    """
    _require_converged(fit)
    d = check_liu_d(d, allow_limit=True)
    beta_ref = _check_beta_ref(beta_ref, fit.p)
    Z = liu_filter(fit.C, d)
    cov = Z @ spd_solve(spd_factor(fit.C, name="C"), Z.T)
    return _report("LLE", Z @ fit.beta_hat, Z @ beta_ref - beta_ref, cov)


def aulle_report(fit, d, beta_ref):
    """Report for the bias-corrected shrunken estimate W_d b.

    bias = (W_d - I) beta_ref, covariance = W_d C^{-1} W_d'.
    """
    _require_converged(fit)
    d = check_liu_d(d, allow_limit=True)
    beta_ref = _check_beta_ref(beta_ref, fit.p)
    W = almost_unbiased_filter(fit.C, d)
    cov = W @ spd_solve(spd_factor(fit.C, name="C"), W.T)
    return _report("AULLE", W @ fit.beta_hat, W @ beta_ref - beta_ref, cov)


def _restriction_solves(fit, restriction):
    """Shared pieces: G = C^{-1}H' and the factored S = Psi + H C^{-1} H'."""
    if restriction.p != fit.p:
        raise ValueError(
            f"restriction is on {restriction.p} coefficients "
            f"but the fit has {fit.p}"
        )
    factor = spd_factor(fit.C, name="C")
    G = spd_solve(factor, restriction.H.T)
    S = symmetrize(restriction.psi + restriction.H @ G)
    s_factor = spd_factor(S, name="Psi + H C^{-1} H'")
    return factor, G, s_factor


def srmle_report(fit, restriction):
    """Report for the restricted estimate.

    The estimate is b + C^{-1}H'(Psi + H C^{-1} H')^{-1}(h - Hb); it is
    unbiased under the prior model, and its covariance admits two
    algebraic forms,

        R = C^{-1} - C^{-1}H'(Psi + H C^{-1} H')^{-1} H C^{-1}
          = (C + H' Psi^{-1} H)^{-1},

    which are computed independently and must agree to 1e-8 in relative
    Frobenius norm; disagreement raises NumericalError. The symmetrized
    direct-inverse form is the one stored.
    """
    _require_converged(fit)
    c_factor, G, s_factor = _restriction_solves(fit, restriction)
    residual = restriction.h - restriction.H @ fit.beta_hat
    beta_sr = fit.beta_hat + G @ spd_solve(s_factor, residual)

    C_inv = symmetrize(spd_solve(c_factor, np.eye(fit.p)))
    R_subtractive = symmetrize(C_inv - G @ spd_solve(s_factor, G.T))
    psi_factor = spd_factor(restriction.psi, name="Psi")
    R_direct = spd_inverse(
        symmetrize(fit.C + restriction.H.T @ spd_solve(psi_factor, restriction.H)),
        name="C + H'Psi^{-1}H",
    )
    rel = float(
        np.linalg.norm(R_subtractive - R_direct) / np.linalg.norm(R_direct)
    )
    if rel > COVARIANCE_FORMS_RTOL:
        raise NumericalError(
            f"the two covariance forms of the restricted estimator disagree "
            f"(relative difference {rel:.3e})"
        )
    return _report("SRMLE", beta_sr, np.zeros(fit.p), R_direct)


def sraulle_report(fit, restriction, d, beta_ref):
    """Report for the bias-corrected shrunken restricted estimate.

    beta = W_d (SRMLE), bias = (W_d - I) beta_ref (the same bias the
    unrestricted W_d b carries), covariance = W_d R W_d'.
    """
    _require_converged(fit)
    d = check_liu_d(d, allow_limit=True)
    beta_ref = _check_beta_ref(beta_ref, fit.p)
    srmle = srmle_report(fit, restriction)
    W = almost_unbiased_filter(fit.C, d)
    cov = W @ srmle.covariance @ W.T
    return _report("SRAULLE", W @ srmle.beta, W @ beta_ref - beta_ref, cov)


@dataclass(frozen=True)
class SmseGrid:
    """Scalar MSE of every estimator over a grid of shrinkage values."""

    d_grid: tuple
    smse: dict
    best_d: dict

    def rows(self):
        """Yield (estimator, d, smse) triples in table order."""
        for name in ESTIMATOR_NAMES:
            for d, value in zip(self.d_grid, self.smse[name]):
                yield name, d, value


def smse_over_grid(fit, restriction, d_grid, beta_ref):
    """Tabulate SMSE for all five estimators at each d in the grid.

    The MLE and SRMLE rows do not depend on d and are constant. Each
    estimator's ``best_d`` is the grid point minimizing its row (the
    first grid point for the constant rows).
    """
    d_grid = tuple(check_liu_d(d) for d in d_grid)
    if not d_grid:
        raise ValueError("d_grid must not be empty")
    beta_ref = _check_beta_ref(beta_ref, fit.p)
    k = len(d_grid)
    mle = mle_report(fit)
    srmle = srmle_report(fit, restriction)
    smse = {
        "MLE": (mle.smse,) * k,
        "LLE": tuple(lle_report(fit, d, beta_ref).smse for d in d_grid),
        "AULLE": tuple(aulle_report(fit, d, beta_ref).smse for d in d_grid),
        "SRMLE": (srmle.smse,) * k,
        "SRAULLE": tuple(
            sraulle_report(fit, restriction, d, beta_ref).smse for d in d_grid
        ),
    }
    best_d = {
        name: d_grid[int(np.argmin(values))] for name, values in smse.items()
    }
    return SmseGrid(d_grid=d_grid, smse=smse, best_d=best_d)
