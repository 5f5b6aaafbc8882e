"""Binary logistic model and its maximum likelihood fit.

The model for a binary response y_i with covariate row x_i is

    P(y_i = 1) = pi_i = exp(x_i' beta) / (1 + exp(x_i' beta)).

The maximum likelihood estimate solves the score equation
X'(y - pi) = 0 and is computed by iteratively reweighted least squares
(IRLS): with W = diag[pi_i (1 - pi_i)] and working response

    z_i = logit(pi_i) + (y_i - pi_i) / (pi_i (1 - pi_i))

evaluated at the current iterate, the update is
beta <- (X'WX)^{-1} X'Wz. The converged weighted cross-product matrix
C = X'WX is the observed information whose inverse is the asymptotic
covariance of the estimate. Everything downstream (shrinkage filters,
restricted estimators, MSE algebra) conditions on this converged C.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._linalg import spd_factor, spd_solve
from ._validation import as_float_matrix, as_float_vector
from .exceptions import SeparationError

# fitted probabilities are kept this far inside (0, 1) during IRLS so the
# weights stay invertible near separation
PROBABILITY_CLAMP = 1e-10

# strictly-inside-(0, 1) bounds for reported probabilities: log(pi) and
# log(1 - pi) both stay finite
_PROB_LO = np.finfo(float).tiny
_PROB_HI = 1.0 - np.finfo(float).epsneg


@dataclass(frozen=True)
class Dataset:
    """A full-rank design matrix paired with a 0/1 response vector.

    Parameters
    ----------
    X : array of shape (n, p)
        Explanatory variables; requires n > p >= 1 and full column rank.
        No intercept column is added implicitly.
    y : array of shape (n,)
        Responses, each exactly 0 or 1.
    feature_names : sequence of str, optional
        Column labels. ``labels()`` falls back to x1..xp.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple | None = None

    def __post_init__(self):
        X = as_float_matrix(self.X, "X")
        y = as_float_vector(self.y, "y")
        n, p = X.shape
        if p < 1:
            raise ValueError("X must have at least one column")
        if n <= p:
            raise ValueError(f"need more rows than columns, got n={n} and p={p}")
        if y.shape[0] != n:
            raise ValueError(f"X has {n} rows but y has {y.shape[0]} entries")
        bad = ~((y == 0.0) | (y == 1.0))
        if np.any(bad):
            rows = np.flatnonzero(bad)[:10].tolist()
            raise ValueError(f"y must contain only 0 and 1; offending rows {rows}")
        if np.linalg.matrix_rank(X) < p:
            raise ValueError("X is rank deficient: columns are linearly dependent")
        names = self.feature_names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != p:
                raise ValueError(f"expected {p} feature names, got {len(names)}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def labels(self):
        return self.feature_names or tuple(f"x{j + 1}" for j in range(self.p))


@dataclass(frozen=True)
class MleFit:
    """State of the IRLS fit at its final iterate.

    Attributes
    ----------
    beta_hat : array of shape (p,)
        Coefficient estimate.
    weights : array of shape (n,)
        Diagonal of W = diag[pi_i (1 - pi_i)] at beta_hat.
    C : array of shape (p, p)
        Weighted cross-product matrix X'WX at beta_hat.
    z_working : array of shape (n,)
        IRLS working response at beta_hat.
    probabilities : array of shape (n,)
        Fitted pi_i, clamped away from {0, 1} by PROBABILITY_CLAMP.
    iterations : int
        Number of IRLS updates performed.
    converged : bool
        Whether ||X'(y - pi)||_inf dropped below tol.
    score_norm : float
        Final value of ||X'(y - pi)||_inf.
    """

    beta_hat: np.ndarray
    weights: np.ndarray
    C: np.ndarray
    z_working: np.ndarray
    probabilities: np.ndarray
    iterations: int
    converged: bool
    score_norm: float

    @property
    def p(self):
        return self.beta_hat.shape[0]


def predict_probabilities(X, beta):
    """Success probabilities pi = expit(X beta), strictly inside (0, 1).

    Uses the numerically stable logistic from scipy and clips the
    saturated tails so log(pi) and log(1 - pi) remain finite for any
    finite linear predictor.
    """
    X = as_float_matrix(X, "X")
    beta = as_float_vector(beta, "beta")
    if X.shape[1] != beta.shape[0]:
        raise ValueError(
            f"X has {X.shape[1]} columns but beta has length {beta.shape[0]}"
        )
    return np.clip(expit(X @ beta), _PROB_LO, _PROB_HI)


def weighted_gram(X, weights):
    """X' diag(weights) X, symmetrized; the canonical builder for C."""
    G = (X * weights[:, None]).T @ X
    return 0.5 * (G + G.T)


def _clamped_probabilities(X, beta):
    return np.clip(expit(X @ beta), PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)


def fit_mle(data, tol=1e-8, max_iter=100, separation_cap=1e4):
    """Fit the logistic model by IRLS.

    Parameters
    ----------
    data : Dataset
    tol : float
        Convergence threshold on the score: stop once
        ||X'(y - pi)||_inf < tol.
    max_iter : int
        Maximum number of IRLS updates. Exhausting it is not an error;
        the last iterate is returned with ``converged=False``.
    separation_cap : float
        Euclidean norm bound on the iterate; exceeding it raises
        SeparationError since the MLE is diverging.

    Returns
    -------
    MleFit
        The final iterate with its weights, working response, and C.

    Raises
    ------
    SeparationError
        When the iterate's norm exceeds ``separation_cap``.
    NumericalError
        When X'WX becomes singular during the iteration.

    Notes
    -----
    Deterministic: identical inputs give bit-identical results. The
    start point is beta = 0 (all probabilities one half).
    """
    if not isinstance(data, Dataset):
        raise TypeError("data must be a Dataset")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    X, y = data.X, data.y
    beta = np.zeros(data.p)
    iterations = 0
    while True:
        pi = _clamped_probabilities(X, beta)
        score_norm = float(np.max(np.abs(X.T @ (y - pi))))
        if score_norm < tol:
            converged = True
            break
        if iterations >= max_iter:
            converged = False
            break
        w = pi * (1.0 - pi)
        z = np.log(pi) - np.log1p(-pi) + (y - pi) / w
        C = weighted_gram(X, w)
        beta = spd_solve(spd_factor(C, name="X'WX"), X.T @ (w * z))
        iterations += 1
        if float(np.linalg.norm(beta)) > separation_cap:
            raise SeparationError(
                f"coefficient norm exceeded {separation_cap:g} during IRLS; "
                "the responses appear (quasi-)separable"
            )
    w = pi * (1.0 - pi)
    z = np.log(pi) - np.log1p(-pi) + (y - pi) / w
    return MleFit(
        beta_hat=beta,
        weights=w,
        C=weighted_gram(X, w),
        z_working=z,
        probabilities=pi,
        iterations=iterations,
        converged=converged,
        score_norm=score_norm,
    )
