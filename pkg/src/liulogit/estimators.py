"""Scikit-learn style wrappers around the estimator family.

Each class fits the logistic maximum likelihood model by IRLS and then
derives its own coefficient vector, following the standard estimator
protocol (``fit``, ``predict``, ``predict_proba``, ``get_params``) so
the estimators compose with pipelines, cloning, and model selection.

Responses must be coded 0/1 and no intercept column is added; include a
constant column in X if one is wanted. A fitted instance exposes the
underlying IRLS state as ``mle_`` and exact moment summaries through
``report``.
"""

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_is_fitted

from ._validation import as_float_matrix, as_float_vector
from .model import Dataset, fit_mle, predict_probabilities
from .shrinkage import (
    StochasticRestriction,
    aulle_report,
    check_liu_d,
    lle_report,
    mle_report,
    sraulle_report,
    srmle_report,
)


class _IrlsClassifier(ClassifierMixin, BaseEstimator):
    """Shared IRLS fitting and prediction machinery."""

    def _check_params(self):
        pass

    def _coefficients(self):
        return self.mle_.beta_hat

    def fit(self, X, y):
        """Fit on a design matrix and 0/1 responses; returns self."""
        self._check_params()
        data = Dataset(X, y)
        fit = fit_mle(
            data,
            tol=self.tol,
            max_iter=self.max_iter,
            separation_cap=self.separation_cap,
        )
        if not fit.converged:
            warnings.warn(
                f"IRLS did not converge within {self.max_iter} iterations "
                f"(score norm {fit.score_norm:.3e})",
                ConvergenceWarning,
            )
        self.mle_ = fit
        self.n_features_in_ = data.p
        self.classes_ = np.array([0, 1])
        self.n_iter_ = fit.iterations
        self.coef_ = self._coefficients()
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = as_float_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} columns, expected {self.n_features_in_}"
            )
        return X @ self.coef_

    def predict_proba(self, X):
        check_is_fitted(self, "coef_")
        p1 = predict_probabilities(X, self.coef_)
        return np.column_stack((1.0 - p1, p1))

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(int)

    def _reference(self, beta_ref):
        if beta_ref is None:
            # plug-in reference: the fitted maximum likelihood estimate
            return self.mle_.beta_hat
        beta_ref = as_float_vector(beta_ref, "beta_ref")
        if beta_ref.shape[0] != self.n_features_in_:
            raise ValueError(
                f"beta_ref must have length {self.n_features_in_}"
            )
        return beta_ref


class LogisticMLE(_IrlsClassifier):
    """Maximum likelihood logistic regression via IRLS.

    Parameters
    ----------
    tol : float, convergence threshold on ||X'(y - pi)||_inf.
    max_iter : int, IRLS update budget.
    separation_cap : float, iterate norm at which separation is declared.

    Attributes
    ----------
    coef_ : fitted coefficients.
    mle_ : the underlying MleFit.
    n_iter_ : IRLS updates performed.
    """

    def __init__(self, tol=1e-8, max_iter=100, separation_cap=1e4):
        self.tol = tol
        self.max_iter = max_iter
        self.separation_cap = separation_cap

    def report(self, beta_ref=None):
        """Exact moment report; ``beta_ref`` is ignored (no bias)."""
        check_is_fitted(self, "mle_")
        return mle_report(self.mle_)


class LogisticLiu(_IrlsClassifier):
    """Liu-type shrinkage of the logistic MLE: coefficients Z_d b.

    ``d`` must lie strictly in (0, 1); smaller values shrink harder.
    """

    def __init__(self, d=0.5, tol=1e-8, max_iter=100, separation_cap=1e4):
        self.d = d
        self.tol = tol
        self.max_iter = max_iter
        self.separation_cap = separation_cap

    def _check_params(self):
        check_liu_d(self.d)

    def _coefficients(self):
        return lle_report(self.mle_, self.d, self.mle_.beta_hat).beta

    def report(self, beta_ref=None):
        """Exact moment report at ``beta_ref`` (plug-in MLE by default)."""
        check_is_fitted(self, "mle_")
        return lle_report(self.mle_, self.d, self._reference(beta_ref))


class AlmostUnbiasedLogisticLiu(_IrlsClassifier):
    """Bias-corrected Liu shrinkage of the logistic MLE: W_d b."""

    def __init__(self, d=0.5, tol=1e-8, max_iter=100, separation_cap=1e4):
        self.d = d
        self.tol = tol
        self.max_iter = max_iter
        self.separation_cap = separation_cap

    def _check_params(self):
        check_liu_d(self.d)

    def _coefficients(self):
        return aulle_report(self.mle_, self.d, self.mle_.beta_hat).beta

    def report(self, beta_ref=None):
        """Exact moment report at ``beta_ref`` (plug-in MLE by default)."""
        check_is_fitted(self, "mle_")
        return aulle_report(self.mle_, self.d, self._reference(beta_ref))


class StochasticRestrictedLogistic(_IrlsClassifier):
    """Logistic MLE blended with stochastic prior restrictions.

    ``restriction`` carries h = H beta + v with Cov(v) = Psi; the fit
    pulls the MLE toward the restriction in proportion to the two
    covariances.
    """

    def __init__(self, restriction, tol=1e-8, max_iter=100, separation_cap=1e4):
        self.restriction = restriction
        self.tol = tol
        self.max_iter = max_iter
        self.separation_cap = separation_cap

    def _check_params(self):
        if not isinstance(self.restriction, StochasticRestriction):
            raise TypeError("restriction must be a StochasticRestriction")

    def _coefficients(self):
        return srmle_report(self.mle_, self.restriction).beta

    def report(self, beta_ref=None):
        """Exact moment report; ``beta_ref`` is ignored (no bias)."""
        check_is_fitted(self, "mle_")
        return srmle_report(self.mle_, self.restriction)


class StochasticRestrictedAlmostUnbiasedLiu(_IrlsClassifier):
    """Bias-corrected Liu shrinkage applied to the restricted estimate."""

    def __init__(
        self, restriction, d=0.5, tol=1e-8, max_iter=100, separation_cap=1e4
    ):
        self.restriction = restriction
        self.d = d
        self.tol = tol
        self.max_iter = max_iter
        self.separation_cap = separation_cap

    def _check_params(self):
        if not isinstance(self.restriction, StochasticRestriction):
            raise TypeError("restriction must be a StochasticRestriction")
        check_liu_d(self.d)

    def _coefficients(self):
        return sraulle_report(
            self.mle_, self.restriction, self.d, self.mle_.beta_hat
        ).beta

    def report(self, beta_ref=None):
        """Exact moment report at ``beta_ref`` (plug-in MLE by default)."""
        check_is_fitted(self, "mle_")
        return sraulle_report(
            self.mle_, self.restriction, self.d, self._reference(beta_ref)
        )
