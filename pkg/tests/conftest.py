"""Shared builders for randomized test instances.

Everything here is seeded by the caller; no test draws from global
numpy state.
"""

import numpy as np
from scipy.optimize import minimize

from liulogit.model import Dataset, MleFit, fit_mle, predict_probabilities
from liulogit.shrinkage import StochasticRestriction


def random_orthogonal(rng, p):
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    # fix the QR sign ambiguity so the factor is a proper draw
    return q * np.sign(np.diag(r))


def random_spd(rng, p, eig_low=1e-2, eig_high=1e2):
    """SPD matrix with eigenvalues log-uniform in [eig_low, eig_high]."""
    eigs = np.exp(rng.uniform(np.log(eig_low), np.log(eig_high), size=p))
    q = random_orthogonal(rng, p)
    m = (q * eigs) @ q.T
    return (m + m.T) / 2.0


def synthetic_fit(rng, p, eig_low=1e-2, eig_high=1e2):
    """A converged-fit stand-in with a controlled information matrix.

    The shrinkage and comparison algebra depends only on beta_hat, C and
    the converged flag, so the IRLS by-products are fillers of the right
    shape.
    """
    n = 3 * p
    return MleFit(
        beta_hat=rng.standard_normal(p),
        weights=np.full(n, 0.25),
        C=random_spd(rng, p, eig_low, eig_high),
        z_working=np.zeros(n),
        probabilities=np.full(n, 0.5),
        iterations=1,
        converged=True,
        score_norm=0.0,
    )


def random_restriction(rng, p, q=None):
    if q is None:
        q = int(rng.integers(1, p + 1))
    while True:
        H = rng.standard_normal((q, p))
        if np.linalg.matrix_rank(H) == q:
            break
    return StochasticRestriction(
        H=H,
        h=rng.standard_normal(q),
        psi=random_spd(rng, q, 0.2, 5.0),
    )


def brute_force_mle(data, extra_starts=()):
    """Reference maximizer: Nelder-Mead on the exact log-likelihood.

    Shares nothing with the IRLS path. The negative log-likelihood is
    written with logaddexp so it stays finite for any beta.
    """
    X, y = data.X, data.y

    def nll(beta):
        eta = X @ beta
        return float(np.logaddexp(0.0, eta).sum() - y @ eta)

    best = None
    for start in [np.zeros(data.p), *extra_starts]:
        out = minimize(
            nll,
            np.asarray(start, dtype=float),
            method="Nelder-Mead",
            options={
                "xatol": 1e-10,
                "fatol": 1e-13,
                "maxiter": 50_000,
                "maxfev": 50_000,
            },
        )
        if best is None or out.fun < best.fun:
            best = out
    return best.x


def bernoulli_dataset(rng, n, p, beta=None, scale=1.0):
    """Design and response drawn until the MLE converges cleanly."""
    if beta is None:
        beta = rng.standard_normal(p)
    for _ in range(200):
        X = scale * rng.standard_normal((n, p))
        y = (rng.random(n) < predict_probabilities(X, beta)).astype(float)
        if not (0 < y.sum() < n):
            continue
        data = Dataset(X, y)
        try:
            fit = fit_mle(data)
        except Exception:
            continue
        if fit.converged:
            return data, fit
    raise RuntimeError("no convergent dataset found; loosen the draw settings")
