"""Collinearity diagnostics for a dataset's design matrix.

Two summaries drive the workflow: the Pearson correlation matrix of the
design columns (pairs above a threshold get flagged), and the condition
number sqrt(lambda_max / lambda_min) of X'X. By default the columns are
scaled to unit Euclidean length first, the usual convention for
collinearity diagnostics and the one under which a perfectly orthogonal
design scores exactly 1; the raw, unscaled variant is available because
the two can differ by orders of magnitude when column scales differ.
"""

from dataclasses import dataclass

import numpy as np

from ._linalg import symmetrize
from .model import Dataset

FLAG_THRESHOLD = 0.9


@dataclass(frozen=True)
class DiagnosticsReport:
    """Correlation structure and conditioning of a design matrix.

    flags lists the column pairs whose absolute correlation exceeds the
    threshold, as (name_i, name_j, r) triples.
    """

    correlation_matrix: np.ndarray
    condition_number: float
    flags: tuple
    scaled: bool


def condition_number(X, scaled=True):
    """sqrt(lambda_max / lambda_min) of X'X, optionally unit-scaled.

    With ``scaled`` each column is first normalized to unit Euclidean
    length. Always at least 1 for a full-rank design.
    """
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("X contains an all-zero column")
    if scaled:
        X = X / norms
    eigs = np.linalg.eigvalsh(symmetrize(X.T @ X))
    smallest = max(float(eigs[0]), np.finfo(float).tiny)
    return float(np.sqrt(float(eigs[-1]) / smallest))


def diagnostics(data, scaled_condition=True, flag_threshold=FLAG_THRESHOLD):
    """Correlation matrix, condition number, and high-correlation flags.

    Raises ValueError when a column is constant (its Pearson
    correlations are undefined).
    """
    if not isinstance(data, Dataset):
        raise TypeError("data must be a Dataset")
    X = data.X
    labels = data.labels()
    stds = X.std(axis=0)
    constant = np.flatnonzero(stds == 0.0)
    if constant.size:
        raise ValueError(
            f"column {labels[constant[0]]!r} is constant; "
            "its correlations are undefined"
        )
    if data.p == 1:
        corr = np.array([[1.0]])
    else:
        corr = symmetrize(np.corrcoef(X, rowvar=False))
        np.fill_diagonal(corr, 1.0)
    flags = tuple(
        (labels[i], labels[j], float(corr[i, j]))
        for i in range(data.p)
        for j in range(i + 1, data.p)
        if abs(corr[i, j]) > flag_threshold
    )
    return DiagnosticsReport(
        correlation_matrix=corr,
        condition_number=condition_number(X, scaled=scaled_condition),
        flags=flags,
        scaled=scaled_condition,
    )
