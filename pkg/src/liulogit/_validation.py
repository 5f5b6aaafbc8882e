"""Input validation helpers for array-like arguments."""

import numpy as np


def as_float_matrix(value, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_float_vector(value, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_square(M, name):
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def check_symmetric(M, name, tol=1e-8):
    # relative asymmetry, guarded against an all-zero matrix
    scale = max(float(np.max(np.abs(M))), 1e-300)
    if float(np.max(np.abs(M - M.T))) > tol * scale:
        raise ValueError(f"{name} is not symmetric")
    return M
