"""Bundled example data.

The packaged dataset is synthetic: 100 rows on 4 predictors generated
by this package's own collinear design generator at rho = 0.99 with
responses drawn at the canonical unit-norm coefficients, using the
documented seed below. It exists so the command-line workflow can be
exercised end to end without external data; it is not real
observational data.
"""

import io
from importlib.resources import files
from pathlib import Path

import numpy as np

from .dataio import load_csv
from .model import Dataset, predict_probabilities
from .simulation import canonical_beta, generate_design

FIXTURE_SEED = 20170103
FIXTURE_N = 100
FIXTURE_P = 4
FIXTURE_RHO = 0.99


def build_fixture():
    """Regenerate the bundled dataset from its seed.

    Draw order: the design matrix first (see generate_design), then the
    100 Bernoulli responses, all from one generator seeded with
    FIXTURE_SEED.
    """
    rng = np.random.default_rng(np.random.SeedSequence(FIXTURE_SEED))
    X = generate_design(FIXTURE_N, FIXTURE_P, FIXTURE_RHO, rng)
    beta = canonical_beta(FIXTURE_P)
    y = (rng.random(FIXTURE_N) < predict_probabilities(X, beta)).astype(float)
    names = tuple(f"x{j + 1}" for j in range(FIXTURE_P))
    return Dataset(X, y, feature_names=names)


def fixture_csv_text():
    """Full-precision CSV rendering of the regenerated dataset."""
    data = build_fixture()
    buffer = io.StringIO()
    buffer.write(",".join(data.labels() + ("y",)) + "\n")
    for row, y in zip(data.X, data.y):
        buffer.write(",".join(repr(float(v)) for v in row) + f",{int(y)}\n")
    return buffer.getvalue()


def fixture_path():
    """Path of the packaged CSV copy."""
    return Path(str(files("liulogit.data").joinpath("synthetic_collinear.csv")))


def load_fixture():
    """Load the packaged CSV copy as a Dataset."""
    return load_csv(fixture_path(), "y")
