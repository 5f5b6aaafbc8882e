"""Monte Carlo harness comparing the five estimators on collinear designs.

Protocol for each (n, rho) cell:

* draw one design matrix X with x_ij = sqrt(1 - rho^2) z_ij + rho z_i,p+1
  (all z independent standard normals), giving unit-variance columns
  with population pairwise correlation rho^2; the design is held fixed
  across replications unless ``redraw_design`` is set;
* per replication, draw y_i ~ Bernoulli(pi_i) at the true coefficients,
  draw the restriction disturbance v ~ N(0, Psi) and set
  h = H beta_true + v, fit the MLE, and record the squared error
  ||estimate - beta_true||^2 of every estimator at every d in the grid;
* the cell value is the average squared error over successful
  replications, alongside a Monte Carlo standard error and the count of
  excluded replications (non-converged or separated fits). A cell with
  more than half of its replications excluded is marked invalid.

Every replication derives its own generator from the master seed and
the (n, rho, replication) triple, so results do not depend on
scheduling or on the number of worker threads.
"""

import csv
import io
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._linalg import spd_factor, spd_solve, symmetrize
from ._validation import as_float_vector
from .dataio import wide_table_text
from .exceptions import NumericalError, SeparationError
from .model import Dataset, fit_mle, predict_probabilities
from .shrinkage import (
    ESTIMATOR_NAMES,
    StochasticRestriction,
    check_liu_d,
    shifted_inverse,
)

DEFAULT_N_VALUES = (25, 50, 75, 100)
DEFAULT_RHO_VALUES = (0.7, 0.8, 0.9, 0.99)
DEFAULT_D_GRID = (0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
DEFAULT_MASTER_SEED = 20170101

# spawn-key domains separating the design stream from replication streams
_DESIGN_DOMAIN = 0
_REPLICATION_DOMAIN = 1


def default_restriction():
    """The bundled three-restriction set on four coefficients."""
    return StochasticRestriction(
        H=np.array(
            [
                [1.0, -1.0, 0.0, 1.0],
                [1.0, 1.0, -1.0, 0.0],
                [0.0, 0.0, 1.0, -1.0],
            ]
        ),
        h=np.array([1.0, -2.0, 1.0]),
        psi=np.eye(3),
    )


def canonical_beta(p):
    """Unit-norm coefficient vector with equal entries 1/sqrt(p)."""
    if p < 1:
        raise ValueError("p must be at least 1")
    return np.full(p, 1.0 / np.sqrt(p))


@dataclass(frozen=True)
class SimulationConfig:
    """Full description of a simulation run.

    ``beta_true`` and ``restriction`` default to the canonical unit-norm
    vector and the bundled restriction set; a non-default ``p`` requires
    an explicit restriction. ``redraw_design`` draws a fresh design per
    replication instead of one per cell. ``fixed_h`` freezes the
    restriction disturbance at a single draw per cell instead of
    redrawing it each replication.
    """

    n_values: tuple = DEFAULT_N_VALUES
    rho_values: tuple = DEFAULT_RHO_VALUES
    d_grid: tuple = DEFAULT_D_GRID
    p: int = 4
    replications: int = 1000
    master_seed: int = DEFAULT_MASTER_SEED
    redraw_design: bool = False
    fixed_h: bool = False
    beta_true: np.ndarray | None = None
    restriction: StochasticRestriction | None = None
    tol: float = 1e-8
    max_iter: int = 100
    separation_cap: float = 1e4

    def __post_init__(self):
        n_values = tuple(int(n) for n in self.n_values)
        rho_values = tuple(float(r) for r in self.rho_values)
        d_grid = tuple(check_liu_d(d) for d in self.d_grid)
        if not n_values or not rho_values or not d_grid:
            raise ValueError("n_values, rho_values and d_grid must be non-empty")
        p = int(self.p)
        if p < 1:
            raise ValueError("p must be at least 1")
        for n in n_values:
            if n <= p:
                raise ValueError(f"every n must exceed p={p}, got n={n}")
        for rho in rho_values:
            if not 0.0 <= rho < 1.0:
                raise ValueError(f"rho must lie in [0, 1), got {rho}")
        if int(self.replications) < 1:
            raise ValueError("replications must be at least 1")
        if int(self.master_seed) < 0:
            raise ValueError("master_seed must be non-negative")
        beta_true = self.beta_true
        if beta_true is None:
            beta_true = canonical_beta(p)
        else:
            beta_true = as_float_vector(beta_true, "beta_true")
            if beta_true.shape[0] != p:
                raise ValueError(
                    f"beta_true must have length {p}, got {beta_true.shape[0]}"
                )
        restriction = self.restriction
        if restriction is None:
            if p != 4:
                raise ValueError(
                    "the bundled default restriction is on 4 coefficients; "
                    f"supply an explicit restriction for p={p}"
                )
            restriction = default_restriction()
        elif restriction.p != p:
            raise ValueError(
                f"restriction is on {restriction.p} coefficients but p={p}"
            )
        object.__setattr__(self, "n_values", n_values)
        object.__setattr__(self, "rho_values", rho_values)
        object.__setattr__(self, "d_grid", d_grid)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "redraw_design", bool(self.redraw_design))
        object.__setattr__(self, "fixed_h", bool(self.fixed_h))
        object.__setattr__(self, "beta_true", beta_true)
        object.__setattr__(self, "restriction", restriction)

    def to_dict(self):
        """JSON-ready dictionary capturing every reproducibility input."""
        return {
            "n_values": list(self.n_values),
            "rho_values": list(self.rho_values),
            "d_grid": list(self.d_grid),
            "p": self.p,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "redraw_design": self.redraw_design,
            "fixed_h": self.fixed_h,
            "beta_true": self.beta_true.tolist(),
            "restriction": {
                "H": self.restriction.H.tolist(),
                "h": self.restriction.h.tolist(),
                "psi": self.restriction.psi.tolist(),
            },
            "tol": self.tol,
            "max_iter": self.max_iter,
            "separation_cap": self.separation_cap,
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        restriction = data.get("restriction")
        if restriction is not None and not isinstance(
            restriction, StochasticRestriction
        ):
            restriction = StochasticRestriction(
                H=np.asarray(restriction["H"], dtype=float),
                h=np.asarray(restriction["h"], dtype=float),
                psi=np.asarray(restriction["psi"], dtype=float),
            )
        known = {
            "n_values",
            "rho_values",
            "d_grid",
            "p",
            "replications",
            "master_seed",
            "redraw_design",
            "fixed_h",
            "beta_true",
            "tol",
            "max_iter",
            "separation_cap",
        }
        unknown = set(data) - known - {"restriction"}
        if unknown:
            raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
        kwargs = {key: data[key] for key in known if key in data}
        return cls(restriction=restriction, **kwargs)


@dataclass(frozen=True)
class SimulationCell:
    """One (estimator, n, rho, d) cell of the results table."""

    smse: float
    mc_standard_error: float
    failed_replications: int
    valid: bool


@dataclass(frozen=True)
class SimulationResult:
    """All cells of a run, keyed by (estimator, n, rho, d)."""

    config: SimulationConfig
    cells: dict = field(repr=False)

    def cell(self, estimator, n, rho, d):
        return self.cells[(estimator, n, rho, d)]

    def smse(self, estimator, n, rho, d):
        return self.cells[(estimator, n, rho, d)].smse

    def iter_rows(self):
        """Yield (estimator, n, rho, d, cell) in canonical table order."""
        for n in self.config.n_values:
            for rho in self.config.rho_values:
                for name in ESTIMATOR_NAMES:
                    for d in self.config.d_grid:
                        yield name, n, rho, d, self.cells[(name, n, rho, d)]


def _stream(master_seed, *key):
    """Independent generator for one point of the (domain, n, rho, rep) grid."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=tuple(key))
    )


def _rho_key(rho):
    return int(round(rho * 1_000_000))


def generate_design(n, p, rho, rng):
    """Collinear design: a shared latent normal mixed into every column.

    Consumes exactly n * (p + 1) standard normal draws, row-major (for
    each row, the p idiosyncratic draws and then the shared one). The
    columns have unit population variance and pairwise correlation
    rho squared.
    """
    if n < 1 or p < 1:
        raise ValueError("n and p must be at least 1")
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    Z = rng.standard_normal((n, p + 1))
    return np.sqrt(1.0 - rho**2) * Z[:, :p] + rho * Z[:, p:]


def simulate_replication(
    X,
    beta_true,
    restriction,
    d_grid,
    rng,
    fixed_upsilon=None,
    tol=1e-8,
    max_iter=100,
    separation_cap=1e4,
):
    """One replication's squared errors, or None when the fit fails.

    Draw order from ``rng``: the n Bernoulli responses, then (unless
    ``fixed_upsilon`` is supplied) the q restriction disturbances.
    Returns a dict mapping estimator name to an array of squared errors
    over ``d_grid``; the MLE and SRMLE entries are constant in d.
    """
    pi = predict_probabilities(X, beta_true)
    y = (rng.random(pi.shape[0]) < pi).astype(float)
    if fixed_upsilon is None:
        upsilon = restriction.psi_cholesky() @ rng.standard_normal(restriction.q)
    else:
        upsilon = fixed_upsilon
    h = restriction.H @ beta_true + upsilon

    try:
        fit = fit_mle(
            Dataset(X, y), tol=tol, max_iter=max_iter, separation_cap=separation_cap
        )
    except (SeparationError, NumericalError):
        return None
    if not fit.converged:
        return None
    try:
        A_inv = shifted_inverse(fit.C)
        c_factor = spd_factor(fit.C, name="C")
        G = spd_solve(c_factor, restriction.H.T)
        S = symmetrize(restriction.psi + restriction.H @ G)
        s_factor = spd_factor(S, name="Psi + H C^{-1} H'")
    except NumericalError:
        return None
    beta_sr = fit.beta_hat + G @ spd_solve(
        s_factor, h - restriction.H @ fit.beta_hat
    )

    # per-d work reduces to scalar rescalings of three fixed vectors
    A2 = A_inv @ A_inv
    v_liu = A_inv @ fit.beta_hat
    v_au = A2 @ fit.beta_hat
    v_sr_au = A2 @ beta_sr

    def squared_error(estimate):
        delta = estimate - beta_true
        return float(delta @ delta)

    k = len(d_grid)
    lle = np.empty(k)
    aulle = np.empty(k)
    sraulle = np.empty(k)
    for i, d in enumerate(d_grid):
        shrink = 1.0 - d
        lle[i] = squared_error(fit.beta_hat - shrink * v_liu)
        aulle[i] = squared_error(fit.beta_hat - shrink**2 * v_au)
        sraulle[i] = squared_error(beta_sr - shrink**2 * v_sr_au)
    return {
        "MLE": np.full(k, squared_error(fit.beta_hat)),
        "LLE": lle,
        "AULLE": aulle,
        "SRMLE": np.full(k, squared_error(beta_sr)),
        "SRAULLE": sraulle,
    }


def _run_cell(config, n, rho):
    """All replications of one (n, rho) cell, sequentially."""
    design_rng = _stream(config.master_seed, _DESIGN_DOMAIN, n, _rho_key(rho))
    X = None
    if not config.redraw_design:
        X = generate_design(n, config.p, rho, design_rng)
    fixed_upsilon = None
    if config.fixed_h:
        fixed_upsilon = config.restriction.psi_cholesky() @ design_rng.standard_normal(
            config.restriction.q
        )

    collected = {name: [] for name in ESTIMATOR_NAMES}
    failed = 0
    for rep in range(config.replications):
        rng = _stream(
            config.master_seed, _REPLICATION_DOMAIN, n, _rho_key(rho), rep
        )
        X_rep = (
            generate_design(n, config.p, rho, rng) if config.redraw_design else X
        )
        outcome = simulate_replication(
            X_rep,
            config.beta_true,
            config.restriction,
            config.d_grid,
            rng,
            fixed_upsilon=fixed_upsilon,
            tol=config.tol,
            max_iter=config.max_iter,
            separation_cap=config.separation_cap,
        )
        if outcome is None:
            failed += 1
            continue
        for name in ESTIMATOR_NAMES:
            collected[name].append(outcome[name])

    successes = config.replications - failed
    valid = successes > 0 and 2 * failed <= config.replications
    cells = {}
    for name in ESTIMATOR_NAMES:
        if successes > 0:
            errors = np.vstack(collected[name])
            means = errors.mean(axis=0)
            if successes > 1:
                ses = errors.std(axis=0, ddof=1) / np.sqrt(successes)
            else:
                ses = np.zeros(len(config.d_grid))
        else:
            means = np.full(len(config.d_grid), np.nan)
            ses = np.full(len(config.d_grid), np.nan)
        for i, d in enumerate(config.d_grid):
            cells[(name, n, rho, d)] = SimulationCell(
                smse=float(means[i]),
                mc_standard_error=float(ses[i]),
                failed_replications=failed,
                valid=valid,
            )
    return cells


def run_monte_carlo(config, n_jobs=1):
    """Run the full (n, rho) grid of the configuration.

    ``n_jobs`` threads evaluate cells concurrently. Each cell's
    arithmetic is self-contained and stream-seeded, so the result is
    identical for every worker count; cells are merged in grid order.
    """
    if not isinstance(config, SimulationConfig):
        raise TypeError("config must be a SimulationConfig")
    if n_jobs < 1:
        raise ValueError("n_jobs must be at least 1")
    tasks = [(n, rho) for n in config.n_values for rho in config.rho_values]
    if n_jobs == 1:
        partials = [_run_cell(config, n, rho) for n, rho in tasks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            partials = list(
                pool.map(lambda task: _run_cell(config, *task), tasks)
            )
    cells = {}
    for partial in partials:
        cells.update(partial)
    return SimulationResult(config=config, cells=cells)


RenderedTable = namedtuple("RenderedTable", ["text", "csv"])


def _format_d(d):
    return f"{d:g}"


def emit_table(result, n):
    """Render one sample size as rho-blocks of estimator rows by d columns.

    Returns a RenderedTable with aligned plain text and CSV renderings,
    both printed at four decimals; parse_table_csv reads the CSV back.
    """
    config = result.config
    if n not in config.n_values:
        raise ValueError(f"no results for n = {n}")
    d_labels = [f"d={_format_d(d)}" for d in config.d_grid]

    blocks = [
        f"Average squared error by estimator and d "
        f"(n = {n}, replications = {config.replications}, "
        f"seed = {config.master_seed})"
    ]
    for rho in config.rho_values:
        values = [
            [result.smse(name, n, rho, d) for d in config.d_grid]
            for name in ESTIMATOR_NAMES
        ]
        failed = result.cell("MLE", n, rho, config.d_grid[0]).failed_replications
        header = f"rho = {rho:.2f}"
        if failed:
            header += f"  [excluded replications: {failed}]"
        if not result.cell("MLE", n, rho, config.d_grid[0]).valid:
            header += "  [INVALID: more than half of the replications failed]"
        blocks.append(
            header
            + "\n"
            + wide_table_text(ESTIMATOR_NAMES, d_labels, values, corner="estimator")
        )
    text = "\n\n".join(blocks) + "\n"

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["rho", "estimator"] + [repr(float(d)) for d in config.d_grid])
    for rho in config.rho_values:
        for name in ESTIMATOR_NAMES:
            writer.writerow(
                [repr(float(rho)), name]
                + [f"{result.smse(name, n, rho, d):.4f}" for d in config.d_grid]
            )
    return RenderedTable(text=text, csv=buffer.getvalue())


def parse_table_csv(text):
    """Parse emit_table's CSV back into (d_grid, {(rho, estimator): values})."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[:2] != ["rho", "estimator"]:
        raise ValueError("not a table CSV: bad header")
    d_grid = [float(s) for s in header[2:]]
    table = {}
    for row in reader:
        if not row:
            continue
        table[(float(row[0]), row[1])] = [float(v) for v in row[2:]]
    return d_grid, table
