"""File formats: CSV datasets, restriction spec files, JSON run
configurations, and plain-text table rendering."""

import csv
import hashlib
import json
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

import numpy as np

from .model import Dataset
from .shrinkage import StochasticRestriction


def load_csv(path, response_column):
    """Read a headered CSV into a Dataset.

    ``response_column`` names the response column or gives its 0-based
    index; every other column becomes a design column, in header order.
    All cells must be numeric and the response must be exactly 0 or 1;
    violations are reported with their 1-based file row numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"no such data file: {path}")
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        header = [name.strip() for name in header]
        if isinstance(response_column, int) or (
            isinstance(response_column, str) and response_column.lstrip("-").isdigit()
        ):
            index = int(response_column)
            if not 0 <= index < len(header):
                raise ValueError(
                    f"response column index {index} out of range for "
                    f"{len(header)} columns"
                )
        else:
            if response_column not in header:
                raise ValueError(
                    f"response column {response_column!r} not found in header "
                    f"{header}"
                )
            index = header.index(response_column)

        rows = []
        bad_rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                bad_rows.append(line_no)
                continue
            try:
                rows.append((line_no, [float(cell) for cell in row]))
            except ValueError:
                bad_rows.append(line_no)
    if bad_rows:
        raise ValueError(
            f"{path}: rows with non-numeric or malformed entries "
            f"(file rows {bad_rows[:10]})"
        )
    if not rows:
        raise ValueError(f"{path} has no data rows")

    for line_no, values in rows:
        if values[index] not in (0.0, 1.0):
            raise ValueError(
                f"{path}: response value {values[index]!r} in file row "
                f"{line_no} is not 0 or 1"
            )
    matrix = np.array([values for _, values in rows])
    y = matrix[:, index]
    X = np.delete(matrix, index, axis=1)
    names = tuple(name for i, name in enumerate(header) if i != index)
    return Dataset(X, y, feature_names=names)


@dataclass(frozen=True)
class RestrictionSpec:
    """A restriction file: declared coefficient count plus the parsed triple."""

    path: str
    p: int
    restriction: StochasticRestriction


def load_restrictions(path):
    """Parse a restriction spec file.

    Format: comment lines start with '#'; blank lines are ignored. The
    remaining lines are, in order, ``p <int>``, ``q <int>``, a literal
    ``H`` header followed by q whitespace-separated rows of p numbers, a
    literal ``h`` header followed by one row of q numbers, and a literal
    ``Psi`` header followed by q rows of q numbers.
    """
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"no such restriction file: {path}")
    lines = [
        line.strip()
        for line in path.read_text().splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]

    def fail(message):
        raise ValueError(f"{path}: {message}")

    cursor = 0

    def take():
        nonlocal cursor
        if cursor >= len(lines):
            fail("file ended early")
        line = lines[cursor]
        cursor += 1
        return line

    def take_scalar(keyword):
        parts = take().split()
        if len(parts) != 2 or parts[0] != keyword:
            fail(f"expected '{keyword} <int>', got {' '.join(parts)!r}")
        try:
            return int(parts[1])
        except ValueError:
            fail(f"{keyword} must be an integer, got {parts[1]!r}")

    def take_header(keyword):
        line = take()
        if line != keyword:
            fail(f"expected section header {keyword!r}, got {line!r}")

    def take_row(width, what):
        parts = take().split()
        if len(parts) != width:
            fail(f"{what} must have {width} entries, got {len(parts)}")
        try:
            return [float(v) for v in parts]
        except ValueError:
            fail(f"{what} contains a non-numeric entry")

    p = take_scalar("p")
    q = take_scalar("q")
    if p < 1 or q < 1:
        fail("p and q must be positive")
    take_header("H")
    H = np.array([take_row(p, f"row {i + 1} of H") for i in range(q)])
    take_header("h")
    h = np.array(take_row(q, "h"))
    take_header("Psi")
    psi = np.array([take_row(q, f"row {i + 1} of Psi") for i in range(q)])
    if cursor != len(lines):
        fail(f"unexpected trailing content: {lines[cursor]!r}")
    try:
        restriction = StochasticRestriction(H=H, h=h, psi=psi)
    except ValueError as exc:
        fail(str(exc))
    return RestrictionSpec(path=str(path), p=p, restriction=restriction)


def default_restrictions_path():
    """Path of the bundled restriction spec file."""
    return Path(str(files("liulogit.data").joinpath("default_restrictions.txt")))


def load_config(path):
    """Read a simulation configuration dictionary from JSON.

    Accepts either a bare configuration object or a run manifest (the
    manifest embeds the configuration under its ``config`` key), so a
    finished run's manifest can be replayed directly.
    """
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"no such configuration file: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path} must contain a JSON object")
    if "config" in data and "command" in data:
        data = data["config"]
    return data


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def wide_table_text(row_labels, col_labels, values, corner="", fmt="%.4f"):
    """Align a label column plus numeric columns into fixed-width text.

    Labels are left-justified, numbers right-justified.
    """
    body = [[fmt % v for v in row] for row in values]
    label_width = max(len(corner), *(len(str(label)) for label in row_labels))
    widths = []
    for j, label in enumerate(col_labels):
        widths.append(max(len(str(label)), *(len(row[j]) for row in body)))
    lines = [
        "  ".join(
            [corner.ljust(label_width)]
            + [str(label).rjust(w) for label, w in zip(col_labels, widths)]
        ).rstrip()
    ]
    for label, row in zip(row_labels, body):
        lines.append(
            "  ".join(
                [str(label).ljust(label_width)]
                + [cell.rjust(w) for cell, w in zip(row, widths)]
            ).rstrip()
        )
    return "\n".join(lines)
