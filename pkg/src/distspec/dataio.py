"""Reading and writing data sets, power tables and power-curve data."""

from __future__ import annotations

import csv
import logging
import shlex
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DataError
from .model import DataSet
from .simulation import PowerTable

log = logging.getLogger(__name__)

PathLike = Union[str, Path]

AUTOMPG_COLUMNS = (
    "mpg", "cylinders", "displacement", "horsepower", "weight",
    "acceleration", "model_year", "origin", "car_name",
)
# predictor order used for the Auto MPG analysis
AUTOMPG_PREDICTORS = ("model_year", "acceleration", "weight", "horsepower", "displacement", "cylinders")
AUTOMPG_ORIGINS = {1: "america", 2: "europe", 3: "japan"}
_MISSING = {"", "?", "na", "nan", "null", "none"}


@dataclass(frozen=True)
class ColumnSchema:
    """Which columns to read and how.

    ``predictors=None`` selects every column except the response.
    ``categorical`` maps a column to its reference level; every other level
    becomes a 0/1 column named ``"<column>=<level>"``.
    """

    response: str
    predictors: Optional[tuple[str, ...]] = None
    categorical: Mapping[str, str] = field(default_factory=dict)
    na_policy: str = "drop_row"

    def __post_init__(self) -> None:
        if self.predictors is not None:
            object.__setattr__(self, "predictors", tuple(self.predictors))
            if self.response in self.predictors:
                raise DataError(f"response {self.response!r} is also listed as a predictor")
        if self.na_policy != "drop_row":
            raise DataError(f"unsupported na_policy {self.na_policy!r}")


def _split_whitespace(line: str) -> list[str]:
    return shlex.split(line, posix=True)


def read_table(path: PathLike) -> tuple[list[str], list[list[str]]]:
    """Read a delimited text file with a header row.

    The delimiter is a comma if the header contains one, whitespace otherwise.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    text = path.read_text().splitlines()
    lines = [ln for ln in text if ln.strip()]
    if not lines:
        raise DataError(f"{path} is empty")
    if "," in lines[0]:
        rows = list(csv.reader(lines))
    else:
        rows = [_split_whitespace(ln) for ln in lines]
    header = [h.strip() for h in rows[0]]
    return header, [[c.strip() for c in r] for r in rows[1:]]


def _parse(value: str) -> Optional[float]:
    if value.lower() in _MISSING:
        return None
    try:
        x = float(value)
    except ValueError:
        return None
    return x if np.isfinite(x) else None


def load_csv(path: PathLike, schema: ColumnSchema, return_dropped: bool = False):
    """Load the schema's columns from ``path`` into a :class:`DataSet`.

    Rows with a missing or unparseable value in any selected column are
    dropped; the count is logged and, with ``return_dropped=True``, returned
    alongside the data set.
    """
    header, rows = read_table(path)
    index = {name: k for k, name in enumerate(header)}
    predictors = schema.predictors
    if predictors is None:
        predictors = tuple(h for h in header if h != schema.response)
    needed = [schema.response, *predictors]
    missing = [c for c in needed if c not in index]
    missing += [c for c in schema.categorical if c not in index]
    if missing:
        raise DataError(f"column(s) not found in {path}: {', '.join(missing)}")

    levels: dict[str, list[str]] = defaultdict(list)
    kept: list[list] = []
    dropped = 0
    for row in rows:
        if len(row) != len(header):
            dropped += 1
            continue
        rec: list = []
        ok = True
        for c in needed:
            raw = row[index[c]]
            if c in schema.categorical:
                if raw.lower() in _MISSING:
                    ok = False
                    break
                rec.append(raw)
                continue
            x = _parse(raw)
            if x is None:
                ok = False
                break
            rec.append(x)
        if not ok:
            dropped += 1
            continue
        kept.append(rec)
        for k, c in enumerate(predictors):
            if c in schema.categorical and rec[k + 1] not in levels[c]:
                levels[c].append(rec[k + 1])

    if not kept:
        raise DataError(f"no complete rows left in {path} after dropping {dropped}")
    if dropped:
        log.info("dropped %d incomplete row(s) from %s", dropped, path)

    names: list[str] = []
    cols: list[np.ndarray] = []
    for k, c in enumerate(predictors):
        values = [rec[k + 1] for rec in kept]
        if c in schema.categorical:
            ref = schema.categorical[c]
            for lev in sorted(levels[c]):
                if lev != ref:
                    names.append(f"{c}={lev}")
                    cols.append(np.array([v == lev for v in values], dtype=np.float64))
        else:
            names.append(c)
            cols.append(np.array(values, dtype=np.float64))
    y = np.array([rec[0] for rec in kept], dtype=np.float64)
    data = DataSet(np.column_stack(cols), y, tuple(names), schema.response)
    return (data, dropped) if return_dropped else data


def standardize(
    data: DataSet, columns: Optional[Sequence[int]] = None, response: bool = False
) -> DataSet:
    """Center and scale predictor columns by their mean and unbiased standard deviation.

    ``columns`` restricts the transform to the given column indices.
    """
    X = data.X.copy()
    cols = range(data.p) if columns is None else columns
    for k in cols:
        sd = X[:, k].std(ddof=1)
        if not sd > 0:
            name = data.names[k] if data.names else str(k)
            raise DataError(f"column {name!r} has zero variance")
        X[:, k] = (X[:, k] - X[:, k].mean()) / sd
    y = data.y
    if response:
        y = (y - y.mean()) / y.std(ddof=1)
    return DataSet(X, y, data.names, data.response)


def write_dataset_csv(data: DataSet, path: PathLike) -> None:
    names = data.names or tuple(f"x{k + 1}" for k in range(data.p))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([data.response or "y", *names])
        for yi, row in zip(data.y, data.X):
            w.writerow([repr(float(yi)), *(repr(float(v)) for v in row)])


def read_autompg(path: PathLike) -> list[dict[str, str]]:
    """Read Auto MPG records as raw strings.

    Accepts the UCI ``auto-mpg.data`` file (whitespace separated, no header,
    quoted car names) or any delimited file with a header naming the columns.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise DataError(f"{path} is empty")
    first = _split_whitespace(lines[0]) if "," not in lines[0] else next(csv.reader([lines[0]]))
    if _parse(first[0]) is not None:
        out = []
        for ln in lines:
            parts = _split_whitespace(ln)
            if len(parts) < 8:
                raise DataError(f"malformed Auto MPG line: {ln!r}")
            out.append(dict(zip(AUTOMPG_COLUMNS, parts)))
        return out
    header, rows = read_table(path)
    header = [h.lower().replace(" ", "_").replace("-", "_") for h in header]
    header = ["model_year" if h in ("year", "model_year", "modelyear") else h for h in header]
    return [dict(zip(header, r)) for r in rows]


def encode_autompg(
    rows: Sequence[Mapping[str, str]],
    standardize_dummies: bool = False,
    return_dropped: bool = False,
):
    """Build the Auto MPG design: six standardized attributes plus America/Europe dummies.

    Japan is the reference origin. Rows with a missing attribute (the UCI file
    marks unknown horsepower with ``?``) are dropped.
    """
    X_rows, y = [], []
    dropped = 0
    for row in rows:
        try:
            origin = int(float(row["origin"]))
        except (KeyError, ValueError) as exc:
            raise DataError(f"bad origin in row {dict(row)}") from exc
        if origin not in AUTOMPG_ORIGINS:
            raise DataError(f"unknown origin code {origin}")
        vals = [_parse(row.get(c, "")) for c in ("mpg", *AUTOMPG_PREDICTORS)]
        if any(v is None for v in vals):
            dropped += 1
            continue
        y.append(vals[0])
        X_rows.append([*vals[1:], float(origin == 1), float(origin == 2)])
    if not X_rows:
        raise DataError("no complete Auto MPG rows")
    names = (*AUTOMPG_PREDICTORS, "origin_america", "origin_europe")
    data = DataSet(np.array(X_rows), np.array(y), names, "mpg")
    data = standardize(data, None if standardize_dummies else range(6))
    return (data, dropped) if return_dropped else data


def write_power_csv(table: PowerTable, path: PathLike) -> None:
    Path(path).write_text(table.to_csv())


def write_power_curves(table: PowerTable, directory: PathLike, stem: str = "curve") -> list[Path]:
    """One ``a,rate`` CSV per (statistic, scenario, cov, p, n) group."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    groups: dict[tuple, list] = defaultdict(list)
    for r in table.rows:
        groups[(r.stat, r.scenario, r.cov, r.p, r.n)].append((r.a, r.rate))
    paths = []
    for (stat, sc, cov, p, n), pts in groups.items():
        tag = cov.replace(":", "")
        path = directory / f"{stem}_{stat}_s{sc}_{tag}_p{p}_n{n}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "rate"])
            for a, rate in sorted(pts):
                w.writerow([repr(a), repr(rate)])
        paths.append(path)
    return paths
