"""CSV schemas shared with the solver package, plus typed readers.

The column tuples here mirror the writer's documented output exactly; the
test suite cross-checks them against the solver package when it is
installed, so a drift on either side fails loudly.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List

SWEEP_COLUMNS = ("param", "value", "mode", "n", "fraction", "ci_low", "ci_high", "seed")
LEARNING_COLUMNS = ("series", "run", "episode", "metric")

EQUAL = "equal"
RANGE = "range"


class PlotDataError(Exception):
    """Base for CSV ingestion failures."""


class NoData(PlotDataError):
    """The CSV has no data rows."""


class SchemaMismatch(PlotDataError):
    """Header does not match the expected columns; lists both sides."""

    def __init__(self, expected, actual):
        missing = [c for c in expected if c not in actual]
        extra = [c for c in actual if c not in expected]
        super().__init__(
            f"expected columns {list(expected)}, got {list(actual)}; "
            f"missing {missing}, unexpected {extra}"
        )
        self.expected = tuple(expected)
        self.actual = tuple(actual)


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    mode: str
    n: int
    fraction: float
    ci_low: float
    ci_high: float
    seed: int


@dataclass(frozen=True)
class LearningRow:
    series: str
    run: int
    episode: int
    metric: float


def _read_rows(path: str, expected):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = tuple(reader.fieldnames or ())
        if header != expected:
            if not header:
                raise NoData(f"no data in {path}")
            raise SchemaMismatch(expected, header)
        rows = list(reader)
    if not rows:
        raise NoData(f"no data rows in {path}")
    return rows


def read_sweep(path: str) -> List[SweepRow]:
    """Parse a sweep CSV; raises NoData / SchemaMismatch."""
    out = []
    for row in _read_rows(path, SWEEP_COLUMNS):
        out.append(SweepRow(
            param=row["param"],
            value=float(row["value"]),
            mode=row["mode"],
            n=int(row["n"]),
            fraction=float(row["fraction"]),
            ci_low=float(row["ci_low"]),
            ci_high=float(row["ci_high"]),
            seed=int(row["seed"]),
        ))
    return out


def read_learning(path: str) -> List[LearningRow]:
    """Parse a learning-curve CSV; raises NoData / SchemaMismatch."""
    out = []
    for row in _read_rows(path, LEARNING_COLUMNS):
        out.append(LearningRow(
            series=row["series"],
            run=int(row["run"]),
            episode=int(row["episode"]),
            metric=float(row["metric"]),
        ))
    return out
