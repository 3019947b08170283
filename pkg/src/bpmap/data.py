"""Time-series data model and CSV ingestion/serialization.

A :class:`TimeSeries` is a named, uniformly sampled sequence of finite
reals, optionally partitioned into trials (segments). A :class:`Dataset`
is a collection of equal-length series sharing one trial layout. All
values are validated at construction and frozen afterwards, so instances
are safe to share across threads.

CSV files are comma-separated UTF-8 with a mandatory header row and `.`
as the decimal separator. An optional integer ``trial`` column assigns
each row to a segment. Missing or unparsable values are hard errors:
delay embedding is undefined across gaps, so nothing is imputed.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .errors import (
    AlignmentError,
    FormatError,
    ParseError,
    SchemaError,
    ValidationError,
)

__all__ = ["TimeSeries", "Dataset", "load_csv", "save_csv", "dataset_meta"]


class TimeSeries:
    """Named sequence of finite real observations.

    Parameters
    ----------
    name : str
        Identifier of the series.
    values : array-like of float
        Ordered observations; NaN and infinities are rejected.
    trial_ids : array-like of int, optional
        Segment membership per sample. Must match ``values`` in length
        and be non-decreasing.
    """

    __slots__ = ("name", "values", "trial_ids")

    def __init__(self, name, values, trial_ids=None):
        if not name:
            raise ValidationError("series name must be a non-empty string")
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1:
            raise ValidationError(f"series {name!r}: values must be 1-D")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValidationError(
                f"series {name!r}: non-finite value at sample {bad + 1}"
            )
        if trial_ids is not None:
            trial_ids = np.asarray(trial_ids, dtype=np.int64)
            if trial_ids.shape != values.shape:
                raise AlignmentError(
                    f"series {name!r}: trial_ids length {trial_ids.size} "
                    f"!= values length {values.size}"
                )
            if trial_ids.size > 1 and np.any(np.diff(trial_ids) < 0):
                raise ValidationError(
                    f"series {name!r}: trial_ids must be non-decreasing"
                )
            trial_ids.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "trial_ids", trial_ids)

    def __setattr__(self, key, value):
        raise AttributeError("TimeSeries is immutable")

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        same_trials = (
            (self.trial_ids is None and other.trial_ids is None)
            or (
                self.trial_ids is not None
                and other.trial_ids is not None
                and np.array_equal(self.trial_ids, other.trial_ids)
            )
        )
        return (
            self.name == other.name
            and np.array_equal(self.values, other.values)
            and same_trials
        )

    def at_times(self, times):
        """Values at 1-based time indices."""
        times = np.asarray(times, dtype=np.int64)
        if times.size and (times.min() < 1 or times.max() > len(self)):
            raise IndexError(
                f"series {self.name!r}: time index out of range 1..{len(self)}"
            )
        return self.values[times - 1]

    def __repr__(self):
        trials = "" if self.trial_ids is None else ", trials"
        return f"TimeSeries({self.name!r}, n={len(self)}{trials})"


class Dataset:
    """Equal-length collection of :class:`TimeSeries`, keyed by name."""

    __slots__ = ("series", "length")

    def __init__(self, series):
        series = list(series)
        if not series:
            raise ValidationError("Dataset requires at least one series")
        names = [s.name for s in series]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate series names: {names}")
        length = len(series[0])
        ref_trials = series[0].trial_ids
        for s in series[1:]:
            if len(s) != length:
                raise AlignmentError(
                    f"series {s.name!r} has length {len(s)}, "
                    f"expected {length} (from {series[0].name!r})"
                )
            if (s.trial_ids is None) != (ref_trials is None) or (
                ref_trials is not None
                and not np.array_equal(s.trial_ids, ref_trials)
            ):
                raise AlignmentError(
                    f"series {s.name!r} has trial_ids inconsistent with "
                    f"{series[0].name!r}"
                )
        object.__setattr__(self, "series", {s.name: s for s in series})
        object.__setattr__(self, "length", length)

    def __setattr__(self, key, value):
        raise AttributeError("Dataset is immutable")

    def __getitem__(self, name):
        try:
            return self.series[name]
        except KeyError:
            raise SchemaError(
                f"no series named {name!r}; available: {list(self.series)}"
            ) from None

    def __contains__(self, name):
        return name in self.series

    def __len__(self):
        return self.length

    def names(self):
        return list(self.series)

    @property
    def trial_ids(self):
        return next(iter(self.series.values())).trial_ids

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return list(self.series) == list(other.series) and all(
            self.series[k] == other.series[k] for k in self.series
        )


def _parse_cell(raw, row_idx, column, cast, kind):
    try:
        value = cast(raw)
    except (TypeError, ValueError):
        raise ParseError(
            f"row {row_idx}, column {column!r}: cannot parse {raw!r} as {kind}"
        ) from None
    if kind == "real" and not math.isfinite(value):
        raise ParseError(
            f"row {row_idx}, column {column!r}: non-finite value {raw!r}"
        )
    return value


def load_csv(path, schema=None, trial_column=None):
    """Read a Dataset from a headered CSV file.

    Parameters
    ----------
    path : path-like
        File to read.
    schema : dict, optional
        Maps series name -> column name. When omitted, every column
        except ``trial_column`` becomes a series under its own name.
    trial_column : str, optional
        Name of an integer column holding trial/segment ids.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        rows = list(reader)

    col_index = {name: i for i, name in enumerate(header)}
    if trial_column is not None and trial_column not in col_index:
        raise SchemaError(f"{path}: missing trial column {trial_column!r}")
    if schema is None:
        schema = {
            name: name for name in header if name != trial_column
        }
    for series_name, column in schema.items():
        if column not in col_index:
            raise SchemaError(f"{path}: missing column {column!r}")

    n_cols = len(header)
    for r, row in enumerate(rows, start=1):
        if len(row) != n_cols:
            raise FormatError(
                f"{path}: row {r} has {len(row)} fields, expected {n_cols}"
            )

    columns = {}
    for series_name, column in schema.items():
        j = col_index[column]
        columns[series_name] = [
            _parse_cell(row[j], r, column, float, "real")
            for r, row in enumerate(rows, start=1)
        ]
    trial_ids = None
    if trial_column is not None:
        j = col_index[trial_column]
        trial_ids = [
            _parse_cell(row[j], r, trial_column, int, "integer")
            for r, row in enumerate(rows, start=1)
        ]

    return Dataset(
        [TimeSeries(name, vals, trial_ids) for name, vals in columns.items()]
    )


def save_csv(dataset, path):
    """Write a Dataset as CSV with full round-trip float precision."""
    if not isinstance(dataset, Dataset) or not dataset.series:
        raise ValidationError("save_csv requires a non-empty Dataset")
    names = dataset.names()
    trials = dataset.trial_ids
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(names) + (["trial"] if trials is not None else [])
        writer.writerow(header)
        for i in range(dataset.length):
            row = [repr(float(dataset[name].values[i])) for name in names]
            if trials is not None:
                row.append(str(int(trials[i])))
            writer.writerow(row)


def dataset_meta(dataset):
    """JSON-ready metadata (names, length, trial count) for tooling."""
    trials = dataset.trial_ids
    return {
        "series": dataset.names(),
        "length": dataset.length,
        "n_trials": int(np.unique(trials).size) if trials is not None else None,
    }


def save_meta_json(dataset, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dataset_meta(dataset), fh, indent=2)
        fh.write("\n")
