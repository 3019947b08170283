"""Shadow-manifold construction from lagged coordinates.

``embed_univariate`` builds the classic delay embedding of one series:
point(t) = (x(t), x(t - tau), ..., x(t - (E-1)*tau)) for t from
1 + (E-1)*tau to L (time indices are 1-based throughout).

``embed_bivariate`` interleaves an observable with a drive/phase series:
point(t) = (x(t), theta(t), x(t - tau), theta(t - tau), ...), using E/2
lag pairs, so a total dimension E requires E to be even.

When ``respect_trials`` is set and the series carry trial ids, points
whose lag window would straddle a trial boundary are omitted, so every
embedded vector is sampled from a single trial.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .data import TimeSeries
from .errors import AlignmentError, ConfigError, InsufficientDataError, ValidationError

__all__ = [
    "EmbeddingConfig",
    "ShadowManifold",
    "DimensionBoundWarning",
    "embed_univariate",
    "embed_bivariate",
    "check_dimension_bound",
]


class DimensionBoundWarning(UserWarning):
    """Embedded dimension may be below the generic-embedding bound."""


@dataclass(frozen=True)
class EmbeddingConfig:
    """Embedding dimension E, lag tau (in samples), trial handling."""

    E: int = 2
    tau: int = 1
    respect_trials: bool = False

    def __post_init__(self):
        if self.E < 1:
            raise ConfigError(f"E must be >= 1, got {self.E}")
        if self.tau < 1:
            raise ConfigError(f"tau must be >= 1, got {self.tau}")


@dataclass(frozen=True)
class ShadowManifold:
    """Set of lagged-coordinate points with their source time indices.

    ``points`` has one row per embedded vector (dimension E); ``times``
    holds the matching 1-based source index t, strictly increasing.
    """

    points: np.ndarray
    times: np.ndarray
    E: int
    tau: int
    variables: tuple[str, ...]

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        times = np.asarray(self.times, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.E:
            raise ValidationError(
                f"points must be (n, {self.E}), got {points.shape}"
            )
        if times.shape != (points.shape[0],):
            raise ValidationError("times must match points row-for-row")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValidationError("times must be strictly increasing")
        points.flags.writeable = False
        times.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "variables", tuple(self.variables))

    def __len__(self):
        return self.times.size

    def point_at(self, time):
        """Embedded vector for a 1-based source time index."""
        idx = np.searchsorted(self.times, time)
        if idx >= self.times.size or self.times[idx] != time:
            raise KeyError(f"no manifold point at time {time}")
        return self.points[idx]

    def to_csv(self, path):
        """Debug dump: one row per point, time index then E coordinates."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"c{j}" for j in range(self.E)])
            for t, row in zip(self.times, self.points):
                writer.writerow([int(t)] + [repr(float(v)) for v in row])


def _trial_ok(trial_ids, t_idx0, span):
    # non-decreasing ids: window [t-span, t] sits in one trial iff endpoints match
    return trial_ids[t_idx0 - span] == trial_ids[t_idx0]


def embed_univariate(series, cfg):
    """Delay-embed one series into a ShadowManifold."""
    E, tau = cfg.E, cfg.tau
    L = len(series)
    min_len = 1 + (E - 1) * tau
    if L < min_len:
        raise InsufficientDataError(
            f"series {series.name!r} has {L} samples; embedding with "
            f"E={E}, tau={tau} needs at least {min_len}"
        )
    span = (E - 1) * tau
    v = series.values
    cols = [v[span - j * tau : L - j * tau] for j in range(E)]
    points = np.column_stack(cols)
    times = np.arange(min_len, L + 1, dtype=np.int64)
    if cfg.respect_trials and series.trial_ids is not None and span > 0:
        keep = np.array(
            [_trial_ok(series.trial_ids, t - 1, span) for t in times], dtype=bool
        )
        points, times = points[keep], times[keep]
    return ShadowManifold(points, times, E, tau, (series.name,))


def embed_bivariate(primary, control, cfg):
    """Interleave ``primary`` with ``control`` (e.g. theta) lag pairs.

    Coordinate order is (x(t), theta(t), x(t-tau), theta(t-tau), ...),
    one pair per lag, E/2 lags in total.
    """
    E, tau = cfg.E, cfg.tau
    if E % 2 != 0:
        raise ConfigError(f"E must be even for bivariate embedding, got {E}")
    if len(primary) != len(control):
        raise AlignmentError(
            f"series {primary.name!r} (n={len(primary)}) and {control.name!r} "
            f"(n={len(control)}) must have equal length"
        )
    n_lags = E // 2
    L = len(primary)
    min_len = 1 + (n_lags - 1) * tau
    if L < min_len:
        raise InsufficientDataError(
            f"series {primary.name!r} has {L} samples; bivariate embedding "
            f"with E={E}, tau={tau} needs at least {min_len}"
        )
    span = (n_lags - 1) * tau
    cols = []
    for j in range(n_lags):
        cols.append(primary.values[span - j * tau : L - j * tau])
        cols.append(control.values[span - j * tau : L - j * tau])
    points = np.column_stack(cols)
    times = np.arange(min_len, L + 1, dtype=np.int64)
    if cfg.respect_trials and primary.trial_ids is not None and span > 0:
        keep = np.array(
            [_trial_ok(primary.trial_ids, t - 1, span) for t in times], dtype=bool
        )
        points, times = points[keep], times[keep]
    return ShadowManifold(points, times, E, tau, (primary.name, control.name))


def check_dimension_bound(E_total, n_vars, m_hint=None):
    """Warn when the total embedded dimension may be too small.

    A delay map of n observables with d lags each is generically an
    embedding of an m-dimensional state space when n*d >= 2m + 1. The
    true m is unknowable for observed data, so this is a non-fatal
    advisory check: it warns only when ``m_hint`` is provided and the
    bound is violated. Returns True when the check passes.
    """
    if m_hint is None:
        return True
    if E_total < 2 * m_hint + 1:
        warnings.warn(
            f"total embedded dimension {E_total} (n_vars={n_vars}) is below "
            f"2*m+1 = {2 * m_hint + 1} for state dimension m={m_hint}; the "
            f"delay map may fail to be an embedding",
            DimensionBoundWarning,
            stacklevel=2,
        )
        return False
    return True
