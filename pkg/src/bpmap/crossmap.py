"""Nearest-neighbor search and simplex-projection cross mapping.

For a query point on a shadow manifold, the k = E+1 nearest library
points (Euclidean distance, query time excluded, ties broken by smaller
time index) are weighted by

    u_k = exp(-d_k / d_1),   w_k = u_k / sum(u)

and the cross-map estimate of a target series is sum_k w_k * target(t_k).
When the nearest distance is exactly zero, weight mass is spread
uniformly over the zero-distance entries (the limit of the formula).

Estimates are produced for every manifold point time; the library only
restricts which points may serve as neighbors. All operations are pure
functions of (manifold, target, library), so per-query work can run
concurrently and results are keyed by time, not completion order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InsufficientLibraryError, ValidationError

__all__ = [
    "NeighborSet",
    "LibrarySample",
    "CrossMapResult",
    "find_neighbors",
    "simplex_weights",
    "cross_map_estimate",
    "cross_map_series",
]


@dataclass(frozen=True)
class NeighborSet:
    """Neighbor time indices ordered by ascending distance."""

    times: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.int64)
        distances = np.asarray(self.distances, dtype=np.float64)
        if times.shape != distances.shape or times.ndim != 1:
            raise ValidationError("times and distances must be matching 1-D arrays")
        if distances.size > 1 and np.any(np.diff(distances) < 0):
            raise ValidationError("distances must be non-decreasing")
        times.flags.writeable = False
        distances.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "distances", distances)

    def __len__(self):
        return self.times.size


class LibrarySample:
    """Subset of manifold point times eligible as neighbors."""

    __slots__ = ("times",)

    def __init__(self, times):
        times = np.unique(np.asarray(times, dtype=np.int64))
        if times.size == 0:
            raise ValidationError("library must contain at least one time")
        times.flags.writeable = False
        object.__setattr__(self, "times", times)

    def __setattr__(self, key, value):
        raise AttributeError("LibrarySample is immutable")

    @property
    def size(self):
        return self.times.size

    def __len__(self):
        return self.times.size

    @classmethod
    def full(cls, manifold):
        return cls(manifold.times)

    @classmethod
    def draw(cls, manifold, size, rng):
        """Uniform sample of ``size`` point times without replacement."""
        n = len(manifold)
        if size > n:
            raise InsufficientLibraryError(
                f"requested library of {size} from a manifold of {n} points"
            )
        idx = rng.choice(n, size=size, replace=False)
        return cls(manifold.times[idx])


def _library_indices(manifold, library):
    idx = np.searchsorted(manifold.times, library.times)
    if np.any(idx >= len(manifold)) or np.any(
        manifold.times[np.minimum(idx, len(manifold) - 1)] != library.times
    ):
        missing = library.times[
            (idx >= len(manifold))
            | (manifold.times[np.minimum(idx, len(manifold) - 1)] != library.times)
        ]
        raise ValidationError(
            f"library times {missing[:5].tolist()} not present in manifold"
        )
    return idx


def find_neighbors(manifold, query_time, library, k, exclusion_radius=0):
    """k nearest library points to the query, self excluded.

    ``exclusion_radius`` widens the self-exclusion to all candidates
    within that many samples of the query time (Theiler window; 0 means
    only the query itself is excluded).
    """
    query = manifold.point_at(query_time)
    lib_idx = _library_indices(manifold, library)
    cand_times = manifold.times[lib_idx]
    mask = np.abs(cand_times - query_time) > exclusion_radius
    cand_times = cand_times[mask]
    if cand_times.size < k:
        raise InsufficientLibraryError(
            f"library holds {cand_times.size} candidates for query t={query_time}, "
            f"need k={k}"
        )
    cand_points = manifold.points[lib_idx[mask]]
    # same distance kernel as the vectorized path, so results are bitwise equal
    d = cdist(query[None, :], cand_points)[0]
    order = np.lexsort((cand_times, d))[:k]
    return NeighborSet(cand_times[order], d[order])


def simplex_weights(distances):
    """Exponential simplex weights for non-decreasing distances."""
    d = np.asarray(distances, dtype=np.float64)
    if d.size == 0:
        raise ValidationError("at least one distance is required")
    if np.any(d < 0):
        raise ValidationError("distances must be non-negative")
    if d.size > 1 and np.any(np.diff(d) < 0):
        raise ValidationError("distances must be non-decreasing")
    if d[0] == 0.0:
        w = (d == 0.0).astype(np.float64)
    else:
        with np.errstate(over="ignore"):  # huge d/d1 -> exp(-inf) = 0
            w = np.exp(-d / d[0])
    return w / w.sum()


def cross_map_estimate(manifold, target, query_time, library, k=None,
                       exclusion_radius=0):
    """Simplex estimate of ``target`` at one query time."""
    if k is None:
        k = manifold.E + 1
    nbrs = find_neighbors(manifold, query_time, library, k, exclusion_radius)
    w = simplex_weights(nbrs.distances)
    # elementwise product + sum, matching cross_map_series bitwise
    return float((w * target.at_times(nbrs.times)).sum())


@dataclass(frozen=True)
class CrossMapResult:
    """Aligned (time, estimate, actual[, control]) triples, ordered by t."""

    times: np.ndarray
    estimates: np.ndarray
    actuals: np.ndarray
    control: np.ndarray | None = None

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            header = ["t", "actual", "estimate"]
            if self.control is not None:
                header.append("control")
            writer.writerow(header)
            for i, t in enumerate(self.times):
                row = [int(t), repr(float(self.actuals[i])),
                       repr(float(self.estimates[i]))]
                if self.control is not None:
                    row.append(repr(float(self.control[i])))
                writer.writerow(row)


def _knn_rows(points, times, lib_points, lib_times, k, exclusion_radius):
    """Vectorized k-NN over all rows; exact (distance, time) ordering.

    Column order of the candidates is ascending time, so a stable sort on
    distance breaks exact ties by smaller time index, matching
    :func:`find_neighbors`.
    """
    d = cdist(points, lib_points)
    if exclusion_radius > 0:
        excluded = np.abs(times[:, None] - lib_times[None, :]) <= exclusion_radius
    else:
        excluded = times[:, None] == lib_times[None, :]
    d[excluded] = np.inf

    n_candidates = (~excluded).sum(axis=1)
    short = n_candidates < k
    if np.any(short):
        t_bad = int(times[np.flatnonzero(short)[0]])
        raise InsufficientLibraryError(
            f"library holds {int(n_candidates.min())} candidates for query "
            f"t={t_bad}, need k={k}"
        )

    sel = np.argpartition(d, k - 1, axis=1)[:, :k]
    sel.sort(axis=1)  # ascending column index == ascending time
    dsel = np.take_along_axis(d, sel, axis=1)
    order = np.argsort(dsel, axis=1, kind="stable")
    sel = np.take_along_axis(sel, order, axis=1)
    dsel = np.take_along_axis(dsel, order, axis=1)

    # argpartition picks an arbitrary subset among ties spanning the k-th
    # boundary; redo those rows with the exact lexicographic rule
    kth = dsel[:, -1]
    ambiguous = np.flatnonzero((d <= kth[:, None]).sum(axis=1) > k)
    for r in ambiguous:
        cols = np.flatnonzero(d[r] <= kth[r])
        order = np.lexsort((lib_times[cols], d[r, cols]))[:k]
        sel[r] = cols[order]
        dsel[r] = d[r, cols[order]]
    return sel, dsel


def _weights_rows(dsel):
    d1 = dsel[:, :1]
    degenerate = d1 == 0.0
    safe = np.where(degenerate, 1.0, d1)
    with np.errstate(over="ignore"):  # huge d/d1 -> exp(-inf) = 0
        w = np.where(
            degenerate, (dsel == 0.0).astype(np.float64), np.exp(-dsel / safe)
        )
    return w / w.sum(axis=1, keepdims=True)


def cross_map_series(manifold, target, library, control=None, k=None,
                     exclusion_radius=0):
    """Cross-map estimates at every manifold point time.

    ``target`` (and ``control``, when given) must cover all manifold
    times. Returns a :class:`CrossMapResult`; ``control`` values are
    sampled at the same times for downstream partial-correlation skill.
    """
    if k is None:
        k = manifold.E + 1
    lib_idx = _library_indices(manifold, library)
    sel, dsel = _knn_rows(
        manifold.points,
        manifold.times,
        manifold.points[lib_idx],
        manifold.times[lib_idx],
        k,
        exclusion_radius,
    )
    w = _weights_rows(dsel)
    nbr_times = manifold.times[lib_idx][sel]
    estimates = (w * target.at_times(nbr_times)).sum(axis=1)
    actuals = target.at_times(manifold.times)
    ctl = control.at_times(manifold.times) if control is not None else None
    return CrossMapResult(manifold.times, estimates, actuals, ctl)
