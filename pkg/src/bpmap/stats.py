"""Pearson and partial correlation used as cross-map skill.

Plain cross mapping scores with the Pearson correlation between the
cross-mapped estimates and the actual values. Partial mapping scores
with the partial correlation given the drive variable theta, which
removes theta's linear contribution from both sides:

    r_ab|c = (r_ab - r_ac * r_bc) / sqrt((1 - r_ac^2) * (1 - r_bc^2))

A control may also be a matrix of columns (e.g. the lagged theta
coordinates of the bivariate manifold); columns are then absorbed one at
a time by recursing on the first-order formula. A column that is
numerically collinear with the already-absorbed controls carries no new
information and is skipped; a control collinear with either argument
raises, since the ratio would only amplify noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AlignmentError,
    CollinearityError,
    DegenerateControlError,
    DegenerateSeriesError,
)

__all__ = ["CorrelationResult", "pearson", "partial_corr", "skill"]

# 1 - r^2 below this is treated as exact collinearity
_COLLINEAR_TOL = 1e-12


@dataclass(frozen=True)
class CorrelationResult:
    value: float
    n: int

    def __float__(self):
        return self.value


def _as_vector(x, label):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise AlignmentError(f"{label} must be 1-D, got shape {x.shape}")
    return x


def _check_nonconstant(x, label, exc=DegenerateSeriesError):
    if np.ptp(x) == 0.0:
        raise exc(f"{label} is constant; correlation undefined")


def _pearson_value(a, b):
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da @ da) * (db @ db))
    return float((da @ db) / denom)


def pearson(a, b):
    """Product-moment correlation of two equal-length sequences."""
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.size != b.size:
        raise AlignmentError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise AlignmentError("pearson requires at least 2 samples")
    _check_nonconstant(a, "a")
    _check_nonconstant(b, "b")
    return CorrelationResult(_pearson_value(a, b), a.size)


def _controls_matrix(c):
    c = np.asarray(c, dtype=np.float64)
    if c.ndim == 1:
        c = c[:, None]
    if c.ndim != 2:
        raise AlignmentError(f"control must be 1-D or 2-D, got shape {c.shape}")
    return c


def partial_corr(a, b, c):
    """First-order partial correlation of ``a`` and ``b`` given ``c``.

    ``c`` may be a single control sequence or a matrix whose columns are
    controls (absorbed recursively). Requires at least 3 samples and
    non-constant inputs; the control must not be collinear with either
    argument.
    """
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    C = _controls_matrix(c)
    if not (a.size == b.size == C.shape[0]):
        raise AlignmentError(
            f"length mismatch: a={a.size}, b={b.size}, c={C.shape[0]}"
        )
    if a.size < 3:
        raise AlignmentError("partial correlation requires at least 3 samples")
    _check_nonconstant(a, "a")
    _check_nonconstant(b, "b")
    for j in range(C.shape[1]):
        _check_nonconstant(
            C[:, j],
            f"control column {j}" if C.shape[1] > 1 else "control",
            DegenerateControlError,
        )

    # correlation matrix over [a, b, c1..ck], controls absorbed in order
    variables = [a, b] + [C[:, j] for j in range(C.shape[1])]
    m = len(variables)
    R = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            R[i, j] = R[j, i] = _pearson_value(variables[i], variables[j])

    active = list(range(2, m))
    live = [0, 1] + active
    for ctrl in active:
        if ctrl not in live:
            continue
        for arg, label in ((0, "a"), (1, "b")):
            if 1.0 - R[arg, ctrl] ** 2 < _COLLINEAR_TOL:
                raise CollinearityError(
                    f"control is collinear with {label} (|r| ~ 1); "
                    f"partial correlation undefined"
                )
        live.remove(ctrl)
        drop = []
        for x in live:
            if x >= 2 and 1.0 - R[x, ctrl] ** 2 < _COLLINEAR_TOL:
                drop.append(x)  # redundant control: no new information
        live = [x for x in live if x not in drop]
        for u in live:
            for v in live:
                if u < v:
                    num = R[u, v] - R[u, ctrl] * R[v, ctrl]
                    den = np.sqrt(
                        (1.0 - R[u, ctrl] ** 2) * (1.0 - R[v, ctrl] ** 2)
                    )
                    R[u, v] = R[v, u] = num / den
    return CorrelationResult(float(R[0, 1]), a.size)


def skill(estimates, actuals, control=None):
    """Cross-map skill: Pearson without a control, partial with one."""
    if control is None:
        return pearson(estimates, actuals)
    return partial_corr(estimates, actuals, control)
