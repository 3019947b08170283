"""End-to-end causality detection pipelines.

Testing the direction "cause -> effect" embeds the EFFECT series (plus
theta for the bivariate method) and cross-maps the CAUSE: if the cause
acts on the effect, the effect's reconstructed states determine the
cause's values, so the cross-map skill converges upward as the neighbor
library grows.

For each library size L in a grid, ``replicates`` libraries are drawn
uniformly without replacement (seeded deterministically by
(seed, L, replicate), so both directions of a pair see identical draws)
and the per-replicate skills are aggregated into a mean/std convergence
curve. A direction is judged "converged" when the final mean skill
clears a threshold, the tail of the curve is flat, and the overall trend
is not decreasing.

The plain method (``ccm``) scores with Pearson correlation; the partial
method (``bpm``) embeds the effect interleaved with theta and scores
with the partial correlation given theta. By default the conditioning
uses the same lagged theta coordinates that enter the manifold, which
removes every theta-determined component even when theta cycles through
a short periodic orbit; ``theta_conditioning="scalar"`` restricts the
control to the contemporaneous theta value only.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .crossmap import LibrarySample, cross_map_series
from .embedding import EmbeddingConfig, check_dimension_bound, embed_bivariate, embed_univariate
from .errors import ConfigError
from .stats import skill

__all__ = [
    "ConvergenceThresholds",
    "DetectionConfig",
    "ConvergenceCurve",
    "CausalityVerdict",
    "PairwiseResult",
    "default_L_grid",
    "library_rng",
    "run_direction",
    "assess",
    "run_pairwise",
    "curves_to_csv",
    "sweep_to_csv",
    "verdicts_to_json",
]

DEFAULT_E = {"ccm": 2, "bpm": 6}


@dataclass(frozen=True)
class ConvergenceThresholds:
    """Decision rule for :func:`assess` (skill floor, flatness, trend)."""

    min_final_skill: float = 0.5
    max_slope: float = 5e-5  # per unit library length
    window: int = 3

    def __post_init__(self):
        if self.window < 2:
            raise ConfigError(f"window must be >= 2, got {self.window}")
        if self.max_slope < 0:
            raise ConfigError("max_slope must be non-negative")


@dataclass(frozen=True)
class DetectionConfig:
    method: str = "ccm"
    E: int | None = None  # None -> per-method default
    tau: int = 1
    L_grid: tuple[int, ...] | None = None  # None -> log-spaced default
    replicates: int = 16
    seed: int = 0
    exclusion_radius: int = 0
    respect_trials: bool = False
    theta_conditioning: str = "lags"  # "lags" | "scalar"
    m_hint: int | None = None
    jobs: int = 1
    convergence: ConvergenceThresholds = field(default_factory=ConvergenceThresholds)

    def __post_init__(self):
        if self.method not in ("ccm", "bpm"):
            raise ConfigError(f"method must be 'ccm' or 'bpm', got {self.method!r}")
        if self.E is not None and self.E < 1:
            raise ConfigError(f"E must be >= 1, got {self.E}")
        if self.tau < 1:
            raise ConfigError(f"tau must be >= 1, got {self.tau}")
        if self.L_grid is not None:
            grid = tuple(int(v) for v in self.L_grid)
            if not grid or grid[0] < 1:
                raise ConfigError("L_grid must hold positive integers")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"L_grid must be strictly increasing: {grid}")
            object.__setattr__(self, "L_grid", grid)
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.theta_conditioning not in ("lags", "scalar"):
            raise ConfigError(
                f"theta_conditioning must be 'lags' or 'scalar', "
                f"got {self.theta_conditioning!r}"
            )
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")

    @property
    def resolved_E(self):
        return self.E if self.E is not None else DEFAULT_E[self.method]


@dataclass(frozen=True)
class ConvergenceCurve:
    """Cross-map skill as a function of library length L."""

    method: str
    cause: str
    effect: str
    L_values: np.ndarray
    mean_skill: np.ndarray
    std_skill: np.ndarray
    replicates: int
    skills: np.ndarray  # (len(L_values), replicates)

    def __post_init__(self):
        L = np.asarray(self.L_values, dtype=np.int64)
        mean = np.asarray(self.mean_skill, dtype=np.float64)
        std = np.asarray(self.std_skill, dtype=np.float64)
        skills = np.asarray(self.skills, dtype=np.float64)
        if not (L.shape == mean.shape == std.shape) or L.ndim != 1:
            raise ConfigError("L_values, mean_skill, std_skill must align")
        if np.any(std < 0):
            raise ConfigError("std_skill must be non-negative")
        if skills.shape != (L.size, self.replicates):
            raise ConfigError("skills must be (len(L_grid), replicates)")
        for name, arr in (("L_values", L), ("mean_skill", mean),
                          ("std_skill", std), ("skills", skills)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def final_skill(self):
        return float(self.mean_skill[-1])


@dataclass(frozen=True)
class CausalityVerdict:
    method: str
    cause: str
    effect: str
    converged: bool
    final_skill: float
    curve: ConvergenceCurve
    thresholds: ConvergenceThresholds


@dataclass(frozen=True)
class PairwiseResult:
    curves: tuple[ConvergenceCurve, ConvergenceCurve]
    verdicts: tuple[CausalityVerdict, CausalityVerdict]


def default_L_grid(available, lo=50, hi=2000, num=10):
    """Log-spaced library sizes from ``lo`` to min(hi, available)."""
    hi = min(hi, available)
    if hi < lo:
        raise ConfigError(
            f"only {available} manifold points available; need at least {lo}"
        )
    grid = np.unique(np.round(np.geomspace(lo, hi, num)).astype(int))
    return tuple(int(v) for v in grid)


def library_rng(seed, L, replicate):
    """Deterministic generator for one (library size, replicate) cell.

    Shared by both directions of a pairwise run so their library draws
    coincide.
    """
    return np.random.default_rng([seed, L, replicate])


def _theta_control(theta, manifold, cfg):
    times0 = manifold.times - 1
    if cfg.theta_conditioning == "scalar":
        return theta.values[times0]
    n_lags = manifold.E // 2
    return np.column_stack(
        [theta.values[times0 - j * cfg.tau] for j in range(n_lags)]
    )


def run_direction(dataset, cause, effect, theta=None, cfg=None):
    """Convergence curve for one direction and one method."""
    if cfg is None:
        cfg = DetectionConfig()
    cause_series = dataset[cause]
    effect_series = dataset[effect]
    E = cfg.resolved_E
    emb = EmbeddingConfig(E=E, tau=cfg.tau, respect_trials=cfg.respect_trials)

    if cfg.method == "bpm":
        if theta is None:
            raise ConfigError("bpm requires a theta series")
        theta_series = dataset[theta]
        manifold = embed_bivariate(effect_series, theta_series, emb)
        control = _theta_control(theta_series, manifold, cfg)
        check_dimension_bound(E, 2, cfg.m_hint)
    else:
        manifold = embed_univariate(effect_series, emb)
        control = None
        check_dimension_bound(E, 1, cfg.m_hint)

    n_points = len(manifold)
    grid = cfg.L_grid if cfg.L_grid is not None else default_L_grid(n_points)
    if grid[-1] > n_points:
        raise ConfigError(
            f"L_grid maximum {grid[-1]} exceeds the {n_points} available "
            f"manifold points (max usable L = {n_points})"
        )

    k = E + 1

    def cell(iL_r):
        iL, r = iL_r
        L = grid[iL]
        library = LibrarySample.draw(manifold, L, library_rng(cfg.seed, L, r))
        res = cross_map_series(
            manifold, cause_series, library, k=k,
            exclusion_radius=cfg.exclusion_radius,
        )
        return iL, r, skill(res.estimates, res.actuals, control).value

    cells = [(iL, r) for iL in range(len(grid)) for r in range(cfg.replicates)]
    skills = np.empty((len(grid), cfg.replicates))
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(cell, cells))
    else:
        results = [cell(c) for c in cells]
    for iL, r, value in results:
        skills[iL, r] = value

    return ConvergenceCurve(
        method=cfg.method,
        cause=cause,
        effect=effect,
        L_values=np.asarray(grid, dtype=np.int64),
        mean_skill=skills.mean(axis=1),
        std_skill=skills.std(axis=1),
        replicates=cfg.replicates,
        skills=skills,
    )


def _ls_slope(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx = x - x.mean()
    return float((dx @ (y - y.mean())) / (dx @ dx))


def assess(curve, cfg):
    """Convergence verdict: final level, flat tail, non-decreasing trend."""
    thr = cfg.convergence
    if curve.L_values.size < thr.window:
        raise ConfigError(
            f"curve has {curve.L_values.size} grid points; "
            f"assessment window needs {thr.window}"
        )
    final = curve.final_skill
    tail = slice(-thr.window, None)
    tail_slope = _ls_slope(curve.L_values[tail], curve.mean_skill[tail])
    full_slope = _ls_slope(curve.L_values, curve.mean_skill)
    converged = (
        final >= thr.min_final_skill
        and abs(tail_slope) <= thr.max_slope
        and full_slope >= -thr.max_slope
    )
    return CausalityVerdict(
        method=curve.method,
        cause=curve.cause,
        effect=curve.effect,
        converged=bool(converged),
        final_skill=final,
        curve=curve,
        thresholds=thr,
    )


def run_pairwise(dataset, x, y, theta=None, cfg=None):
    """Both directions with identical per-(L, replicate) library seeds."""
    if cfg is None:
        cfg = DetectionConfig()
    curves = (
        run_direction(dataset, x, y, theta, cfg),
        run_direction(dataset, y, x, theta, cfg),
    )
    verdicts = tuple(assess(c, cfg) for c in curves)
    return PairwiseResult(curves=curves, verdicts=verdicts)


def curves_to_csv(curves, path):
    """Aggregated curves: method,cause,effect,L,replicate_mean,replicate_std."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "cause", "effect", "L", "replicate_mean", "replicate_std"]
        )
        for c in curves:
            for i, L in enumerate(c.L_values):
                writer.writerow(
                    [c.method, c.cause, c.effect, int(L),
                     repr(float(c.mean_skill[i])), repr(float(c.std_skill[i]))]
                )


def sweep_to_csv(curves, path):
    """Raw per-replicate table: method,cause,effect,L,replicate,skill."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "cause", "effect", "L", "replicate", "skill"])
        for c in curves:
            for i, L in enumerate(c.L_values):
                for r in range(c.replicates):
                    writer.writerow(
                        [c.method, c.cause, c.effect, int(L), r,
                         repr(float(c.skills[i, r]))]
                    )


def verdict_payload(verdict, cfg):
    return {
        "method": verdict.method,
        "cause": verdict.cause,
        "effect": verdict.effect,
        "converged": verdict.converged,
        "final_skill": verdict.final_skill,
        "config": {
            "E": cfg.resolved_E,
            "tau": cfg.tau,
            "L_grid": [int(L) for L in verdict.curve.L_values],
            "replicates": cfg.replicates,
            "seed": cfg.seed,
            "thresholds": {
                "min_final_skill": cfg.convergence.min_final_skill,
                "max_slope": cfg.convergence.max_slope,
                "window": cfg.convergence.window,
            },
        },
    }


def verdicts_to_json(verdicts_with_cfg, path):
    """Write verdict records; takes (verdict, cfg) pairs."""
    payload = [verdict_payload(v, cfg) for v, cfg in verdicts_with_cfg]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
