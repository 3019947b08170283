"""Benchmark skew-product map generators.

Three coupled logistic / Lotka-Volterra style maps driven by a cyclic
phase variable theta. A non-autonomous map whose rules vary with time t
becomes autonomous once the drive is promoted to a state variable
``theta`` stepped by ``1/alpha`` per iteration (wrapped into [0, 1) when
the forcing is periodic):

Case 1 (bidirectional coupling, modulated by theta):
    X' = X * (3.8*(1 - X) - 0.08*(1 + b1*cos(2*pi*theta)) * Y)
    Y' = Y * (3.5*(1 - Y) - 0.08*(1 + b2*cos(2*pi*theta)) * X)

Case 2 (X drives Y, both forced by theta):
    X' = X * (3.6 + b3*cos(2*pi*theta)) * (1 - X)
    Y' = Y * ((3.5 + b4*sin(2*pi*theta)) * (1 - Y) - 0.08*X)

Case 3 (no coupling, both forced by theta):
    X' = X * (3.8 + b5*sin(2*pi*theta)) * (1 - X)
    Y' = Y * (3.5 + b6*sin(2*pi*theta)) * (1 - Y)

Both updates read the pre-update state (synchronous update). Simulation
is a pure function of the spec: repeated runs are bitwise identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, TimeSeries
from .errors import DivergenceError, ValidationError

__all__ = [
    "SystemSpec",
    "ThetaSpec",
    "step_theta",
    "simulate",
    "staircase_theta",
    "spec_to_json",
    "spec_from_json",
]

# Trajectories of the logistic family blow up fast outside their basin;
# anything past this bound can only be a divergent orbit.
ESCAPE_BOUND = 10.0

DEFAULT_ALPHA = 4.0 / 3.0


@dataclass(frozen=True)
class SystemSpec:
    """Full parameterization of one benchmark case.

    ``betas`` holds the pair of forcing amplitudes of the selected case:
    (b1, b2) for case 1, (b3, b4) for case 2, (b5, b6) for case 3.
    """

    case: int
    betas: tuple[float, float]
    x0: float = 0.4
    y0: float = 0.2
    theta0: float = 0.0
    alpha: float = DEFAULT_ALPHA
    steps: int = 3000
    burn_in: int = 1000

    def __post_init__(self):
        if self.case not in (1, 2, 3):
            raise ValidationError(f"case must be 1, 2 or 3, got {self.case}")
        if len(self.betas) != 2:
            raise ValidationError("betas must be a pair of reals")
        if not 0.0 < self.x0 < 1.0:
            raise ValidationError(f"x0 must lie in (0, 1), got {self.x0}")
        if not 0.0 < self.y0 < 1.0:
            raise ValidationError(f"y0 must lie in (0, 1), got {self.y0}")
        if not 0.0 <= self.theta0 < 1.0:
            raise ValidationError(f"theta0 must lie in [0, 1), got {self.theta0}")
        if self.alpha == 0:
            raise ValidationError("alpha must be nonzero")
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")
        if self.burn_in < 0:
            raise ValidationError(f"burn_in must be >= 0, got {self.burn_in}")


@dataclass(frozen=True)
class ThetaSpec:
    """Recipe for generating a theta series on its own.

    ``kind`` is ``"linear_mod1"`` (theta += 1/alpha, wrapped) or
    ``"staircase"`` (constant within segments of ``segment_length``,
    stepping by ``delta`` across segments).
    """

    kind: str
    theta0: float = 0.0
    alpha: float = DEFAULT_ALPHA
    segment_length: int = 0
    delta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear_mod1", "staircase"):
            raise ValidationError(f"unknown theta kind {self.kind!r}")
        if self.kind == "linear_mod1" and self.alpha == 0:
            raise ValidationError("alpha must be nonzero")
        if self.kind == "staircase" and self.segment_length < 1:
            raise ValidationError("segment_length must be >= 1")

    def generate(self, n):
        if n < 1:
            raise ValidationError("n must be >= 1")
        if self.kind == "staircase":
            return staircase_theta(n, self.segment_length, self.delta, self.theta0)
        values = np.empty(n)
        th = self.theta0 % 1.0
        for i in range(n):
            values[i] = th
            th = step_theta(th, self.alpha, wrap=True)
        return TimeSeries("theta", values)


def step_theta(theta, alpha, wrap=True):
    """Advance theta by 1/alpha, reduced into [0, 1) when ``wrap``."""
    if alpha == 0:
        raise ValidationError("alpha must be nonzero")
    nxt = theta + 1.0 / alpha
    return nxt % 1.0 if wrap else nxt


def _case_update(case, b_first, b_second):
    two_pi = 2.0 * math.pi
    if case == 1:

        def update(x, y, th):
            c = math.cos(two_pi * th)
            return (
                x * (3.8 * (1.0 - x) - 0.08 * (1.0 + b_first * c) * y),
                y * (3.5 * (1.0 - y) - 0.08 * (1.0 + b_second * c) * x),
            )

    elif case == 2:

        def update(x, y, th):
            return (
                x * (3.6 + b_first * math.cos(two_pi * th)) * (1.0 - x),
                y * ((3.5 + b_second * math.sin(two_pi * th)) * (1.0 - y) - 0.08 * x),
            )

    else:

        def update(x, y, th):
            s = math.sin(two_pi * th)
            return (
                x * (3.8 + b_first * s) * (1.0 - x),
                y * (3.5 + b_second * s) * (1.0 - y),
            )

    return update


def simulate(spec):
    """Iterate the selected case and return series X, Y, theta.

    The map runs ``burn_in + steps`` iterations from (x0, y0, theta0);
    the first ``burn_in`` states are discarded. Raises
    :class:`DivergenceError` (with the offending iteration index) as soon
    as X or Y leaves [-ESCAPE_BOUND, ESCAPE_BOUND].
    """
    update = _case_update(spec.case, *spec.betas)
    n = spec.steps
    xs = np.empty(n)
    ys = np.empty(n)
    ths = np.empty(n)
    x, y, th = spec.x0, spec.y0, spec.theta0 % 1.0
    out = 0
    for k in range(spec.burn_in + n):
        if abs(x) > ESCAPE_BOUND or abs(y) > ESCAPE_BOUND:
            raise DivergenceError(
                f"trajectory escaped |value| > {ESCAPE_BOUND} at step {k}"
                f" (case {spec.case}, betas {spec.betas})",
                step=k,
            )
        if k >= spec.burn_in:
            xs[out] = x
            ys[out] = y
            ths[out] = th
            out += 1
        x, y = update(x, y, th)
        th = step_theta(th, spec.alpha, wrap=True)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DivergenceError("trajectory produced non-finite values", step=None)
    return Dataset(
        [TimeSeries("X", xs), TimeSeries("Y", ys), TimeSeries("theta", ths)]
    )


def staircase_theta(n, segment_length, delta=1.0, theta0=0.0):
    """Piecewise-constant theta: value theta0 + k*delta on segment k.

    Samples are grouped into consecutive segments of ``segment_length``;
    trial_ids are set to the segment index so trial-respecting embedding
    can avoid windows that straddle segments.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if segment_length < 1:
        raise ValidationError(f"segment_length must be >= 1, got {segment_length}")
    segment = np.arange(n) // segment_length
    values = theta0 + segment * float(delta)
    return TimeSeries("theta", values, trial_ids=segment)


_BETA_KEYS = {1: ("beta1", "beta2"), 2: ("beta3", "beta4"), 3: ("beta5", "beta6")}


def spec_to_json(spec, path=None):
    """Serialize a SystemSpec to JSON (keys beta1..beta6 per case)."""
    k1, k2 = _BETA_KEYS[spec.case]
    payload = {
        "case": spec.case,
        k1: spec.betas[0],
        k2: spec.betas[1],
        "x0": spec.x0,
        "y0": spec.y0,
        "theta0": spec.theta0,
        "alpha": spec.alpha,
        "steps": spec.steps,
        "burn_in": spec.burn_in,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def spec_from_json(source):
    """Parse a SystemSpec from a JSON string or file path."""
    if isinstance(source, (dict,)):
        payload = dict(source)
    else:
        text = str(source)
        if "{" not in text:
            with open(text, encoding="utf-8") as fh:
                payload = json.load(fh)
        else:
            payload = json.loads(text)
    try:
        case = int(payload.pop("case"))
    except KeyError:
        raise ValidationError("spec JSON requires a 'case' key") from None
    if case not in _BETA_KEYS:
        raise ValidationError(f"case must be 1, 2 or 3, got {case}")
    k1, k2 = _BETA_KEYS[case]
    betas = (float(payload.pop(k1, 0.0)), float(payload.pop(k2, 0.0)))
    for stray in ("beta1", "beta2", "beta3", "beta4", "beta5", "beta6"):
        if stray in payload:
            raise ValidationError(
                f"spec JSON for case {case} must use keys {k1}/{k2}, found {stray!r}"
            )
    known = {"x0", "y0", "theta0", "alpha", "steps", "burn_in"}
    unknown = set(payload) - known
    if unknown:
        raise ValidationError(f"unknown spec keys: {sorted(unknown)}")
    ints = {k: int(payload[k]) for k in ("steps", "burn_in") if k in payload}
    floats = {
        k: float(payload[k]) for k in ("x0", "y0", "theta0", "alpha") if k in payload
    }
    return SystemSpec(case=case, betas=betas, **floats, **ints)
