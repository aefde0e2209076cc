"""Boundary chart for the ball process: gap coordinate plus direction chart.

Near the sphere the natural coordinates are the boundary gap
``v = 1 - |x|^2`` and the first n-1 components of the direction,
``y = (x_1, .., x_{n-1}) / |x|``, a chart of the upper hemisphere
(``x_n > 0``).  In these coordinates the model splits into the autonomous
gap diffusion (the radial module's equation) driven by a scalar motion, and
a direction equation

    dY = V^r gamma(V) (1-V)^{-1/2} A^{1/2}(Y) dM
         - (n-1)/2 (1-V)^{-1} V^{2r} gamma^2(V) Y dt

driven by an independent (n-1)-dimensional motion, where

    A(y) = I - y y^T

is the chart metric factor.  Its square root has the rank-one closed form
``A^{1/2}(y) = I - c y y^T`` with ``c = 1 / (1 + sqrt(1 - |y|^2))`` — the
numerically stable rewriting of ``(1 - sqrt(1-|y|^2)) / |y|^2``.  A is
uniformly elliptic on the chart region ``|y| <= 1/2``:
``<A(y) xi, xi> = |xi|^2 - <y, xi>^2 >= (3/4)|xi|^2``.

:func:`simulate_transformed` integrates the pair with the gap clamped to
``[0, 1 - 1e-6]`` (the chart needs ``V < 1``) and *stops* the first time
``|Y| > 1/2`` leaves the chart, recording the truncation.  The batch
terminal sampler keeps evolving the autonomous gap for every replica — the
gap law does not depend on the direction — and reports what fraction of
direction paths left the chart.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .coeffs import BallModel
from .radial import RadialModel, drift, sigma_sq
from .rng import stream

__all__ = [
    "forward_map",
    "inverse_map",
    "A_matrix",
    "A_sqrt",
    "TransformedTrajectory",
    "simulate_transformed",
    "TerminalGapSample",
    "sample_transformed_terminal",
]

_V_CAP = 1.0 - 1e-6  # chart requires V < 1; keep (1-V)^{-1/2} finite
_CHART_RADIUS = 0.5


def forward_map(x) -> tuple[float, np.ndarray]:
    """Chart coordinates ``(v, y)`` of a ball point with ``|x| > 0``.

    ``v = 1 - |x|^2`` (clamped at 0), ``y = (x_1..x_{n-1}) / |x|``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("x must be a vector of dimension >= 2")
    norm = float(np.sqrt(x @ x))
    if norm == 0.0:
        raise ValueError("the direction chart is undefined at the origin")
    return max(0.0, 1.0 - norm * norm), x[:-1] / norm


def inverse_map(v: float, y) -> np.ndarray:
    """The upper-hemisphere point with chart coordinates ``(v, y)``:
    ``x_i = y_i sqrt(1-v)`` for i < n and ``x_n = sqrt((1-v)(1-|y|^2))``."""
    y = np.asarray(y, dtype=float)
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise ValueError("v must lie in [0, 1]")
    s = float(y @ y)
    if s > 1.0:
        raise ValueError("|y| must not exceed 1")
    scale = sqrt(1.0 - v)
    return np.concatenate([y * scale, [scale * sqrt(1.0 - s)]])


def A_matrix(y) -> np.ndarray:
    """Chart metric factor ``I - y y^T``."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError("y must be a vector")
    return np.eye(len(y)) - np.outer(y, y)


def A_sqrt(y) -> np.ndarray:
    """Principal square root ``I - c y y^T``, ``c = 1/(1 + sqrt(1-|y|^2))``.

    Defined for ``|y| < 1`` (the matrix is singular on the unit sphere of
    the chart, where the chart itself breaks down).
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError("y must be a vector")
    s = float(y @ y)
    if s >= 1.0:
        raise ValueError("A_sqrt requires |y| < 1")
    c = 1.0 / (1.0 + sqrt(1.0 - s))
    return np.eye(len(y)) - c * np.outer(y, y)


def _apply_a_sqrt(y: np.ndarray, dm: np.ndarray) -> np.ndarray:
    """Rank-one action ``A^{1/2}(y) dm`` batched over leading axes."""
    s = np.sum(y * y, axis=-1)
    c = 1.0 / (1.0 + np.sqrt(np.maximum(0.0, 1.0 - s)))
    return dm - (c * np.sum(y * dm, axis=-1))[..., None] * y


@dataclass(frozen=True)
class TransformedTrajectory:
    """Chart path up to the horizon or the first chart exit.

    When ``truncated`` the arrays end at the first recorded state with
    ``|y| > 1/2`` (that state included), and ``truncation_index`` is its
    step index; otherwise ``truncation_index`` is ``len(times) - 1``.
    """

    model: BallModel
    seed: int
    dt: float
    times: np.ndarray
    v: np.ndarray
    y: np.ndarray
    truncated: bool
    truncation_index: int

    def to_csv(self, path) -> None:
        """Rows ``t, v, y_1..y_{n-1}, truncated`` under a ``#`` header."""
        header = [
            f"# model: {json.dumps(self.model.to_dict(), sort_keys=True)}",
            f"# seed: {self.seed}",
            f"# dt: {self.dt!r}",
            f"# truncated: {str(self.truncated).lower()}",
        ]
        cols = ["t", "v"] + [f"y_{i + 1}" for i in range(self.y.shape[1])] + ["truncated"]
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(header) + "\n")
            fh.write(",".join(cols) + "\n")
            last = self.truncation_index
            for k in range(len(self.times)):
                row = [repr(float(self.times[k])), repr(float(self.v[k]))]
                row += [repr(float(c)) for c in self.y[k]]
                row.append("1" if (self.truncated and k == last) else "0")
                fh.write(",".join(row) + "\n")


def _chart_start(model: BallModel, x0) -> tuple[float, np.ndarray]:
    v0, y0 = forward_map(np.asarray(x0, dtype=float))
    if x0[-1] < 0.0:
        raise ValueError("the chart covers the upper hemisphere: x_n must be >= 0")
    if float(y0 @ y0) > _CHART_RADIUS**2:
        raise ValueError("start lies outside the chart region |y| <= 1/2")
    return v0, y0


def simulate_transformed(
    model: BallModel, x0, T: float, dt: float, seed: int
) -> TransformedTrajectory:
    """Euler path of the chart pair (V, Y) started from a ball point.

    The gap and direction equations read their coefficients at the current
    gap (v-convention), so the ball model is converted once via
    :meth:`RadialModel.from_ball`.  The path stops early — truncation — the
    first time the direction leaves ``|y| <= 1/2``.
    """
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    v, y = _chart_start(model, x0)
    radial = RadialModel.from_ball(model)
    steps = ceil(T / dt)
    gen = stream(seed)
    d = model.n - 1
    vs = np.empty(steps + 1)
    ys = np.empty((steps + 1, d))
    vs[0], ys[0] = v, y
    sqdt = sqrt(dt)
    two_r = 2.0 * model.r
    truncated = False
    k_stop = steps
    for k in range(steps):
        noise = gen.standard_normal(1 + d)
        gam = radial.gamma(v)
        diff_v = sqrt(max(sigma_sq(radial, v), 0.0))
        v_new = v + drift(radial, v) * dt - diff_v * sqdt * noise[0]
        v_new = min(max(v_new, 0.0), _V_CAP)
        amp = v**model.r * gam / sqrt(1.0 - v)
        dm = noise[1:] * sqdt
        y_new = (
            y
            + amp * _apply_a_sqrt(y, dm)
            - 0.5 * (model.n - 1) / (1.0 - v) * v**two_r * gam * gam * y * dt
        )
        v, y = v_new, y_new
        vs[k + 1], ys[k + 1] = v, y
        if float(y @ y) > _CHART_RADIUS**2:
            truncated = True
            k_stop = k + 1
            break
    end = k_stop + 1
    return TransformedTrajectory(
        model=model,
        seed=int(seed),
        dt=float(dt),
        times=np.arange(end) * float(dt),
        v=vs[:end],
        y=ys[:end],
        truncated=truncated,
        truncation_index=k_stop,
    )


@dataclass(frozen=True)
class TerminalGapSample:
    """Terminal gaps of the chart simulation over replicas.

    The gap component is autonomous, so every replica's ``v`` is valid for
    the full horizon even if its direction left the chart;
    ``truncated_fraction`` reports how many directions did.
    """

    v: np.ndarray
    truncated_fraction: float


def sample_transformed_terminal(
    model: BallModel, x0, T: float, dt: float, seed: int, replicas: int
) -> TerminalGapSample:
    """Vectorized chart simulation keeping only terminal gaps (plus the
    fraction of replicas whose direction exited ``|y| <= 1/2``)."""
    if replicas <= 0:
        raise ValueError("replicas must be positive")
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    v0, y0 = _chart_start(model, x0)
    radial = RadialModel.from_ball(model)
    steps = ceil(T / dt)
    gen = stream(seed)
    R = int(replicas)
    d = model.n - 1
    v = np.full(R, v0)
    y = np.broadcast_to(y0, (R, d)).copy()
    ever_out = np.zeros(R, dtype=bool)
    sqdt = sqrt(dt)
    two_r = 2.0 * model.r
    for _ in range(steps):
        noise = gen.standard_normal((R, 1 + d))
        gam = np.asarray(radial.gamma(v))
        diff_v = np.sqrt(np.maximum(sigma_sq(radial, v), 0.0))
        v_new = v + drift(radial, v) * dt - diff_v * sqdt * noise[:, 0]
        np.clip(v_new, 0.0, _V_CAP, out=v_new)
        amp = v**model.r * gam / np.sqrt(1.0 - v)
        dm = noise[:, 1:] * sqdt
        y_new = (
            y
            + amp[:, None] * _apply_a_sqrt(y, dm)
            - (0.5 * (model.n - 1) / (1.0 - v) * v**two_r * gam * gam * dt)[:, None] * y
        )
        # directions frozen at their first chart exit (the gap is autonomous
        # and keeps evolving for every replica)
        live = ~ever_out
        y = np.where(live[:, None], y_new, y)
        v = v_new
        ever_out |= live & (np.sum(y_new * y_new, axis=-1) > _CHART_RADIUS**2)
    return TerminalGapSample(v=v, truncated_fraction=float(np.mean(ever_out)))
