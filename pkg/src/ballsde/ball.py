"""Path simulation for the ball model.

State X lives in the closed unit ball; the scheme is explicit Euler

    X_{k+1} = Pi( X_k - g(|X_k|) X_k dt + (1 - |X_k|^2)^r gamma(|X_k|) dB_k )

where Pi rescales any proposal that leaves the ball back onto the sphere
(radial projection — the cheapest map that preserves the direction and the
invariance of the ball).  The boundary gap ``Y = 1 - |X|^2`` is clamped at 0
before any fractional power.

Two schemes.  ``euler-project`` is the plain step above.  ``euler-substep``
refines time by ``factor`` whenever the current gap falls below
``delta_sub`` — near the boundary the diffusion coefficient has a root-type
modulus in Y, and shrinking the local step is what keeps the scheme from
overshooting through the sphere.  Either way the *recorded* increments live
on the coarse grid: a substepped interval records the sum of its fine
increments, which is the true Brownian increment of the interval, so
downstream consumers (coupling, verification) see the same interface.

A trajectory records everything needed to reproduce or couple a run:
times, states, gaps, the driving increments, the seed and the scheme.
Batch helpers (:func:`sample_terminal_states`, :func:`occupation_profile`)
vectorize over replicas without storing paths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .coeffs import BallModel
from .rng import stream

__all__ = [
    "SchemeSpec",
    "Trajectory",
    "step",
    "simulate",
    "sample_terminal_states",
    "occupation_near_boundary",
    "occupation_profile",
    "generator_value",
]

_SCHEME_TAGS = ("euler-project", "euler-substep")


@dataclass(frozen=True)
class SchemeSpec:
    """Time-stepping scheme: plain projection, or gap-triggered substepping.

    ``delta_sub`` and ``factor`` only matter for ``euler-substep``: below
    gap delta_sub the step is split into ``factor`` equal substeps.
    """

    tag: str = "euler-project"
    delta_sub: float = 1e-3
    factor: int = 8

    def __post_init__(self):
        if self.tag not in _SCHEME_TAGS:
            raise ValueError(f"unknown scheme tag {self.tag!r}; expected one of {_SCHEME_TAGS}")
        if not 0.0 < self.delta_sub < 1.0:
            raise ValueError("delta_sub must lie in (0, 1)")
        if not (isinstance(self.factor, (int, np.integer)) and self.factor >= 2):
            raise ValueError("factor must be an integer >= 2")

    def to_dict(self) -> dict:
        return {"tag": self.tag, "delta_sub": self.delta_sub, "factor": int(self.factor)}


def _gap(x: np.ndarray) -> np.ndarray:
    """Boundary gap 1 - |x|^2, clamped at 0 (x may be a batch)."""
    return np.maximum(0.0, 1.0 - np.sum(x * x, axis=-1))


def step(model: BallModel, x: np.ndarray, dB: np.ndarray, dt: float) -> np.ndarray:
    """One Euler step from ``x`` driven by ``dB``, projected into the ball.

    Vectorized over any leading batch axes of ``x`` / ``dB``.
    """
    x = np.asarray(x, dtype=float)
    dB = np.asarray(dB, dtype=float)
    radius = np.sqrt(np.sum(x * x, axis=-1))
    gap = np.maximum(0.0, 1.0 - radius * radius)
    diff = np.asarray(np.power(gap, model.r) * model.gamma(radius))
    shrink = np.asarray(model.g(radius) * dt)
    proposal = x - shrink[..., None] * x + diff[..., None] * dB
    norm = np.sqrt(np.sum(proposal * proposal, axis=-1))
    scale = np.where(norm > 1.0, 1.0 / np.maximum(norm, 1e-300), 1.0)
    return proposal * scale[..., None]


@dataclass(frozen=True)
class Trajectory:
    """One simulated path on the coarse grid ``t_k = k dt``.

    ``states`` has shape (steps+1, n), ``gaps`` the matching boundary gaps,
    ``increments`` shape (steps, n) — the Brownian increments actually
    consumed (aggregated over substeps where applicable).
    """

    model: BallModel
    scheme: SchemeSpec
    seed: int
    dt: float
    times: np.ndarray
    states: np.ndarray
    gaps: np.ndarray
    increments: np.ndarray

    def to_csv(self, path) -> None:
        """Write ``t, x_1..x_n, Y`` rows under a ``#`` metadata header.

        The header carries the model, seed and scheme (no timestamps), so
        identical runs produce byte-identical files.
        """
        n = self.model.n
        header = [
            f"# model: {json.dumps(self.model.to_dict(), sort_keys=True)}",
            f"# scheme: {json.dumps(self.scheme.to_dict(), sort_keys=True)}",
            f"# seed: {self.seed}",
            f"# dt: {self.dt!r}",
        ]
        columns = ["t"] + [f"x_{i + 1}" for i in range(n)] + ["Y"]
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(header) + "\n")
            fh.write(",".join(columns) + "\n")
            for k in range(len(self.times)):
                row = [repr(float(self.times[k]))]
                row += [repr(float(v)) for v in self.states[k]]
                row.append(repr(float(self.gaps[k])))
                fh.write(",".join(row) + "\n")


def _validate_start(model: BallModel, x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.n,):
        raise ValueError(f"x0 must have shape ({model.n},), got {x0.shape}")
    if np.sum(x0 * x0) > 1.0 + 1e-12:
        raise ValueError("x0 must lie in the closed unit ball")
    return np.clip(x0, -1.0, 1.0)


def simulate(
    model: BallModel,
    x0,
    T: float,
    dt: float,
    seed: int,
    scheme: SchemeSpec = SchemeSpec(),
) -> Trajectory:
    """Simulate one path to horizon T (rounded up to whole steps).

    The generator draws ``factor * n`` normals per coarse step under
    ``euler-substep`` (whether or not the step is refined — the draw count
    must not depend on the state, or the path would not be a pure function
    of the seed) and ``n`` per step under ``euler-project``.
    """
    x = _validate_start(model, x0)
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    steps = ceil(T / dt)
    gen = stream(seed)
    n = model.n
    states = np.empty((steps + 1, n))
    incs = np.empty((steps, n))
    states[0] = x
    substep = scheme.tag == "euler-substep"
    sqdt = sqrt(dt)
    if substep:
        fine_dt = dt / scheme.factor
        sq_fine = sqrt(fine_dt)
    for k in range(steps):
        if substep:
            fine = gen.standard_normal((scheme.factor, n)) * sq_fine
            if _gap(x) < scheme.delta_sub:
                for s in range(scheme.factor):
                    x = step(model, x, fine[s], fine_dt)
            else:
                x = step(model, x, fine.sum(axis=0), dt)
            dB = fine.sum(axis=0)
        else:
            dB = gen.standard_normal(n) * sqdt
            x = step(model, x, dB, dt)
        states[k + 1] = x
        incs[k] = dB
    return Trajectory(
        model=model,
        scheme=scheme,
        seed=int(seed),
        dt=float(dt),
        times=np.arange(steps + 1) * float(dt),
        states=states,
        gaps=_gap(states),
        increments=incs,
    )


def sample_terminal_states(
    model: BallModel,
    x0,
    T: float,
    dt: float,
    seed: int,
    replicas: int,
    scheme: SchemeSpec = SchemeSpec(),
) -> np.ndarray:
    """Terminal states X_T over independent replicas, shape (replicas, n).

    One vectorized draw per (sub)step across all replicas; good for laws,
    not for matching individual :func:`simulate` paths.  Under
    ``euler-substep`` every replica consumes the same number of draws per
    coarse step; replicas outside the trigger gap apply the summed fine
    increments in a single coarse step.
    """
    x0 = _validate_start(model, x0)
    if replicas <= 0:
        raise ValueError("replicas must be positive")
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    steps = ceil(T / dt)
    gen = stream(seed)
    n = model.n
    x = np.broadcast_to(x0, (int(replicas), n)).copy()
    sqdt = sqrt(dt)
    if scheme.tag == "euler-substep":
        fine_dt = dt / scheme.factor
        sq_fine = sqrt(fine_dt)
        for _ in range(steps):
            fine = gen.standard_normal((scheme.factor, x.shape[0], n)) * sq_fine
            refine = _gap(x) < scheme.delta_sub
            coarse = ~refine
            if np.any(coarse):
                x[coarse] = step(model, x[coarse], fine[:, coarse].sum(axis=0), dt)
            if np.any(refine):
                xs = x[refine]
                for s in range(scheme.factor):
                    xs = step(model, xs, fine[s, refine], fine_dt)
                x[refine] = xs
    else:
        for _ in range(steps):
            dB = gen.standard_normal(x.shape) * sqdt
            x = step(model, x, dB, dt)
    return x


def occupation_near_boundary(traj: Trajectory, delta: float) -> float:
    """Fraction of recorded states with boundary gap at most ``delta``.

    ``delta`` in (0, 1]; delta = 1 counts everything.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    return float(np.mean(traj.gaps <= delta))


def occupation_profile(
    model: BallModel,
    x0,
    T: float,
    dt: float,
    seed: int,
    replicas: int,
    deltas,
    scheme: SchemeSpec = SchemeSpec(),
) -> np.ndarray:
    """Occupation fractions near the boundary, averaged over replicas.

    Entry i is the fraction of all recorded (replica, step) states with gap
    at most ``deltas[i]`` — computed streaming, without storing paths.
    """
    x0 = _validate_start(model, x0)
    deltas = np.asarray(deltas, dtype=float)
    if deltas.ndim != 1 or not np.all((deltas > 0.0) & (deltas <= 1.0)):
        raise ValueError("deltas must be a 1-d array with entries in (0, 1]")
    if replicas <= 0:
        raise ValueError("replicas must be positive")
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    steps = ceil(T / dt)
    gen = stream(seed)
    x = np.broadcast_to(x0, (int(replicas), model.n)).copy()
    counts = np.zeros(len(deltas), dtype=np.int64)
    counts += np.count_nonzero(_gap(x)[None, :] <= deltas[:, None], axis=1)
    sqdt = sqrt(dt)
    for _ in range(steps):
        dB = gen.standard_normal(x.shape) * sqdt
        x = step(model, x, dB, dt)
        counts += np.count_nonzero(_gap(x)[None, :] <= deltas[:, None], axis=1)
    return counts / float((steps + 1) * int(replicas))


def generator_value(model: BallModel, x, gradient, laplacian: float) -> float:
    """Generator applied to a test function at ``x``:

    ``(1/2) (1-|x|^2)^{2r} gamma^2(|x|) laplacian - g(|x|) x . gradient``.

    Caller supplies the gradient vector and Laplacian of the test function
    at ``x``; used by the weak-consistency checks.
    """
    x = np.asarray(x, dtype=float)
    radius = sqrt(float(np.sum(x * x)))
    gap = max(0.0, 1.0 - radius * radius)
    diff_sq = gap ** (2.0 * model.r) * model.gamma_sq(radius)
    return 0.5 * diff_sq * float(laplacian) - model.g(radius) * float(
        np.dot(x, np.asarray(gradient, dtype=float))
    )
