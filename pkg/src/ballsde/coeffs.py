"""Model coefficients and the ball-model container.

A model on the closed unit ball is described by the space dimension ``n``, the
boundary-degeneracy exponent ``r`` (the noise carries a factor
``(1 - |x|^2)^r``), a diffusion level ``gamma`` and an inward drift level
``g``, the last two being positive Lipschitz functions of the radius
``u = |x|``.  Restricting coefficients to a small closed class (constants,
affine functions, piecewise-linear tables) keeps every analytic quantity the
experiments need — Lipschitz constants, range bounds, exact piece-wise
suprema — computable instead of estimated.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt
from typing import Iterable

import numpy as np

from .errors import InfeasibleError

__all__ = [
    "CoeffFn",
    "BallModel",
    "required_ratio",
    "optimal_exponent",
    "epsilon_for_p",
]

_KINDS = ("constant", "affine", "table")


@dataclass(frozen=True)
class CoeffFn:
    """A positive, Lipschitz coefficient function on the radius interval [0, 1].

    ``knots``/``values`` always describe the function as piecewise linear:
    constants and affine functions are stored with two knots so that a single
    evaluation path (``np.interp``) serves all kinds.  ``kind`` is kept for
    faithful serialization.
    """

    kind: str
    knots: tuple[float, ...]
    values: tuple[float, ...]

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, value: float) -> "CoeffFn":
        return cls("constant", (0.0, 1.0), (float(value), float(value)))

    @classmethod
    def affine(cls, intercept: float, slope: float) -> "CoeffFn":
        a, b = float(intercept), float(slope)
        return cls("affine", (0.0, 1.0), (a, a + b))

    @classmethod
    def table(cls, points: Iterable[tuple[float, float]]) -> "CoeffFn":
        pts = sorted((float(u), float(v)) for u, v in points)
        knots = tuple(u for u, _ in pts)
        values = tuple(v for _, v in pts)
        return cls("table", knots, values)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or len(k) < 2:
            raise ValueError("need matching knot/value sequences of length >= 2")
        if not (np.all(np.diff(k) > 0) and k[0] == 0.0 and k[-1] == 1.0):
            raise ValueError("knots must increase strictly from 0.0 to 1.0")
        if not np.all(np.isfinite(v)):
            raise ValueError("coefficient values must be finite")
        if v.min() <= 0.0:
            raise ValueError(
                f"coefficient must be strictly positive on [0, 1]; min is {v.min()}"
            )

    # -- evaluation -----------------------------------------------------

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        if arr.size and (arr.min() < -1e-9 or arr.max() > 1.0 + 1e-9):
            raise ValueError("radius argument outside [0, 1]")
        out = np.interp(np.clip(arr, 0.0, 1.0), self.knots, self.values)
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out

    # -- analytic structure --------------------------------------------

    def pieces(self) -> list[tuple[float, float, float, float]]:
        """Local affine pieces ``(u0, u1, intercept, slope)`` with ``f(u) = a + b u``."""
        out = []
        for (u0, v0), (u1, v1) in zip(
            zip(self.knots, self.values), zip(self.knots[1:], self.values[1:])
        ):
            b = (v1 - v0) / (u1 - u0)
            out.append((u0, u1, v0 - b * u0, b))
        return out

    def piece_at(self, u: float) -> tuple[float, float, float, float]:
        """The affine piece ``(u0, u1, intercept, slope)`` containing ``u``.

        Interior knots belong to the piece on their right, so the returned
        slope is the right derivative there.
        """
        u = float(u)
        if not -1e-9 <= u <= 1.0 + 1e-9:
            raise ValueError("radius argument outside [0, 1]")
        pieces = self.pieces()
        for piece in pieces:
            if u < piece[1]:
                return piece
        return pieces[-1]

    def derivative(self, u):
        """Pointwise slope (right derivative at interior knots)."""
        arr = np.asarray(u, dtype=float)
        if arr.ndim == 0:
            return self.piece_at(float(arr))[3]
        slopes = np.array([b for _, _, _, b in self.pieces()])
        idx = np.clip(
            np.searchsorted(self.knots, np.clip(arr, 0.0, 1.0), side="right") - 1,
            0,
            len(slopes) - 1,
        )
        return slopes[idx]

    def lipschitz_constant(self) -> float:
        return max(abs(b) for _, _, _, b in self.pieces())

    def min_value(self) -> float:
        return float(min(self.values))

    def max_value(self) -> float:
        return float(max(self.values))

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": self.values[0]}
        if self.kind == "affine":
            a = self.values[0]
            return {"kind": "affine", "intercept": a, "slope": self.values[1] - a}
        return {
            "kind": "table",
            "points": [f"{u:.17g}:{v:.17g}" for u, v in zip(self.knots, self.values)],
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "CoeffFn":
        try:
            kind = spec["kind"]
        except (TypeError, KeyError):
            raise ValueError("coefficient spec must be a mapping with a 'kind' entry")
        if kind == "constant":
            return cls.constant(spec["value"])
        if kind == "affine":
            return cls.affine(spec["intercept"], spec["slope"])
        if kind == "table":
            pts = []
            for entry in spec["points"]:
                try:
                    u_str, v_str = str(entry).split(":")
                    pts.append((float(u_str), float(v_str)))
                except ValueError:
                    raise ValueError(f"table point {entry!r} is not 'u:value'")
            return cls.table(pts)
        raise ValueError(f"unknown coefficient kind {kind!r}")


@dataclass(frozen=True)
class BallModel:
    """Diffusion on the closed unit ball in dimension ``n``.

    The state satisfies (componentwise, with a shared n-dimensional Brownian
    motion B)

        dX = (1 - |X|^2)^r  gamma(|X|) dB  -  g(|X|) X dt,

    so the noise dies at the boundary at rate ``r`` while the drift pushes
    inward with level ``g``.  ``r = 1/2`` is the reference case throughout.
    """

    n: int
    r: float
    gamma: CoeffFn
    g: CoeffFn

    def __post_init__(self):
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 2):
            raise ValueError("dimension n must be an integer >= 2")
        if not (0.0 < self.r <= 1.0):
            raise ValueError("boundary exponent r must lie in (0, 1]")

    def gamma_sq(self, u):
        gam = self.gamma(u)
        return gam * gam

    def ratio(self, u):
        """Drift-to-diffusion ratio ``g(u) / gamma(u)^2``."""
        return self.g(u) / self.gamma_sq(u)

    def boundary_ratio(self) -> float:
        return float(self.ratio(1.0))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "gamma": self.gamma.to_dict(),
            "g": self.g.to_dict(),
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "BallModel":
        try:
            return cls(
                n=int(spec["n"]),
                r=float(spec["r"]),
                gamma=CoeffFn.from_dict(spec["gamma"]),
                g=CoeffFn.from_dict(spec["g"]),
            )
        except KeyError as missing:
            raise ValueError(f"model spec is missing entry {missing}")


def _check_power(p: float) -> float:
    p = float(p)
    if not 0.5 < p < 1.0:
        raise ValueError("power p must lie in (1/2, 1)")
    return p


def required_ratio(p: float) -> float:
    """Boundary drift-to-diffusion level needed to run the p-power contraction.

    The synchronous-coupling argument controls the gap of ``(1 - |X|^2)^p``
    only where ``g/gamma^2`` exceeds this value near the boundary.  Defined
    for ``1/2 < p < 1``; minimizing over p gives the uniqueness threshold,
    see :func:`optimal_exponent`.
    """
    p = _check_power(p)
    return (1.0 - p) + (2.0 * p - 1.0) ** 2 / (4.0 * (1.0 - p))


@lru_cache(maxsize=1)
def optimal_exponent() -> tuple[float, float]:
    """Minimize :func:`required_ratio` over (1/2, 1).

    Returns ``(p, value)``.  Golden-section search down to bracket width
    1e-12, then a parabolic-vertex refinement from a wider bracket: the
    comparison-based search alone stalls at the sqrt(machine-eps) noise floor,
    while the vertex of the local parabola lands well inside 1e-9 of the true
    minimizer.
    """
    inv_phi = (sqrt(5.0) - 1.0) / 2.0
    a, b = 0.5 + 1e-9, 1.0 - 1e-9
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = required_ratio(c), required_ratio(d)
    triple = None
    while b - a > 1e-12:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = required_ratio(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = required_ratio(d)
        if triple is None and b - a < 1e-6:
            m = (c, fc) if fc < fd else (d, fd)
            triple = (a, required_ratio(a), m[0], m[1], b, required_ratio(b))
    x0, f0, x1, f1, x2, f2 = triple
    # Parabola through the recorded triple; its vertex cancels the one-sided
    # rounding bias of the final comparisons.
    denom = (x0 - x1) * (f0 - f2) - (x0 - x2) * (f0 - f1)
    p_star = 0.5 * (a + b)
    if denom != 0.0:
        num = (x0 - x1) ** 2 * (f0 - f2) - (x0 - x2) ** 2 * (f0 - f1)
        vertex = x0 - 0.5 * num / denom
        if x0 <= vertex <= x2:
            p_star = vertex
    return p_star, required_ratio(p_star)


def _shell_grid(model: BallModel, u_lo: float) -> np.ndarray:
    pts = np.linspace(u_lo, 1.0, 2049)
    knots = [k for k in (*model.gamma.knots, *model.g.knots) if u_lo < k < 1.0]
    if knots:
        pts = np.union1d(pts, np.asarray(knots))
    return pts


def epsilon_for_p(model: BallModel, p: float, cap: float = 0.5) -> float:
    """Largest shell width ``eps <= cap`` keeping the p-power drift coercive.

    The condition is ``g(u)/gamma(u)^2 > 1 - p`` — equivalently
    ``g + (p-1) gamma^2 > 0``, so the inward drift still dominates the
    noise-power correction of ``(1-|x|^2)^p`` — for every radius
    ``u in (1-eps, 1]``.  Monotone in eps, so a coarse feasibility check plus
    bisection finds the supremum, capped at 1/2 by default.  Raises
    :class:`~ballsde.errors.InfeasibleError` when even the boundary point
    fails, i.e. the model cannot support this exponent at all.
    """
    if not (0.0 < cap <= 0.5):
        raise ValueError("cap must lie in (0, 1/2]")
    need = 1.0 - _check_power(p)
    if model.boundary_ratio() <= need:
        raise InfeasibleError(
            f"boundary ratio {model.boundary_ratio():.6g} does not exceed the "
            f"required level {need:.6g} for p = {p}"
        )

    def holds(eps: float) -> bool:
        grid = _shell_grid(model, 1.0 - eps)
        return bool(np.min(model.ratio(grid)) > need)

    if holds(cap):
        return cap
    lo, hi = 0.0, cap
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise InfeasibleError(
            f"no positive shell width satisfies the p-power condition for p = {p}"
        )
    return lo
