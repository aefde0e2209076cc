"""Degenerate diffusions on a general bounded domain ``D = {phi > 0}``.

The ball model generalizes to

    dX = sqrt(h(X)) sigma dB + b(X) dt

where ``h >= 0`` vanishes on the boundary (the degeneracy factor) and
``sigma`` is a constant matrix.  The structure that survives the
generalization is the split of the drift at a point into its component
along ``grad h`` — the inward direction, since h increases into the domain —
and a tangential remainder:

    g = <b, grad h> / |grad h|,       beta = b - g grad h / |grad h|.

The scalar that decides boundary attainability questions is the
dimensionless ratio

    alpha = 2 g |grad h| / <a grad h, grad h>,        a = sigma sigma^T,

which for the unit ball with ``h = 1 - |x|^2`` reduces to ``g(1)/gamma^2(1)``
at the boundary — the same ratio the coupling threshold is stated in.  The
comparison arguments need ``alpha`` (or at least the coefficient fields
entering it) to be constant on level sets of h near the boundary;
:func:`is_function_of_h` tests that numerically by binning sampled field
values by their h level.

Domains come from built-in constructors (sphere, ellipsoid — analytic
gradients) or from expression strings over ``x1..xn`` parsed by a small
whitelisted-ast evaluator (gradients by central differences).
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from math import ceil, sqrt
from typing import Callable

import numpy as np

from .errors import BallSdeError, ConfigError, HypothesisViolation
from .rng import stream

__all__ = [
    "DomainSpec",
    "DomainModel",
    "inward_normal_drift",
    "gradient_drift",
    "DomainCheck",
    "validate_domain",
    "DriftSplit",
    "decompose_drift",
    "alpha_ratio",
    "sample_neighborhood",
    "FunctionOfHReport",
    "is_function_of_h",
    "simulate_domain",
]

_FD_STEP = 1e-5


# ---------------------------------------------------------------------------
# expression parsing (tiny whitelisted subset of Python syntax)
# ---------------------------------------------------------------------------

_ALLOWED_CALLS = {
    "sqrt": np.sqrt,
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
}
_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)


def _compile_expression(text: str, dim: int) -> Callable:
    """Compile an arithmetic expression in ``x1..x{dim}`` to a field.

    Only numbers, the coordinate names, +-*/**, unary sign and the
    functions sqrt/exp/log/sin/cos/abs are admitted; anything else is a
    :class:`ConfigError` naming the offending fragment.  The compiled field
    broadcasts over arrays, so one expression serves scalar and batched
    evaluation alike.
    """
    names = {f"x{i + 1}": i for i in range(dim)}
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse field expression {text!r}: {exc}") from None

    def check(node: ast.AST) -> None:
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, _ALLOWED_UNARY):
            check(node.operand)
        elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            pass
        elif isinstance(node, ast.Name):
            if node.id not in names:
                raise ConfigError(
                    f"unknown name {node.id!r} in field expression (have x1..x{dim})"
                )
        elif isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_CALLS):
                raise ConfigError("only sqrt/exp/log/sin/cos/abs calls are allowed")
            if node.keywords or len(node.args) != 1:
                raise ConfigError("field functions take exactly one positional argument")
            check(node.args[0])
        else:
            raise ConfigError(
                f"disallowed syntax {type(node).__name__!r} in field expression {text!r}"
            )

    check(tree)
    code = compile(tree, "<field>", "eval")

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        scope = {name: x[..., i] for name, i in names.items()}
        scope.update(_ALLOWED_CALLS)
        return np.asarray(eval(code, {"__builtins__": {}}, scope), dtype=float)

    return evaluate


def _fd_gradient(fn: Callable, step: float = _FD_STEP) -> Callable:
    def gradient(x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        for i in range(x.shape[-1]):
            shift = np.zeros(x.shape[-1])
            shift[i] = step
            out[..., i] = (fn(x + shift) - fn(x - shift)) / (2.0 * step)
        return out

    return gradient


# ---------------------------------------------------------------------------
# domains and models
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """A bounded domain ``{phi > 0}`` with a degeneracy field h.

    ``phi`` and ``h`` (and their gradients) accept either a single point of
    shape (dim,) or a batch (..., dim).  ``box`` is a per-coordinate
    half-width bounding the domain — the rejection sampler draws from it.
    """

    name: str
    dim: int
    phi: Callable
    h: Callable
    grad_phi: Callable
    grad_h: Callable
    box: tuple = ()

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be at least 2")
        if len(self.box) != self.dim:
            raise ValueError("box must give one half-width per coordinate")

    @classmethod
    def sphere(cls, dim: int = 2) -> "DomainSpec":
        """Unit ball with ``phi = h = 1 - |x|^2``."""
        fn = lambda x: 1.0 - np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)
        grad = lambda x: -2.0 * np.asarray(x, dtype=float)
        return cls("sphere", dim, fn, fn, grad, grad, box=(1.0,) * dim)

    @classmethod
    def ellipsoid(cls, semi_axes) -> "DomainSpec":
        """Axis-aligned ellipsoid with ``phi = h = 1 - sum (x_i/a_i)^2``."""
        axes = np.asarray(tuple(semi_axes), dtype=float)
        if axes.ndim != 1 or len(axes) < 2 or np.any(axes <= 0):
            raise ValueError("semi_axes must be >= 2 positive lengths")
        inv_sq = 1.0 / axes**2
        fn = lambda x: 1.0 - np.sum(np.asarray(x, dtype=float) ** 2 * inv_sq, axis=-1)
        grad = lambda x: -2.0 * np.asarray(x, dtype=float) * inv_sq
        return cls("ellipsoid", len(axes), fn, fn, grad, grad, box=tuple(axes))

    @classmethod
    def from_expressions(
        cls,
        dim: int,
        phi: str,
        h: str | None = None,
        box=None,
        name: str = "custom",
    ) -> "DomainSpec":
        """Domain from expression strings; gradients by central differences.

        ``h`` defaults to ``phi``; ``box`` defaults to unit half-widths.
        """
        phi_fn = _compile_expression(phi, dim)
        h_fn = phi_fn if h is None else _compile_expression(h, dim)
        if box is None:
            box = (1.0,) * dim
        return cls(
            name,
            dim,
            phi_fn,
            h_fn,
            _fd_gradient(phi_fn),
            _fd_gradient(h_fn),
            box=tuple(float(b) for b in box),
        )


@dataclass(frozen=True, eq=False)
class DomainModel:
    """A diffusion ``dX = sqrt(h) sigma dB + b dt`` on a domain."""

    domain: DomainSpec
    drift: Callable
    sigma: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        dim = self.domain.dim
        sig = self.sigma
        if sig is None:
            sig = np.eye(dim)
        else:
            sig = np.asarray(sig, dtype=float)
            if sig.ndim == 0:
                sig = float(sig) * np.eye(dim)
            if sig.shape != (dim, dim):
                raise ValueError(f"sigma must be a scalar or a ({dim}, {dim}) matrix")
        object.__setattr__(self, "sigma", sig)

    @property
    def a_matrix(self) -> np.ndarray:
        return self.sigma @ self.sigma.T


def inward_normal_drift(spec: DomainSpec, level: float) -> Callable:
    """Drift of constant inward-normal strength: ``b = level grad h / |grad h|``."""
    level = float(level)

    def drift(x):
        grad = np.asarray(spec.grad_h(x), dtype=float)
        norm = np.sqrt(np.sum(grad * grad, axis=-1, keepdims=True))
        return level * grad / np.maximum(norm, 1e-300)

    return drift


def gradient_drift(spec: DomainSpec, scale: float) -> Callable:
    """Drift proportional to the gradient field: ``b = scale grad h``."""
    scale = float(scale)
    return lambda x: scale * np.asarray(spec.grad_h(x), dtype=float)


# ---------------------------------------------------------------------------
# validation, decomposition, alpha
# ---------------------------------------------------------------------------


def sample_neighborhood(
    spec: DomainSpec, count: int, seed: int, h_max: float | None = None
) -> np.ndarray:
    """Uniform samples of the boundary neighborhood ``{0 < h < h_max}``.

    ``h_max`` defaults to 10% of the largest h seen on a pilot draw from the
    bounding box.  Rejection sampling; raises if acceptance is hopeless.
    """
    if count <= 0:
        raise ValueError("count must be positive")
    gen = stream(seed)
    half = np.asarray(spec.box)
    if h_max is None:
        pilot = gen.uniform(-half, half, size=(4096, spec.dim))
        inside = spec.h(pilot)
        top = float(np.max(inside))
        if top <= 0.0:
            raise BallSdeError("pilot draw found no interior point; check box/phi")
        h_max = 0.1 * top
    out = np.empty((count, spec.dim))
    have = 0
    for _ in range(1000):
        draw = gen.uniform(-half, half, size=(max(count, 1024), spec.dim))
        hv = spec.h(draw)
        keep = draw[(hv > 0.0) & (hv < h_max)]
        take = min(len(keep), count - have)
        out[have : have + take] = keep[:take]
        have += take
        if have == count:
            return out
    raise BallSdeError(
        f"neighborhood sampler accepted only {have}/{count} points; "
        "check box, phi and h_max"
    )


@dataclass(frozen=True)
class DomainCheck:
    """Outcome of the structural sanity checks on a domain."""

    ok: bool
    messages: tuple


def validate_domain(spec: DomainSpec, samples: int = 2000, seed: int = 0) -> DomainCheck:
    """Check the structural hypotheses on random neighborhood samples.

    Verifies that h and phi are positive together (same domain), that h
    vanishes only toward the boundary (h tends to 0 as phi does along the
    samples — tested via correlation of small quantiles), and that the
    advertised gradients match central differences.
    """
    messages = []
    pts = sample_neighborhood(spec, samples, seed)
    hv = np.asarray(spec.h(pts))
    pv = np.asarray(spec.phi(pts))
    if not np.all(hv > 0.0):
        messages.append("h must be positive on the sampled neighborhood")
    if not np.all(pv > 0.0):
        messages.append("phi must be positive where h is positive")
    fd_h = _fd_gradient(spec.h)(pts[:64])
    an_h = np.asarray(spec.grad_h(pts[:64]), dtype=float)
    scale = np.maximum(1.0, np.abs(an_h))
    if not np.all(np.abs(fd_h - an_h) <= 1e-4 * scale):
        messages.append("grad_h disagrees with central differences")
    fd_p = _fd_gradient(spec.phi)(pts[:64])
    an_p = np.asarray(spec.grad_phi(pts[:64]), dtype=float)
    scale = np.maximum(1.0, np.abs(an_p))
    if not np.all(np.abs(fd_p - an_p) <= 1e-4 * scale):
        messages.append("grad_phi disagrees with central differences")
    grad_norm = np.sqrt(np.sum(an_h**2, axis=-1))
    if np.any(grad_norm < 1e-10):
        messages.append("grad_h vanishes inside the boundary neighborhood")
    return DomainCheck(ok=not messages, messages=tuple(messages))


@dataclass(frozen=True)
class DriftSplit:
    """Drift at a point split along / across the inward direction grad h."""

    g: float
    beta: np.ndarray
    grad_h_norm: float


def decompose_drift(model: DomainModel, x) -> DriftSplit:
    """Split ``b(x)`` into inward component g and tangential remainder beta.

    Raises :class:`HypothesisViolation` if the inward component is not
    strictly positive — the boundary analysis needs drift pushing into the
    domain along grad h.  The remainder is orthogonal to grad h by
    construction; the residual is checked to relative 1e-12 anyway, as a
    guard against ill-conditioned gradients.
    """
    x = np.asarray(x, dtype=float)
    b = np.asarray(model.drift(x), dtype=float)
    grad = np.asarray(model.domain.grad_h(x), dtype=float)
    norm = float(np.sqrt(grad @ grad))
    if norm < 1e-300:
        raise BallSdeError("grad h vanishes at the queried point")
    g = float(b @ grad) / norm
    if g <= 0.0:
        raise HypothesisViolation(
            f"inward drift component must be positive, got g = {g:.6g} at {x.tolist()}"
        )
    beta = b - g * grad / norm
    resid = abs(float(beta @ grad))
    if resid > 1e-12 * max(1.0, norm * float(np.sqrt(beta @ beta))):
        raise BallSdeError("tangential remainder failed the orthogonality check")
    return DriftSplit(g=g, beta=beta, grad_h_norm=norm)


def alpha_ratio(model: DomainModel, x) -> float:
    """The boundary ratio ``2 g |grad h| / <a grad h, grad h>`` at ``x``."""
    split = decompose_drift(model, x)
    grad = np.asarray(model.domain.grad_h(np.asarray(x, dtype=float)), dtype=float)
    quad = float(grad @ model.a_matrix @ grad)
    if quad <= 0.0:
        raise BallSdeError("diffusion quadratic form degenerate along grad h")
    return 2.0 * split.g * split.grad_h_norm / quad


# ---------------------------------------------------------------------------
# is the field a function of h?
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionOfHReport:
    """Binned-level test of whether a field depends on position only via h.

    Samples of the neighborhood are bucketed by h (``bins`` of equal width,
    1e-3 of the sampled h-range); within-bucket spread of the field is
    compared against a tolerance of 1e-6 plus the spread explainable by the
    field's variation *across* buckets (slope estimate times bin width).
    """

    is_function: bool
    max_spread: float
    tolerance: float
    bins: int
    slope_estimate: float


def is_function_of_h(
    spec: DomainSpec,
    field_fn: Callable,
    *,
    samples: int = 20000,
    seed: int = 0,
    h_max: float | None = None,
) -> FunctionOfHReport:
    pts = sample_neighborhood(spec, samples, seed, h_max=h_max)
    hv = np.asarray(spec.h(pts), dtype=float)
    fv = np.asarray(field_fn(pts), dtype=float)
    lo, hi = float(np.min(hv)), float(np.max(hv))
    width = max((hi - lo) * 1e-3, 1e-12)
    nbins = int(ceil((hi - lo) / width)) + 1
    idx = np.minimum(((hv - lo) / width).astype(int), nbins - 1)
    order = np.argsort(idx, kind="stable")
    idx_sorted = idx[order]
    fv_sorted = fv[order]
    starts = np.searchsorted(idx_sorted, np.arange(nbins))
    ends = np.searchsorted(idx_sorted, np.arange(nbins) + 1)
    means = np.full(nbins, np.nan)
    spread = 0.0
    for b in range(nbins):
        seg = fv_sorted[starts[b] : ends[b]]
        if len(seg):
            means[b] = float(np.mean(seg))
        if len(seg) >= 2:
            spread = max(spread, float(np.max(seg) - np.min(seg)))
    filled = np.where(~np.isnan(means))[0]
    slope = 0.0
    for a, b in zip(filled, filled[1:]):
        slope = max(slope, abs(means[b] - means[a]) / ((b - a) * width))
    tol = 1e-6 + slope * width
    return FunctionOfHReport(
        is_function=bool(spread <= tol),
        max_spread=float(spread),
        tolerance=float(tol),
        bins=nbins,
        slope_estimate=float(slope),
    )


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def simulate_domain(
    model: DomainModel, x0, T: float, dt: float, seed: int
) -> np.ndarray:
    """Euler path kept inside ``{phi >= 0}`` by backtracking along the step.

    A proposal with ``phi < 0`` is pulled back toward the previous state by
    bisection on the step fraction (40 rounds), landing on the inside-most
    fraction with ``phi >= 0``; if even the full backtrack fails the step is
    rejected with an error — that indicates an invalid state, not noise.
    Returns states of shape (steps+1, dim); every recorded state satisfies
    ``phi >= -1e-10``.
    """
    x = np.asarray(x0, dtype=float).copy()
    spec = model.domain
    if x.shape != (spec.dim,):
        raise ValueError(f"x0 must have shape ({spec.dim},)")
    if float(spec.phi(x)) < -1e-10:
        raise ValueError("x0 must lie in the closed domain")
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    steps = ceil(T / dt)
    gen = stream(seed)
    out = np.empty((steps + 1, spec.dim))
    out[0] = x
    sqdt = sqrt(dt)
    for k in range(steps):
        hval = max(float(spec.h(x)), 0.0)
        move = np.asarray(model.drift(x), dtype=float) * dt + sqrt(hval) * (
            model.sigma @ gen.standard_normal(spec.dim)
        ) * sqdt
        prop = x + move
        if float(spec.phi(prop)) < 0.0:
            lo, hi = 0.0, 1.0
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if float(spec.phi(x + mid * move)) >= 0.0:
                    lo = mid
                else:
                    hi = mid
            prop = x + lo * move
            if float(spec.phi(prop)) < -1e-10:
                raise BallSdeError(
                    f"step {k}: backtracking failed to reach the domain "
                    f"(phi = {float(spec.phi(prop)):.3g})"
                )
        x = prop
        out[k + 1] = x
    return out
