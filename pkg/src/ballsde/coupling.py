"""Identical-noise coupling of two ball-model paths and its contraction bounds.

Two copies X, X~ of the same model are driven by the *same* Brownian
increments from different starting points.  The synchronized distance

    W = (Y^p - Y~^p)^2 + |X - X~|^2,      Y = 1 - |X|^2,

with a power ``p`` in (1/2, 1), is the quantity whose expected drift the
explicit-constant machinery controls inside a boundary shell
``{Y v Y~ <= eps}``.  The drift of W splits into five named pieces
(:func:`singular_terms`): I1 and I2 are the two halves of the Y^p-drift
difference, I3 the quadratic variation of Y^p - Y~^p, I4 the drift part of
|X - X~|^2 and I5 its quadratic variation.  The product

    Z = (Y^p - Y~^p)(Y~^{p-1} - Y^{p-1}) >= 0

is the singular coupling term everything is measured against.

:func:`coupling_constants` assembles fully explicit constants from Lipschitz
and supremum data of the coefficients and returns a certified shell: if the
drift-rate coefficient ``k_hat`` is nonpositive on the shell, then pointwise

    2 (Y^p - Y~^p) I1 + I3 + I5  <=  k_hat * Z + c_hat * |X - X~|^2,

so the singular part of dW is dominated by the regular distance — the
mechanism behind uniqueness above the drift threshold ``g/gamma^2 > sqrt(2)-1``
at the boundary.  Below the threshold no shell is certified and
``mechanism_active`` is False; simulation then runs in exploratory mode.

:func:`run_coupled` and :func:`run_coupled_batch` integrate the coupled pair
and report the per-step terms plus shell-limited time integrals;
:func:`threshold_sweep` scans the drift constant across the critical value
and writes one CSV row per level.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import ceil, isfinite, sqrt

import numpy as np
from numpy.polynomial import Polynomial

from .ball import step
from .coeffs import (
    BallModel,
    CoeffFn,
    epsilon_for_p,
    optimal_exponent,
    required_ratio,
)
from .errors import InfeasibleError
from .rng import stream

__all__ = [
    "RATIO_THRESHOLD",
    "critical_drift_level",
    "optimal_p",
    "SingularTerms",
    "singular_terms",
    "CouplingConstants",
    "coupling_constants",
    "z_rate_bound",
    "CoupledDiagnostics",
    "run_coupled",
    "run_coupled_batch",
    "SweepRow",
    "threshold_sweep",
    "write_sweep_csv",
]

#: Boundary drift-to-diffusion ratio above which the coupling contracts.
RATIO_THRESHOLD = sqrt(2.0) - 1.0


def critical_drift_level(gamma_value: float) -> float:
    """Critical constant drift ``gamma^2 (sqrt(2) - 1)`` for constant gamma."""
    g = float(gamma_value)
    if g <= 0.0:
        raise ValueError("gamma_value must be positive")
    return g * g * RATIO_THRESHOLD


def optimal_p() -> float:
    """The power minimizing the required boundary ratio; equals 1 - sqrt(2)/4."""
    return optimal_exponent()[0]


# ---------------------------------------------------------------------------
# pointwise terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularTerms:
    """The five drift/variation pieces of W at one state pair, plus Z and W."""

    i1: float
    i2: float
    i3: float
    i4: float
    i5: float
    z: float
    w: float


def singular_terms(model: BallModel, p: float, x, x_tilde) -> SingularTerms:
    """Evaluate I1..I5, Z and W at a pair of interior states.

    Requires both gaps strictly positive: Y^{p-1} is singular on the sphere
    and the caller decides how a genuine boundary touch is handled.
    """
    if not 0.5 < p < 1.0:
        raise ValueError(f"power p must lie in (1/2, 1); got {p}")
    x = np.asarray(x, dtype=float)
    xt = np.asarray(x_tilde, dtype=float)
    if x.shape != (model.n,) or xt.shape != (model.n,):
        raise ValueError(f"states must have shape ({model.n},)")
    y = 1.0 - float(x @ x)
    yt = 1.0 - float(xt @ xt)
    if y <= 0.0 or yt <= 0.0:
        raise ValueError("both states must lie strictly inside the ball")
    u, ut = sqrt(float(x @ x)), sqrt(float(xt @ xt))
    gam, gamt = model.gamma(u), model.gamma(ut)
    gsq, gsqt = gam * gam, gamt * gamt
    gg, ggt = model.g(u), model.g(ut)
    big_g = gg + (p - 1.0) * gsq
    big_gt = ggt + (p - 1.0) * gsqt
    yp, ytp = y**p, yt**p
    i1 = 2.0 * p * (u * u * y ** (p - 1.0) * big_g - ut * ut * yt ** (p - 1.0) * big_gt)
    i2 = -model.n * p * (gsq * yp - gsqt * ytp)
    i3 = 4.0 * p * p * float(
        np.sum((gam * y ** (p - 0.5) * x - gamt * yt ** (p - 0.5) * xt) ** 2)
    )
    i4 = -2.0 * float(np.dot(x - xt, gg * x - ggt * xt))
    i5 = model.n * (sqrt(y) * gam - sqrt(yt) * gamt) ** 2
    z = (yp - ytp) * (yt ** (p - 1.0) - y ** (p - 1.0))
    w = (yp - ytp) ** 2 + float(np.sum((x - xt) ** 2))
    return SingularTerms(i1=i1, i2=i2, i3=i3, i4=i4, i5=i5, z=z, w=w)


# ---------------------------------------------------------------------------
# explicit constants
# ---------------------------------------------------------------------------


def _common_breaks(*fns: CoeffFn) -> np.ndarray:
    knots = sorted({k for f in fns for k in f.knots})
    return np.asarray(knots)


def _sup_abs_poly_on(poly: Polynomial, a: float, b: float) -> float:
    """max |poly| over [a, b] via endpoint and stationary-point evaluation."""
    candidates = [a, b]
    der = poly.deriv()
    if der.degree() >= 1:
        for root in der.roots():
            if abs(root.imag) < 1e-12 and a < root.real < b:
                candidates.append(float(root.real))
    return max(abs(float(poly(c))) for c in candidates)


def _sup_poly_on(poly: Polynomial, a: float, b: float) -> float:
    candidates = [a, b]
    der = poly.deriv()
    if der.degree() >= 1:
        for root in der.roots():
            if abs(root.imag) < 1e-12 and a < root.real < b:
                candidates.append(float(root.real))
    return max(float(poly(c)) for c in candidates)


def _lip_u2_bigg(model: BallModel, p: float) -> float:
    """Lipschitz constant of ``u^2 (g(u) + (p-1) gamma^2(u))`` on [0, 1]."""
    breaks = _common_breaks(model.gamma, model.g)
    best = 0.0
    u_sq = Polynomial([0.0, 0.0, 1.0])
    for a, b in zip(breaks, breaks[1:]):
        mid = 0.5 * (a + b)
        _, _, ag, bg = model.g.piece_at(mid)
        _, _, am, bm = model.gamma.piece_at(mid)
        big_g = Polynomial([ag, bg]) + (p - 1.0) * Polynomial([am, bm]) ** 2
        best = max(best, _sup_abs_poly_on((u_sq * big_g).deriv(), a, b))
    return best


def _lip_u_gamma(model: BallModel) -> float:
    """Lipschitz constant of ``u gamma(u)``: the derivative is affine per piece."""
    breaks = _common_breaks(model.gamma)
    best = 0.0
    for a, b in zip(breaks, breaks[1:]):
        _, _, am, bm = model.gamma.piece_at(0.5 * (a + b))
        der = (Polynomial([0.0, 1.0]) * Polynomial([am, bm])).deriv()
        best = max(best, abs(float(der(a))), abs(float(der(b))))
    return best


def _sup_u_gamma(model: BallModel) -> float:
    breaks = _common_breaks(model.gamma)
    best = 0.0
    for a, b in zip(breaks, breaks[1:]):
        _, _, am, bm = model.gamma.piece_at(0.5 * (a + b))
        best = max(best, _sup_poly_on(Polynomial([0.0, 1.0]) * Polynomial([am, bm]), a, b))
    return best


def _shell_grid(model: BallModel, u_lo: float) -> np.ndarray:
    grid = np.linspace(u_lo, 1.0, 1025)
    inner = [k for k in (*model.gamma.knots, *model.g.knots) if u_lo < k < 1.0]
    if inner:
        grid = np.union1d(grid, np.asarray(inner))
    return grid


@dataclass(frozen=True)
class CouplingConstants:
    """Explicit constants of the shell contraction estimate at power ``p``.

    ``k_hat`` multiplies Z and must be nonpositive for the certificate;
    ``c_hat`` multiplies |X - X~|^2.  ``eps`` is the certified shell height
    when ``mechanism_active`` (otherwise a fallback shell used only to define
    the exploratory stopping time).
    """

    p: float
    eps: float
    c31: float
    c33: float
    c34_xx: float
    c34_eps: float
    c5_z: float
    c5_xx: float
    k_hat: float
    c_hat: float
    mechanism_active: bool


def _k_hat(model: BallModel, p: float, eps: float, c31: float, c34_eps: float, c5_z: float) -> float:
    u_lo = sqrt(max(0.0, 1.0 - eps))
    grid = _shell_grid(model, u_lo)
    gam_sq = model.gamma(grid) ** 2
    ratio = model.g(grid) / gam_sq
    lead = float(np.max(4.0 * p * grid**2 * gam_sq * (required_ratio(p) - ratio)))
    return lead + (2.0 * c31 + c34_eps) * eps + c5_z * eps ** (2.0 - 2.0 * p)


def coupling_constants(
    model: BallModel, p: float | None = None, eps: float | None = None
) -> CouplingConstants:
    """Assemble the explicit constants, certifying the largest shell possible.

    With ``eps`` unspecified, bisects for the largest shell height with
    ``k_hat <= 0`` (capped by the sign-condition width of ``p``).  If no
    positive height is certified — the model is at or below the coupling
    threshold — the constants are still reported on a fallback shell with
    ``mechanism_active = False``.
    """
    if p is None:
        p = optimal_exponent()[0]
    p = float(p)
    if not 0.5 < p < 1.0:
        raise ValueError(f"power p must lie in (1/2, 1); got {p}")
    gamma_sup = model.gamma.max_value()
    lip_gamma = model.gamma.lipschitz_constant()
    lip_ug = _lip_u_gamma(model)
    sup_ug = _sup_u_gamma(model)
    c31 = sqrt(2.0) * p * _lip_u2_bigg(model, p) / (1.0 - p)
    c33 = max(1.0, (p - 0.5) / (p * (1.0 - p)))
    c34_eps = 8.0 * p * p * sup_ug * lip_ug * (sqrt(2.0) / 2.0) * c33
    c5_z = 2.0 * model.n * gamma_sup**2 / (4.0 * p * (1.0 - p))

    def build(eps_val: float, active: bool) -> CouplingConstants:
        c34_xx = 4.0 * p * p * (
            (gamma_sup + lip_gamma) ** 2 + lip_ug**2 * eps_val ** (2.0 * p - 1.0)
        )
        c5_xx = 2.0 * model.n * eps_val * lip_gamma**2
        return CouplingConstants(
            p=p,
            eps=eps_val,
            c31=c31,
            c33=c33,
            c34_xx=c34_xx,
            c34_eps=c34_eps,
            c5_z=c5_z,
            c5_xx=c5_xx,
            k_hat=_k_hat(model, p, eps_val, c31, c34_eps, c5_z),
            c_hat=c34_xx + c5_xx,
            mechanism_active=active,
        )

    if eps is not None:
        eps = float(eps)
        if not 0.0 < eps <= 0.5:
            raise ValueError("eps must lie in (0, 1/2]")
        built = build(eps, active=True)
        if built.k_hat > 0.0:
            built = build(eps, active=False)
        return built

    try:
        cap = epsilon_for_p(model, p)
    except InfeasibleError:
        cap = 0.5
    khat = lambda e: _k_hat(model, p, e, c31, c34_eps, c5_z)
    if khat(cap) <= 0.0:
        return build(cap, active=True)
    lo = 1e-12
    if khat(lo) > 0.0:
        # no certified shell at any height: at/below threshold
        return build(cap, active=False)
    hi = cap
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if khat(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return build(lo, active=True)


def z_rate_bound(model: BallModel, p: float, eps: float, C: float) -> float:
    """Simplified shell rate bound with a caller-supplied aggregate constant:

    ``4 p (1-eps) inf_shell(gamma^2) [ (sqrt(2)-1) - inf_shell(g/gamma^2) ]
    + C (eps + eps^{2-p})``.

    A cruder cousin of ``k_hat`` that separates the structural part from
    every coefficient-dependent correction (all swept into ``C``); useful
    for quick threshold reasoning at a glance.
    """
    if not 0.5 < p < 1.0:
        raise ValueError(f"power p must lie in (1/2, 1); got {p}")
    if not 0.0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if C < 0.0:
        raise ValueError("C must be nonnegative")
    u_lo = sqrt(1.0 - eps)
    grid = _shell_grid(model, u_lo)
    gam_sq = model.gamma(grid) ** 2
    inf_gam_sq = float(np.min(gam_sq))
    inf_ratio = float(np.min(model.g(grid) / gam_sq))
    lead = 4.0 * p * (1.0 - eps) * inf_gam_sq * (RATIO_THRESHOLD - inf_ratio)
    return lead + C * (eps + eps ** (2.0 - p))


# ---------------------------------------------------------------------------
# coupled simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoupledDiagnostics:
    """Per-step record of one coupled pair plus shell-limited time integrals.

    Arrays have length steps+1 (terms at each recorded state; ``i1`` and
    ``z`` are NaN at steps where a path sits exactly on the sphere — their
    Y^{p-1} factor has no finite value there; everything else extends
    continuously).
    ``tau_index`` is the first step index at which either gap exceeds
    ``eps`` (len(times) if never).  Integrals are left-endpoint Riemann sums
    over in-shell steps with both gaps positive; ``singular_steps`` counts
    in-shell steps excluded for a zero gap.
    """

    p: float
    eps: float
    dt: float
    seed: int
    k_hat: float
    c_hat: float
    mechanism_active: bool
    times: np.ndarray
    w: np.ndarray
    z: np.ndarray
    i1: np.ndarray
    i2: np.ndarray
    i3: np.ndarray
    i4: np.ndarray
    i5: np.ndarray
    gap: np.ndarray
    gap_tilde: np.ndarray
    dx_sq: np.ndarray
    tau_index: int
    singular_integral: float
    z_integral: float
    dx_sq_integral: float
    singular_steps: int
    final_dx: float


def _pair_terms(model: BallModel, p: float, x: np.ndarray, xt: np.ndarray):
    """Vectorized I-terms over a batch of state pairs.

    Every term except I1 and Z extends continuously to a zero gap (the
    exponents p, p - 1/2 and 1/2 are all positive); those two carry the
    singular factor Y^{p-1} and are reported as NaN when either gap is 0.
    """
    y = np.maximum(0.0, 1.0 - np.sum(x * x, axis=-1))
    yt = np.maximum(0.0, 1.0 - np.sum(xt * xt, axis=-1))
    ok = (y > 0.0) & (yt > 0.0)
    u = np.sqrt(np.sum(x * x, axis=-1))
    ut = np.sqrt(np.sum(xt * xt, axis=-1))
    gam, gamt = np.asarray(model.gamma(u)), np.asarray(model.gamma(ut))
    gsq, gsqt = gam * gam, gamt * gamt
    gg, ggt = np.asarray(model.g(u)), np.asarray(model.g(ut))
    big_g = gg + (p - 1.0) * gsq
    big_gt = ggt + (p - 1.0) * gsqt
    yp, ytp = y**p, yt**p
    ypm1 = np.where(y > 0.0, np.where(y > 0.0, y, 1.0) ** (p - 1.0), np.nan)
    ytpm1 = np.where(yt > 0.0, np.where(yt > 0.0, yt, 1.0) ** (p - 1.0), np.nan)
    i1 = 2.0 * p * (u * u * ypm1 * big_g - ut * ut * ytpm1 * big_gt)
    i2 = -model.n * p * (gsq * yp - gsqt * ytp)
    i3 = 4.0 * p * p * np.sum(
        (gam[..., None] * y[..., None] ** (p - 0.5) * x
         - gamt[..., None] * yt[..., None] ** (p - 0.5) * xt) ** 2,
        axis=-1,
    )
    i4 = -2.0 * np.sum((x - xt) * (gg[..., None] * x - ggt[..., None] * xt), axis=-1)
    i5 = model.n * (np.sqrt(y) * gam - np.sqrt(yt) * gamt) ** 2
    z = (yp - ytp) * (ytpm1 - ypm1)
    dx_sq = np.sum((x - xt) ** 2, axis=-1)
    w = (yp - ytp) ** 2 + dx_sq
    return (i1, i2, i3, i4, i5, z, w, y, yt, dx_sq, ok)


def run_coupled(
    model: BallModel,
    x0,
    x0_tilde,
    T: float,
    dt: float,
    seed: int,
    p: float | None = None,
    eps: float | None = None,
) -> CoupledDiagnostics:
    """Drive two copies with identical increments and record everything.

    ``p``/``eps`` default to the optimal power and the certified shell of
    :func:`coupling_constants`.  Identical starts stay identical forever
    (the scheme is a deterministic function of state and increment), so W
    is exactly zero along such a pair.
    """
    consts = coupling_constants(model, p=p, eps=eps)
    p, eps = consts.p, consts.eps
    x = np.asarray(x0, dtype=float).copy()
    xt = np.asarray(x0_tilde, dtype=float).copy()
    if x.shape != (model.n,) or xt.shape != (model.n,):
        raise ValueError(f"starting points must have shape ({model.n},)")
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    steps = ceil(T / dt)
    gen = stream(seed)
    shape = (steps + 1,)
    arrays = {name: np.empty(shape) for name in
              ("w", "z", "i1", "i2", "i3", "i4", "i5", "gap", "gap_tilde", "dx_sq")}
    tau_index = steps + 1
    singular = z_int = dx_int = 0.0
    singular_steps = 0
    in_shell = True
    sqdt = sqrt(dt)
    for k in range(steps + 1):
        i1, i2, i3, i4, i5, z, w, y, yt, dx_sq, ok = _pair_terms(
            model, p, x[None, :], xt[None, :]
        )
        for name, val in (("w", w), ("z", z), ("i1", i1), ("i2", i2), ("i3", i3),
                          ("i4", i4), ("i5", i5), ("gap", y), ("gap_tilde", yt),
                          ("dx_sq", dx_sq)):
            arrays[name][k] = val[0]
        if in_shell and max(y[0], yt[0]) > eps:
            in_shell = False
            tau_index = k
        if in_shell and k < steps:
            if ok[0]:
                yp_gap = y[0] ** p - yt[0] ** p
                singular += (2.0 * yp_gap * i1[0] + i3[0] + i5[0]) * dt
                z_int += z[0] * dt
                dx_int += dx_sq[0] * dt
            else:
                singular_steps += 1
        if k < steps:
            dB = gen.standard_normal(model.n) * sqdt
            x = step(model, x, dB, dt)
            xt = step(model, xt, dB, dt)
    return CoupledDiagnostics(
        p=p,
        eps=eps,
        dt=float(dt),
        seed=int(seed),
        k_hat=consts.k_hat,
        c_hat=consts.c_hat,
        mechanism_active=consts.mechanism_active,
        times=np.arange(steps + 1) * float(dt),
        tau_index=tau_index,
        singular_integral=singular,
        z_integral=z_int,
        dx_sq_integral=dx_int,
        singular_steps=singular_steps,
        final_dx=float(sqrt(arrays["dx_sq"][steps])),
        **arrays,
    )


@dataclass(frozen=True)
class CoupledBatch:
    """Shell-limited integrals and endpoint data per replica."""

    p: float
    eps: float
    k_hat: float
    c_hat: float
    mechanism_active: bool
    singular_integral: np.ndarray
    z_integral: np.ndarray
    dx_sq_integral: np.ndarray
    w_start: np.ndarray
    w_final: np.ndarray
    tau_fraction: np.ndarray
    singular_steps: np.ndarray


def run_coupled_batch(
    model: BallModel,
    x0,
    x0_tilde,
    T: float,
    dt: float,
    seed: int,
    replicas: int,
    p: float | None = None,
    eps: float | None = None,
) -> CoupledBatch:
    """Vectorized coupled pairs: each replica gets its own increments, the
    two copies within a replica share them.  Integrals accumulate until the
    replica's own shell exit and skip (counting) zero-gap steps."""
    consts = coupling_constants(model, p=p, eps=eps)
    p, eps = consts.p, consts.eps
    if replicas <= 0:
        raise ValueError("replicas must be positive")
    if T <= 0.0 or dt <= 0.0:
        raise ValueError("T and dt must be positive")
    R = int(replicas)
    x = np.broadcast_to(np.asarray(x0, dtype=float), (R, model.n)).copy()
    xt = np.broadcast_to(np.asarray(x0_tilde, dtype=float), (R, model.n)).copy()
    steps = ceil(T / dt)
    gen = stream(seed)
    singular = np.zeros(R)
    z_int = np.zeros(R)
    dx_int = np.zeros(R)
    sing_steps = np.zeros(R, dtype=np.int64)
    in_shell = np.ones(R, dtype=bool)
    tau_steps = np.full(R, steps, dtype=np.int64)
    w_start = w_final = None
    sqdt = sqrt(dt)
    for k in range(steps + 1):
        i1, i2, i3, i4, i5, z, w, y, yt, dx_sq, ok = _pair_terms(model, p, x, xt)
        if k == 0:
            w_start = w.copy()
        exiting = in_shell & (np.maximum(y, yt) > eps)
        tau_steps[exiting] = k
        in_shell &= ~exiting
        if k < steps:
            active = in_shell & ok
            lhs = 2.0 * (y**p - yt**p) * i1 + i3 + i5
            singular[active] += lhs[active] * dt
            z_int[active] += z[active] * dt
            dx_int[active] += dx_sq[active] * dt
            sing_steps[in_shell & ~ok] += 1
            dB = gen.standard_normal((R, model.n)) * sqdt
            x = step(model, x, dB, dt)
            xt = step(model, xt, dB, dt)
        else:
            w_final = w.copy()
    return CoupledBatch(
        p=p,
        eps=eps,
        k_hat=consts.k_hat,
        c_hat=consts.c_hat,
        mechanism_active=consts.mechanism_active,
        singular_integral=singular,
        z_integral=z_int,
        dx_sq_integral=dx_int,
        w_start=w_start,
        w_final=w_final,
        tau_fraction=tau_steps / float(steps),
        singular_steps=sing_steps,
    )


# ---------------------------------------------------------------------------
# threshold sweep
# ---------------------------------------------------------------------------

SWEEP_COLUMNS = (
    "c",
    "replicas",
    "median_ratio",
    "p95_ratio",
    "ineq_held_fraction",
    "p",
    "eps",
    "dt",
    "seed",
    "regime",
)


@dataclass(frozen=True)
class SweepRow:
    c: float
    replicas: int
    median_ratio: float
    p95_ratio: float
    ineq_held_fraction: float
    p: float
    eps: float
    dt: float
    seed: int
    regime: str


def _regime(c: float, gamma_value: float) -> str:
    crit = critical_drift_level(gamma_value)
    if abs(c - crit) <= 1e-12:
        return "at-threshold"
    return "above-threshold" if c > crit else "below-threshold-exploratory"


def threshold_sweep(
    levels,
    *,
    n: int = 2,
    gamma_value: float = sqrt(2.0),
    T: float = 0.5,
    dt: float = 1e-4,
    replicas: int = 200,
    seed: int = 0,
    slack: float = 1.05,
) -> list[SweepRow]:
    """Coupled-pair statistics for a range of constant drift levels ``c``.

    For each level: drive ``replicas`` coupled pairs from two nearby
    boundary-shell starts, report the median and 95th percentile of the
    endpoint contraction ratio W_T / W_0 and the fraction of replicas whose
    shell-limited singular integral is dominated by ``slack * c_hat`` times
    the |X - X~|^2 integral.  Rows at or below the critical level carry an
    explicit regime marker: there the constants certify nothing and the
    numbers are exploratory.
    """
    rows = []
    for idx, c in enumerate(levels):
        c = float(c)
        model = BallModel(n, 0.5, CoeffFn.constant(gamma_value), CoeffFn.constant(c))
        consts = coupling_constants(model)
        eps = consts.eps
        y0, y0t = eps / 2.0, eps / 4.0
        x0 = np.zeros(n)
        x0[0] = sqrt(1.0 - y0)
        x0t = np.zeros(n)
        x0t[0] = sqrt(1.0 - y0t)
        batch = run_coupled_batch(
            model, x0, x0t, T, dt, seed=seed + idx, replicas=replicas,
            p=consts.p, eps=eps,
        )
        ratio = batch.w_final / batch.w_start
        bound = slack * batch.c_hat * batch.dx_sq_integral
        held = float(np.mean(batch.singular_integral <= bound + 1e-15))
        rows.append(
            SweepRow(
                c=c,
                replicas=int(replicas),
                median_ratio=float(np.median(ratio)),
                p95_ratio=float(np.quantile(ratio, 0.95)),
                ineq_held_fraction=held,
                p=batch.p,
                eps=eps,
                dt=float(dt),
                seed=int(seed + idx),
                regime=_regime(c, gamma_value),
            )
        )
    return rows


def write_sweep_csv(rows, path) -> None:
    """One CSV row per drift level, fixed column order, stable formatting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    repr(row.c),
                    row.replicas,
                    repr(row.median_ratio),
                    repr(row.p95_ratio),
                    repr(row.ineq_held_fraction),
                    repr(row.p),
                    repr(row.eps),
                    repr(row.dt),
                    row.seed,
                    row.regime,
                ]
            )
