"""Scaling ``u_t(x) = t^alpha u(t x)`` and projection onto ``{Gamma = 0}``.

Along the scaling path every block is a pure power of ``t``::

    I(u_t) = t^{2a} A/2 + t^{2a-2} omega B/2 + t^{4a} mu C + t^{6a-4} q D/2
             + t^{8a-4} q mu E/4 - t^{(p+1)a-2} lambda F/(p+1)

so the path, its derivative and the reduced function ``g`` are evaluated
from a single :class:`FunctionalBreakdown` without re-quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .energy import FunctionalBreakdown, Params, breakdown, check_alpha
from .radial_grid import RadialFunction, h1_norm

ZERO_FLOOR = 1e-12
MAX_DOUBLINGS = 60


def default_alpha(p: float) -> float:
    """Midpoint of the admissible window for ``5 < p < 7``; 2 for ``p >= 7``."""
    if p >= 7.0:
        return 2.0
    if p > 5.0:
        return 0.5 * (1.0 + 2.0 / (7.0 - p))
    raise ValueError(f"no admissible alpha for p = {p} <= 5")


@dataclass(frozen=True)
class ScalingConfig:
    alpha: float
    p: float

    def __post_init__(self):
        check_alpha(self.alpha, self.p)

    @classmethod
    def default(cls, p: float) -> "ScalingConfig":
        return cls(default_alpha(p), p)


def scale(u: RadialFunction, t: float, alpha: float) -> RadialFunction:
    """``t^alpha u(t r)`` resampled on the same grid (zero beyond ``R``)."""
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"scale factor must be positive, got {t}")
    if t == 1.0:
        return u
    r = u.grid.nodes
    x = t * r
    inside = x <= u.grid.R
    out = np.zeros_like(r)
    # underflowed tails give zero slopes, which PCHIP's harmonic mean handles via inf
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        out[inside] = PchipInterpolator(r, u.values, extrapolate=False)(x[inside])
    return RadialFunction(u.grid, t**alpha * out)


def path_value(bd: FunctionalBreakdown, t: float, alpha: float) -> float:
    """``I(u_t)`` from the blocks of ``u``."""
    pr = bd.params
    a = alpha
    return (
        t ** (2 * a) * bd.A / 2.0
        + t ** (2 * a - 2) * pr.omega * bd.B / 2.0
        + t ** (4 * a) * pr.mu * bd.C
        + t ** (6 * a - 4) * pr.q * bd.D / 2.0
        + t ** (8 * a - 4) * pr.q * pr.mu * bd.E / 4.0
        - t ** ((pr.p + 1) * a - 2) * pr.lam * bd.F / (pr.p + 1.0)
    )


def path_derivative(bd: FunctionalBreakdown, t: float, alpha: float) -> float:
    """``d/dt I(u_t)``."""
    return t ** (8 * alpha - 5) * g_value(bd, t, alpha)


def _g_log_parts(bd: FunctionalBreakdown, t: float, alpha: float) -> tuple[float, float]:
    """Logs of the positive and negative parts of ``g``; safe for large ``alpha``."""
    pr = bd.params
    a = alpha
    p = pr.p
    coef = np.array([
        a * bd.A,
        (a - 1) * pr.omega * bd.B,
        4 * a * pr.mu * bd.C,
        (3 * a - 2) * pr.q * bd.D,
        (2 * a - 1) * pr.q * pr.mu * bd.E,
    ])
    expo = np.array([4 - 6 * a, 2 - 6 * a, 4 - 4 * a, -2 * a, 0.0])
    lt = math.log(t)
    with np.errstate(divide="ignore"):
        pos = float(np.logaddexp.reduce(np.log(coef) + expo * lt))
        neg = math.log(((p + 1) * a - 2) * pr.lam * bd.F / (p + 1)) if bd.F > 0 else -math.inf
    return pos, neg + ((p - 7) * a + 2) * lt


def g_value(bd: FunctionalBreakdown, t: float, alpha: float) -> float:
    """``t^{5-8a} d/dt I(u_t)``, strictly decreasing in ``t`` for admissible ``a``.

    Terms beyond the double range come out as ``+-inf``.
    """
    pos, neg = _g_log_parts(bd, t, alpha)
    if pos == neg:
        return 0.0
    big, sign = (pos, 1.0) if pos > neg else (neg, -1.0)
    small = min(pos, neg)
    # exp(big) - exp(small) = exp(big) * (1 - exp(small - big))
    with np.errstate(over="ignore"):
        return sign * float(np.exp(big)) * -math.expm1(small - big)


def _bracket_root(fn, t0: float = 1.0) -> tuple[float, float]:
    """Expand by doubling/halving from ``t0`` until ``fn`` changes sign (``+`` then ``-``)."""
    lo = hi = t0
    if fn(t0) > 0:
        for _ in range(MAX_DOUBLINGS):
            hi *= 2.0
            if fn(hi) <= 0:
                return hi / 2.0, hi
    else:
        for _ in range(MAX_DOUBLINGS):
            lo *= 0.5
            if fn(lo) > 0:
                return lo, lo * 2.0
    raise RuntimeError("no sign change of g within 60 doublings (degenerate input?)")


def _bisect(fn, lo: float, hi: float, rtol: float = 1e-12) -> float:
    """Geometric bisection for a ``+ -> -`` sign change."""
    while hi - lo > rtol * hi:
        mid = math.sqrt(lo * hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def fibre_root(bd: FunctionalBreakdown, alpha: float) -> float:
    """Unique zero of ``g`` (the maximiser of ``t -> I(u_t)``)."""
    def fn(t):
        pos, neg = _g_log_parts(bd, t, alpha)
        return pos - neg

    lo, hi = _bracket_root(fn)
    return _bisect(fn, lo, hi)


@dataclass(frozen=True)
class Projection:
    t_star: float
    u_star: RadialFunction
    breakdown: FunctionalBreakdown
    t_closed_form: float
    # False when the discrete Gamma had no sign change near the closed-form
    # root (rescaled profile unresolved by the grid); t_star is then t_closed_form
    polished: bool = True


def project_to_M(
    u: RadialFunction,
    params: Params,
    alpha: float,
    polish: bool = True,
    bd: FunctionalBreakdown | None = None,
) -> Projection:
    """Rescale ``u`` onto the manifold ``Gamma = 0``.

    The root of the closed-form ``g`` is found first.  Resampling perturbs the
    blocks at the interpolation-error level, so with ``polish`` the scale is
    then refined on the discrete ``t -> Gamma(scale(u, t))``, which makes
    ``Gamma(u_star)`` vanish to round-off and the projection idempotent.
    """
    check_alpha(alpha, params.p)
    if h1_norm(u) < ZERO_FLOOR:
        raise ValueError("cannot project the zero function")
    if bd is None:
        bd = breakdown(u, params)
    t0 = fibre_root(bd, alpha)
    t_star, ok = t0, True
    if polish:
        t_star, ok = _polish(u, params, alpha, t0)
    u_star = scale(u, t_star, alpha)
    return Projection(t_star, u_star, breakdown(u_star, params), t0, ok)


def _polish(u: RadialFunction, params: Params, alpha: float, t0: float) -> tuple[float, bool]:
    def gam(t):
        return breakdown(scale(u, t, alpha), params).gamma(alpha)

    bd1 = breakdown(u, params)
    g1 = bd1.gamma(alpha)
    # already on the manifold to round-off: resampling at t != 1 would only add
    # interpolation error and move the discrete root away from 1
    if abs(g1) <= 64 * np.finfo(float).eps * bd1.gamma_scale(alpha):
        return 1.0, True
    if abs(t0 - 1.0) < 1e-6:
        # already on the manifold up to resampling noise: bracket around 1
        lo, hi = (1.0, 1.0 + 1e-6) if g1 > 0 else (1.0 - 1e-6, 1.0)
        flo, fhi = (g1, gam(hi)) if g1 > 0 else (gam(lo), g1)
    else:
        lo, hi = t0 * (1 - 1e-3), t0 * (1 + 1e-3)
        flo, fhi = gam(lo), gam(hi)
    width = hi - lo
    for _ in range(40):
        if flo > 0 >= fhi:
            break
        width *= 2.0
        if flo <= 0:
            hi, fhi = lo, flo
            lo = max(lo - width, 0.5 * lo)
            flo = gam(lo)
        else:
            lo, flo = hi, fhi
            hi = hi + width
            fhi = gam(hi)
    else:
        return t0, False
    if fhi == 0.0:
        return hi, True
    return brentq(gam, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=200), True


def sign_changes(values) -> int:
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
