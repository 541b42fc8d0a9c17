"""Frequency thresholds above which no nontrivial solution exists (``1 < p < 5``).

The pointwise lower-bound function is::

    g(t) = omega t^2 + c4 t^4 + c6 t^6 - lambda |t|^{p+1}

with regime coefficients ``(c4, c6) = (3q, q mu)`` for ``q < 1/3``,
``(1, q mu)`` for ``1/3 <= q < 2`` and ``(1, 2 mu)`` for ``q >= 2``.
Positivity of ``g`` for ``t != 0`` rules out solutions.  Two thresholds are
reported: the least ``omega`` doing so (``omega_sharp``) and the explicit
Young-inequality certificate (``omega_sufficient``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .energy import Params

REGIMES = ("q<1/3", "1/3<=q<2", "q>=2")
# exp() overflows just above this
_LOG_MAX = 709.0


def _check_p(p: float) -> None:
    if not (1.0 < p < 5.0):
        raise ValueError(f"thresholds need 1 < p < 5, got {p}")


def regime_of(q: float) -> int:
    """Index into :data:`REGIMES`."""
    if q < 1.0 / 3.0:
        return 0
    return 1 if q < 2.0 else 2


def regime_coefficients(params: Params) -> tuple[float, float]:
    """``(c4, c6)``: the quartic and sextic coefficients of ``g``."""
    q, mu = params.q, params.mu
    k = regime_of(q)
    if k == 0:
        return 3.0 * q, q * mu
    if k == 1:
        return 1.0, q * mu
    return 1.0, 2.0 * mu


def g_pointwise(t, omega: float, params: Params):
    """Evaluate ``g`` (scalar or array ``t``)."""
    _check_p(params.p)
    c4, c6 = regime_coefficients(params)
    t = np.asarray(t, dtype=float)
    t2 = t * t
    val = t2 * (omega + c4 * t2 + c6 * t2 * t2) - params.lam * np.abs(t) ** (params.p + 1.0)
    return float(val) if val.ndim == 0 else val


def deficit(t, params: Params):
    """``lambda t^{p-1} - c4 t^2 - c6 t^4``; ``g(t) = t^2 (omega - deficit(t))``."""
    c4, c6 = regime_coefficients(params)
    t = np.abs(np.asarray(t, dtype=float))
    t2 = t * t
    return params.lam * t ** (params.p - 1.0) - c4 * t2 - c6 * t2 * t2


def _deficit_peak(params: Params) -> float | None:
    """``log s`` (``s = t^2``) at the interior local maximum of the deficit, if any.

    The stationarity condition is
    ``k(s) = (p-1) lambda s^{(p-3)/2} - 2 c4 - 4 c6 s = 0``.  For ``p < 3``
    ``k`` decreases from ``+inf``; for ``3 < p < 5`` it is concave and the
    maximum of the deficit sits at its larger root.
    """
    p, lam = params.p, params.lam
    c4, c6 = regime_coefficients(params)
    if p == 3.0:
        if lam <= c4:
            return None
        return math.log((lam - c4) / (2.0 * c6))

    beta = 0.5 * (p - 3.0)
    la = math.log((p - 1.0) * lam)
    l2c4, l4c6 = math.log(2.0 * c4), math.log(4.0 * c6)

    def k(x):
        # same sign as k(e^x), without overflow
        return la + beta * x - float(np.logaddexp(l2c4, l4c6 + x))

    if p < 3.0:
        lo, hi = -1.0, 1.0
        while k(lo) <= 0:
            lo *= 2.0
        while k(hi) >= 0:
            hi *= 2.0
    else:
        # concave k: its maximum is where (p-1) lambda beta s^{beta-1} = 4 c6
        xm = (l4c6 - math.log((p - 1.0) * lam * beta)) / (beta - 1.0)
        if k(xm) <= 0:
            return None
        lo, hi = xm, xm + 1.0
        while k(hi) >= 0:
            hi = xm + 2.0 * (hi - xm)
    return brentq(k, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def _peak_value(x: float, params: Params) -> float:
    """Deficit at a stationary point ``s = e^x``.

    Stationarity turns ``lambda s^{(p-1)/2}`` into ``(2 c4 s + 4 c6 s^2)/(p-1)``,
    so the peak is ``s (c4 (3-p) + c6 (5-p) s) / (p-1)``; evaluated in logs
    when ``s`` is huge (``p`` close to 5).
    """
    p = params.p
    c4, c6 = regime_coefficients(params)
    if p == 3.0:
        return float(deficit(math.exp(0.5 * x), params))
    if x < 300.0:
        s = math.exp(x)
        return s * (c4 * (3.0 - p) + c6 * (5.0 - p) * s) / (p - 1.0)
    # c6 s^2 dominates by a factor >= e^300
    logv = 2.0 * x + math.log(c6 * (5.0 - p) / (p - 1.0))
    return math.inf if logv > _LOG_MAX else math.exp(logv)


@dataclass(frozen=True)
class ThresholdResult:
    regime: str
    omega_sharp: float
    omega_sufficient: float
    t_star: float
    params: Params
    derived_by_analogy: bool = False
    # a threshold beyond the double range is reported as inf (null in JSON)
    sufficient_overflow: bool = False
    sharp_overflow: bool = False

    def to_dict(self) -> dict:
        suff = self.omega_sufficient
        return {
            "regime": self.regime,
            "omega_sharp": self.omega_sharp if math.isfinite(self.omega_sharp) else None,
            "omega_sufficient": suff if math.isfinite(suff) else None,
            "t_star": self.t_star,
            "params": {k: v for k, v in self.params.as_dict().items() if k != "omega"},
            "derived_by_analogy": self.derived_by_analogy,
            "sufficient_overflow": self.sufficient_overflow,
            "sharp_overflow": self.sharp_overflow,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def sharp_threshold(params: Params) -> ThresholdResult:
    """Least ``omega`` with ``g(t) > 0`` for all ``t != 0``.

    ``omega_sharp = max(0, sup_t deficit(t))``; ``t_star`` is the interior
    maximiser of the deficit (0 when the deficit is decreasing on ``t > 0``).
    ``params.omega`` is ignored.
    """
    _check_p(params.p)
    x = _deficit_peak(params)
    if x is None:
        t, peak = 0.0, 0.0
    else:
        t, peak = math.exp(0.5 * min(x, 2.0 * _LOG_MAX)), _peak_value(x, params)
    suff, overflow = _sufficient(params)
    k = regime_of(params.q)
    return ThresholdResult(
        regime=REGIMES[k],
        omega_sharp=max(0.0, peak),
        omega_sufficient=suff,
        t_star=float(t),
        params=params,
        derived_by_analogy=k != 0,
        sufficient_overflow=overflow,
        sharp_overflow=math.isinf(peak),
    )


def _sufficient(params: Params) -> tuple[float, bool]:
    p, lam = params.p, params.lam
    _, c6 = regime_coefficients(params)
    e1 = 4.0 / (5.0 - p)
    e2 = (p - 1.0) / (5.0 - p)
    logv = (
        math.log((5.0 - p) / 8.0)
        + e1 * math.log((p + 1.0) * lam)
        + e2 * math.log((p - 1.0) / (24.0 * c6))
    )
    if logv > _LOG_MAX:
        return math.inf, True
    return math.exp(logv), False


def sufficient_threshold(params: Params) -> float:
    """Young-inequality certificate; ``inf`` if it overflows a double."""
    _check_p(params.p)
    return _sufficient(params)[0]


@dataclass
class SweepTable:
    axis: str
    values: list[float]
    omega_sharp: list[float]
    omega_sufficient: list[float]
    t_star: list[float]
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(bool(c["passed"]) for c in self.checks.values())

    def rows(self):
        return list(zip(self.values, self.omega_sharp, self.omega_sufficient, self.t_star))


def mu_free_bound(params: Params) -> float:
    """``sup_t (lambda t^{p-1} - c4 t^2)`` for ``1 < p < 3``: a bound on ``omega_sharp`` for every ``mu``."""
    p, lam = params.p, params.lam
    if not (1.0 < p < 3.0):
        raise ValueError("the mu-free bound needs 1 < p < 3")
    c4, _ = regime_coefficients(params)
    t = ((p - 1.0) * lam / (2.0 * c4)) ** (1.0 / (3.0 - p))
    return lam * t ** (p - 1.0) - c4 * t * t


def monotonicity_sweep(axis: str, params: Params, values, rtol: float = 1e-12) -> SweepTable:
    """Thresholds along ``q`` or ``mu``, with the monotonicity checks attached.

    ``omega_sharp`` must not increase along the (sorted, positive) values.
    For ``1 < p < 3`` and ``axis='mu'`` every entry must also stay below the
    ``mu``-free bound.  Failures are recorded in ``checks``, not raised.
    """
    if axis not in ("q", "mu"):
        raise ValueError(f"axis must be 'q' or 'mu', got {axis!r}")
    vals = [float(v) for v in values]
    if any(v <= 0 for v in vals) or any(b < a for a, b in zip(vals, vals[1:])):
        raise ValueError("sweep values must be positive and sorted")
    sharp, suff, ts = [], [], []
    for v in vals:
        pr = Params(
            omega=params.omega, mu=v if axis == "mu" else params.mu,
            q=v if axis == "q" else params.q, lam=params.lam, p=params.p,
        )
        res = sharp_threshold(pr)
        sharp.append(res.omega_sharp)
        suff.append(res.omega_sufficient)
        ts.append(res.t_star)
    bad = [
        i + 1 for i in range(len(sharp) - 1)
        if sharp[i + 1] > sharp[i] + rtol * max(abs(sharp[i]), 1.0)
    ]
    checks = {"nonincreasing": {"passed": not bad, "violations": bad}}
    if axis == "mu" and 1.0 < params.p < 3.0:
        bounds = []
        for v in vals:
            pr = Params(omega=params.omega, mu=v, q=params.q, lam=params.lam, p=params.p)
            bounds.append(mu_free_bound(pr))
        over = [i for i, (s, b) in enumerate(zip(sharp, bounds)) if s > b * (1 + rtol) + rtol]
        checks["bounded_in_mu"] = {"passed": not over, "violations": over, "bound": max(bounds)}
    return SweepTable(axis, vals, sharp, suff, ts, checks)
