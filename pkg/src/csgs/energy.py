"""Energy functional, its Gateaux derivative, Nehari/Pohozaev values and Gamma.

The six building blocks are::

    A = int |grad u|^2        B = int u^2            C = int u^2 |grad u|^2
    D = int V1 u^2            E = int V1 u^4         F = int |u|^{p+1}

and ``I = (A + omega B)/2 + mu C + q D/2 + q mu E/4 - lambda F/(p+1)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from numpy.typing import NDArray

from .gauge_terms import D_gradient, E_gradient, compute_gauge, potential_V1
from .radial_grid import (
    TWO_PI,
    RadialFunction,
    cell_average,
    cell_gradient,
    gradient_transpose,
    integrate,
    integrate_cells,
)


@dataclass(frozen=True)
class Params:
    """Constants of the equation.

    ``oracle=True`` admits ``q = 0`` and/or ``mu = 0`` (the semilinear and
    ungauged limits used for cross-checks).
    """

    omega: float = 1.0
    mu: float = 1.0
    q: float = 1.0
    lam: float = 1.0
    p: float = 6.0
    oracle: bool = False

    def __post_init__(self):
        vals = dict(omega=self.omega, mu=self.mu, q=self.q, lam=self.lam, p=self.p)
        for k, v in vals.items():
            if not math.isfinite(v):
                raise ValueError(f"{k} must be finite, got {v}")
        if self.omega <= 0 or self.lam <= 0:
            raise ValueError("omega and lambda must be positive")
        if self.p <= 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        low = 0.0 if self.oracle else None
        for k in ("mu", "q"):
            v = vals[k]
            if low is None and v <= 0:
                raise ValueError(f"{k} must be positive (use oracle=True for the {k}=0 limit)")
            if low is not None and v < 0:
                raise ValueError(f"{k} must be non-negative")

    def as_dict(self) -> dict:
        d = {"omega": self.omega, "mu": self.mu, "q": self.q, "lambda": self.lam, "p": self.p}
        if self.oracle:
            d["oracle"] = True
        return d


def coupling_from_physical(e: float, kappa: float) -> float:
    """Gauge coupling ``q = e^4 / kappa^2``."""
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    return e**4 / kappa**2


def signed_power(u: NDArray, p: float) -> NDArray:
    """``|u|^{p-1} u`` for real ``p``."""
    a = np.abs(u)
    out = np.zeros_like(a)
    nz = a > 0
    out[nz] = np.sign(u[nz]) * np.exp(p * np.log(a[nz]))
    return out


def abs_power(u: NDArray, k: float) -> NDArray:
    a = np.abs(u)
    out = np.zeros_like(a)
    nz = a > 0
    out[nz] = np.exp(k * np.log(a[nz]))
    return out


@dataclass(frozen=True)
class FunctionalBreakdown:
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float
    I: float
    N: float
    P: float
    params: Params

    def gamma(self, alpha: float) -> float:
        """``alpha N - P``."""
        return alpha * self.N - self.P

    def gamma_direct(self, alpha: float) -> float:
        """Gamma from its own coefficient formula (independent of N and P)."""
        pr = self.params
        a = alpha
        return (
            a * self.A
            + (a - 1.0) * pr.omega * self.B
            + 4.0 * a * pr.mu * self.C
            + (3.0 * a - 2.0) * pr.q * self.D
            + (2.0 * a - 1.0) * pr.q * pr.mu * self.E
            - ((pr.p + 1.0) * a - 2.0) / (pr.p + 1.0) * pr.lam * self.F
        )

    def gamma_scale(self, alpha: float) -> float:
        """Sum of the absolute values of the terms of ``Gamma``; normalises residuals."""
        pr = self.params
        a = alpha
        return (
            a * abs(self.A)
            + abs(a - 1.0) * pr.omega * abs(self.B)
            + 4.0 * a * pr.mu * abs(self.C)
            + abs(3.0 * a - 2.0) * pr.q * abs(self.D)
            + abs(2.0 * a - 1.0) * pr.q * pr.mu * abs(self.E)
            + abs((pr.p + 1.0) * a - 2.0) / (pr.p + 1.0) * pr.lam * abs(self.F)
        )

    def recomposed_energy(self) -> float:
        pr = self.params
        return (
            0.5 * (self.A + pr.omega * self.B)
            + pr.mu * self.C
            + 0.5 * pr.q * self.D
            + 0.25 * pr.q * pr.mu * self.E
            - pr.lam * self.F / (pr.p + 1.0)
        )

    def scalars(self) -> dict[str, float]:
        return {k: v for k, v in asdict(self).items() if k != "params"}

    def to_json(self) -> str:
        return json.dumps(self.scalars())


def _blocks(u: RadialFunction, p: float):
    g = u.grid
    du = cell_gradient(u)
    u2 = u.values**2
    u2bar = cell_average(g, u2)
    V1 = potential_V1(u).values
    A = integrate_cells(g, du * du)
    B = integrate(u**2)
    C = integrate_cells(g, u2bar * du * du)
    D = TWO_PI * float(np.dot(g.weights, V1 * u2))
    E = TWO_PI * float(np.dot(g.weights, V1 * u2 * u2))
    F = TWO_PI * float(np.dot(g.weights, abs_power(u.values, p + 1.0)))
    return A, B, C, D, E, F


def breakdown(u: RadialFunction, params: Params) -> FunctionalBreakdown:
    """All six blocks plus ``I``, the Nehari value ``N`` and Pohozaev value ``P``."""
    A, B, C, D, E, F = _blocks(u, params.p)
    om, mu, q, lam, p = params.omega, params.mu, params.q, params.lam, params.p
    I = 0.5 * (A + om * B) + mu * C + 0.5 * q * D + 0.25 * q * mu * E - lam * F / (p + 1.0)
    # int (h^2/r^2)(3 + 2 mu u^2) u^2 = 3D + 2 mu E, and similarly for P
    N = A + 4.0 * mu * C + om * B - lam * F + q * (3.0 * D + 2.0 * mu * E)
    P = om * B - 2.0 * lam * F / (p + 1.0) + q * (2.0 * D + mu * E)
    return FunctionalBreakdown(A, B, C, D, E, F, I, N, P, params)


def energy(u: RadialFunction, params: Params) -> float:
    return breakdown(u, params).I


def energy_gradient(u: RadialFunction, params: Params) -> NDArray:
    """Nodal vector ``G`` with ``I'(u)[phi] = G . phi``.

    Term by term this is
    ``int (1 + 2 mu u^2) grad u . grad phi + 2 mu u |grad u|^2 phi + omega u phi
    - lambda |u|^{p-1} u phi + q V1 (1 + mu u^2) u phi + q V2 u phi``
    with the same stencils as :func:`breakdown`, so it is the exact derivative
    of the discrete energy.
    """
    g = u.grid
    om, mu, q, lam, p = params.omega, params.mu, params.q, params.lam, params.p
    uv = u.values
    du = cell_gradient(u)
    u2bar = cell_average(g, uv**2)
    G = gradient_transpose(g, (1.0 + 2.0 * mu * u2bar) * du)
    # 2 mu u |grad u|^2 phi, with u phi averaged onto cells like u^2 in C
    a = TWO_PI * g.cell_weights * mu * du * du
    G[:-1] += a * uv[:-1]
    G[1:] += a * uv[1:]
    G += TWO_PI * g.weights * (om * uv - lam * signed_power(uv, p))
    if q != 0.0:
        G += 0.5 * q * D_gradient(u)
        if mu != 0.0:
            G += 0.25 * q * mu * E_gradient(u)
    return G


def block_gradients(u: RadialFunction, p: float) -> dict[str, NDArray]:
    """Nodal gradients of the six blocks ``A .. F``."""
    g = u.grid
    uv = u.values
    du = cell_gradient(u)
    u2bar = cell_average(g, uv**2)
    gC = gradient_transpose(g, 2.0 * u2bar * du)
    a = TWO_PI * g.cell_weights * du * du
    gC[:-1] += a * uv[:-1]
    gC[1:] += a * uv[1:]
    return {
        "A": gradient_transpose(g, 2.0 * du),
        "B": TWO_PI * g.weights * 2.0 * uv,
        "C": gC,
        "D": D_gradient(u),
        "E": E_gradient(u),
        "F": TWO_PI * g.weights * (p + 1.0) * signed_power(uv, p),
    }


def gamma_gradient(u: RadialFunction, params: Params, alpha: float) -> NDArray:
    """Nodal gradient of ``Gamma`` (the normal of the constraint manifold)."""
    b = block_gradients(u, params.p)
    a, pr = alpha, params
    return (
        a * b["A"]
        + (a - 1.0) * pr.omega * b["B"]
        + 4.0 * a * pr.mu * b["C"]
        + (3.0 * a - 2.0) * pr.q * b["D"]
        + (2.0 * a - 1.0) * pr.q * pr.mu * b["E"]
        - ((pr.p + 1.0) * a - 2.0) / (pr.p + 1.0) * pr.lam * b["F"]
    )


def gateaux(u: RadialFunction, phi: RadialFunction, params: Params) -> float:
    if not u.grid.same_as(phi.grid):
        raise ValueError("u and phi must share a grid")
    return float(np.dot(energy_gradient(u, params), phi.values))


def gateaux_potential_form(u: RadialFunction, phi: RadialFunction, params: Params) -> float:
    """``I'(u)[phi]`` assembled literally from ``V1`` and ``V2``.

    Same value as :func:`gateaux` (the gauge part is written through the
    potentials rather than through ``D'`` and ``E'``).
    """
    g = u.grid
    om, mu, q, lam, p = params.omega, params.mu, params.q, params.lam, params.p
    uv, pv = u.values, phi.values
    du, dphi = cell_gradient(u), cell_gradient(phi)
    u2bar = cell_average(g, uv**2)
    upbar = cell_average(g, uv * pv)
    local = integrate_cells(g, (1.0 + 2.0 * mu * u2bar) * du * dphi + 2.0 * mu * upbar * du * du)
    gauge = compute_gauge(u, mu, tail_tol=np.inf)
    dens = (
        om * uv * pv
        - lam * signed_power(uv, p) * pv
        + q * gauge.V1.values * (1.0 + mu * uv**2) * uv * pv
        + q * gauge.V2.values * uv * pv
    )
    return local + TWO_PI * float(np.dot(g.weights, dens))


def check_alpha(alpha: float, p: float) -> None:
    """Reject scaling exponents outside ``alpha > 1`` (and ``alpha < 2/(7-p)`` for ``5<p<7``)."""
    if not math.isfinite(alpha) or alpha <= 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    if 5.0 < p < 7.0 and alpha >= 2.0 / (7.0 - p):
        raise ValueError(f"alpha must be below 2/(7-p) = {2.0 / (7.0 - p):.6g} for p = {p}")
    if p <= 5.0:
        raise ValueError(f"no admissible alpha for p = {p} <= 5")


def gamma(u: RadialFunction, params: Params, alpha: float) -> float:
    check_alpha(alpha, params.p)
    return breakdown(u, params).gamma(alpha)


def coercivity_coefficients(params: Params, alpha: float) -> dict[str, float]:
    """Coefficients of ``I - Gamma/((p+1) alpha - 2)`` in terms of A..E."""
    p, a = params.p, alpha
    den = (p + 1.0) * a - 2.0
    return {
        "A": ((p - 1.0) * a - 2.0) / (2.0 * den),
        "B": (p - 1.0) * a * params.omega / (2.0 * den),
        "C": ((p - 3.0) * a - 2.0) * params.mu / den,
        "D": ((p - 5.0) * a + 2.0) * params.q / (2.0 * den),
        "E": ((p - 7.0) * a + 2.0) * params.q * params.mu / (4.0 * den),
    }


def coercive_part(bd: FunctionalBreakdown, alpha: float) -> float:
    c = coercivity_coefficients(bd.params, alpha)
    return c["A"] * bd.A + c["B"] * bd.B + c["C"] * bd.C + c["D"] * bd.D + c["E"] * bd.E
