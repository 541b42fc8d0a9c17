"""Chern-Simons gauge profiles and the nonlocal functionals D and E.

``h_u(r) = int_0^r s u^2 ds`` generates both potentials::

    V1(r) = h_u(r)^2 / r^2                                   (V1(0) = 0)
    V2(r) = int_r^inf (h_u(s)/s) (2 + mu u(s)^2) u(s)^2 ds

and the functionals ``D(u) = int V1 u^2 dx`` and ``E(u) = int V1 u^4 dx``.
Integrands with a removable singularity at ``r = 0`` take their limit 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .radial_grid import (
    TWO_PI,
    Grid,
    RadialFunction,
    cumulative_moment,
    integrate,
    tail_integral,
    write_profiles_csv,
)


@dataclass(frozen=True)
class GaugeFields:
    h: RadialFunction
    V1: RadialFunction
    V2: RadialFunction

    def to_csv(self, path) -> None:
        write_profiles_csv(
            path, self.h.grid, {"h": self.h.values, "V1": self.V1.values, "V2": self.V2.values}
        )


def _over_r(grid: Grid, a: NDArray, power: int = 1) -> NDArray:
    """``a / r**power`` with the value at ``r = 0`` set to 0."""
    inv = grid.inv_nodes
    return a * (inv if power == 1 else inv**power)


def potential_V1(u: RadialFunction, h: RadialFunction | None = None) -> RadialFunction:
    if h is None:
        h = cumulative_moment(u)
    return RadialFunction(u.grid, _over_r(u.grid, h.values**2, 2))


def _tail_of(u: RadialFunction, h: RadialFunction, weight: NDArray, tail_tol=None) -> NDArray:
    """``int_r^R (h/s) * weight ds`` on the nodes."""
    f = RadialFunction(u.grid, _over_r(u.grid, h.values) * weight)
    if tail_tol is None:
        return tail_integral(f).values
    return tail_integral(f, tail_tol=tail_tol).values


def compute_gauge(u: RadialFunction, mu: float, tail_tol: float | None = None) -> GaugeFields:
    """Return ``h_u``, ``V1`` and ``V2`` for the amplitude ``u``."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    h = cumulative_moment(u)
    u2 = u.values**2
    V1 = potential_V1(u, h)
    V2 = _tail_of(u, h, (2.0 + mu * u2) * u2, tail_tol)
    return GaugeFields(h=h, V1=V1, V2=RadialFunction(u.grid, V2))


def D_functional(u: RadialFunction) -> float:
    return integrate(potential_V1(u) * u**2)


def E_functional(u: RadialFunction) -> float:
    return integrate(potential_V1(u) * u**4)


def D_gradient(u: RadialFunction) -> NDArray:
    """Nodal vector ``G`` with ``D'(u)[phi] = G . phi``.

    Two contributions: the local density ``2 u phi V1`` and the variation of
    ``h_u`` inside the square, which after exchanging the order of
    integration becomes ``4 u phi int_r^R (h/s) u^2 ds``.
    """
    g = u.grid
    h = cumulative_moment(u)
    V1 = _over_r(g, h.values**2, 2)
    u2 = u.values**2
    tail = _tail_of(u, h, u2, tail_tol=np.inf)
    return TWO_PI * g.weights * u.values * (2.0 * V1 + 4.0 * tail)


def E_gradient(u: RadialFunction) -> NDArray:
    g = u.grid
    h = cumulative_moment(u)
    V1 = _over_r(g, h.values**2, 2)
    u2 = u.values**2
    tail = _tail_of(u, h, u2 * u2, tail_tol=np.inf)
    return TWO_PI * g.weights * u.values * (4.0 * V1 * u2 + 4.0 * tail)


def _check_pair(u: RadialFunction, phi: RadialFunction) -> None:
    if not u.grid.same_as(phi.grid):
        raise ValueError("u and phi must share a grid")


def gateaux_D(u: RadialFunction, phi: RadialFunction) -> float:
    _check_pair(u, phi)
    return float(np.dot(D_gradient(u), phi.values))


def gateaux_E(u: RadialFunction, phi: RadialFunction) -> float:
    _check_pair(u, phi)
    return float(np.dot(E_gradient(u), phi.values))


def schwarz_constant(u: RadialFunction) -> float:
    """Sampled ``sup_s h_u(s) / (s ||u||_4^2)``; finite for any ``u != 0``."""
    h = cumulative_moment(u).values
    l4sq = np.sqrt(integrate(u**4))
    if l4sq == 0.0:
        return 0.0
    return float(np.max(_over_r(u.grid, h)) / l4sq)
