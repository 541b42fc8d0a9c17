"""Radial grids, quadrature and the cumulative/tail integral primitives.

Every integral over the plane of a radial integrand is reduced to
``2*pi * int_0^R f(r) r dr`` and evaluated with the composite trapezoid
rule.  Gradients live on cell midpoints (a staggered stencil), so the
discrete Dirichlet form has no odd-even null space.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

TWO_PI = 2.0 * math.pi
DEFAULT_TAIL_TOL = 1e-10


class TailWarning(UserWarning):
    """Integrand does not decay at the truncation radius."""


def _frozen(a: NDArray) -> NDArray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Grid:
    """Nodes ``0 = r_0 < ... < r_{n-1} = R`` with trapezoid weights for ``f(r) r dr``."""

    R: float
    n: int
    stretch: float
    nodes: NDArray = field(repr=False)
    # trapezoid weights for int f(s) ds (no r factor)
    line_weights: NDArray = field(repr=False)

    # derived arrays are cached; the grid is immutable

    @cached_property
    def spacing(self) -> NDArray:
        return _frozen(np.diff(self.nodes))

    @cached_property
    def weights(self) -> NDArray:
        """Weights for ``int_0^R f(r) r dr``."""
        return _frozen(self.line_weights * self.nodes)

    @cached_property
    def cell_weights(self) -> NDArray:
        """Exact ``int r dr`` over each cell ``[r_k, r_{k+1}]``."""
        r = self.nodes
        return _frozen(0.5 * (r[1:] + r[:-1]) * np.diff(r))

    @cached_property
    def inv_nodes(self) -> NDArray:
        """``1/r`` with 0 in place of the value at the origin."""
        out = np.zeros(self.n)
        out[1:] = 1.0 / self.nodes[1:]
        return _frozen(out)

    @property
    def is_uniform(self) -> bool:
        return self.stretch == 1.0

    def same_as(self, other: "Grid") -> bool:
        if self is other:
            return True
        return (
            self.n == other.n
            and self.R == other.R
            and self.stretch == other.stretch
        )

    def to_json(self) -> str:
        return json.dumps({"R": self.R, "n": self.n, "stretch": self.stretch})

    @classmethod
    def from_json(cls, text: str) -> "Grid":
        d = json.loads(text)
        return make_grid(d["R"], d["n"], d.get("stretch", 1.0))

    def zeros(self) -> "RadialFunction":
        return RadialFunction(self, np.zeros(self.n))

    def sample(self, func) -> "RadialFunction":
        """Evaluate a vectorized callable ``func(r)`` on the nodes."""
        return RadialFunction(self, np.asarray(func(self.nodes), dtype=float))


def make_grid(R: float, n: int, stretch: float = 1.0) -> Grid:
    """Build a radial grid on ``[0, R]``.

    With ``stretch > 1`` the spacing grows geometrically so that the last cell
    is ``stretch`` times wider than the first.

    Parameters
    ----------
    R : float
        Truncation radius, ``R > 0``.
    n : int
        Node count.  ``n >= 16`` for production use; ``n = 2`` is accepted
        as a degenerate single-cell grid.
    stretch : float
        Ratio of last to first cell width, ``>= 1``.
    """
    if not (isinstance(R, (int, float)) and math.isfinite(R) and R > 0):
        raise ValueError(f"R must be finite and positive, got {R!r}")
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    n = int(n)
    if not (math.isfinite(stretch) and stretch >= 1.0):
        raise ValueError(f"stretch must be finite and >= 1, got {stretch!r}")
    R = float(R)
    stretch = float(stretch)

    if stretch == 1.0 or n == 2:
        r = np.linspace(0.0, R, n)
    else:
        ratio = stretch ** (1.0 / (n - 2))
        widths = ratio ** np.arange(n - 1)
        r = np.concatenate(([0.0], np.cumsum(widths)))
        r *= R / r[-1]
    r[0] = 0.0
    r[-1] = R

    d = np.diff(r)
    if np.any(d <= 0):
        raise ValueError("grid nodes are not strictly increasing")
    lw = np.zeros(n)
    lw[:-1] += 0.5 * d
    lw[1:] += 0.5 * d
    return Grid(R=R, n=n, stretch=stretch, nodes=_frozen(r), line_weights=_frozen(lw))


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Scalar radial field sampled on the nodes of a :class:`Grid`."""

    grid: Grid
    values: NDArray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("RadialFunction values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def r(self) -> NDArray:
        return self.grid.nodes

    def _other(self, other):
        if isinstance(other, RadialFunction):
            if not self.grid.same_as(other.grid):
                raise ValueError("RadialFunctions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return RadialFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RadialFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return RadialFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return RadialFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return RadialFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return RadialFunction(self.grid, -self.values)

    def __abs__(self):
        return RadialFunction(self.grid, np.abs(self.values))

    def __pow__(self, k):
        return RadialFunction(self.grid, self.values**k)

    def to_csv(self, path: str | Path, header: str = "value") -> None:
        write_profiles_csv(path, self.grid, {header: self.values})


def write_profiles_csv(path: str | Path, grid: Grid, columns: dict[str, NDArray]) -> None:
    """Write ``r`` plus named columns with round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["r", *columns])
        cols = [np.asarray(c, dtype=float) for c in columns.values()]
        for i, ri in enumerate(grid.nodes):
            w.writerow([repr(float(ri)), *(repr(float(c[i])) for c in cols)])


def read_profile_csv(path: str | Path, grid: Grid | None = None, column: str | None = None):
    """Read a profile CSV written by :func:`write_profiles_csv`.

    Returns ``(r, values)`` arrays, or a :class:`RadialFunction` if a matching
    ``grid`` is given.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    j = 1 if column is None else header.index(column)
    r = np.array([float(row[0]) for row in body])
    v = np.array([float(row[j]) for row in body])
    if grid is None:
        return r, v
    if r.shape != grid.nodes.shape or not np.array_equal(r, grid.nodes):
        raise ValueError("CSV radii do not match the grid")
    return RadialFunction(grid, v)


def _values(f) -> NDArray:
    return f.values if isinstance(f, RadialFunction) else np.asarray(f, dtype=float)


def integrate(f: RadialFunction) -> float:
    """``int_{R^2} f dx = 2 pi int_0^R f(r) r dr`` by the trapezoid rule."""
    return TWO_PI * float(np.dot(f.grid.weights, f.values))


def integrate_cells(grid: Grid, cell_values: NDArray) -> float:
    """Midpoint-rule integral of a quantity defined on cells."""
    return TWO_PI * float(np.dot(grid.cell_weights, cell_values))


def cumulative_moment(u: RadialFunction) -> RadialFunction:
    """``h(r) = int_0^r s u(s)^2 ds`` by cumulative trapezoid."""
    g = u.grid
    F = g.nodes * u.values**2
    h = np.concatenate(([0.0], np.cumsum(0.5 * g.spacing * (F[1:] + F[:-1]))))
    return RadialFunction(g, h)


def tail_integral(w: RadialFunction, tail_tol: float = DEFAULT_TAIL_TOL) -> RadialFunction:
    """``T(r) = int_r^R w(s) ds`` with ``T(R) = 0``.

    On a uniform grid this is the trapezoid rule.  On a graded grid the
    diagonal weight of node ``j`` is ``d_{j-1}/2`` instead of ``d_j/2``,
    which makes ``T`` the exact discrete transpose of
    :func:`cumulative_moment` (both are still second order).
    """
    g = w.grid
    f = w.values
    if abs(f[-1]) * g.R > tail_tol:
        warnings.warn(
            f"tail integrand not decayed at R: |w(R)| R = {abs(f[-1]) * g.R:.3e}",
            TailWarning,
            stacklevel=2,
        )
    d = g.spacing
    wf = g.line_weights * f
    # strict suffix sums: S_j = sum_{i>j} lw_i f_i
    suffix = np.concatenate((np.cumsum(wf[::-1])[::-1][1:], [0.0]))
    diag = np.empty(g.n)
    diag[0] = 0.5 * d[0]
    diag[1:] = 0.5 * d
    T = suffix + diag * f
    T[-1] = 0.0
    return RadialFunction(g, T)


def cell_gradient(u) -> NDArray:
    """Derivative on cell midpoints, ``(u_{k+1} - u_k) / d_k``."""
    g = u.grid
    return np.diff(u.values) / g.spacing


def cell_average(grid: Grid, nodal: NDArray) -> NDArray:
    nodal = np.asarray(nodal)
    return 0.5 * (nodal[1:] + nodal[:-1])


def gradient_transpose(grid: Grid, cell_values: NDArray) -> NDArray:
    """Nodal coefficients ``G`` with ``sum_k c_k a_k (D phi)_k = sum_i G_i phi_i``.

    ``c_k`` are the cell weights; includes the ``2 pi`` factor.
    """
    a = TWO_PI * grid.cell_weights * cell_values / grid.spacing
    G = np.zeros(grid.n)
    G[1:] += a
    G[:-1] -= a
    return G


def l2_norm(u: RadialFunction) -> float:
    return math.sqrt(max(integrate(u * u), 0.0))


def dirichlet(u: RadialFunction) -> float:
    """``||grad u||_2^2``."""
    du = cell_gradient(u)
    return integrate_cells(u.grid, du * du)


def h1_norm(u: RadialFunction) -> float:
    return math.sqrt(integrate(u * u) + dirichlet(u))


def distance_X(u: RadialFunction, v: RadialFunction) -> float:
    """``||u - v||_{H^1} + ||grad(u^2) - grad(v^2)||_2``."""
    if not u.grid.same_as(v.grid):
        raise ValueError("distance_X needs functions on the same grid")
    diff = u - v
    sq = RadialFunction(u.grid, u.values**2 - v.values**2)
    return h1_norm(diff) + math.sqrt(dirichlet(sq))
