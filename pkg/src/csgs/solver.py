"""Ground states by descent of ``u -> max_t I(u_t)``, plus independent checks.

The reduced functional ``J(u) = I(u_{t(u)})`` is minimised by a Sobolev
gradient iteration.  At a point on the manifold the Riesz representative of
``I'(u)`` in the ``H^1_omega`` inner product is split against the normal
``Gamma'(u)``; its tangential part is the step direction.  (In the continuum
this equals the envelope-theorem gradient of ``J``; on the grid the rescaling
is only interpolation-accurate, and the tangential form keeps the line search
exact.)  The trial point is replaced by its absolute value, rescaled back onto
the manifold, and an Armijo test on ``I`` accepts or halves the step.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import simpson, solve_ivp
from scipy.linalg import solve_banded
from scipy.interpolate import CubicHermiteSpline

from .energy import (
    FunctionalBreakdown,
    Params,
    breakdown,
    coercive_part,
    energy_gradient,
    gamma_gradient,
    signed_power,
)
from .fibration import default_alpha, project_to_M
from .gauge_terms import GaugeFields, compute_gauge
from .radial_grid import (
    TWO_PI,
    Grid,
    RadialFunction,
    integrate,
    l2_norm,
    make_grid,
    write_profiles_csv,
)

log = logging.getLogger(__name__)

# the core of the ground state does not widen with 1/sqrt(omega) as the tail does,
# so the default grid keeps the spacing fixed when R grows
DEFAULT_SPACING = 0.005
DEFAULT_MIN_N = 4001


@dataclass(frozen=True)
class SolveConfig:
    R: float | None = None  # default 20/sqrt(omega)
    n: int | None = None  # default: spacing 0.005 or finer, at least 4001 nodes
    stretch: float = 1.0
    alpha: float | None = None  # default_alpha(p)
    init_width: float | None = None  # default 1/sqrt(omega)
    max_iters: int = 3000
    # stationarity sqrt(G.d/(A+omega B)); below ~1e-8 Armijo hits round-off of I
    grad_tol: float = 1e-7
    constraint_tol: float = 1e-9
    armijo_c: float = 1e-4
    step0: float = 1.0
    step_floor: float = 1e-12
    # weight the Dirichlet part of the metric by (1 + 2 mu u^2)
    quasilinear_metric: bool = True
    check_envelope: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        for k in ("grad_tol", "constraint_tol", "armijo_c", "step0", "step_floor"):
            if not getattr(self, k) > 0:
                raise ValueError(f"{k} must be positive")

    def grid_for(self, params: Params) -> Grid:
        R = self.R if self.R is not None else 20.0 / math.sqrt(params.omega)
        n = self.n if self.n is not None else max(DEFAULT_MIN_N, math.ceil(R / DEFAULT_SPACING) + 1)
        return make_grid(R, n, self.stretch)

    def alpha_for(self, params: Params) -> float:
        return self.alpha if self.alpha is not None else default_alpha(params.p)


@dataclass
class SolveResult:
    u_star: RadialFunction
    sigma: float
    breakdown: FunctionalBreakdown
    residuals: dict[str, float]
    decay_slope: float
    iterations: int
    converged: bool
    alpha: float
    history: list[float] = field(default_factory=list, repr=False)

    @property
    def gauge(self) -> GaugeFields:
        return compute_gauge(self.u_star, self.breakdown.params.mu, tail_tol=np.inf)

    def summary(self) -> dict:
        g = self.u_star.grid
        return {
            "sigma": self.sigma,
            "converged": self.converged,
            "iterations": self.iterations,
            "alpha": self.alpha,
            "decay_slope": self.decay_slope,
            "u0": float(self.u_star.values[0]),
            "residuals": dict(self.residuals),
            "breakdown": self.breakdown.scalars(),
            "grid": {"R": g.R, "n": g.n, "stretch": g.stretch},
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)

    def write_profile(self, path) -> None:
        gf = self.gauge
        write_profiles_csv(
            path,
            self.u_star.grid,
            {"u": self.u_star.values, "h": gf.h.values, "V1": gf.V1.values, "V2": gf.V2.values},
        )


def gaussian_init(grid: Grid, width: float, mass: float = 1.0) -> RadialFunction:
    """Gaussian with ``int u^2 dx = mass``."""
    amp = math.sqrt(mass / (math.pi * width**2))
    return grid.sample(lambda r: amp * np.exp(-0.5 * (r / width) ** 2))


def _metric_bands(grid: Grid, omega: float, cell_coef: NDArray) -> NDArray:
    """Banded form of ``K + omega M`` (stiffness weighted by ``cell_coef``)."""
    k = TWO_PI * grid.cell_weights * cell_coef / grid.spacing**2
    diag = TWO_PI * omega * grid.weights
    diag = diag.copy()
    diag[:-1] += k
    diag[1:] += k
    ab = np.zeros((3, grid.n))
    ab[0, 1:] = -k
    ab[1] = diag
    ab[2, :-1] = -k
    return ab


def sobolev_gradient(u: RadialFunction, G: NDArray, params: Params, quasilinear: bool) -> NDArray:
    """Riesz representative of the functional ``phi -> G . phi``."""
    coef = np.ones(u.grid.n - 1)
    if quasilinear and params.mu > 0:
        u2 = u.values**2
        coef = 1.0 + params.mu * (u2[1:] + u2[:-1])
    return solve_banded((1, 1), _metric_bands(u.grid, params.omega, coef), G)


def minimize_on_M(params: Params, config: SolveConfig | None = None, u_init=None) -> SolveResult:
    """Minimise ``I`` over ``{Gamma = 0}``; never raises on non-convergence."""
    config = config or SolveConfig()
    if params.p <= 5.0:
        raise ValueError(f"ground-state solve needs p > 5, got {params.p}")
    grid = config.grid_for(params)
    alpha = config.alpha_for(params)
    if u_init is None:
        width = config.init_width or 1.0 / math.sqrt(params.omega)
        u = gaussian_init(grid, width)
    else:
        u = u_init
    proj = project_to_M(u, params, alpha)
    u, bd = proj.u_star, proj.breakdown
    J = bd.I
    history = [J]
    step = config.step0
    converged = False
    it = 0
    stat = math.inf
    for it in range(1, config.max_iters + 1):
        G = energy_gradient(u, params)
        d = sobolev_gradient(u, G, params, config.quasilinear_metric)
        # remove the component normal to the manifold (H^1-orthogonal split)
        nG = gamma_gradient(u, params, alpha)
        nd = sobolev_gradient(u, nG, params, config.quasilinear_metric)
        d = d - (float(nG @ d) / float(nG @ nd)) * nd
        slope = float(G @ d)
        stat = math.sqrt(max(slope, 0.0) / max(bd.A + params.omega * bd.B, 1e-300))
        if stat < config.grad_tol and abs(bd.gamma(alpha)) <= config.constraint_tol * bd.gamma_scale(alpha):
            converged = True
            break
        accepted = False
        s = min(2.0 * step, 1.0)
        while s >= config.step_floor:
            trial = RadialFunction(grid, np.abs(u.values - s * d))
            try:
                pj = project_to_M(trial, params, alpha)
            except (ValueError, RuntimeError):
                s *= 0.5
                continue
            if pj.polished and pj.breakdown.I <= J - config.armijo_c * s * slope:
                accepted = True
                break
            s *= 0.5
        if not accepted:
            log.info("line search failed at iteration %d (stationarity %.3e)", it, stat)
            break
        if config.check_envelope and it <= 3:
            _log_envelope_check(u, d, params, alpha, slope)
        step = s
        u, bd = pj.u_star, pj.breakdown
        J = bd.I
        history.append(J)
    residuals = solution_residuals(u, bd, alpha)
    residuals["reduced_grad"] = stat
    return SolveResult(
        u_star=u,
        sigma=bd.I,
        breakdown=bd,
        residuals=residuals,
        decay_slope=_safe_decay(u),
        iterations=it,
        converged=converged and bd.I > 0,
        alpha=alpha,
        history=history,
    )


def _log_envelope_check(u, d, params, alpha, slope, eps=1e-6):
    jp = project_to_M(RadialFunction(u.grid, u.values - eps * d), params, alpha).breakdown.I
    jm = project_to_M(RadialFunction(u.grid, u.values + eps * d), params, alpha).breakdown.I
    fd = (jm - jp) / (2 * eps)
    log.debug("envelope check: predicted %.6e, finite difference %.6e", slope, fd)


def solution_residuals(u: RadialFunction, bd: FunctionalBreakdown, alpha: float) -> dict[str, float]:
    pr = bd.params
    scale = bd.A + pr.omega * bd.B
    res = pde_residual(u, pr)
    forcing = l2_norm(RadialFunction(u.grid, pr.lam * np.abs(signed_power(u.values, pr.p))))
    return {
        "nehari": abs(bd.N) / scale,
        "pohozaev": abs(bd.P) / scale,
        "gamma": abs(bd.gamma(alpha)) / bd.gamma_scale(alpha),
        "pde_l2": res / forcing if forcing > 0 else res,
        "pde_l2_abs": res,
    }


def radial_laplacian(f: NDArray, grid: Grid) -> NDArray:
    """Conservative 3-point ``f'' + f'/r``; ``2 f''(0)`` at the origin, no flux at ``R``."""
    r = grid.nodes
    d = grid.spacing
    rm = 0.5 * (r[1:] + r[:-1])
    flux = rm * np.diff(f) / d
    out = np.empty_like(f)
    out[1:-1] = (flux[1:] - flux[:-1]) / (r[1:-1] * 0.5 * (d[1:] + d[:-1]))
    out[0] = 4.0 * (f[1] - f[0]) / d[0] ** 2
    out[-1] = -flux[-1] / (r[-1] * 0.5 * d[-1])
    return out


def pde_residual_vector(u: RadialFunction, params: Params) -> NDArray:
    g = u.grid
    uv = u.values
    gf = compute_gauge(u, params.mu, tail_tol=np.inf)
    lap_u = radial_laplacian(uv, g)
    lap_u2 = radial_laplacian(uv**2, g)
    return (
        -lap_u
        + params.omega * uv
        - params.mu * uv * lap_u2
        + params.q * gf.V1.values * (1.0 + params.mu * uv**2) * uv
        + params.q * gf.V2.values * uv
        - params.lam * signed_power(uv, params.p)
    )


def pde_residual(u: RadialFunction, params: Params) -> float:
    """Discrete ``L^2`` norm of the strong-form residual of the equation."""
    return l2_norm(RadialFunction(u.grid, pde_residual_vector(u, params)))


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    inner_slope: float
    outer_slope: float
    super_exponential: bool


def decay_fit(u: RadialFunction, window=(0.6, 0.9)) -> DecayFit:
    """Least-squares fit of ``log u`` against ``r`` on ``[0.6 R, 0.9 R]``."""
    g = u.grid
    r = g.nodes
    m = (r >= window[0] * g.R) & (r <= window[1] * g.R)
    v = u.values[m]
    if m.sum() < 4 or np.any(v <= 0):
        raise ValueError("decay window contains non-positive values")
    x, y = r[m], np.log(v)
    slope, icpt = np.polyfit(x, y, 1)
    half = len(x) // 2
    s_in = np.polyfit(x[:half], y[:half], 1)[0]
    s_out = np.polyfit(x[half:], y[half:], 1)[0]
    # curvature of log u beyond 5% of the slope means not a pure exponential
    sup = s_out < s_in - 0.05 * abs(slope)
    return DecayFit(float(slope), float(icpt), float(s_in), float(s_out), bool(sup))


def decay_rate(u: RadialFunction) -> float:
    return decay_fit(u).slope


def _safe_decay(u: RadialFunction) -> float:
    try:
        return decay_rate(u)
    except ValueError:
        return math.nan


def lower_bound_constant(params: Params, alpha: float) -> float:
    """Smallest coercivity coefficient: ``sigma >= c (A + omega B + mu C)`` on the manifold."""
    from .energy import coercivity_coefficients

    c = coercivity_coefficients(params, alpha)
    cands = [c["A"], c["B"] / params.omega]
    if params.mu > 0:
        cands.append(c["C"] / params.mu)
    return min(cands)


# --- shooting oracle for the semilinear limit q = mu = 0 --------------------


@dataclass
class ShootingResult:
    energy: float
    u0: float
    r: NDArray = field(repr=False)
    u: NDArray = field(repr=False)
    du: NDArray = field(repr=False)
    A: float = 0.0
    B: float = 0.0
    F: float = 0.0
    r_cut: float = 0.0

    def on_grid(self, grid: Grid) -> RadialFunction:
        # Hermite data keeps interpolation noise out of second differences
        r = grid.nodes
        vals = np.zeros_like(r)
        inside = r <= self.r[-1]
        vals[inside] = CubicHermiteSpline(self.r, self.u, self.du)(r[inside])
        return RadialFunction(grid, vals)


def _shoot(a: float, omega: float, lam: float, p: float, r_max: float, dense=False):
    """Integrate from the origin; returns (+1 overshoot | -1 undershoot | 0, solution)."""
    r0 = 1e-6 / math.sqrt(omega)
    c = 0.25 * (omega * a - lam * a**p)
    y0 = [a + c * r0**2, 2 * c * r0]

    def rhs(r, y):
        u, v = y
        return [v, -v / r + omega * u - lam * math.copysign(abs(u) ** p, u)]

    def cross(r, y):
        return y[0]

    cross.terminal = True
    cross.direction = -1

    def turn(r, y):
        return y[1]

    turn.terminal = True
    turn.direction = 1

    sol = solve_ivp(
        rhs, (r0, r_max), y0, method="DOP853", rtol=1e-12, atol=1e-300,
        events=[cross, turn], dense_output=dense,
    )
    if sol.t_events[0].size:
        return 1, sol
    if sol.t_events[1].size:
        return -1, sol
    return 0, sol


def shooting_oracle(omega: float, lam: float, p: float, r_max: float | None = None, n_quad: int = 40001) -> ShootingResult:
    """Ground state of ``u'' + u'/r - omega u + lambda u^p = 0`` by bisection on ``u(0)``.

    Returns the action ``A/2 + omega B/2 - lambda F/(p+1)`` of the decaying
    positive solution.
    """
    if not (p > 1 and omega > 0 and lam > 0):
        raise ValueError("need p > 1, omega > 0, lambda > 0")
    if r_max is None:
        r_max = 60.0 / math.sqrt(omega)
    # the constant state u = (omega/lambda)^{1/(p-1)} undershoots just above itself
    lo = (omega / lam) ** (1.0 / (p - 1)) * (1.0 + 1e-6)
    hi = 2.0 * lo
    for _ in range(80):
        kind, _ = _shoot(hi, omega, lam, p, r_max)
        if kind == 1:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise RuntimeError("shooting: no overshooting amplitude found")
    kind_lo, _ = _shoot(lo, omega, lam, p, r_max)
    if kind_lo == 1:
        raise RuntimeError("shooting: bracket failure at the lower amplitude")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        kind, _ = _shoot(mid, omega, lam, p, r_max)
        if kind == 1:
            hi = mid
        else:
            lo = mid
    kind, sol = _shoot(lo, omega, lam, p, r_max, dense=True)
    r_end = sol.t_events[1][0] if kind == -1 else sol.t[-1]
    r = np.linspace(sol.t[0], r_end, n_quad)
    y = sol.sol(r)
    u, v = np.maximum(y[0], 0.0), y[1]
    A = TWO_PI * simpson(v * v * r, x=r)
    B = TWO_PI * simpson(u * u * r, x=r)
    F = TWO_PI * simpson(u ** (p + 1) * r, x=r)
    I = 0.5 * A + 0.5 * omega * B - lam * F / (p + 1)
    r_full = np.concatenate(([0.0], r))
    u_full = np.concatenate(([lo], u))
    du_full = np.concatenate(([0.0], np.where(y[0] > 0, v, 0.0)))
    return ShootingResult(float(I), float(lo), r_full, u_full, du_full, float(A), float(B), float(F), float(r_end))


def shooting_scaling_check(omega: float, lam: float, p: float, factor: float = 4.0) -> dict[str, float]:
    """Compare the oracle at ``omega`` and ``factor * omega`` against exact scaling.

    ``u(r) -> k^{1/(p-1)} u(sqrt(k) r)`` maps solutions at ``omega`` to
    solutions at ``k omega``; in the plane the energy scales by ``k^{2/(p-1)}``.
    """
    a = shooting_oracle(omega, lam, p)
    b = shooting_oracle(factor * omega, lam, p)
    e_pred = factor ** (2.0 / (p - 1.0)) * a.energy
    u_pred = factor ** (1.0 / (p - 1.0)) * a.u0
    return {
        "energy": a.energy,
        "energy_scaled": b.energy,
        "energy_rel_error": abs(b.energy - e_pred) / abs(e_pred),
        "u0_rel_error": abs(b.u0 - u_pred) / abs(u_pred),
    }
