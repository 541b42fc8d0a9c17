import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from csgs.gauge_terms import (
    D_functional,
    E_functional,
    compute_gauge,
    gateaux_D,
    gateaux_E,
    schwarz_constant,
)
from csgs.radial_grid import RadialFunction, integrate, make_grid
from csgs.verify import SampleSpec


def test_zero_input(grid10):
    gf = compute_gauge(grid10.zeros(), 1.0)
    for f in (gf.h, gf.V1, gf.V2):
        assert np.all(f.values == 0)
    assert D_functional(grid10.zeros()) == 0 and E_functional(grid10.zeros()) == 0


def test_V1_at_one(gaussian):
    gf = compute_gauge(gaussian, 1.0)
    i = int(np.argmin(abs(gaussian.grid.nodes - 1.0)))
    assert gaussian.grid.nodes[i] == pytest.approx(1.0)
    assert abs(gf.V1.values[i] - (1 - math.exp(-1)) ** 2 / 4) <= 1e-6
    assert gf.V1.values[0] == 0.0


def test_V2_at_origin_frullani():
    g = make_grid(12.0, 24001)
    u = g.sample(lambda r: np.exp(-0.5 * r * r))
    gf = compute_gauge(u, 0.0)
    assert abs(gf.V2.values[0] - math.log(2) / 2) <= 1e-6


def test_D_E_closed_forms(gaussian):
    assert D_functional(gaussian) == pytest.approx(math.pi / 4 * math.log(4 / 3), rel=1e-5)
    assert E_functional(gaussian) == pytest.approx(math.pi / 4 * math.log(9 / 8), rel=1e-5)


def test_gateaux_zero_direction_and_homogeneity(gaussian):
    assert gateaux_D(gaussian, gaussian.grid.zeros()) == 0.0
    assert gateaux_E(gaussian, gaussian.grid.zeros()) == 0.0
    assert gateaux_D(gaussian, gaussian) == pytest.approx(6 * D_functional(gaussian), rel=1e-8)
    assert gateaux_E(gaussian, gaussian) == pytest.approx(8 * E_functional(gaussian), rel=1e-8)


def test_gateaux_mismatched_grid(gaussian):
    with pytest.raises(ValueError):
        gateaux_D(gaussian, make_grid(3.0, 11).zeros())


@pytest.mark.parametrize("shift", [0.0, 0.7, 1.5])
def test_gateaux_matches_central_difference(shift):
    g = make_grid(10.0, 2001)
    u = g.sample(lambda r: (1 + 0.3 * r) * np.exp(-0.5 * r * r))
    phi = g.sample(lambda r: np.cos(r + shift) * np.exp(-0.3 * r * r))
    eps = 1e-5
    for fn, dfn in ((D_functional, gateaux_D), (E_functional, gateaux_E)):
        fd = (fn(u + eps * phi) - fn(u - eps * phi)) / (2 * eps)
        assert dfn(u, phi) == pytest.approx(fd, rel=1e-5)


def test_scaling_laws_on_refined_grid():
    g = make_grid(10.0, 40001)
    alpha, t = 1.5, 2.0
    u = g.sample(lambda r: np.exp(-0.5 * r * r))
    ut = g.sample(lambda r: t**alpha * np.exp(-0.5 * (t * r) ** 2))
    assert D_functional(ut) == pytest.approx(t ** (6 * alpha - 4) * D_functional(u), rel=1e-6)
    assert E_functional(ut) == pytest.approx(t ** (8 * alpha - 4) * E_functional(u), rel=1e-6)


def test_fubini_exchange(gaussian):
    # int V2 u^2 = int V1 (2 + mu u^2) u^2 = 2D + mu E
    mu = 0.7
    gf = compute_gauge(gaussian, mu)
    lhs = integrate(gf.V2 * gaussian**2)
    assert lhs == pytest.approx(2 * D_functional(gaussian) + mu * E_functional(gaussian), rel=1e-10)


def test_schwarz_bound_stable_under_refinement():
    cs = []
    for n in (2001, 4001):
        g = make_grid(10.0, n)
        cs.append(schwarz_constant(g.sample(lambda r: (1 + r) * np.exp(-0.5 * r * r))))
    assert math.isfinite(cs[0]) and cs[0] > 0
    assert cs[1] == pytest.approx(cs[0], rel=1e-3)
    assert schwarz_constant(make_grid(1.0, 5).zeros()) == 0.0


def test_fields_signs_on_random_samples():
    g = make_grid(12.0, 1201)
    spec = SampleSpec(seed=3, count=1000)
    for s in spec:
        u = s.on(g)
        gf = compute_gauge(u, 1.0, tail_tol=math.inf)
        assert np.all(gf.V1.values >= 0)
        assert np.all(np.diff(gf.V2.values) <= 1e-15 * max(1.0, gf.V2.values[0]))
        assert gf.V2.values[-1] == 0.0
        assert np.all(np.diff(gf.h.values) >= 0)


@given(mu=st.floats(0.0, 10.0), seed=st.integers(0, 1000))
def test_V2_grows_with_mu(mu, seed):
    g = make_grid(12.0, 601)
    u = SampleSpec(seed=seed, count=1).sample(0).on(g)
    a = compute_gauge(u, mu, tail_tol=math.inf).V2.values
    b = compute_gauge(u, mu + 1.0, tail_tol=math.inf).V2.values
    assert np.all(b >= a)


def test_negative_mu_rejected(gaussian):
    with pytest.raises(ValueError):
        compute_gauge(gaussian, -1.0)


def test_csv(tmp_path, gaussian):
    path = tmp_path / "g.csv"
    compute_gauge(gaussian, 1.0).to_csv(path)
    assert path.read_text().splitlines()[0] == "r,h,V1,V2"
    assert len(path.read_text().splitlines()) == gaussian.grid.n + 1


def test_sign_changing_direction_is_linear(gaussian):
    phi = RadialFunction(gaussian.grid, np.sin(gaussian.grid.nodes) * gaussian.values)
    assert gateaux_D(gaussian, -2 * phi) == pytest.approx(-2 * gateaux_D(gaussian, phi), rel=1e-14)
