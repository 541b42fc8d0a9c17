import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import csgs.nonexistence as ne
from csgs.energy import Params
from csgs.nonexistence import (
    REGIMES,
    deficit,
    g_pointwise,
    monotonicity_sweep,
    mu_free_bound,
    regime_coefficients,
    regime_of,
    sharp_threshold,
    sufficient_threshold,
)


def P(p=3.0, q=0.1, mu=1.0, lam=1.0, omega=1.0):
    return Params(omega=omega, mu=mu, q=q, lam=lam, p=p)


def test_regimes():
    assert [regime_of(q) for q in (0.1, 1 / 3, 1.0, 2.0, 5.0)] == [0, 1, 1, 2, 2]
    assert regime_coefficients(P(q=0.1, mu=2)) == pytest.approx((0.3, 0.2))
    assert regime_coefficients(P(q=1.0, mu=2)) == (1.0, 2.0)
    assert regime_coefficients(P(q=3.0, mu=2)) == (1.0, 4.0)


@pytest.mark.parametrize("q", [0.1, 1.0, 3.0])
def test_g_trivial_and_even(q):
    pr = P(q=q)
    assert g_pointwise(0.0, 1.0, pr) == 0.0
    t = np.linspace(0.1, 5, 20)
    np.testing.assert_array_equal(g_pointwise(-t, 1.0, pr), g_pointwise(t, 1.0, pr))


def test_critical_tangency():
    assert abs(g_pointwise(math.sqrt(3.5), 1.225, P())) <= 1e-12


def test_closed_form_examples():
    r = sharp_threshold(P())
    assert r.omega_sharp == pytest.approx(1.225, abs=1e-9)
    assert r.t_star**2 == pytest.approx(3.5, rel=1e-9)
    assert r.regime == REGIMES[0] and not r.derived_by_analogy
    r2 = sharp_threshold(P(q=1.0, lam=2.0))
    assert r2.omega_sharp == pytest.approx(0.25, abs=1e-9)
    assert r2.regime == REGIMES[1] and r2.derived_by_analogy


def test_sufficient_example():
    assert sufficient_threshold(P()) == pytest.approx(10 / 3, rel=1e-12)
    t = np.logspace(-3, 3, 2000)
    assert np.all(g_pointwise(t, 10 / 3, P()) > 0)


@given(q=st.floats(0.01, 5), mu=st.floats(0.01, 5), lam=st.floats(0.01, 5))
def test_p3_closed_form(q, mu, lam):
    pr = P(q=q, mu=mu, lam=lam)
    c4, c6 = regime_coefficients(pr)
    exact = (lam - c4) ** 2 / (4 * c6) if lam > c4 else 0.0
    assert sharp_threshold(pr).omega_sharp == pytest.approx(exact, rel=1e-9, abs=1e-12)


def test_small_lambda_limit():
    for p in (2.0, 3.0, 4.0):
        assert sharp_threshold(P(p=p, lam=1e-8)).omega_sharp < 1e-6


def test_sweep_examples():
    q_tab = monotonicity_sweep("q", P(), [0.05, 0.1, 0.2])
    exact = [(1 - 3 * q) ** 2 / (4 * q) for q in (0.05, 0.1, 0.2)]
    assert q_tab.omega_sharp == pytest.approx(exact, rel=1e-9)
    assert q_tab.ok
    mu_tab = monotonicity_sweep("mu", P(p=4.0), [0.5, 1.0, 2.0])
    s = mu_tab.omega_sharp
    assert mu_tab.ok and s[0] > s[1] > s[2]
    p2 = monotonicity_sweep("mu", P(p=2.0), [1e-3, 1.0, 1e3])
    assert p2.ok and p2.checks["bounded_in_mu"]["passed"]
    assert max(p2.omega_sharp) <= mu_free_bound(P(p=2.0))
    assert len(p2.rows()) == 3


def test_sweep_reports_violation(monkeypatch):
    vals = iter([1.0, 2.0, 0.5])
    real = ne.sharp_threshold

    def fake(pr):
        r = real(pr)
        return ne.ThresholdResult(r.regime, next(vals), r.omega_sufficient, r.t_star, pr)

    monkeypatch.setattr(ne, "sharp_threshold", fake)
    tab = monotonicity_sweep("q", P(), [0.05, 0.1, 0.2])
    assert not tab.ok and tab.checks["nonincreasing"]["violations"] == [1]


def test_sweep_input_validation():
    with pytest.raises(ValueError):
        monotonicity_sweep("lam", P(), [1.0])
    with pytest.raises(ValueError):
        monotonicity_sweep("q", P(), [0.2, 0.1])
    with pytest.raises(ValueError):
        monotonicity_sweep("q", P(), [0.0, 0.1])


@pytest.mark.parametrize("p", [1.0, 5.0, 6.0])
def test_p_out_of_range(p):
    with pytest.raises(ValueError):
        sharp_threshold(_raw(p))


def _raw(p):
    # Params itself rejects p <= 1, so go through object.__setattr__
    pr = P()
    object.__setattr__(pr, "p", p)
    return pr


box = dict(
    p=st.floats(1.05, 4.95), q=st.floats(0.01, 5.0), mu=st.floats(0.01, 5.0), lam=st.floats(0.01, 5.0),
)


@given(**box)
def test_sufficient_dominates_sharp(p, q, mu, lam):
    r = sharp_threshold(P(p=p, q=q, mu=mu, lam=lam))
    assert r.omega_sufficient >= r.omega_sharp * (1 - 1e-12)
    assert r.omega_sharp >= 0


@given(**box, k=st.floats(1.01, 10.0))
def test_monotone_pairs(p, q, mu, lam, k):
    base = sharp_threshold(P(p=p, q=q, mu=mu, lam=lam)).omega_sharp
    tol = 1e-10 * max(base, 1.0)
    # q is compared inside a regime: the bound jumps across q = 1/3 and q = 2
    if regime_of(q) == regime_of(k * q):
        assert sharp_threshold(P(p=p, q=k * q, mu=mu, lam=lam)).omega_sharp <= base + tol
    assert sharp_threshold(P(p=p, q=q, mu=k * mu, lam=lam)).omega_sharp <= base + tol
    assert sharp_threshold(P(p=p, q=q, mu=mu, lam=k * lam)).omega_sharp >= base - tol


@given(p=st.floats(1.05, 4.5), q=st.floats(0.01, 5.0), mu=st.floats(0.01, 5.0), lam=st.floats(0.01, 5.0))
def test_against_brute_force(p, q, mu, lam):
    pr = P(p=p, q=q, mu=mu, lam=lam)
    r = sharp_threshold(pr)
    t = np.logspace(-4, 8, 200_001)
    with np.errstate(over="ignore", invalid="ignore"):
        d = deficit(t, pr)
    brute = max(0.0, float(np.nanmax(d[np.isfinite(d)])))
    assert r.omega_sharp >= brute * (1 - 1e-12) - 1e-300
    assert r.omega_sharp == pytest.approx(brute, rel=1e-6, abs=1e-12)


@given(p=st.floats(1.05, 4.9), q=st.floats(0.01, 5.0), mu=st.floats(0.01, 5.0), lam=st.floats(0.01, 5.0))
def test_threshold_separates(p, q, mu, lam):
    pr = P(p=p, q=q, mu=mu, lam=lam)
    r = sharp_threshold(pr)
    if not math.isfinite(r.omega_sharp) or r.omega_sharp > 1e300:
        return
    t = np.logspace(-4, 4, 4001)
    above = r.omega_sharp * (1 + 1e-6) + 1e-12
    assert np.all(g_pointwise(t, above, pr) / t**2 > 0)
    if r.omega_sharp > 1e-8 and r.t_star > 0:
        below = r.omega_sharp * (1 - 1e-6)
        assert g_pointwise(r.t_star, below, pr) < 0


def test_overflow_near_five():
    r = sharp_threshold(P(p=4.999, q=0.1, mu=0.1, lam=5.0))
    assert r.sufficient_overflow and math.isinf(r.omega_sufficient)
    d = r.to_dict()
    assert d["omega_sufficient"] is None
    json.loads(r.to_json())
    # the sharp value stays finite or is flagged, never nan
    assert not math.isnan(r.omega_sharp)
    assert r.sharp_overflow == math.isinf(r.omega_sharp)


def test_to_dict_drops_omega():
    d = sharp_threshold(P()).to_dict()
    assert "omega" not in d["params"] and d["params"]["p"] == 3.0
