import json
import math

import numpy as np
import pytest

import csgs.verify as vf
from csgs.energy import Params
from csgs.radial_grid import integrate, make_grid
from csgs.verify import (
    Sample,
    SampleSpec,
    check_identities,
    check_inequalities,
    check_inequality_51,
    check_inequality_52,
    check_young_combined,
    identity_residuals,
    run_all,
)

SMALL = make_grid(12.0, 2001)
GAUSS = Sample((("gaussian", 1.0, 1.0, 0.0, 0.0),))


class Zero:
    def on(self, grid, t=1.0, alpha=0.0):
        return grid.zeros()


def test_sample_stream_is_deterministic():
    a, b = SampleSpec(seed=5, count=20), SampleSpec(seed=5, count=20)
    assert list(a) == list(b)
    assert list(SampleSpec(seed=6, count=20)) != list(a)
    # index-addressable: sample 7 does not depend on the count
    assert SampleSpec(seed=5, count=8).sample(7) == a.sample(7)


def test_samples_change_sign():
    g = make_grid(12.0, 601)
    changed = sum(np.any(s.on(g).values < 0) for s in SampleSpec(seed=1, count=100))
    assert changed > 10


def test_sample_rescaling_is_exact():
    s = SampleSpec(seed=2, count=1).sample(0)
    g = make_grid(5.0, 11)
    np.testing.assert_allclose(s.on(g, 2.0, 1.5).values, 2.0**1.5 * s(2.0 * g.nodes), rtol=0, atol=0)


@pytest.mark.parametrize(
    "kw", [dict(count=-1), dict(family=("square",)), dict(family=()), dict(width=(2.0, 1.0)), dict(max_components=0)]
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        SampleSpec(**kw)


def test_gaussian_inequality_margins():
    g = make_grid(10.0, 4001)
    u = GAUSS.on(g)
    assert integrate(u**4) == pytest.approx(math.pi / 2, rel=1e-5)
    assert integrate(u**6) == pytest.approx(math.pi / 3, rel=1e-5)
    terms = vf._inequality_terms(u)
    for key, (lhs, rhs) in terms.items():
        assert rhs > lhs, key


def test_gaussian_only_spec_has_positive_margins():
    spec = SampleSpec(seed=0, count=20, family=("gaussian",), max_components=1)
    reps = check_inequalities(spec, SMALL)
    assert all(r.violations == 0 and r.worst_margin > 0 for r in reps.values())


def test_gaussian_identities():
    res = identity_residuals(GAUSS, make_grid(12.0, 40001), Params(), 1.5)
    assert set(res) == {
        "nehari_gateaux", "gamma_two_paths", "coercivity", "homogeneity_D", "homogeneity_E",
        "scaling_D", "scaling_E", "gamma_path",
    }
    assert max(res.values()) <= 1e-6


def test_zero_function():
    res = identity_residuals(Zero(), SMALL, Params(), 1.5)
    assert all(v == 0.0 for v in res.values())


def test_zero_samples_are_skipped(monkeypatch):
    monkeypatch.setattr(SampleSpec, "sample", lambda self, i: Sample((("gaussian", 0.0, 1.0, 0.0, 0.0),)))
    rep = check_inequality_51(SampleSpec(count=5), SMALL)
    assert rep.skipped == 5 and rep.count == 0 and rep.violations == 0
    assert rep.to_dict()["worst_margin"] is None


def test_suites_agree_with_combined_pass():
    spec = SampleSpec(seed=9, count=30)
    both = check_inequalities(spec, SMALL)
    assert check_inequality_51(spec, SMALL) == both["51"]
    assert check_inequality_52(spec, SMALL) == both["52"]
    young = check_young_combined(spec, SMALL, Params(q=3.0))
    assert young["young4"] == both["young4"] and young["young6"] == both["young6"]


def test_young_forms_are_weaker():
    # 2ab <= a^2 + b^2: the combined margins are never below the product ones
    g = make_grid(12.0, 801)
    for s in SampleSpec(seed=4, count=50):
        t = vf._inequality_terms(s.on(g))
        assert t["young4"][1] >= t["51"][1] * (1 - 1e-12)
        assert t["young6"][1] >= t["52"][1] * (1 - 1e-12)


def test_parallel_matches_serial():
    spec = SampleSpec(seed=3, count=24)
    serial = check_inequalities(spec, SMALL, jobs=1)
    para = check_inequalities(spec, SMALL, jobs=3)
    assert {k: v.to_dict() for k, v in serial.items()} == {k: v.to_dict() for k, v in para.items()}
    a = check_identities(spec, SMALL, jobs=1).to_dict()
    b = check_identities(spec, SMALL, jobs=2).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_identity_residuals_shrink_under_refinement():
    spec = SampleSpec(seed=7, count=10)
    coarse = check_identities(spec, make_grid(12.0, 10001)).worst_residual
    fine = check_identities(spec, make_grid(12.0, 20001)).worst_residual
    assert fine * 2 <= coarse


def test_run_all_is_json_ready():
    d = run_all(SampleSpec(seed=1, count=5), SMALL)
    text = json.dumps(d, sort_keys=True, allow_nan=False)
    assert {"inequality_51", "inequality_52", "young_quartic", "young_sextic", "identities"} <= set(d)
    assert {"count", "violations", "worst_margin", "worst_seed_index"} <= set(d["inequality_51"])
    assert json.dumps(run_all(SampleSpec(seed=1, count=5), SMALL), sort_keys=True, allow_nan=False) == text
