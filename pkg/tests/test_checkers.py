import math

import numpy as np
import pytest

from proxcat import checkers as ck
from proxcat.errors import InvalidInput
from proxcat.geometry import Euclidean, HalfPlane, Spider
from proxcat.rates import Modulus
from proxcat.resolvents import (
    Constant,
    Dilation,
    Identity,
    ProxQuadraticToPoint,
    ProxQuadraticToSet,
    ProxScaledSquaredNorm,
    Rotation,
    member,
)
from proxcat.sets import SpiderRaySegment

from conftest import ball

E1 = Euclidean(1)
E2 = Euclidean(2)
H = HalfPlane()
S3 = Spider(3)


def cfg(name, count=300, seed=3):
    space, base, r = ball(name)
    return space, ck.SampleConfig(seed, count, r, base)


@pytest.mark.parametrize(
    "check", [ck.check_cat0, ck.check_geodesic_law, ck.check_quasi_axioms, ck.check_cauchy_schwarz]
)
@pytest.mark.parametrize("name", ["euclid2", "halfplane", "spider3"])
def test_geometry_checks_pass(check, name):
    space, c = cfg(name, 1000)
    rep = check(space, c)
    assert rep.passed, rep.to_dict()
    assert rep.checked == 1000


def test_hilbert_reduction_only_on_euclidean():
    space, c = cfg("euclid2")
    assert ck.check_hilbert_reduction(space, c).passed
    hs, hc = cfg("halfplane")
    with pytest.raises(InvalidInput):
        ck.check_hilbert_reduction(hs, hc)


def test_reports_are_deterministic_and_order_independent():
    space, c = cfg("halfplane", 200)
    a = ck.check_cat0(space, c).to_dict()
    b = ck.check_cat0(space, c).to_dict()
    assert a == b
    # sample i of a longer run is the same sample as in a shorter run
    r1 = ck.sample_rng(9, 5).random(3)
    r2 = ck.sample_rng(9, 5).random(3)
    assert np.array_equal(r1, r2)
    assert not np.array_equal(r1, ck.sample_rng(9, 6).random(3))


def test_sample_config_validation():
    with pytest.raises(InvalidInput):
        ck.SampleConfig(0, 0, 1.0, E2.origin())
    with pytest.raises(InvalidInput):
        ck.SampleConfig(0, 10, 0.0, E2.origin())
    with pytest.raises(InvalidInput):
        ck.SampleConfig(-1, 10, 1.0, E2.origin())


def test_mutual_params_balance():
    p = ck.MutualParams(1.0, 3.0, 0.7)
    assert (1 - p.alpha) * p.lam == pytest.approx((1 - p.beta) * p.mu)
    with pytest.raises(InvalidInput):
        ck.MutualParams(1.0, 3.0, 1.5)


@pytest.mark.parametrize("lam,mu", [(1.0, 2.0), (0.5, 0.5), (3.0, 1.0)])
def test_mutual_fne_prox_quadratic_passes(lam, mu):
    space, c = cfg("euclid2")
    fam = ProxQuadraticToPoint(E2.point(1, -1))
    rep = ck.check_mutual_fne(space, member(space, fam, lam), member(space, fam, mu), lam, mu, c)
    assert rep.passed and rep.max_violation <= 1e-8


def test_mutual_fne_identity_is_exact():
    space, c = cfg("euclid2", 100)
    ident = lambda x: x
    rep = ck.check_mutual_fne(space, ident, ident, 1.0, 1.0, c)
    # combine(x, x, t) reproduces x up to one rounding
    assert abs(rep.max_violation) < 1e-15


def test_mutual_fne_doubling_fails():
    x, y = E1.point(1.0), E1.point(0.0)
    double = lambda p: E1.point(2 * p.coords[0])
    raw, _ = ck.mutual_fne_violation(E1, double, double, ck.MutualParams(1.0, 1.0, 1.0), x, y)
    assert raw == 1.0  # 2 <= 1 fails by 1
    _, c = cfg("euclid2", 200)
    D = Dilation()
    rep = ck.check_mutual_fne(E2, member(E2, D, 1.0), member(E2, D, 1.0), 1.0, 1.0, c)
    assert not rep.passed and rep.worst_witness is not None


def test_mutual_p2():
    space, c = cfg("euclid2")
    fam = ProxScaledSquaredNorm(1.0)
    assert ck.check_mutual_p2(space, member(space, fam, 1.0), member(space, fam, 3.0), 1.0, 3.0, c).passed
    a = E2.point(1, 1)
    const = lambda x: a
    assert ck.check_mutual_p2(space, const, const, 1.0, 2.0, c).max_violation == 0.0


def test_resolvent_identity():
    space, c = cfg("spider3")
    fam = ProxQuadraticToSet(SpiderRaySegment(1, 0.5, 2))
    assert ck.check_resolvent_identity(space, fam, 1.0, c, tol=1e-6).passed
    x = E2.point(2, 0)
    raw, _ = ck.resolvent_identity_violation(E2, ProxQuadraticToPoint(E2.origin()), 1.0, x, 0.5)
    assert raw == 0.0
    raw, _ = ck.resolvent_identity_violation(E2, ProxQuadraticToPoint(E2.point(1, 1)), 2.0, x, 0.0)
    assert raw == 0.0


def test_nonexpansive():
    space, c = cfg("euclid2")
    rot = lambda x: Rotation(0.7).apply(space, x)
    assert ck.check_nonexpansive(space, rot, c).passed
    assert not ck.check_nonexpansive(space, member(space, Dilation(), 1.0), c).passed


def test_halp_closed_form():
    fam = ProxScaledSquaredNorm(1.0)
    raw, mag = ck.halp_violation(E1, member(E1, fam, 1.0), member(E1, fam, 2.0), E1.point(6.0))
    assert raw == -6.0 and mag == 16.0
    rep = ck.check_halp_at(E1, member(E1, fam, 1.0), member(E1, fam, 2.0), [E1.point(6.0)], tol=0.0)
    assert rep.passed and rep.worst_witness["raw"] == -6.0


def test_halp_halfplane_sampled():
    space, c = cfg("halfplane", 500)
    fam = ProxQuadraticToPoint(H.point(0.5, 2))
    assert ck.check_halp(space, member(space, fam, 1.0), member(space, fam, 2.0), c).passed


def test_uniform_p2_and_identity_counterexample():
    space, c = cfg("euclid2", 500)
    c = c.with_ball(E2.origin(), 1.0)
    phi = Modulus.power(1.0, 2)
    eps = [0.1, 0.5, 1.0]
    T = member(space, ProxScaledSquaredNorm(1.0), 1.0)
    reps = ck.check_uniform_p2(space, T, E2.origin(), 1.0, phi, 1.0, c, 1e-8, eps)
    assert all(r.passed for r in reps.values())
    bad = ck.check_uniform_p2(space, lambda x: x, E2.origin(), 1.0, phi, 1.0, c, 1e-8, eps)
    for e, r in bad.items():
        assert not r.passed
        assert r.worst_witness["raw"] == pytest.approx(e * e)
        x, y = (space.parse_point(r.worst_witness[k]) for k in "xy")
        assert space.dist(x, y) >= e


def test_uniform_p2_vacuous_when_nothing_qualifies():
    space, c = cfg("euclid2", 50)
    a = E2.point(0.3, 0.3)
    reps = ck.check_uniform_p2(space, lambda x: a, E2.origin(), 1.0, Modulus.power(), 1.0, c, 1e-8, [0.5])
    r = reps[0.5]
    assert r.passed and r.checked == 0 and r.skipped == 50
    assert r.max_violation == -math.inf
    assert r.to_dict()["max_violation"] is None


def test_uniq_lemma():
    space, c = cfg("euclid2", 500)
    c = c.with_ball(E2.origin(), 1.0)
    T = member(space, ProxScaledSquaredNorm(1.0), 1.0)
    reps = ck.check_uniq_lemma(space, T, E2.origin(), c, Modulus.power(), 1.0, [0.1, 0.5, 5.0])
    assert all(r.passed for r in reps.values())
    assert reps[5.0].checked == 0
    with pytest.raises(InvalidInput):
        ck.check_uniq_lemma(space, T, E2.point(1, 0), c, Modulus.power(), 1.0, [0.1])


def test_eps_list_validation():
    space, c = cfg("euclid2", 10)
    T = member(space, ProxScaledSquaredNorm(1.0), 1.0)
    for eps in ([], [0.0], [-1.0]):
        with pytest.raises(InvalidInput):
            ck.check_uniform_p2(space, T, E2.origin(), 1.0, Modulus.power(), 1.0, c, 1e-8, eps)


def test_fixed_set_and_equivalence():
    space, c = cfg("euclid2", 100)
    fam = ProxQuadraticToPoint(E2.point(1, 1))
    assert ck.check_fixed_set(space, fam, [0.5, 1, 2]).passed
    res, fne = ck.check_equivalence(space, fam, [0.5, 2.0], c)
    assert len(res) == 4 and len(fne) == 4
    assert all(r.passed for r in res + fne)
    res, fne = ck.check_equivalence(space, Dilation(), [0.5, 2.0], c)
    assert not any(r.passed for r in res) and not all(r.passed for r in fne)
