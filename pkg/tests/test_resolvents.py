import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxcat import resolvents as rv
from proxcat.errors import InvalidInput, NumericFailure
from proxcat.geometry import Euclidean, HalfPlane, Spider
from proxcat.resolvents import (
    Constant,
    Dilation,
    Identity,
    Negation,
    ProjectionOnto,
    ProxDistanceToPoint,
    ProxQuadraticToPoint,
    ProxQuadraticToSet,
    ProxScaledSquaredNorm,
    ResolventOfMonotoneLinear,
    ResolventOfNonexpansive,
    Rotation,
    apply,
    fixed_set,
    member,
    prox_oracle_1d,
    resolvent_nonexp_iterate,
)
from proxcat.sets import EuclideanAffineLine, Segment, Singleton, SpiderRaySegment, Unknown, points_of

from conftest import ball

E1 = Euclidean(1)
E2 = Euclidean(2)
H = HalfPlane()
S3 = Spider(3)

gammas = st.floats(0.01, 20)
seeds = st.integers(0, 2**32 - 1)


def test_apply_worked_values():
    assert apply(E2, ProxScaledSquaredNorm(1.0), 1.0, E2.point(2, 0)) == E2.point(1, 0)
    assert apply(E1, ProxDistanceToPoint(E1.point(0)), 1.0, E1.point(3)) == E1.point(2)
    z = apply(E1, ResolventOfNonexpansive(Negation()), 1.0, E1.point(1))
    assert z.coords[0] == pytest.approx(1 / 3, abs=1e-10)


def test_resolvent_of_identity_and_constant():
    x = E2.point(0.3, -1.2)
    assert resolvent_nonexp_iterate(E2, Identity(), 2.5, x) == x
    a = E2.point(2, 2)
    z = resolvent_nonexp_iterate(E2, Constant(a), 1.0, x)
    assert E2.dist(z, E2.combine(x, a, 0.5)) < 1e-10


@given(gammas, st.floats(-3, 3), st.floats(-3, 3), st.floats(-math.pi, math.pi))
def test_rotation_resolvent_matches_linear_solve(gamma, u, v, angle):
    x = E2.point(u, v)
    z = resolvent_nonexp_iterate(E2, Rotation(angle), gamma, x, tol=1e-11)
    R = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    # z = (x + gamma R z) / (1 + gamma)
    exact = np.linalg.solve((1 + gamma) * np.eye(2) - gamma * R, [u, v])
    assert np.allclose(z.coords, exact, atol=1e-10)


def test_rotation_quarter_turn():
    z = apply(E2, ResolventOfNonexpansive(Rotation(math.pi / 2)), 1.0, E2.point(1, 0))
    exact = np.linalg.solve(np.array([[2.0, 1.0], [-1.0, 2.0]]), [1.0, 0.0])
    assert np.allclose(z.coords, exact, atol=1e-10)


@given(gammas, st.floats(-3, 3))
def test_negation_resolvent_closed_form(gamma, x):
    z = apply(E1, ResolventOfNonexpansive(Negation()), gamma, E1.point(x))
    assert z.coords[0] == pytest.approx(x / (1 + 2 * gamma), abs=1e-9)


def test_banach_iteration_cap(monkeypatch):
    monkeypatch.setattr(rv, "MAX_BANACH_ITER", 3)
    with pytest.raises(NumericFailure):
        resolvent_nonexp_iterate(E2, Rotation(1.0), 5.0, E2.point(1, 1))


@given(gammas, st.floats(-3, 3), st.floats(-3, 3))
def test_monotone_linear_matches_numpy_solve(gamma, u, v):
    M = ((1.0, 2.0), (-2.0, 0.5))
    y = apply(E2, ResolventOfMonotoneLinear(M), gamma, E2.point(u, v))
    ref = np.linalg.solve(np.eye(2) + gamma * np.array(M), [u, v])
    assert np.allclose(y.coords, ref, atol=1e-12)


def test_non_monotone_matrix_rejected():
    with pytest.raises(InvalidInput):
        ResolventOfMonotoneLinear(((-1.0, 0.0), (0.0, 1.0)))
    with pytest.raises(InvalidInput):
        ResolventOfMonotoneLinear(((1.0, 0.0, 0.0),))


def test_order_and_kind_validation():
    fam = ProxScaledSquaredNorm(1.0)
    for g in (0.0, -1.0):
        with pytest.raises(InvalidInput):
            apply(E2, fam, g, E2.point(1, 1))
        with pytest.raises(InvalidInput):
            member(E2, fam, g)
    with pytest.raises(InvalidInput):
        apply(E2, Rotation(1.0), 1.0, E2.point(1, 1))
    with pytest.raises(InvalidInput):
        apply(H, fam, 1.0, H.point(0, 1))
    with pytest.raises(InvalidInput):
        ProxScaledSquaredNorm(0.0)


def test_fixed_set_descriptors():
    assert fixed_set(ProxScaledSquaredNorm(2.0), E2) == Singleton(E2.origin())
    assert fixed_set(ResolventOfNonexpansive(Rotation(math.pi / 3)), E2) == Singleton(E2.point(0, 0))
    assert fixed_set(ResolventOfNonexpansive(Identity()), E2) == Unknown()
    seg = Segment(E2.point(0, 0), E2.point(1, 1))
    assert fixed_set(ProxQuadraticToSet(seg), E2) == seg
    assert fixed_set(ResolventOfNonexpansive(ProjectionOnto(seg)), E2) == seg
    a = E2.point(1, 2)
    assert fixed_set(ResolventOfNonexpansive(Constant(a)), E2) == Singleton(a)
    line = fixed_set(ResolventOfMonotoneLinear(((1.0, 0.0), (0.0, 0.0))), E2)
    assert isinstance(line, EuclideanAffineLine)
    assert abs(line.direction[0]) < 1e-12 and abs(abs(line.direction[1]) - 1) < 1e-12
    assert fixed_set(ResolventOfMonotoneLinear(((0.0, 0.0), (0.0, 0.0))), E2) == Unknown()
    assert fixed_set(ResolventOfMonotoneLinear(((1.0, 1.0), (-1.0, 1.0))), E2) == Singleton(E2.point(0, 0))
    assert fixed_set(ResolventOfMonotoneLinear(np.eye(3)), Euclidean(3)) == Unknown()


FAMILIES = [
    (E2, ProxQuadraticToPoint(E2.point(1, 0.5))),
    (E2, ProxDistanceToPoint(E2.point(0.5, -0.5))),
    (E2, ProxQuadraticToSet(Segment(E2.point(-1, 0), E2.point(1, 1)))),
    (E2, ProxQuadraticToSet(EuclideanAffineLine(E2.point(0, 0), (1, 0)))),
    (E2, ProxScaledSquaredNorm(1.5)),
    (H, ProxQuadraticToPoint(H.point(0.5, 2))),
    (H, ProxDistanceToPoint(H.point(-0.3, 0.7))),
    (H, ProxQuadraticToSet(Segment(H.point(-1, 1), H.point(1, 2)))),
    (S3, ProxQuadraticToPoint(S3.point(1, 1.5))),
    (S3, ProxDistanceToPoint(S3.point(2, 0.5))),
    (S3, ProxQuadraticToSet(SpiderRaySegment(1, 0.5, 2))),
]


def _ball_for(space):
    return {E2: "euclid2", H: "halfplane", S3: "spider3"}[space]


@pytest.mark.parametrize("space,family", FAMILIES, ids=lambda v: type(v).__name__)
@given(seed=seeds, gamma=gammas)
def test_prox_closed_form_matches_oracle(space, family, seed, gamma):
    _, base, r = ball(_ball_for(space))
    x = space.sample(np.random.default_rng(seed), base, r)
    closed = apply(space, family, gamma, x)
    oracle = prox_oracle_1d(space, family, gamma, x, tol=1e-12)
    # objective is flat at the minimizer: compare points to sqrt(eps) accuracy
    assert space.dist(closed, oracle) < 1e-6


@pytest.mark.parametrize("space,family", FAMILIES, ids=lambda v: type(v).__name__)
def test_fixed_set_points_are_fixed(space, family):
    F = fixed_set(family, space)
    for g in (0.1, 1.0, 7.0):
        for p in points_of(space, F):
            assert space.dist(apply(space, family, g, p), p) < 1e-12


def test_spider_oracle_goes_through_hub():
    fam = ProxQuadraticToPoint(S3.point(2, 1))
    x = S3.point(1, 1)
    y = prox_oracle_1d(S3, fam, 1.0, x)
    assert y.radius < 1e-8
    assert apply(S3, fam, 1.0, x).is_hub


def test_oracle_at_anchor_returns_x():
    a = H.point(0.2, 1.3)
    assert prox_oracle_1d(H, ProxQuadraticToPoint(a), 1.0, a) == a


def test_oracle_rejects_unsupported_family():
    with pytest.raises(InvalidInput):
        prox_oracle_1d(E2, Dilation(), 1.0, E2.point(1, 1))


def test_dilation_expands():
    assert apply(E1, Dilation(), 1.0, E1.point(1.5)) == E1.point(3.0)
