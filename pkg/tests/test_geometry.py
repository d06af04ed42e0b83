import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from proxcat.errors import DomainError, InvalidInput
from proxcat.geometry import (
    Euclidean,
    EuclideanPoint,
    HalfPlane,
    HalfPlanePoint,
    Spider,
    SpiderPoint,
    combine,
    dist,
    project_to_segment,
    quasi_inner,
    ternary_iterations,
    ternary_min,
)

E2 = Euclidean(2)
H = HalfPlane()
S3 = Spider(3)
S4 = Spider(4)

coord = st.floats(-5, 5, allow_nan=False)
height = st.floats(0.05, 20, allow_nan=False)
unit = st.floats(0, 1)


def hp_points():
    return st.builds(HalfPlanePoint, coord, height)


def sp_points(rays=3):
    return st.builds(SpiderPoint, st.integers(0, rays - 1), st.floats(0, 5))


def e_points():
    return st.builds(lambda a, b: EuclideanPoint((a, b)), coord, coord)


def halfplane_dist_acosh(p, q):
    # textbook form, accurate away from the diagonal
    return math.acosh(1 + ((p.x - q.x) ** 2 + (p.y - q.y) ** 2) / (2 * p.y * q.y))


# -- worked values -----------------------------------------------------------


def test_distances_worked_values():
    assert dist(E2, E2.point(0, 0), E2.point(3, 4)) == 5.0
    assert dist(H, H.point(0, 1), H.point(0, math.e)) == pytest.approx(1.0, abs=1e-15)
    assert dist(S4, S4.point(1, 2), S4.point(2, 3)) == 5.0


def test_combine_worked_values():
    assert combine(E2, E2.point(0, 0), E2.point(2, 2), 0.5) == E2.point(1, 1)
    mid = combine(S3, S3.point(1, 2), S3.point(2, 2), 0.5)
    assert mid.is_hub and mid.radius == 0.0
    m = combine(H, H.point(0, 1), H.point(0, math.e**2), 0.5)
    assert m.x == pytest.approx(0, abs=1e-12)
    assert m.y == pytest.approx(math.e, rel=1e-14)


def test_quasi_inner_worked_values():
    x, y = E2.point(0, 0), E2.point(1, 0)
    assert quasi_inner(E2, x, y, x, y) == 1.0
    assert quasi_inner(E2, E2.point(1, 0), E2.point(0, 0), E2.point(0, 2), E2.point(0, 0)) == pytest.approx(
        0.0, abs=1e-15
    )
    hub = S3.hub()
    assert quasi_inner(S3, S3.point(1, 1), hub, S3.point(2, 1), hub) == -1.0


def test_projection_worked_values():
    # distance is flat at the foot, so search resolves t only to ~sqrt(machine eps)
    t, p = project_to_segment(E2, E2.point(1, 1), E2.point(0, 0), E2.point(2, 0))
    assert t == pytest.approx(0.5, abs=1e-7)
    assert E2.dist(p, E2.point(1, 0)) < 1e-7
    assert E2.project_t(E2.point(1, 1), E2.point(0, 0), E2.point(2, 0)) == 0.5
    a = E2.point(3, 1)
    assert project_to_segment(E2, a, a, E2.point(0, 0)) == (0.0, a)
    t, p = project_to_segment(S4, S4.point(3, 1), S4.point(1, 1), S4.point(2, 1))
    assert t == pytest.approx(0.5, abs=1e-8)
    assert p.radius < 1e-8


def test_hub_is_normalized():
    assert SpiderPoint(2, 0.0) == SpiderPoint(0, 0.0)
    assert S3.point(1, 0).ray == 0


# -- errors ------------------------------------------------------------------


def test_domain_errors():
    with pytest.raises(DomainError):
        H.point(0, 0)
    with pytest.raises(DomainError):
        HalfPlanePoint(1.0, -2.0)
    with pytest.raises(InvalidInput):
        Spider(2)
    with pytest.raises(InvalidInput):
        S3.point(3, 1.0)
    with pytest.raises(InvalidInput):
        S3.point(1, -1.0)
    with pytest.raises(InvalidInput):
        Euclidean(0)


def test_kind_mismatch_is_invalid_input():
    with pytest.raises(InvalidInput):
        E2.dist(E2.point(0, 0), H.point(0, 1))
    with pytest.raises(InvalidInput):
        H.dist(S3.hub(), H.point(0, 1))
    with pytest.raises(InvalidInput):
        Euclidean(3).dist(E2.point(0, 0), E2.point(1, 1))


def test_combine_rejects_parameter_outside_unit_interval():
    with pytest.raises(InvalidInput):
        combine(E2, E2.point(0, 0), E2.point(1, 1), 1.5)
    with pytest.raises(InvalidInput):
        combine(E2, E2.point(0, 0), E2.point(1, 1), -0.1)


def test_projection_rejects_nonpositive_tol():
    with pytest.raises(InvalidInput):
        project_to_segment(E2, E2.point(0, 0), E2.point(1, 0), E2.point(2, 0), tol=0)


def test_ternary_iteration_count():
    assert ternary_iterations(1.0, 1e-10) == math.ceil(math.log(1e10) / math.log(1.5))
    assert ternary_iterations(1.0, 1e-300) == 200
    assert ternary_min(lambda t: (t - 0.3) ** 2, 0, 1, 1e-12) == pytest.approx(0.3, abs=1e-9)


# -- properties ----------------------------------------------------------------


@given(hp_points(), hp_points())
def test_halfplane_distance_matches_acosh_form(p, q):
    d = H.dist(p, q)
    ref = halfplane_dist_acosh(p, q)
    assert d == pytest.approx(ref, rel=1e-7, abs=1e-7)


@given(hp_points(), hp_points(), unit)
def test_halfplane_combine_is_geodesic(p, q, t):
    d = H.dist(p, q)
    m = H.combine(p, q, t)
    assert H.dist(p, m) == pytest.approx(t * d, rel=1e-9, abs=1e-9)
    assert H.dist(m, q) == pytest.approx((1 - t) * d, rel=1e-9, abs=1e-9)


@given(sp_points(), sp_points(), unit)
def test_spider_combine_is_geodesic(p, q, t):
    d = S3.dist(p, q)
    m = S3.combine(p, q, t)
    assert S3.dist(p, m) == pytest.approx(t * d, abs=1e-12)
    assert S3.dist(m, q) == pytest.approx((1 - t) * d, abs=1e-12)


@given(e_points(), e_points(), e_points(), e_points())
def test_euclidean_quasi_inner_is_dot_product(x, y, u, v):
    ref = np.dot(np.subtract(y.coords, x.coords), np.subtract(v.coords, u.coords))
    assert quasi_inner(E2, x, y, u, v) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("space,pts", [(E2, e_points()), (H, hp_points()), (S3, sp_points())])
def test_closed_form_projection_matches_ternary_search(space, pts):
    @given(pts, pts, pts)
    def check(x, a, b):
        t_search, p_search = project_to_segment(space, x, a, b, tol=1e-12)
        p_closed = space.combine(a, b, space.project_t(x, a, b))
        # both are minimizers: distances agree even where the foot is flat
        assert space.dist(x, p_closed) <= space.dist(x, p_search) + 1e-7
        assert space.dist(x, p_search) <= space.dist(x, p_closed) + 1e-7

    check()


def test_sampling_stays_in_ball(space_ball, rng):
    space, base, r = space_ball
    for _ in range(500):
        p = space.sample(rng, base, r)
        assert space.dist(base, p) <= r * (1 + 1e-12)


def test_rows_round_trip(space_ball, rng):
    space, base, r = space_ball
    pts = [space.sample(rng, base, r) for _ in range(20)]
    back = [space.from_row(row) for row in space.to_array(pts)]
    assert back == pts
