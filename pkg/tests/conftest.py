import numpy as np
import pytest
from hypothesis import settings

from proxcat.geometry import Euclidean, HalfPlane, Spider

settings.register_profile("proxcat", deadline=None, max_examples=60)
settings.load_profile("proxcat")

# (space, ball centre, ball radius) used for sampled tests
SPACES = {
    "euclid2": (Euclidean(2), (0.0, 0.0), 2.0),
    "halfplane": (HalfPlane(), (0.0, 1.0), 1.5),
    "spider3": (Spider(3), (0, 0.0), 3.0),
}


def ball(name):
    space, base, r = SPACES[name]
    return space, space.parse_point(list(base)), r


@pytest.fixture(params=sorted(SPACES))
def space_ball(request):
    return ball(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
