"""CAT(0) model spaces: Euclidean n-space, the Poincare upper half-plane and
the k-spider (k half-lines glued at a hub).

Every space exposes the same small surface: ``dist``, ``combine`` (the point
``(1-t)p + tq`` on the unique geodesic), ball sampling and a closed-form
projection onto geodesic segments.  Module-level functions mirror the methods
so callers can write ``dist(space, p, q)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, InvalidInput

# ternary search never runs longer than this
TERNARY_MAX_ITER = 200
POINT_EQ_TOL = 1e-9


@dataclass(frozen=True)
class EuclideanPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError(f"half-plane point needs y > 0, got y={self.y!r}")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True)
class SpiderPoint:
    ray: int
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError(f"spider radius must be >= 0, got {self.radius!r}")
        if self.ray < 0:
            raise InvalidInput(f"spider ray index must be >= 0, got {self.ray!r}")
        # the hub is a single point whatever ray it was reached along
        if self.radius == 0:
            object.__setattr__(self, "ray", 0)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def is_hub(self) -> bool:
        return self.radius == 0.0


Point = Union[EuclideanPoint, HalfPlanePoint, SpiderPoint]

_setattr = object.__setattr__


def _epoint(coords: tuple) -> EuclideanPoint:
    # trusted constructor for internally computed coordinates
    p = object.__new__(EuclideanPoint)
    _setattr(p, "coords", coords)
    return p


def _hpoint(x: float, y: float) -> HalfPlanePoint:
    if not y > 0:
        raise DomainError(f"half-plane point needs y > 0, got y={y!r}")
    p = object.__new__(HalfPlanePoint)
    _setattr(p, "x", x)
    _setattr(p, "y", y)
    return p


class Space:
    """Common interface of the model spaces."""

    point_type: type = object
    # integer tag understood by the compiled kernels
    kind_code: int = -1

    def check(self, p) -> None:
        if not isinstance(p, self.point_type):
            raise InvalidInput(f"{type(p).__name__} is not a point of {self!r}")

    def dist(self, p, q) -> float:
        raise NotImplementedError

    def combine(self, p, q, t: float):
        raise NotImplementedError

    def project_t(self, x, a, b) -> float:
        """Parameter of the nearest point to ``x`` on the segment [a, b]."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, base, radius: float):
        """Draw a point uniformly from the closed geodesic ball B(base, radius)."""
        raise NotImplementedError

    def to_row(self, p) -> tuple:
        raise NotImplementedError

    def from_row(self, row):
        raise NotImplementedError

    def to_array(self, points: Sequence) -> np.ndarray:
        return np.array([self.to_row(p) for p in points], dtype=np.float64).reshape(
            len(points), -1
        )

    def parse_point(self, obj):
        raise NotImplementedError

    def dump_point(self, p):
        return list(self.to_row(p))

    def close(self, p, q, tol: float = POINT_EQ_TOL) -> bool:
        return self.dist(p, q) <= tol


class Euclidean(Space):
    point_type = EuclideanPoint
    kind_code = 0

    def __init__(self, dim: int):
        if int(dim) != dim or dim < 1:
            raise InvalidInput(f"Euclidean dimension must be a positive integer, got {dim!r}")
        self.dim = int(dim)

    def __repr__(self):
        return f"Euclidean({self.dim})"

    def __eq__(self, other):
        return isinstance(other, Euclidean) and other.dim == self.dim

    def __hash__(self):
        return hash(("E", self.dim))

    def point(self, *coords) -> EuclideanPoint:
        if len(coords) == 1 and isinstance(coords[0], (list, tuple, np.ndarray)):
            coords = tuple(coords[0])
        p = EuclideanPoint(coords)
        self.check(p)
        return p

    def origin(self) -> EuclideanPoint:
        return EuclideanPoint((0.0,) * self.dim)

    def check(self, p):
        if type(p) is not EuclideanPoint:
            super().check(p)
        if len(p.coords) != self.dim:
            raise InvalidInput(f"point has dimension {len(p.coords)}, space has {self.dim}")

    def dist(self, p, q):
        self.check(p)
        self.check(q)
        return math.dist(p.coords, q.coords)

    def combine(self, p, q, t):
        self.check(p)
        self.check(q)
        s = 1.0 - t
        return _epoint(tuple(s * a + t * b for a, b in zip(p.coords, q.coords)))

    def project_t(self, x, a, b):
        ab = [bi - ai for ai, bi in zip(a.coords, b.coords)]
        nn = sum(c * c for c in ab)
        if nn == 0.0:
            return 0.0
        t = sum((xi - ai) * c for xi, ai, c in zip(x.coords, a.coords, ab)) / nn
        return min(1.0, max(0.0, t))

    def sample(self, rng, base, radius):
        direction = rng.standard_normal(self.dim)
        norm = float(np.linalg.norm(direction))
        while norm == 0.0:
            direction = rng.standard_normal(self.dim)
            norm = float(np.linalg.norm(direction))
        r = radius * rng.random() ** (1.0 / self.dim)
        return _epoint(tuple(c + r * float(d) / norm for c, d in zip(base.coords, direction)))

    def to_row(self, p):
        return p.coords

    def from_row(self, row):
        return EuclideanPoint(tuple(float(c) for c in row))

    def parse_point(self, obj):
        if isinstance(obj, (int, float)) and self.dim == 1:
            obj = [obj]
        if not isinstance(obj, (list, tuple)) or len(obj) != self.dim:
            raise InvalidInput(f"expected a list of {self.dim} numbers, got {obj!r}")
        return EuclideanPoint(tuple(float(c) for c in obj))


def _to_disk(z: complex, base: HalfPlanePoint) -> complex:
    # isometry H -> D sending ``base`` to 0
    u = complex((z.real - base.x) / base.y, z.imag / base.y)
    return (u - 1j) / (u + 1j)


def _from_disk(w: complex, base: HalfPlanePoint) -> HalfPlanePoint:
    u = 1j * (1 + w) / (1 - w)
    return _hpoint(base.x + base.y * u.real, base.y * u.imag)


class HalfPlane(Space):
    """Poincare upper half-plane {(x, y): y > 0}, curvature -1."""

    point_type = HalfPlanePoint
    kind_code = 1

    def __repr__(self):
        return "HalfPlane()"

    def __eq__(self, other):
        return isinstance(other, HalfPlane)

    def __hash__(self):
        return hash("H")

    def point(self, x, y) -> HalfPlanePoint:
        return HalfPlanePoint(x, y)

    def dist(self, p, q):
        self.check(p)
        self.check(q)
        # 2 asinh form of arccosh(1 + |p-q|^2 / (2 y_p y_q)); exact near the diagonal
        h = math.hypot(p.x - q.x, p.y - q.y)
        return 2.0 * math.asinh(h / (2.0 * math.sqrt(p.y * q.y)))

    def combine(self, p, q, t):
        d = self.dist(p, q)
        if d == 0.0 or t == 0.0:
            return p
        if t == 1.0:
            return q
        if abs(p.x - q.x) < 1e-12:
            # vertical geodesic: arclength is log y
            return _hpoint(p.x, p.y * math.exp(t * math.log(q.y / p.y)))
        wq = _to_disk(complex(q.x, q.y), p)
        w = math.tanh(0.5 * t * d) * (wq / abs(wq))
        return _from_disk(w, p)

    def _frame(self, x, a, b):
        """Signed arclength from ``a`` of the foot of ``x`` on the line through a, b."""
        wb = _to_disk(complex(b.x, b.y), a)
        rot = wb.conjugate() / abs(wb)
        wx = _to_disk(complex(x.x, x.y), a) * rot
        u = 1j * (1 + wx) / (1 - wx)
        return math.log(abs(u))

    def project_t(self, x, a, b):
        d = self.dist(a, b)
        if d == 0.0:
            return 0.0
        return min(1.0, max(0.0, self._frame(x, a, b) / d))

    def sample(self, rng, base, radius):
        # area of a hyperbolic disk grows like cosh(r) - 1
        u = rng.random()
        r = math.acosh(1.0 + u * (math.cosh(radius) - 1.0))
        phi = 2.0 * math.pi * rng.random()
        return _from_disk(math.tanh(0.5 * r) * cmath.exp(1j * phi), base)

    def to_row(self, p):
        return (p.x, p.y)

    def from_row(self, row):
        return HalfPlanePoint(float(row[0]), float(row[1]))

    def parse_point(self, obj):
        if not isinstance(obj, (list, tuple)) or len(obj) != 2:
            raise InvalidInput(f"expected [x, y] for a half-plane point, got {obj!r}")
        return HalfPlanePoint(float(obj[0]), float(obj[1]))


class Spider(Space):
    """``rays`` copies of [0, inf) glued at 0; a metric tree."""

    point_type = SpiderPoint
    kind_code = 2

    def __init__(self, rays: int):
        if int(rays) != rays or rays < 3:
            raise InvalidInput(f"a spider needs at least 3 rays, got {rays!r}")
        self.rays = int(rays)

    def __repr__(self):
        return f"Spider({self.rays})"

    def __eq__(self, other):
        return isinstance(other, Spider) and other.rays == self.rays

    def __hash__(self):
        return hash(("S", self.rays))

    def point(self, ray, radius) -> SpiderPoint:
        p = SpiderPoint(int(ray), radius)
        self.check(p)
        return p

    def hub(self) -> SpiderPoint:
        return SpiderPoint(0, 0.0)

    def check(self, p):
        super().check(p)
        if p.ray >= self.rays:
            raise InvalidInput(f"ray {p.ray} out of range for {self!r}")

    def dist(self, p, q):
        self.check(p)
        self.check(q)
        if p.ray == q.ray:
            return abs(p.radius - q.radius)
        return p.radius + q.radius

    def combine(self, p, q, t):
        self.check(p)
        self.check(q)
        if p.ray == q.ray or p.is_hub or q.is_hub:
            ray = q.ray if p.is_hub else p.ray
            return SpiderPoint(ray, (1.0 - t) * p.radius + t * q.radius)
        s = t * (p.radius + q.radius)
        if s <= p.radius:
            return SpiderPoint(p.ray, p.radius - s)
        return SpiderPoint(q.ray, s - p.radius)

    def project_t(self, x, a, b):
        # in a tree the foot of x on [a, b] is the median of x, a, b
        dab = self.dist(a, b)
        if dab == 0.0:
            return 0.0
        t = (self.dist(a, x) + dab - self.dist(b, x)) / (2.0 * dab)
        return min(1.0, max(0.0, t))

    def sample(self, rng, base, radius):
        # the ball is a union of intervals; sample uniformly in total length
        lo = max(0.0, base.radius - radius)
        hi = base.radius + radius
        own = hi - lo
        spill = max(0.0, radius - base.radius)
        others = [k for k in range(self.rays) if k != base.ray]
        total = own + spill * len(others)
        s = rng.random() * total
        if s < own or spill == 0.0:
            return SpiderPoint(base.ray, lo + min(s, own))
        s -= own
        k = min(int(s // spill), len(others) - 1)
        return SpiderPoint(others[k], s - k * spill)

    def to_row(self, p):
        return (float(p.ray), p.radius)

    def from_row(self, row):
        return SpiderPoint(int(row[0]), float(row[1]))

    def parse_point(self, obj):
        if not isinstance(obj, (list, tuple)) or len(obj) != 2:
            raise InvalidInput(f"expected [ray, radius] for a spider point, got {obj!r}")
        p = SpiderPoint(int(obj[0]), float(obj[1]))
        self.check(p)
        return p

    def dump_point(self, p):
        return [p.ray, p.radius]


def dist(space: Space, p, q) -> float:
    return space.dist(p, q)


def combine(space: Space, p, q, t: float):
    if not 0.0 <= t <= 1.0:
        raise InvalidInput(f"geodesic parameter must lie in [0, 1], got {t!r}")
    return space.combine(p, q, t)


def quasi_inner(space: Space, x, y, u, v) -> float:
    """Quasi-linearization pairing <xy, uv>.

    Equals the inner product <x - y, u - v> in Euclidean space.
    """
    d = space.dist
    return 0.5 * (d(x, v) ** 2 + d(y, u) ** 2 - d(x, u) ** 2 - d(y, v) ** 2)


def ternary_iterations(width: float, tol: float) -> int:
    n = math.ceil(math.log(width / tol) / math.log(1.5))
    return max(0, min(TERNARY_MAX_ITER, n))


def ternary_min(f, lo: float, hi: float, tol: float) -> float:
    """Minimizer of a unimodal ``f`` on [lo, hi] to within ``tol``."""
    if tol <= 0:
        raise InvalidInput(f"tolerance must be positive, got {tol!r}")
    for _ in range(ternary_iterations(hi - lo, tol)):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    mid = 0.5 * (lo + hi)
    # endpoints win ties so that degenerate cases return exact answers
    best = min((f(c), i, c) for i, c in enumerate((lo, mid, hi)))
    return best[2]


def project_to_segment(space: Space, x, a, b, tol: float = 1e-10):
    """Nearest point to ``x`` on [a, b] by ternary search.

    This is the generic brute-force route; ``space.project_t`` gives the
    closed form and the two are compared in the tests.
    """
    if tol <= 0:
        raise InvalidInput(f"tolerance must be positive, got {tol!r}")
    if space.dist(a, b) == 0.0:
        return 0.0, a
    if space.dist(x, a) == 0.0:
        return 0.0, a
    t = ternary_min(lambda s: space.dist(x, space.combine(a, b, s)), 0.0, 1.0, tol)
    return t, space.combine(a, b, t)
