"""Descriptors for closed convex sets and nearest-point projection onto them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import InvalidInput, UnsupportedSet
from .geometry import Euclidean, EuclideanPoint, Space, Spider, SpiderPoint


@dataclass(frozen=True)
class Singleton:
    a: object


@dataclass(frozen=True)
class Segment:
    a: object
    b: object


@dataclass(frozen=True)
class EuclideanAffineLine:
    point: EuclideanPoint
    direction: tuple

    def __post_init__(self):
        d = tuple(float(c) for c in self.direction)
        if not any(d):
            raise InvalidInput("line direction must be nonzero")
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class SpiderRaySegment:
    ray: int
    r_min: float
    r_max: float

    def __post_init__(self):
        if not 0 <= self.r_min <= self.r_max:
            raise InvalidInput(f"need 0 <= r_min <= r_max, got {self.r_min}, {self.r_max}")


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


ConvexSet = Union[Singleton, Segment, EuclideanAffineLine, SpiderRaySegment]
FixedSet = Union[ConvexSet, Empty, Unknown]


def project(space: Space, C, x):
    """Nearest point of ``C`` to ``x`` (closed forms for every descriptor)."""
    if isinstance(C, Singleton):
        return C.a
    if isinstance(C, Segment):
        return space.combine(C.a, C.b, space.project_t(x, C.a, C.b))
    if isinstance(C, EuclideanAffineLine):
        if not isinstance(space, Euclidean):
            raise InvalidInput("affine lines live in Euclidean space")
        space.check(x)
        p, d = C.point.coords, C.direction
        s = sum((xi - pi) * di for xi, pi, di in zip(x.coords, p, d)) / sum(c * c for c in d)
        return EuclideanPoint(tuple(pi + s * di for pi, di in zip(p, d)))
    if isinstance(C, SpiderRaySegment):
        if not isinstance(space, Spider):
            raise InvalidInput("ray segments live in a spider")
        space.check(x)
        if x.ray == C.ray or x.is_hub:
            r = min(C.r_max, max(C.r_min, x.radius))
        else:
            r = C.r_min
        return SpiderPoint(C.ray, r)
    if isinstance(C, (Empty, Unknown)):
        raise UnsupportedSet(f"cannot project onto {type(C).__name__} set")
    raise InvalidInput(f"unknown set descriptor {C!r}")


def contains(space: Space, C, x, tol: float = 1e-9) -> bool:
    return space.dist(project(space, C, x), x) <= tol


def points_of(space: Space, C, n: int = 5):
    """A few deterministic points of ``C`` (used to test fixed-set claims)."""
    ts = [i / (n - 1) for i in range(n)] if n > 1 else [0.0]
    if isinstance(C, Singleton):
        return [C.a]
    if isinstance(C, Segment):
        return [space.combine(C.a, C.b, t) for t in ts]
    if isinstance(C, EuclideanAffineLine):
        return [
            EuclideanPoint(tuple(p + (4 * t - 2) * d for p, d in zip(C.point.coords, C.direction)))
            for t in ts
        ]
    if isinstance(C, SpiderRaySegment):
        return [SpiderPoint(C.ray, C.r_min + t * (C.r_max - C.r_min)) for t in ts]
    raise UnsupportedSet(f"no points to list for {type(C).__name__}")
