"""Catalog of resolvent families ``gamma -> T_gamma``.

The catalog covers proximal mappings of a few convex functions, resolvents
of nonexpansive maps (computed as certified Banach fixed points) and
resolvents of linear monotone operators on Euclidean space.  ``Dilation`` is
the expansive counterexample used to show the checkers can fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from .errors import InvalidInput, NumericFailure
from .geometry import Euclidean, EuclideanPoint, Space, _epoint, project_to_segment, ternary_min
from .sets import (
    EuclideanAffineLine,
    Segment,
    Singleton,
    Unknown,
    project,
)

MAX_BANACH_ITER = 10**6


# -- nonexpansive maps ------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    def apply(self, space, x):
        space.check(x)
        return x

    def fixed_set(self, space):
        return Unknown()


@dataclass(frozen=True)
class Negation:
    def apply(self, space, x):
        _need_euclidean(space, self)
        space.check(x)
        return _epoint(tuple(-c for c in x.coords))

    def fixed_set(self, space):
        return Singleton(space.origin())


@dataclass(frozen=True)
class Constant:
    a: object

    def apply(self, space, x):
        space.check(x)
        return self.a

    def fixed_set(self, space):
        return Singleton(self.a)


@dataclass(frozen=True)
class Rotation:
    angle: float

    def apply(self, space, x):
        _need_euclidean(space, self)
        if space.dim != 2:
            raise InvalidInput("rotations are defined on the Euclidean plane")
        space.check(x)
        c, s = math.cos(self.angle), math.sin(self.angle)
        u, v = x.coords
        return _epoint((c * u - s * v, s * u + c * v))

    def fixed_set(self, space):
        if math.isclose(math.remainder(self.angle, 2 * math.pi), 0.0, abs_tol=1e-15):
            return Unknown()
        return Singleton(space.origin())


@dataclass(frozen=True)
class ProjectionOnto:
    C: object

    def apply(self, space, x):
        return project(space, self.C, x)

    def fixed_set(self, space):
        return self.C


def _need_euclidean(space, what):
    if not isinstance(space, Euclidean):
        raise InvalidInput(f"{type(what).__name__} is only defined on Euclidean space")


# -- families ---------------------------------------------------------------


def _check_gamma(gamma):
    if not gamma > 0:
        raise InvalidInput(f"resolvent order must be positive, got {gamma!r}")


@dataclass(frozen=True)
class ProxQuadraticToPoint:
    """Proximal map of f = d^2(., a) / 2."""

    a: object

    def apply(self, space, gamma, x):
        return space.combine(x, self.a, gamma / (1.0 + gamma))

    def fixed_set(self, space):
        return Singleton(self.a)


@dataclass(frozen=True)
class ProxDistanceToPoint:
    """Proximal map of f = d(., a): step ``min(gamma, d(x, a))`` towards a."""

    a: object

    def apply(self, space, gamma, x):
        d = space.dist(x, self.a)
        if d <= gamma:
            return self.a
        return space.combine(x, self.a, gamma / d)

    def fixed_set(self, space):
        return Singleton(self.a)


@dataclass(frozen=True)
class ProxQuadraticToSet:
    """Proximal map of f = d^2(., C) / 2."""

    C: object

    def apply(self, space, gamma, x):
        return space.combine(x, project(space, self.C, x), gamma / (1.0 + gamma))

    def fixed_set(self, space):
        return self.C


@dataclass(frozen=True)
class ProxScaledSquaredNorm:
    """Proximal map of (c/2)|.|^2 on R^n, i.e. the resolvent of A = cI."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidInput(f"c must be positive, got {self.c!r}")

    def scalar_factor(self, gamma):
        return 1.0 / (1.0 + gamma * self.c)

    def apply(self, space, gamma, x):
        _need_euclidean(space, self)
        space.check(x)
        k = 1.0 + gamma * self.c
        return _epoint(tuple(v / k for v in x.coords))

    def fixed_set(self, space):
        return Singleton(space.origin())


@dataclass(frozen=True)
class ResolventOfNonexpansive:
    """R_{T,gamma}: the fixed point of z -> x/(1+gamma) + gamma T z/(1+gamma)."""

    T: object
    tol: float = 1e-10

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidInput(f"tol must be positive, got {self.tol!r}")

    def apply(self, space, gamma, x):
        return resolvent_nonexp_iterate(space, self.T, gamma, x, self.tol)

    def fixed_set(self, space):
        return self.T.fixed_set(space)


@dataclass(frozen=True)
class ResolventOfMonotoneLinear:
    """J_{gamma A} for A x = M x with M monotone (M + M^T positive semidefinite)."""

    M: tuple

    def __post_init__(self):
        M = np.asarray(self.M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise InvalidInput(f"M must be a nonempty square matrix, got shape {M.shape}")
        if np.linalg.eigvalsh(0.5 * (M + M.T)).min() < -1e-12:
            raise InvalidInput("M is not monotone: its symmetric part has a negative eigenvalue")
        object.__setattr__(self, "M", tuple(tuple(float(v) for v in row) for row in M))

    @property
    def matrix(self):
        return np.array(self.M)

    def apply(self, space, gamma, x):
        _need_euclidean(space, self)
        space.check(x)
        M = self.matrix
        if M.shape[0] != space.dim:
            raise InvalidInput(f"matrix is {M.shape[0]}x{M.shape[0]}, space has dim {space.dim}")
        y = np.linalg.solve(np.eye(space.dim) + gamma * M, np.array(x.coords))
        return EuclideanPoint(tuple(float(v) for v in y))

    def fixed_set(self, space):
        M = self.matrix
        n = M.shape[0]
        if n > 2:
            return Unknown()
        _, s, vt = np.linalg.svd(M)
        rank = int(np.sum(s > 1e-12 * max(1.0, s.max(initial=0.0))))
        if rank == n:
            return Singleton(EuclideanPoint((0.0,) * n))
        if rank == 0:
            return Unknown()
        # n == 2, rank 1: the kernel is a line through the origin
        return EuclideanAffineLine(EuclideanPoint((0.0, 0.0)), tuple(vt[-1]))


@dataclass(frozen=True)
class Dilation:
    """x -> (1 + gamma) x on R^n; expansive, so not jointly firmly nonexpansive."""

    def apply(self, space, gamma, x):
        _need_euclidean(space, self)
        space.check(x)
        return _epoint(tuple((1.0 + gamma) * v for v in x.coords))

    def fixed_set(self, space):
        return Singleton(space.origin())


NONEXPANSIVE_KINDS = (Identity, Negation, Constant, Rotation, ProjectionOnto)
PROX_KINDS = (ProxQuadraticToPoint, ProxDistanceToPoint, ProxQuadraticToSet, ProxScaledSquaredNorm)


# -- operations -------------------------------------------------------------


def apply(space: Space, family, gamma: float, x):
    """T_gamma x for a catalog family."""
    _check_gamma(gamma)
    if not hasattr(family, "fixed_set") or isinstance(family, NONEXPANSIVE_KINDS):
        raise InvalidInput(f"{family!r} is not a resolvent family")
    return family.apply(space, gamma, x)


def member(space: Space, family, gamma: float):
    """The single map T_gamma as a callable ``x -> T_gamma x``."""
    _check_gamma(gamma)
    return partial(apply, space, family, gamma)


def resolvent_nonexp_iterate(space: Space, T, gamma: float, x, tol: float = 1e-10):
    """Banach iteration for R_{T,gamma} x with a-posteriori error <= tol.

    The map z -> (1-q) x + q T z is a q-contraction with q = gamma/(1+gamma),
    so d(z_{k+1}, z*) <= q/(1-q) d(z_k, z_{k+1}).
    """
    _check_gamma(gamma)
    if not tol > 0:
        raise InvalidInput(f"tol must be positive, got {tol!r}")
    q = gamma / (1.0 + gamma)
    stop = tol * (1.0 - q) / q
    z = x
    for _ in range(MAX_BANACH_ITER):
        nxt = space.combine(x, T.apply(space, z), q)
        step = space.dist(z, nxt)
        z = nxt
        if step <= stop:
            return z
    raise NumericFailure(
        f"resolvent iteration did not reach tol={tol} in {MAX_BANACH_ITER} steps (gamma={gamma})"
    )


def fixed_set(family, space: Space):
    """Common fixed-point set of the family (independent of gamma)."""
    return family.fixed_set(space)


def prox_oracle_1d(space: Space, family, gamma: float, x, tol: float = 1e-10):
    """Brute-force proximal point: minimize f(y) + d^2(x, y)/(2 gamma) along a geodesic.

    The minimizer of each supported kind lies on the geodesic from ``x`` to an
    anchor (the point ``a``, the projection of ``x`` on ``C``, or the origin),
    so a ternary search in the geodesic parameter finds it.  Set projections
    onto segments are themselves found by ternary search.
    """
    _check_gamma(gamma)
    if not tol > 0:
        raise InvalidInput(f"tol must be positive, got {tol!r}")
    d = space.dist
    if isinstance(family, ProxQuadraticToPoint):
        anchor = family.a

        def f(y):
            return 0.5 * d(y, anchor) ** 2

    elif isinstance(family, ProxDistanceToPoint):
        anchor = family.a

        def f(y):
            return d(y, anchor)

    elif isinstance(family, ProxQuadraticToSet):
        C = family.C

        def near(y):
            if isinstance(C, Segment):
                return project_to_segment(space, y, C.a, C.b, tol)[1]
            return project(space, C, y)

        anchor = near(x)

        def f(y):
            return 0.5 * d(y, near(y)) ** 2

    elif isinstance(family, ProxScaledSquaredNorm):
        _need_euclidean(space, family)
        anchor = space.origin()

        def f(y):
            return 0.5 * family.c * sum(v * v for v in y.coords)

    else:
        raise InvalidInput(f"no 1-D oracle for {type(family).__name__}")

    if d(x, anchor) == 0.0:
        return x

    def objective(t):
        y = space.combine(x, anchor, t)
        return f(y) + d(x, y) ** 2 / (2.0 * gamma)

    return space.combine(x, anchor, ternary_min(objective, 0.0, 1.0, tol))
