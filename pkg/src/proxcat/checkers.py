"""Sampled verification of metric inequalities.

Every check draws ``cfg.count`` samples, sample ``i`` coming from its own
random substream keyed by ``(cfg.seed, i)``, so results do not depend on
evaluation order.  Each sample yields a raw violation ``lhs - rhs`` (positive
means the inequality fails) and a magnitude; the reported violation is
``raw / (1 + magnitude)`` and a check passes when the largest one is at most
``tolerance``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInput
from .geometry import Euclidean, Space, quasi_inner
from .resolvents import member

DEFAULT_TOL = 1e-8
# the resolvent identity is only sampled for t < 1: T_0 is not part of the family
T_MAX = 1.0 - 1e-6


@dataclass(frozen=True)
class SampleConfig:
    seed: int
    count: int
    radius: float
    base: object

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise InvalidInput(f"sample count must be a positive integer, got {self.count!r}")
        if not self.radius > 0:
            raise InvalidInput(f"sampling radius must be positive, got {self.radius!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidInput(f"seed must be a non-negative integer, got {self.seed!r}")

    def with_ball(self, base, radius):
        return SampleConfig(self.seed, self.count, radius, base)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


@dataclass(frozen=True)
class MutualParams:
    """lambda, mu > 0 and 0 < delta <= min(lambda, mu); alpha, beta solve (1-a)l = (1-b)m = delta."""

    lam: float
    mu: float
    delta: float

    def __post_init__(self):
        if not (self.lam > 0 and self.mu > 0):
            raise InvalidInput("lambda and mu must be positive")
        if not 0 < self.delta <= min(self.lam, self.mu):
            raise InvalidInput(f"delta must lie in (0, min(lambda, mu)], got {self.delta!r}")

    @property
    def alpha(self):
        return 1.0 - self.delta / self.lam

    @property
    def beta(self):
        return 1.0 - self.delta / self.mu


@dataclass
class ViolationReport:
    name: str
    max_violation: float
    worst_witness: Optional[dict]
    checked: int
    tolerance: float
    skipped: int = 0
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_dict(self):
        mv = self.max_violation
        return {
            "name": self.name,
            "params": self.params,
            "max_violation": mv if math.isfinite(mv) else None,
            "worst_witness": self.worst_witness,
            "checked": self.checked,
            "skipped": self.skipped,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


class _Worst:
    """Running max of scaled violations; the lowest index wins ties."""

    def __init__(self, name, tol, params=None):
        self.name, self.tol, self.params = name, tol, params or {}
        self.best = -math.inf
        self.witness = None
        self.checked = 0
        self.skipped = 0

    def add(self, index, raw, magnitude, witness):
        if raw is None:
            self.skipped += 1
            return
        self.checked += 1
        v = raw / (1.0 + abs(magnitude))
        if v > self.best:
            self.best = v
            self.witness = {"index": index, "raw": raw, **witness}

    def report(self):
        return ViolationReport(
            self.name, self.best, self.witness, self.checked, self.tol, self.skipped, self.params
        )


def _check_tol(tol):
    if not tol >= 0:
        raise InvalidInput(f"tolerance must be non-negative, got {tol!r}")


def _run(name, cfg: SampleConfig, tol, evaluate: Callable, params=None) -> ViolationReport:
    _check_tol(tol)
    acc = _Worst(name, tol, params)
    for i in range(cfg.count):
        raw, mag, witness = evaluate(sample_rng(cfg.seed, i))
        acc.add(i, raw, mag, witness)
    return acc.report()


def _pts(space, **points):
    return {k: space.dump_point(p) for k, p in points.items()}


# -- geometry ---------------------------------------------------------------


def geodesic_law_violation(space, p, q, t, s):
    lhs = space.dist(space.combine(p, q, t), space.combine(p, q, s))
    rhs = abs(t - s) * space.dist(p, q)
    return abs(lhs - rhs), max(lhs, rhs)


def check_geodesic_law(space: Space, cfg: SampleConfig, tol=1e-9) -> ViolationReport:
    def ev(rng):
        p = space.sample(rng, cfg.base, cfg.radius)
        q = space.sample(rng, cfg.base, cfg.radius)
        t, s = rng.random(), rng.random()
        raw, mag = geodesic_law_violation(space, p, q, t, s)
        return raw, mag, {**_pts(space, p=p, q=q), "t": t, "s": s}

    return _run("geodesic_law", cfg, tol, ev)


def cat0_violation(space, z, p, q, t):
    d2 = lambda a, b: space.dist(a, b) ** 2  # noqa: E731
    lhs = d2(z, space.combine(p, q, t))
    zp, zq, pq = d2(z, p), d2(z, q), d2(p, q)
    rhs = (1 - t) * zp + t * zq - t * (1 - t) * pq
    return lhs - rhs, max(lhs, zp, zq, pq)


def check_cat0(space: Space, cfg: SampleConfig, tol=1e-9) -> ViolationReport:
    def ev(rng):
        z, p, q = (space.sample(rng, cfg.base, cfg.radius) for _ in range(3))
        t = rng.random()
        raw, mag = cat0_violation(space, z, p, q, t)
        return raw, mag, {**_pts(space, z=z, p=p, q=q), "t": t}

    return _run("cat0", cfg, tol, ev)


def quasi_axioms_violation(space, x, y, u, v, w):
    qi = lambda a, b, c, d: quasi_inner(space, a, b, c, d)  # noqa: E731
    xy_xy, d2 = qi(x, y, x, y), space.dist(x, y) ** 2
    xy_uv, uv_xy, yx_uv = qi(x, y, u, v), qi(u, v, x, y), qi(y, x, u, v)
    xy_vw, xy_uw = qi(x, y, v, w), qi(x, y, u, w)
    residuals = (
        xy_xy - d2,
        xy_uv - uv_xy,
        yx_uv + xy_uv,
        xy_uv + xy_vw - xy_uw,
    )
    terms = (xy_xy, d2, xy_uv, uv_xy, yx_uv, xy_vw, xy_uw)
    return max(abs(r) for r in residuals), max(abs(c) for c in terms)


def check_quasi_axioms(space: Space, cfg: SampleConfig, tol=1e-9) -> ViolationReport:
    def ev(rng):
        x, y, u, v, w = (space.sample(rng, cfg.base, cfg.radius) for _ in range(5))
        raw, mag = quasi_axioms_violation(space, x, y, u, v, w)
        return raw, mag, _pts(space, x=x, y=y, u=u, v=v, w=w)

    return _run("quasi_axioms", cfg, tol, ev)


def cauchy_schwarz_violation(space, x, y, u, v):
    lhs = quasi_inner(space, x, y, u, v)
    rhs = space.dist(x, y) * space.dist(u, v)
    return lhs - rhs, max(abs(lhs), rhs)


def check_cauchy_schwarz(space: Space, cfg: SampleConfig, tol=1e-9) -> ViolationReport:
    def ev(rng):
        x, y, u, v = (space.sample(rng, cfg.base, cfg.radius) for _ in range(4))
        raw, mag = cauchy_schwarz_violation(space, x, y, u, v)
        return raw, mag, _pts(space, x=x, y=y, u=u, v=v)

    return _run("cauchy_schwarz", cfg, tol, ev)


def check_hilbert_reduction(space: Space, cfg: SampleConfig, tol=1e-12) -> ViolationReport:
    """<xy, uv> against the dot product <x - y, u - v>."""
    if not isinstance(space, Euclidean):
        raise InvalidInput("the Hilbert reduction only applies to Euclidean space")

    def ev(rng):
        x, y, u, v = (space.sample(rng, cfg.base, cfg.radius) for _ in range(4))
        qi = quasi_inner(space, x, y, u, v)
        dot = sum(
            (a - b) * (c - d) for a, b, c, d in zip(x.coords, y.coords, u.coords, v.coords)
        )
        return abs(qi - dot), max(abs(qi), abs(dot)), _pts(space, x=x, y=y, u=u, v=v)

    return _run("hilbert_reduction", cfg, tol, ev)


# -- maps -------------------------------------------------------------------


def mutual_fne_violation(space, T, U, params: MutualParams, x, y):
    Tx, Uy = T(x), U(y)
    lhs = space.dist(Tx, Uy)
    rhs = space.dist(space.combine(x, Tx, params.alpha), space.combine(y, Uy, params.beta))
    return lhs - rhs, max(lhs, rhs)


def check_mutual_fne(space, T, U, lam, mu, cfg: SampleConfig, tol=DEFAULT_TOL) -> ViolationReport:
    """d(Tx, Uy) <= d((1-a)x + aTx, (1-b)y + bUy) whenever (1-a)lam = (1-b)mu."""
    if not (lam > 0 and mu > 0):
        raise InvalidInput("lambda and mu must be positive")
    top = min(lam, mu)

    def ev(rng):
        x = space.sample(rng, cfg.base, cfg.radius)
        y = space.sample(rng, cfg.base, cfg.radius)
        # delta uniform on (0, min(lam, mu)]
        params = MutualParams(lam, mu, top * (1.0 - rng.random()))
        raw, mag = mutual_fne_violation(space, T, U, params, x, y)
        return raw, mag, {**_pts(space, x=x, y=y), "delta": params.delta}

    return _run("mutual_fne", cfg, tol, ev, {"lambda": lam, "mu": mu})


def mutual_p2_violation(space, T, U, lam, mu, x, y):
    Tx, Uy = T(x), U(y)
    lhs = quasi_inner(space, Tx, Uy, y, Uy) / mu
    rhs = quasi_inner(space, Tx, Uy, x, Tx) / lam
    return lhs - rhs, max(abs(lhs), abs(rhs))


def check_mutual_p2(space, T, U, lam, mu, cfg: SampleConfig, tol=DEFAULT_TOL) -> ViolationReport:
    """(1/mu)<TxUy, yUy> <= (1/lam)<TxUy, xTx>."""
    if not (lam > 0 and mu > 0):
        raise InvalidInput("lambda and mu must be positive")

    def ev(rng):
        x = space.sample(rng, cfg.base, cfg.radius)
        y = space.sample(rng, cfg.base, cfg.radius)
        raw, mag = mutual_p2_violation(space, T, U, lam, mu, x, y)
        return raw, mag, _pts(space, x=x, y=y)

    return _run("mutual_p2", cfg, tol, ev, {"lambda": lam, "mu": mu})


def resolvent_identity_violation(space, family, gamma, x, t):
    Tx = member(space, family, gamma)(x)
    y = space.combine(x, Tx, t)
    lhs = member(space, family, (1.0 - t) * gamma)(y)
    return space.dist(lhs, Tx), space.dist(x, Tx)


def check_resolvent_identity(space, family, gamma, cfg: SampleConfig, tol=DEFAULT_TOL):
    """T_{(1-t)gamma}((1-t)x + t T_gamma x) = T_gamma x, sampled over x and t in [0, 1)."""
    if not gamma > 0:
        raise InvalidInput(f"gamma must be positive, got {gamma!r}")

    def ev(rng):
        x = space.sample(rng, cfg.base, cfg.radius)
        t = T_MAX * rng.random()
        raw, mag = resolvent_identity_violation(space, family, gamma, x, t)
        return raw, mag, {**_pts(space, x=x), "t": t}

    return _run("resolvent_identity", cfg, tol, ev, {"gamma": gamma})


def check_nonexpansive(space, T, cfg: SampleConfig, tol=DEFAULT_TOL) -> ViolationReport:
    def ev(rng):
        x = space.sample(rng, cfg.base, cfg.radius)
        y = space.sample(rng, cfg.base, cfg.radius)
        lhs, rhs = space.dist(T(x), T(y)), space.dist(x, y)
        return lhs - rhs, max(lhs, rhs), _pts(space, x=x, y=y)

    return _run("nonexpansive", cfg, tol, ev)


def check_uniform_p2(space, T, center, b, phi, scale, cfg: SampleConfig, tol, eps_list):
    """Uniform (P2) on the ball B(center, b): for d(Tx, Ty) >= eps,
    <TxTy, yTy> <= <TxTy, xTx> - scale * phi(eps).

    Returns one report per eps; pairs with d(Tx, Ty) < eps are skipped.
    """
    eps_list = _eps_list(eps_list)
    if not b > 0:
        raise InvalidInput(f"ball radius must be positive, got {b!r}")
    _check_tol(tol)
    accs = {e: _Worst("uniform_p2", tol, {"eps": e, "scale": scale}) for e in eps_list}
    slack = {e: scale * phi(e) for e in eps_list}
    for i in range(cfg.count):
        rng = sample_rng(cfg.seed, i)
        x = space.sample(rng, center, b)
        y = space.sample(rng, center, b)
        Tx, Ty = T(x), T(y)
        gap = space.dist(Tx, Ty)
        lhs = quasi_inner(space, Tx, Ty, y, Ty)
        rhs = quasi_inner(space, Tx, Ty, x, Tx)
        for e, acc in accs.items():
            if gap < e:
                acc.add(i, None, 0.0, {})
            else:
                raw = lhs - rhs + slack[e]
                acc.add(i, raw, max(abs(lhs), abs(rhs), slack[e]), _pts(space, x=x, y=y))
    return {e: acc.report() for e, acc in accs.items()}


def halp_violation(space, T, U, x):
    Tx, Ux = T(x), U(x)
    a, b, c = space.dist(x, Tx) ** 2, space.dist(Tx, Ux) ** 2, space.dist(x, Ux) ** 2
    return a + b - c, max(a, b, c)


def check_halp(space, T, U, cfg: SampleConfig, tol=DEFAULT_TOL) -> ViolationReport:
    """d^2(x, Ux) >= d^2(x, Tx) + d^2(Tx, Ux) for T, U mutually (P2) with lam <= mu."""

    def ev(rng):
        x = space.sample(rng, cfg.base, cfg.radius)
        raw, mag = halp_violation(space, T, U, x)
        return raw, mag, _pts(space, x=x)

    return _run("halp", cfg, tol, ev)


def check_uniq_lemma(space, T, z, cfg: SampleConfig, phi, scale, eps_list, tol=DEFAULT_TOL):
    """scale * phi(eps) <= <Tx z, x Tx> whenever d(Tx, z) >= eps, for z fixed by T."""
    eps_list = _eps_list(eps_list)
    if space.dist(T(z), z) > 1e-8:
        raise InvalidInput("z is not a fixed point of T")
    _check_tol(tol)
    accs = {e: _Worst("uniq_lemma", tol, {"eps": e, "scale": scale}) for e in eps_list}
    for i in range(cfg.count):
        rng = sample_rng(cfg.seed, i)
        x = space.sample(rng, cfg.base, cfg.radius)
        Tx = T(x)
        gap = space.dist(Tx, z)
        pairing = quasi_inner(space, Tx, z, x, Tx)
        for e, acc in accs.items():
            if gap < e:
                acc.add(i, None, 0.0, {})
            else:
                need = scale * phi(e)
                acc.add(i, need - pairing, max(need, abs(pairing)), _pts(space, x=x))
    return {e: acc.report() for e, acc in accs.items()}


def _eps_list(eps_list):
    eps_list = list(eps_list)
    if not eps_list:
        raise InvalidInput("eps list must not be empty")
    for e in eps_list:
        if not e > 0:
            raise InvalidInput(f"eps must be positive, got {e!r}")
    return eps_list


# -- family level -----------------------------------------------------------


def check_fixed_set(space, family, gammas, tol=1e-8) -> ViolationReport:
    """Points of the analytic fixed set are fixed by every sampled T_gamma."""
    from .sets import Empty, Unknown, points_of

    F = family.fixed_set(space)
    acc = _Worst("fixed_set", tol)
    if not isinstance(F, (Empty, Unknown)):
        for i, g in enumerate(gammas):
            T = member(space, family, g)
            for p in points_of(space, F):
                acc.add(i, space.dist(T(p), p), 0.0, {"gamma": g, **_pts(space, p=p)})
    return acc.report()


def check_equivalence(space, family, gammas, cfg: SampleConfig, tol=1e-6):
    """Both sides of the joint-FNE characterization for one family.

    Returns ``(resolvent_side, fne_side)``: the first holds the nonexpansive and
    resolvent-identity reports for each gamma, the second the mutual FNE
    reports for every ordered (lambda, mu) pair.
    """
    resolvent_side, fne_side = [], []
    for g in gammas:
        r = check_nonexpansive(space, member(space, family, g), cfg, tol)
        r.params = {"gamma": g}
        resolvent_side.append(r)
        resolvent_side.append(check_resolvent_identity(space, family, g, cfg, tol))
    for lam in gammas:
        for mu in gammas:
            fne_side.append(
                check_mutual_fne(
                    space, member(space, family, lam), member(space, family, mu), lam, mu, cfg, tol
                )
            )
    return resolvent_side, fne_side


def check_halp_at(space, T, U, points, tol=DEFAULT_TOL) -> ViolationReport:
    """The inequality of :func:`check_halp` at the given points."""
    _check_tol(tol)
    acc = _Worst("halp", tol)
    for i, x in enumerate(points):
        raw, mag = halp_violation(space, T, U, x)
        acc.add(i, raw, mag, _pts(space, x=x))
    return acc.report()
