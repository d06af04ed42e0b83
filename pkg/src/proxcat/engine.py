"""Proximal point runs, resolvent curves and their verification against the rate bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .checkers import SampleConfig, ViolationReport, _Worst, sample_rng
from .errors import InsufficientSchedule, InvalidInput, NumericFailure, UnsupportedSet
from .geometry import Euclidean, Space
from .rates import (
    Counterfunction,
    DivergenceModulus,
    Modulus,
    _q,
    ceil_q,
    curve_continuity_delta,
    curve_metastability_bound,
    find_metric_witness,
    ppa_rate_bound,
)
from .resolvents import ProxScaledSquaredNorm, apply
from .sets import Empty, Unknown, project

# -- step schedules ---------------------------------------------------------


@dataclass(frozen=True)
class ConstantSteps:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidInput(f"constant step must be positive, got {self.c!r}")

    nondecreasing = True

    def gammas(self, n: int) -> np.ndarray:
        return np.full(n, float(self.c))


@dataclass(frozen=True)
class HarmonicSteps:
    """gamma_n = 1/(n + 1)."""

    nondecreasing = False

    def gammas(self, n: int) -> np.ndarray:
        return 1.0 / np.arange(1, n + 1, dtype=np.float64)


@dataclass(frozen=True)
class ExplicitSteps:
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise InvalidInput("explicit schedule must not be empty")
        if min(vals) <= 0:
            raise InvalidInput("step sizes must be positive")
        object.__setattr__(self, "values", vals)

    @property
    def nondecreasing(self):
        return all(a <= b for a, b in zip(self.values, self.values[1:]))

    def gammas(self, n: int) -> np.ndarray:
        if n > len(self.values):
            raise InsufficientSchedule(
                f"schedule has {len(self.values)} steps, {n} requested", sum(self.values)
            )
        return np.array(self.values[:n])


def theta_for_schedule(schedule) -> DivergenceModulus:
    """A divergence modulus: sum_{n <= theta(x)} gamma_n >= x."""
    if isinstance(schedule, ConstantSteps):
        c = _q(schedule.c)
        return DivergenceModulus(lambda x: max(0, ceil_q(_q(x) / c) - 1), f"const({schedule.c})")
    if isinstance(schedule, HarmonicSteps):
        # sum_{n <= N} 1/(n+1) >= ln(N + 2) > x once N >= e^x

        def theta(x):
            try:
                return math.ceil(math.exp(float(x)))
            except OverflowError:
                raise NumericFailure(f"e^{float(x)} overflows") from None

        return DivergenceModulus(theta, "ceil(e^x)")
    if isinstance(schedule, ExplicitSteps):
        partial = []
        total = Fraction(0)
        for v in schedule.values:
            total += Fraction(v)
            partial.append(total)

        def theta(x):
            x = _q(x)
            if partial[-1] < x:
                raise InsufficientSchedule(
                    f"explicit schedule sums to {float(partial[-1])} < {float(x)}", float(partial[-1])
                )
            # smallest N with partial sum >= x
            lo, hi = 0, len(partial) - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if partial[mid] >= x:
                    hi = mid
                else:
                    lo = mid + 1
            return lo

        return DivergenceModulus(theta, "explicit")
    raise InvalidInput(f"unknown schedule {schedule!r}")


# -- proximal point algorithm -----------------------------------------------


@dataclass
class PpaTrace:
    """Iterates x_0..x_n of x_{k+1} = T_{gamma_k} x_k, stored as coordinate rows."""

    space: Space
    points: np.ndarray
    gammas: np.ndarray
    steps: np.ndarray
    d_to_p: Optional[np.ndarray] = None
    p: object = None

    def __len__(self):
        return len(self.points)

    def point(self, n: int):
        return self.space.from_row(self.points[n])

    @property
    def b(self) -> float:
        if self.d_to_p is None:
            raise InvalidInput("trace was recorded without a reference point")
        return float(self.d_to_p.max())


def run_ppa(space: Space, family, schedule, x0, steps: int, p=None) -> PpaTrace:
    """Run the proximal point algorithm for ``steps`` steps."""
    if int(steps) != steps or steps < 1:
        raise InvalidInput(f"steps must be a positive integer, got {steps!r}")
    space.check(x0)
    if p is not None:
        space.check(p)
    gammas = schedule.gammas(int(steps))
    if isinstance(family, ProxScaledSquaredNorm) and isinstance(space, Euclidean):
        # x_n = x_0 / prod_{k<n} (1 + c gamma_k)
        scale = np.concatenate(([1.0], np.cumprod(1.0 + family.c * gammas)))
        points = np.asarray(x0.coords, dtype=np.float64)[None, :] / scale[:, None]
    else:
        points = np.empty((steps + 1, len(space.to_row(x0))), dtype=np.float64)
        x = x0
        points[0] = space.to_row(x)
        for n, g in enumerate(gammas):
            x = apply(space, family, float(g), x)
            points[n + 1] = space.to_row(x)
    if not np.all(np.isfinite(points)):
        raise NumericFailure("non-finite iterate in proximal point run")
    k = space.kind_code
    step = kernels.batch_dist(k, points[:-1], points[1:])
    d_to_p = None
    if p is not None:
        d_to_p = kernels.batch_dist(k, points, np.asarray([space.to_row(p)]))
    return PpaTrace(space, points, gammas, step, d_to_p, p)


def check_ball_invariance(space, family, gammas, p, b, cfg: SampleConfig, tol=1e-9) -> ViolationReport:
    """T_gamma maps the closed ball B(p, b) into itself, on samples."""
    acc = _Worst("ball_invariance", tol, {"b": b})
    gammas = list(gammas)
    for i in range(cfg.count):
        rng = sample_rng(cfg.seed, i)
        x = space.sample(rng, p, b)
        g = gammas[int(rng.integers(len(gammas)))]
        r = space.dist(apply(space, family, g, x), p)
        acc.add(i, r - b, b, {"x": space.dump_point(x), "gamma": g})
    return acc.report()


@dataclass
class RateCheck:
    eps: float
    bound: int
    passed: bool
    first_violation: Optional[int]
    worst_after_bound: float

    @property
    def margin(self) -> float:
        return self.eps - self.worst_after_bound

    def to_dict(self):
        return {
            "eps": self.eps,
            "bound": self.bound,
            "pass": self.passed,
            "first_violation": self.first_violation,
            "worst_after_bound": self.worst_after_bound,
            "margin": self.margin,
        }


def verify_ppa_rate(trace: PpaTrace, theta, b, phi: Modulus, eps_list, slack=1e-9):
    """d(x_n, p) <= eps for every recorded n >= ppa_rate_bound(theta, b, phi, eps)."""
    if trace.d_to_p is None:
        raise InvalidInput("trace was recorded without a reference point")
    out = []
    for eps in eps_list:
        bound = ppa_rate_bound(theta, b, phi, eps)
        if len(trace.d_to_p) <= bound:
            raise InvalidInput(
                f"trace has {len(trace.d_to_p)} iterates; need more than {bound} for eps={eps}"
            )
        tail = trace.d_to_p[bound:]
        bad = np.flatnonzero(tail > eps + slack)
        first = int(bound + bad[0]) if len(bad) else None
        out.append(RateCheck(eps, bound, first is None, first, float(tail.max())))
    return out


# -- resolvent curves -------------------------------------------------------


@dataclass(frozen=True)
class CurveSample:
    gamma: float
    point: object
    d_from_base: float


def sample_curve(space, family, x, gammas: Sequence[float]):
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise InvalidInput("need at least one gamma")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise InvalidInput("gammas must be strictly increasing")
    pts = [apply(space, family, g, x) for g in gammas]
    d = kernels.batch_dist(space.kind_code, space.to_array(pts), np.asarray([space.to_row(x)]))
    return [CurveSample(g, pt, float(v)) for g, pt, v in zip(gammas, pts, d)]


def geometric_gammas(start: float, ratio: float, count: int):
    if not (start > 0 and ratio > 1 and count >= 1):
        raise InvalidInput("need start > 0, ratio > 1, count >= 1")
    return [start * ratio**k for k in range(count)]


def project_fixed_set(space, F, x):
    if isinstance(F, (Empty, Unknown)):
        raise UnsupportedSet(f"cannot project onto an {type(F).__name__} fixed set")
    return project(space, F, x)


def verify_curve_limit(space, samples, limit_point, eps):
    d = space.dist(samples[-1].point, limit_point)
    return d <= eps, d


def curve_growth_report(space, x, samples, tol=1e-8) -> ViolationReport:
    """Along increasing gammas: d(x, T_mu x)^2 >= d(x, T_lam x)^2 + d(T_lam x, T_mu x)^2.

    Consecutive pairs and pairs anchored at the first sample are checked; the
    inequality implies d(x, T_gamma x) is nondecreasing.
    """
    acc = _Worst("curve_growth", tol)
    pairs = [(i, i + 1) for i in range(len(samples) - 1)]
    pairs += [(0, j) for j in range(2, len(samples))]
    for k, (i, j) in enumerate(pairs):
        lo, hi = samples[i], samples[j]
        a, c = lo.d_from_base**2, hi.d_from_base**2
        m = space.dist(lo.point, hi.point) ** 2
        acc.add(k, a + m - c, max(a, m, c), {"lambda": lo.gamma, "mu": hi.gamma})
    return acc.report()


@dataclass
class MetastabilityCheck:
    eps: float
    g: str
    b: float
    bound: int
    witness: Optional[int]

    @property
    def passed(self):
        return self.witness is not None and self.witness <= self.bound

    def to_dict(self):
        return {
            "eps": self.eps,
            "g": self.g,
            "b": self.b,
            "bound": self.bound,
            "witness": self.witness,
            "pass": self.passed,
        }


def verify_curve_metastability(space, samples, eps, g: Counterfunction, b=None):
    """Brute-force witness for the curve samples against g~^(ceil(b^2/eps^2))(0).

    ``b`` defaults to the largest observed d(x, T_gamma x).
    """
    if b is None:
        b = max(s.d_from_base for s in samples)
    if b == 0:
        # every sample equals x: the window at 0 already qualifies
        return MetastabilityCheck(eps, g.label, 0.0, 0, 0)
    bound = curve_metastability_bound(b, eps, g)
    witness = find_metric_witness(space, [s.point for s in samples], eps, g, limit=bound)
    return MetastabilityCheck(eps, g.label, float(b), bound, witness)


def verify_curve_continuity(space, family, x, Gamma, b, eps, seed, count, gamma_max=None, tol=1e-8):
    """Sampled Gamma <= lam <= mu <= gamma_max with mu - lam <= delta(Gamma, b, eps) keep
    d(T_lam x, T_mu x) <= eps.

    ``b`` must bound d(x, T_gamma x) for gamma up to ``gamma_max``.
    """
    delta = curve_continuity_delta(Gamma, b, eps)
    top = gamma_max if gamma_max is not None else Gamma * 2.0**10
    if not top >= Gamma:
        raise InvalidInput(f"gamma_max {top!r} is below Gamma {Gamma!r}")
    acc = _Worst("curve_continuity", tol, {"Gamma": Gamma, "eps": eps, "delta": delta, "b": b})
    # lam log-uniform on [Gamma, top - delta] so that mu stays <= top
    lam_top = max(Gamma, top - delta)
    span = math.log(lam_top / Gamma)
    for i in range(count):
        rng = sample_rng(seed, i)
        lam = Gamma * math.exp(span * rng.random())
        mu = min(lam + delta * rng.random(), max(top, lam))
        d = space.dist(apply(space, family, lam, x), apply(space, family, mu, x))
        acc.add(i, d - eps, eps, {"lambda": lam, "mu": mu, "d": d})
    return acc.report()
