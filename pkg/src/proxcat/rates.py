"""Explicit quantitative bounds and brute-force witnesses for them.

Ratios fed to a ceiling are formed in exact rational arithmetic over the
given floating-point inputs, so an integer bound is never off by one because
of rounding (``4 / 0.1**2`` really is just below 400 for the double 0.1).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import InvalidInput, NumericFailure

# g~ iterates grow fast; refuse to build integers wider than this
MAX_BITS = 1 << 16


def _q(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    v = float(v)
    if not math.isfinite(v):
        raise InvalidInput(f"expected a finite number, got {v!r}")
    return Fraction(v)


def _positive(**kw):
    for name, v in kw.items():
        if not v > 0:
            raise InvalidInput(f"{name} must be positive, got {v!r}")


def ceil_q(v) -> int:
    return math.ceil(_q(v))


class Counterfunction:
    """A map g: N -> N; ``tilde(n) = n + g(n)`` drives metastability bounds."""

    def __init__(self, fn: Callable[[int], int], label: str = "g"):
        self._fn = fn
        self.label = label

    def __call__(self, n: int) -> int:
        v = self._fn(n)
        if int(v) != v or v < 0:
            raise NumericFailure(f"counterfunction {self.label} returned {v!r} at n={n}")
        return int(v)

    def tilde(self, n: int) -> int:
        return n + self(n)

    def __repr__(self):
        return f"Counterfunction({self.label})"

    @classmethod
    def constant(cls, k: int) -> "Counterfunction":
        if int(k) != k or k < 0:
            raise InvalidInput(f"constant counterfunction needs k >= 0, got {k!r}")
        k = int(k)
        return cls(lambda n: k, f"const {k}")

    @classmethod
    def linear(cls, a: int, b: int = 0) -> "Counterfunction":
        if int(a) != a or int(b) != b or a < 0 or b < 0:
            raise InvalidInput(f"linear counterfunction needs integers a, b >= 0, got {a!r}, {b!r}")
        a, b = int(a), int(b)
        return cls(lambda n: a * n + b, f"{a}n+{b}")

    @classmethod
    def table(cls, values: Sequence[int]) -> "Counterfunction":
        """Tabulated g; arguments past the table reuse the last entry."""
        values = [int(v) for v in values]
        if not values or min(values) < 0:
            raise InvalidInput("table counterfunction needs a nonempty list of naturals")
        return cls(lambda n: values[min(n, len(values) - 1)], f"table{values}")


class Modulus:
    """phi: (0, inf) -> (0, inf)."""

    def __init__(self, fn: Callable, label: str = "phi"):
        self._fn = fn
        self.label = label

    def __call__(self, eps):
        _positive(eps=eps)
        v = self._fn(eps)
        if not v > 0:
            raise InvalidInput(f"modulus {self.label} must be positive, got {v!r} at {eps!r}")
        return v

    def __repr__(self):
        return f"Modulus({self.label})"

    @classmethod
    def power(cls, c: float = 1.0, p: int = 2) -> "Modulus":
        """eps -> c * eps**p, evaluated exactly on the double inputs."""
        _positive(c=c, p=p)
        cq = _q(c)
        return cls(lambda e: cq * _q(e) ** p, f"{c}*eps^{p}")

    @classmethod
    def table(cls, values: dict) -> "Modulus":
        table = {float(k): v for k, v in values.items()}

        def lookup(e):
            try:
                return table[float(e)]
            except KeyError:
                raise InvalidInput(f"modulus table has no entry for eps={e!r}") from None

        return cls(lookup, "table")


class DivergenceModulus:
    """theta: (0, inf) -> N with sum_{n <= theta(x)} gamma_n >= x for its schedule."""

    def __init__(self, fn: Callable, label: str = "theta"):
        self._fn = fn
        self.label = label

    def __call__(self, x) -> int:
        _positive(x=x)
        v = self._fn(x)
        if int(v) != v or v < 0:
            raise NumericFailure(f"{self.label} returned {v!r} at x={x!r}")
        return int(v)

    def __repr__(self):
        return f"DivergenceModulus({self.label})"

    @classmethod
    def ceiling(cls) -> "DivergenceModulus":
        return cls(ceil_q, "ceil(x)")


def gtilde_iterate(g: Counterfunction, k: int) -> int:
    """g~^(k)(0)."""
    if int(k) != k or k < 0:
        raise InvalidInput(f"iteration count must be a natural number, got {k!r}")
    n = 0
    for _ in range(int(k)):
        n = g.tilde(n)
        if n.bit_length() > MAX_BITS:
            raise NumericFailure(f"g~ iterate exceeds {MAX_BITS} bits")
    return n


def qmcp_bound(b, eps, g: Counterfunction) -> int:
    """Metastability rate g~^(ceil(b/eps))(0) for nondecreasing sequences in [0, b]."""
    _positive(b=b, eps=eps)
    return gtilde_iterate(g, ceil_q(_q(b) / _q(eps)))


def kp_bound(theta: DivergenceModulus, b, phi: Modulus, eps) -> int:
    """theta((b + 1)/phi(eps)) + 1."""
    _positive(b=b, eps=eps)
    return theta((_q(b) + 1) / _q(phi(eps))) + 1


def ppa_rate_bound(theta: DivergenceModulus, b, phi: Modulus, eps) -> int:
    """theta((b + 1)^2/phi(eps)) + 1: convergence rate of the uniform proximal point algorithm."""
    _positive(b=b, eps=eps)
    return theta((_q(b) + 1) ** 2 / _q(phi(eps))) + 1


def curve_metastability_bound(b, eps, g: Counterfunction) -> int:
    """g~^(ceil(b^2/eps^2))(0)."""
    _positive(b=b, eps=eps)
    return gtilde_iterate(g, ceil_q(_q(b) ** 2 / _q(eps) ** 2))


def curve_continuity_delta(Gamma, b, eps) -> float:
    """Largest mu - lam for which d(T_lam x, T_mu x) <= sqrt(mu - lam) b sqrt(2/Gamma) stays <= eps."""
    _positive(Gamma=Gamma, b=b, eps=eps)
    return Gamma * eps * eps / (2.0 * b * b)


def _window_ends(g: Counterfunction, n_values: int, limit: Optional[int]):
    """Window right ends N + g(N) for every N that fits in the data (and <= limit).

    Returns ``(ends, required)`` where ``required`` is the sequence length the
    first window that did not fit would need, or None.
    """
    ends = []
    top = n_values - 1 if limit is None else min(limit, n_values - 1)
    for N in range(top + 1):
        e = g.tilde(N)
        if e >= n_values:
            return np.array(ends, dtype=np.int64), e + 1
        ends.append(e)
    return np.array(ends, dtype=np.int64), None


def find_metastable_witness(values, eps, g: Counterfunction, limit: Optional[int] = None):
    """Smallest N with |a_i - a_j| <= eps for all i, j in [N, N + g(N)].

    Scans N = 0, 1, ... up to ``limit`` (inclusive).  Returns None when no N up
    to ``limit`` qualifies; raises InvalidInput if the data ends before the
    scan can decide.
    """
    _positive(eps=eps)
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 1 or len(a) == 0:
        raise InvalidInput("values must be a nonempty 1-D sequence")
    ends, required = _window_ends(g, len(a), limit)
    n = kernels.window_witness_real(a, ends, eps) if len(ends) else -1
    return _resolve(n, required, len(a))


def find_metric_witness(space, points, eps, g: Counterfunction, limit: Optional[int] = None):
    """Like :func:`find_metastable_witness` for points of a metric space."""
    _positive(eps=eps)
    P = space.to_array(points)
    if len(P) == 0:
        raise InvalidInput("need at least one point")
    ends, required = _window_ends(g, len(P), limit)
    n = kernels.window_witness_points(space.kind_code, P, ends, eps) if len(ends) else -1
    return _resolve(n, required, len(P))


def _resolve(n, required, length):
    if n >= 0:
        return n
    if required is not None:
        raise InvalidInput(f"sequence of length {length} too short; need length {required}")
    return None
