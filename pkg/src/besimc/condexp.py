"""Window (sup-norm ball) Monte Carlo estimates of conditional expectations.

Given joint draws ``(U(w_i), f(w_i))`` the conditional mean ``E(f | U = u)`` is
approximated by the average of ``f`` over the draws whose ``U`` value lies in
the closed ball ``{v : max_j |v_j - u_j| <= epsilon}``.  Shrinking the window
and growing the number of draws recovers the conditional expectation almost
everywhere.

Sources
-------
A *source* is any object with a ``draw(count)`` method returning a pair
``(u, f)`` of arrays with shapes ``(k, d)`` and ``(k,)``, ``k <= count``.  A
short read is allowed only at the end of a finite source and ``k == 0`` means
exhausted.  Sources are consumed sequentially and are single-consumer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import chain, islice

import numpy as np

from ._validation import check_count, check_positive
from .distributions import BivariateNormalParams, RandomStream
from .errors import DomainError, NoHits, Underfilled

DEFAULT_MAX_DRAWS = 10_000_000
_BLOCK = 1 << 16


@dataclass(frozen=True)
class BallQuery:
    center: tuple
    epsilon: float

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=np.float64))
        if center.ndim != 1 or not np.all(np.isfinite(center)):
            raise DomainError("ball center must be a finite vector")
        object.__setattr__(self, "center", tuple(float(c) for c in center))
        object.__setattr__(self, "epsilon", check_positive(self.epsilon, "epsilon"))

    @property
    def dim(self):
        return len(self.center)

    def contains(self, u):
        """Boolean mask of rows of ``u`` (shape ``(k, d)``) inside the ball."""
        u = _as_rows(u, self.dim)
        return np.max(np.abs(u - np.asarray(self.center)), axis=1) <= self.epsilon


@dataclass(frozen=True)
class CondExpEstimate:
    value: float
    hits: int
    draws: int
    epsilon: float
    f_min: float = math.nan
    f_max: float = math.nan


def _as_rows(u, dim):
    u = np.asarray(u, dtype=np.float64)
    if u.ndim == 1:
        u = u.reshape(-1, 1) if dim == 1 else u.reshape(1, -1)
    if u.ndim != 2 or u.shape[1] != dim:
        raise DomainError(f"conditioning values must have dimension {dim}, got shape {u.shape}")
    return u


class _Accumulator:
    """Running hit statistics with exact (fsum) summation of f."""

    def __init__(self):
        self.partials = []
        self.hits = 0
        self.f_min = math.inf
        self.f_max = -math.inf

    def add(self, f_hits):
        if f_hits.size == 0:
            return
        self.partials.append(f_hits)
        self.hits += int(f_hits.size)
        self.f_min = min(self.f_min, float(f_hits.min()))
        self.f_max = max(self.f_max, float(f_hits.max()))

    def estimate(self, draws, epsilon):
        value = math.fsum(chain.from_iterable(self.partials)) / self.hits
        # the rounded quotient may step one ulp outside the hit range
        value = min(max(value, self.f_min), self.f_max)
        return CondExpEstimate(value, self.hits, draws, epsilon, self.f_min, self.f_max)


def _draw_block(source, count, dim):
    u, f = source.draw(count)
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    if f.size == 0:
        return None, f
    u = _as_rows(u, dim)
    if u.shape[0] != f.shape[0] or f.shape[0] > count:
        raise DomainError(f"source returned {u.shape[0]}/{f.shape[0]} draws, expected {count}")
    return u, f


def estimate_fixed_k(source, query, k):
    """Window average over exactly ``k`` draws; raises :class:`NoHits`."""
    k = check_count(k, "k")
    acc = _Accumulator()
    done = 0
    while done < k:
        u, f = _draw_block(source, min(_BLOCK, k - done), query.dim)
        if f.size == 0:
            raise DomainError(f"source exhausted after {done} of {k} draws")
        acc.add(f[query.contains(u)])
        done += f.size
    if acc.hits == 0:
        raise NoHits(k, query.epsilon)
    return acc.estimate(k, query.epsilon)


def estimate_until_hits(source, query, target_hits, max_draws=DEFAULT_MAX_DRAWS):
    """Draw until ``target_hits`` draws fall in the window.

    ``draws`` in the result counts up to and including the last hit; any tail
    of the final block after it is discarded.  Raises :class:`Underfilled`
    when ``max_draws`` is exhausted (or a finite source runs dry) first.
    """
    target_hits = check_count(target_hits, "target_hits")
    max_draws = check_count(max_draws, "max_draws")
    if max_draws < target_hits:
        raise DomainError("max_draws must be at least target_hits")
    acc = _Accumulator()
    done = 0
    while done < max_draws:
        u, f = _draw_block(source, min(_BLOCK, max_draws - done), query.dim)
        if f.size == 0:
            break
        idx = np.flatnonzero(query.contains(u))
        need = target_hits - acc.hits
        if idx.size >= need:
            last = idx[need - 1]
            acc.add(f[idx[:need]])
            return acc.estimate(done + int(last) + 1, query.epsilon)
        acc.add(f[idx])
        done += f.size
    raise Underfilled(acc.hits, target_hits, done, query.epsilon)


def epsilon_refinement(source_factory, query_center, epsilons, target_hits,
                       max_draws=DEFAULT_MAX_DRAWS):
    """One :func:`estimate_until_hits` result per window radius.

    ``source_factory()`` must return a fresh source each call so every radius
    sees the same underlying draw sequence.
    """
    epsilons = [float(e) for e in epsilons]
    if not epsilons or any(e <= 0 for e in epsilons):
        raise DomainError("epsilons must be positive")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise DomainError("epsilons must be strictly decreasing")
    return [
        estimate_until_hits(source_factory(), BallQuery(query_center, eps), target_hits, max_draws)
        for eps in epsilons
    ]


# ---------------------------------------------------------------------------
# sources


class ArraySource:
    """Replays fixed arrays of ``(u, f)`` in order; short reads at the end."""

    def __init__(self, u, f):
        f = np.asarray(f, dtype=np.float64).reshape(-1)
        u = np.asarray(u, dtype=np.float64)
        if u.ndim == 1:
            u = u.reshape(-1, 1)
        if u.shape[0] != f.shape[0]:
            raise DomainError("u and f must have the same number of draws")
        self.u = u
        self.f = f
        self.position = 0

    def __len__(self):
        return self.f.shape[0]

    def draw(self, count):
        stop = min(self.position + count, len(self))
        sl = slice(self.position, stop)
        self.position = stop
        return self.u[sl], self.f[sl]


class IterableSource:
    """Adapts an iterator of ``(u_value, f_value)`` pairs (possibly finite)."""

    def __init__(self, iterable):
        self._it = iter(iterable)

    def draw(self, count):
        pairs = list(islice(self._it, count))
        if not pairs:
            return np.empty((0, 1)), np.empty(0)
        u = np.array([np.atleast_1d(np.asarray(p[0], dtype=np.float64)) for p in pairs])
        f = np.array([float(p[1]) for p in pairs])
        return u, f


class BivariateNormalSource:
    """``U = X`` and ``f = Y`` for a standard bivariate normal ``(X, Y)``."""

    def __init__(self, stream, params=BivariateNormalParams(0.5)):
        self.rng = stream.generator() if isinstance(stream, RandomStream) else stream
        self.rho = float(params.rho)
        self._c = math.sqrt(1.0 - self.rho ** 2)

    def _pairs(self, count):
        xz = self.rng.standard_normal((count, 2))
        x = xz[:, 0]
        y = self.rho * x + self._c * xz[:, 1]
        return x, y

    def draw(self, count):
        x, y = self._pairs(count)
        return x.reshape(-1, 1), y


class TrigSource(BivariateNormalSource):
    """``U = cos(X^2 + Y^2)`` and ``f = sin(X * Y)`` over the same pairs."""

    def draw(self, count):
        x, y = self._pairs(count)
        return np.cos(x * x + y * y).reshape(-1, 1), np.sin(x * y)
