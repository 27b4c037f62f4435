"""Seedable random streams, the general half-normal law and the correlated
bivariate normal used by the conditional-expectation examples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_count, check_finite, check_positive
from .errors import DomainError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

_U64 = 1 << 64


@dataclass(frozen=True)
class RandomStream:
    """Address of an independent random substream.

    A stream is a pure value: ``generator()`` always starts the same draw
    sequence for the same ``(seed, stream_id, path)``.  The bit generator is
    Philox (counter based) keyed through :class:`numpy.random.SeedSequence`,
    whose spawn keys give well-separated substreams for distinct ids.
    """

    seed: int
    stream_id: int = 0
    path: tuple = field(default=())

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or not 0 <= value < _U64:
                raise DomainError(f"{name} must be a 64-bit unsigned integer, got {value!r}")
        if any(int(p) != p or p < 0 for p in self.path):
            raise DomainError("path entries must be non-negative integers")

    def substream(self, *keys):
        """Child stream, independent of the parent and of other children."""
        return RandomStream(self.seed, self.stream_id, tuple(self.path) + tuple(int(k) for k in keys))

    def generator(self):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id), *self.path))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class HalfNormalParams:
    """Location ``xi`` and scale ``eta`` of HN(xi, eta), the law of xi + eta|Z|."""

    xi: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        check_finite(self.xi, "xi")
        check_positive(self.eta, "eta")


@dataclass(frozen=True)
class BivariateNormalParams:
    """Standard bivariate normal with correlation ``rho``."""

    rho: float = 0.5

    def __post_init__(self):
        rho = float(self.rho)
        if not -1.0 < rho < 1.0:
            raise DomainError(f"correlation must lie in (-1, 1), got {self.rho!r}")


def _rng(stream):
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, RandomStream):
        return stream.generator()
    raise TypeError(f"expected RandomStream or numpy Generator, got {type(stream).__name__}")


def sample_std_normal(stream, count):
    """``count`` i.i.d. N(0, 1) variates.

    Passing a :class:`RandomStream` restarts its sequence on every call;
    passing a live ``numpy.random.Generator`` continues it.
    """
    count = check_count(count, "count")
    return _rng(stream).standard_normal(count)


def sample_half_normal(params, stream, count):
    count = check_count(count, "count")
    z = _rng(stream).standard_normal(count)
    return params.xi + params.eta * np.abs(z)


def half_normal_pdf(params, y):
    y = np.asarray(y, dtype=np.float64)
    x = (y - params.xi) / params.eta
    dens = np.where(x >= 0, SQRT_2_OVER_PI * np.exp(-0.5 * x * x) / params.eta, 0.0)
    return float(dens) if dens.ndim == 0 else dens


def half_normal_logpdf(params, y):
    y = np.asarray(y, dtype=np.float64)
    x = (y - params.xi) / params.eta
    with np.errstate(divide="ignore"):
        out = np.where(
            x >= 0,
            math.log(SQRT_2_OVER_PI / params.eta) - 0.5 * x * x,
            -np.inf,
        )
    return float(out) if out.ndim == 0 else out


def half_normal_moments(params):
    """Return ``(mean, variance)`` of HN(xi, eta)."""
    mean = params.xi + params.eta * SQRT_2_OVER_PI
    variance = (math.pi - 2.0) / math.pi * params.eta ** 2
    return mean, variance


def sample_bivariate_normal(params, stream, count):
    """``count`` pairs as an array of shape ``(count, 2)``.

    Built as ``y = rho*x + sqrt(1 - rho^2)*z`` from independent normals.
    """
    count = check_count(count, "count")
    xz = _rng(stream).standard_normal((count, 2))
    rho = float(params.rho)
    out = np.empty_like(xz)
    out[:, 0] = xz[:, 0]
    out[:, 1] = rho * xz[:, 0] + math.sqrt(1.0 - rho * rho) * xz[:, 1]
    return out
