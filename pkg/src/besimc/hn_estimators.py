"""Closed-form estimators of the half-normal parameters, with quadrature oracles.

All estimators take a :class:`Sample` or anything array-like.  Location
estimators shift with the data, scale estimators scale with it.  The two
``*_oracle`` functions evaluate the defining ratio-of-integrals directly and
exist to cross-check the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from ._validation import check_count, check_finite, check_positive, check_sample
from .distributions import SQRT_2_OVER_PI
from .errors import DegenerateSample, DomainError, QuadratureError, SupportViolation
from .specfun import log_gamma, log_normal_cdf, normal_quantile, student_t_tail

PI_OVER_PI_MINUS_2 = math.pi / (math.pi - 2.0)
_LOG_1E16 = 16.0 * math.log(10.0)


class Sample:
    """An ordered sample ``y_1..y_n`` (``n >= 2``) with its summary statistics."""

    __slots__ = ("values", "n", "minimum", "mean", "variance")

    def __init__(self, values, min_size=2):
        arr = check_sample(values, min_size=min_size)
        arr.setflags(write=False)
        self.values = arr
        self.n = arr.size
        self.minimum = float(arr.min())
        self.mean = math.fsum(arr) / self.n
        if self.n > 1:
            self.variance = math.fsum((arr - self.mean) ** 2) / (self.n - 1)
        else:
            self.variance = math.nan

    @property
    def std(self):
        return math.sqrt(self.variance)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Sample(n={self.n}, min={self.minimum:.6g}, mean={self.mean:.6g})"


def as_sample(y, min_size=2):
    if isinstance(y, Sample):
        if y.n < min_size:
            raise DomainError(f"sample needs at least {min_size} observations, got {y.n}")
        return y
    return Sample(y, min_size=min_size)


@dataclass(frozen=True)
class CnValue:
    """Expected minimum of ``n`` standard half-normal variables."""

    n: int
    value: float
    abserr: float = 0.0

    def __float__(self):
        return self.value


# ---------------------------------------------------------------------------
# c_n


@lru_cache(maxsize=1024)
def _c_n(n):
    def integrand(t):
        # (2 - 2*Phi(t))**n evaluated as exp(n * log(2*Phi(-t)))
        return math.exp(n * (math.log(2.0) + log_normal_cdf(-t)))

    # integrand < 1e-16 beyond upper
    upper = -normal_quantile(0.5 * 10.0 ** (-16.0 / n))
    value, abserr = integrate.quad(integrand, 0.0, upper, epsabs=1e-13, epsrel=1e-12, limit=200)
    if not abserr <= 1e-9:
        raise QuadratureError(f"c_n quadrature for n={n} reported error {abserr:g}")
    return CnValue(n, value, abserr)


def c_n_quadrature(n):
    """``c_n = integral_0^inf (2 - 2 Phi(t))^n dt`` by adaptive quadrature."""
    return _c_n(check_count(n, "n"))


def c_n_mc(n, stream, reps, return_std_error=False):
    """Monte Carlo mean of ``min(|Z_1|, ..., |Z_n|)`` over ``reps`` rows."""
    n = check_count(n, "n")
    reps = check_count(reps, "reps")
    rng = stream.generator() if hasattr(stream, "generator") else stream
    total = []
    total_sq = []
    rows_per_block = max(1, (1 << 20) // n)
    done = 0
    while done < reps:
        rows = min(rows_per_block, reps - done)
        m = np.abs(rng.standard_normal((rows, n))).min(axis=1)
        total.append(math.fsum(m))
        total_sq.append(math.fsum(m * m))
        done += rows
    mean = math.fsum(total) / reps
    if not return_std_error:
        return mean
    var = max(math.fsum(total_sq) / reps - mean * mean, 0.0) * reps / max(reps - 1, 1)
    return mean, math.sqrt(var / reps)


def _resolve_c_n(sample, c_n):
    if c_n is None:
        return c_n_quadrature(sample.n).value
    if isinstance(c_n, CnValue):
        if c_n.n != sample.n:
            raise DomainError(f"c_n computed for n={c_n.n} but sample has n={sample.n}")
        return c_n.value
    return float(c_n)


# ---------------------------------------------------------------------------
# unbiased and maximum likelihood


def unbiased_location(sample, c_n=None):
    s = as_sample(sample)
    c = _resolve_c_n(s, c_n)
    return (SQRT_2_OVER_PI * s.minimum - c * s.mean) / (SQRT_2_OVER_PI - c)


def unbiased_scale(sample, c_n=None):
    s = as_sample(sample)
    c = _resolve_c_n(s, c_n)
    return (s.mean - s.minimum) / (SQRT_2_OVER_PI - c)


def unbiased_scale_sq(sample):
    """Unbiased estimate of ``eta**2``: ``pi/(pi-2) * S**2``."""
    return PI_OVER_PI_MINUS_2 * as_sample(sample).variance


def mle_location(sample):
    return as_sample(sample).minimum


def mle_scale(sample):
    s = as_sample(sample)
    return math.sqrt(math.fsum((s.values - s.minimum) ** 2) / s.n)


# ---------------------------------------------------------------------------
# minimum risk equivariant scale (unknown location)


def _gamma_ratio(a, b):
    return math.exp(log_gamma(a) - log_gamma(b))


def mre_scale(sample):
    """MRE estimator of the scale under the loss ``eta^-2 (x - eta)^2``.

    A ratio of Student-t tails with ``n+1`` and ``n+2`` degrees of freedom
    times ``S``.  Raises :class:`DegenerateSample` for constant samples.
    """
    s = as_sample(sample)
    n = s.n
    if not s.variance > 0:
        raise DegenerateSample("mre_scale is undefined for a sample with zero variance")
    sd = s.std
    spread = (s.mean - s.minimum) / sd
    tail_a = student_t_tail(n + 1, math.sqrt(n * (n + 1) / (n - 1)) * spread)
    tail_b = student_t_tail(n + 2, math.sqrt(n * (n + 2) / (n - 1)) * spread)
    if tail_b == 0.0:
        raise DomainError(f"Student-t tail underflow for n={n}")
    const = math.sqrt((n - 1) / 2.0) * _gamma_ratio((n + 1) / 2.0, (n + 2) / 2.0)
    return const * (tail_a / tail_b) * sd


def _quad(func, a, b, what, **kw):
    kw.setdefault("epsabs", 0.0)
    kw.setdefault("epsrel", 1e-12)
    kw.setdefault("limit", 400)
    value, abserr = integrate.quad(func, a, b, full_output=False, **kw)
    if not (math.isfinite(value) and abserr <= 1e-8 * abs(value) + 1e-300):
        raise QuadratureError(f"{what}: value={value!r} abserr={abserr!r}")
    return value


def _log_f_prime(x):
    """log of the joint density (up to a constant) of the differences x_i - x_n.

    ``x`` holds all ``n`` coordinates with ``x[-1] == 0``:
    ``f'(x) = integral exp(-1/2 sum_i (x_i + t)^2) 1{min_i(x_i + t) >= 0} dt``.
    The integrand is shifted to start at its support edge ``t = -min x``.
    """
    d = x - x.min()
    n = d.size
    base = -0.5 * float(np.dot(d, d))
    total = float(d.sum())

    def integrand(s):
        # sum_i (d_i + s)^2 - sum_i d_i^2
        return math.exp(-0.5 * (2.0 * s * total + n * s * s))

    # mass sits within a few multiples of min(1/sqrt(n), 1/total) of zero
    width = min(1.0 / math.sqrt(n), 1.0 / total if total > 0 else math.inf)
    head = _quad(integrand, 0.0, 50.0 * width, "f' inner integral")
    return base + math.log(head)


def _log_moment_integral(yp, k):
    """log of ``integral_0^inf v^k f'(v y') dv`` (common constants dropped)."""

    def log_h(v):
        return k * math.log(v) + _log_f_prime(v * yp)

    scale = 1.0 / float(np.sqrt(np.mean(yp * yp)))
    grid = scale * np.geomspace(1e-4, 1e3, 281)
    logs = np.array([log_h(v) for v in grid])
    i = int(np.argmax(logs))
    peak = logs[i]
    if i == 0 or i == len(grid) - 1:
        raise QuadratureError("failed to bracket the peak of the scale integrand")
    # upper limit where the integrand drops below 1e-16 of its peak
    above = np.flatnonzero(logs[i:] < peak - _LOG_1E16)
    upper = grid[i + above[0]] if above.size else grid[-1]
    value = _quad(lambda v: math.exp(log_h(v) - peak) if v > 0 else 0.0,
                  0.0, upper, "scale moment integral", points=[grid[i]])
    return peak + math.log(value)


def mre_scale_oracle(sample):
    """``I_n / I_{n+1}`` with ``I_k = integral_0^inf v^k f'(v y') dv`` by quadrature.

    Both the inner density ``f'`` and the outer moment integrals are
    evaluated numerically.  Verification path only: it is slow.
    """
    s = as_sample(sample, min_size=3)
    if not s.variance > 0:
        raise DegenerateSample("mre_scale_oracle needs a non-constant sample")
    yp = s.values - s.values[-1]
    n = s.n
    return math.exp(_log_moment_integral(yp, n) - _log_moment_integral(yp, n + 1))


# ---------------------------------------------------------------------------
# known scale: Pitman location estimator


def pitman_location_known_scale(sample, eta0):
    """Pitman (MRE under squared error) location estimator for known scale."""
    s = as_sample(sample, min_size=1)
    eta0 = check_positive(eta0, "eta0")
    rootn = math.sqrt(s.n)
    z = rootn * (s.minimum - s.mean) / eta0
    # phi(z) / Phi(z) without underflow for very negative z
    mills = math.exp(-0.5 * z * z - log_normal_cdf(z)) / math.sqrt(2.0 * math.pi)
    return s.mean - eta0 / rootn * mills


def pitman_location_oracle(sample, eta0):
    """Ratio of the two location integrals of the joint density, by quadrature.

    Integrates over ``u <= min(y)`` written as ``u = min(y) - s``, ``s >= 0``.
    """
    s = as_sample(sample, min_size=1)
    eta0 = check_positive(eta0, "eta0")
    d = s.values - s.minimum
    total = float(d.sum())
    n = s.n
    c = 1.0 / (2.0 * eta0 * eta0)

    def density(t):
        # f_0(y - u) / f_0(y - min y), with u = min y - t
        return math.exp(-c * (2.0 * t * total + n * t * t))

    width = min(eta0 / math.sqrt(n), eta0 * eta0 / total if total > 0 else math.inf)
    upper = 50.0 * width
    mass = _quad(density, 0.0, upper, "pitman denominator")
    first = _quad(lambda t: t * density(t), 0.0, upper, "pitman numerator")
    return s.minimum - first / mass


# ---------------------------------------------------------------------------
# known location: scale estimators


def _sum_sq_above(sample, xi0):
    s = as_sample(sample, min_size=1)
    xi0 = check_finite(xi0, "xi0")
    if s.minimum < xi0:
        raise SupportViolation(f"observation {s.minimum!r} lies below the known location {xi0!r}")
    return s.n, math.fsum((s.values - xi0) ** 2)


def mre_scale_known_location(sample, xi0):
    n, ss = _sum_sq_above(sample, xi0)
    return _gamma_ratio((n + 1) / 2.0, (n + 2) / 2.0) / math.sqrt(2.0) * math.sqrt(ss)


def mvue_scale_known_location(sample, xi0):
    n, ss = _sum_sq_above(sample, xi0)
    return _gamma_ratio(n / 2.0, (n + 1) / 2.0) / math.sqrt(2.0) * math.sqrt(ss)


def c_n_bounds(n):
    """``(c_n, sqrt(pi/2)/n, Phi^-1(1/2 + 1/(2n)))`` for the ordering check."""
    n = check_count(n, "n")
    return (
        c_n_quadrature(n).value,
        math.sqrt(math.pi / 2.0) / n,
        normal_quantile(0.5 + 0.5 / n) if n > 1 else math.inf,
    )


__all__ = [
    "Sample", "as_sample", "CnValue", "c_n_quadrature", "c_n_mc",
    "unbiased_location", "unbiased_scale", "unbiased_scale_sq",
    "mle_location", "mle_scale", "mre_scale", "mre_scale_oracle",
    "pitman_location_known_scale", "pitman_location_oracle",
    "mre_scale_known_location", "mvue_scale_known_location", "c_n_bounds",
]
