"""Monte Carlo approximation of the minimum risk equivariant location estimator.

The estimator is ``T0(y) - rho(U(y)) * T1(y)`` with ``T0`` the sample mean,
``T1`` the mean absolute deviation and ``U`` the maximal invariant of the
location-scale group.  ``rho`` is a ratio of two conditional expectations
under HN(0, 1) given ``U``; it is approximated by a ratio of weighted sums over
a cloud of points sharing (up to ``epsilon``) the invariant of the data.  The
cloud is built directly, exploiting the invariance of ``U``, instead of by
rejection, which would starve in high dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_positive
from .errors import DegenerateCloud, DegenerateSample, DomainError, MembershipViolation
from .hn_estimators import as_sample

SHIFT_MODES = ("per_vector", "global")
_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class UStatistic:
    ratios: np.ndarray
    sign: int

    def __eq__(self, other):
        return (
            isinstance(other, UStatistic)
            and self.sign == other.sign
            and np.array_equal(self.ratios, other.ratios)
        )

    def __hash__(self):
        return hash((self.sign, self.ratios.tobytes()))


@dataclass(frozen=True)
class MreLocationConfig:
    """Cloud construction settings.

    ``shift`` selects how negative coordinates are removed before rescaling:
    ``"per_vector"`` moves every vector by its own random offset so that its
    minimum lands in ``[0, 1]``; ``"global"`` moves the whole cloud by one
    offset, and only when some coordinate is negative.
    """

    epsilon_cap: float = 0.1
    samples_per_n: int = 100
    box_upper: float = 10.0
    epsilon_fraction: float = 0.5
    shift: str = "per_vector"

    def __post_init__(self):
        check_positive(self.epsilon_cap, "epsilon_cap")
        check_positive(self.box_upper, "box_upper")
        check_count(self.samples_per_n, "samples_per_n")
        frac = float(self.epsilon_fraction)
        if not 0.0 < frac < 1.0:
            raise DomainError(f"epsilon_fraction must lie in (0, 1), got {self.epsilon_fraction!r}")
        if self.shift not in SHIFT_MODES:
            raise DomainError(f"shift must be one of {SHIFT_MODES}, got {self.shift!r}")


@dataclass(frozen=True)
class ConstrainedSample:
    points: np.ndarray  # (m, n)
    epsilon_used: float
    targets: np.ndarray  # U ratios of the data
    sign: int

    @property
    def m(self):
        return self.points.shape[0]


def _ratios(values):
    d = values[..., -2] - values[..., -1]
    return (values[..., :-2] - values[..., -1:]) / d[..., None], d


def u_statistic(sample):
    s = as_sample(sample, min_size=3)
    y = s.values
    if y[-2] == y[-1]:
        raise DegenerateSample("the last two observations coincide; U is undefined")
    ratios, d = _ratios(y)
    ratios.setflags(write=False)
    return UStatistic(ratios, 1 if d > 0 else -1)


def t0_star(sample):
    return as_sample(sample).mean


def t1_star(sample):
    """Mean absolute deviation about the sample mean."""
    s = as_sample(sample)
    return math.fsum(np.abs(s.values - s.mean)) / s.n


def _rows_t0_t1(points):
    t0 = points.mean(axis=1)
    t1 = np.abs(points - t0[:, None]).mean(axis=1)
    return t0, t1


def _membership_tolerance(points, d, targets, epsilon):
    # forward rounding bound for (w_i - w_n) / (w_{n-1} - w_n) after the
    # shift and rescale steps; exact arithmetic gives zero slack
    scale = np.max(np.abs(points), axis=1) / np.abs(d)
    return 64.0 * _EPS * scale[:, None] * (2.0 + np.abs(targets) + epsilon)


def cloud_membership(cloud):
    """Per-point flags: sup-norm window on the ratios and sign equality."""
    w = cloud.points
    ratios, d = _ratios(w)
    sign_ok = np.sign(d) == cloud.sign
    if cloud.targets.size == 0:
        return sign_ok
    dev = np.abs(ratios - cloud.targets)
    tol = _membership_tolerance(w, d, cloud.targets, cloud.epsilon_used)
    return sign_ok & np.all(dev <= cloud.epsilon_used + tol, axis=1)


def constrained_sampler(sample, config=MreLocationConfig(), stream=None):
    """Build ``m = samples_per_n * n`` points sharing the data's invariant.

    Steps: pick ``w_{n-1}, w_n`` uniform on the box with the data's sign;
    place the other coordinates uniformly in their ratio windows; shift
    negatives away; divide each vector by its maximum and multiply by an
    independent uniform draw on ``(0, box_upper]``.  Every point is checked
    against the window before returning.
    """
    if stream is None:
        raise DomainError("constrained_sampler needs a RandomStream or Generator")
    s = as_sample(sample, min_size=3)
    u = u_statistic(s)
    n = s.n
    a = u.ratios
    if a.size and not np.all(np.isfinite(a)):
        raise DegenerateSample("non-finite invariant ratios")
    min_abs = float(np.min(np.abs(a))) if a.size else math.inf
    if min_abs == 0:
        raise DegenerateSample("an observation equals the last one; epsilon would be zero")
    eps = config.epsilon_fraction * min(config.epsilon_cap, min_abs)
    m = config.samples_per_n * n
    box = config.box_upper
    rng = stream.generator() if hasattr(stream, "generator") else stream

    last_two = np.empty((0, 2))
    while last_two.shape[0] < m:
        pairs = rng.uniform(0.0, box, size=(2 * (m - last_two.shape[0]) + 16, 2))
        keep = np.sign(pairs[:, 0] - pairs[:, 1]) == u.sign
        last_two = np.concatenate([last_two, pairs[keep]])
    last_two = last_two[:m]
    wn1, wn = last_two[:, 0], last_two[:, 1]
    d = wn1 - wn

    w = np.empty((m, n))
    w[:, -2] = wn1
    w[:, -1] = wn
    if n > 2:
        r = rng.uniform(a - eps, a + eps, size=(m, n - 2))
        w[:, :-2] = wn[:, None] + d[:, None] * r

    if config.shift == "per_vector":
        low = w.min(axis=1)
        w += rng.uniform(-low, 1.0 - low)[:, None]
    else:
        low = float(w.min())
        if low < 0:
            w += rng.uniform(-low, 1.0 - low)

    top = w.max(axis=1)
    mult = box * (1.0 - rng.random(m))  # (0, box]
    w *= (mult / top)[:, None]
    np.clip(w, 0.0, box, out=w)

    cloud = ConstrainedSample(w, eps, np.array(a), u.sign)
    ok = cloud_membership(cloud)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0])
        raise MembershipViolation(f"cloud point {bad} left the invariant window")
    return cloud


def rho_estimate(sample, cloud):
    """Ratio ``sum T0*T1*phi / sum T1^2*phi`` over the cloud.

    ``phi = exp(-|w|^2 / 2)`` is evaluated after subtracting the largest
    exponent so the weights cannot all underflow.
    """
    if cloud.m == 0:
        raise DegenerateCloud("empty cloud")
    t0, t1 = _rows_t0_t1(cloud.points)
    log_w = -0.5 * np.einsum("ij,ij->i", cloud.points, cloud.points)
    return weighted_ratio(t0, t1, log_w)


def weighted_ratio(t0, t1, log_w):
    weights = np.exp(log_w - np.max(log_w))
    den = math.fsum(t1 * t1 * weights)
    if not den > 0:
        raise DegenerateCloud("all cloud weights vanished")
    return math.fsum(t0 * t1 * weights) / den


def mre_location(sample, config=MreLocationConfig(), stream=None, return_details=False):
    """Approximate MRE location estimate ``T0 - C * T1``.

    With ``return_details`` the cloud size, window radius and ratio are
    returned alongside as a dict.
    """
    s = as_sample(sample, min_size=3)
    cloud = constrained_sampler(s, config, stream)
    c = rho_estimate(s, cloud)
    t1 = t1_star(s)
    value = s.mean - c * t1
    if return_details:
        return value, {"m": cloud.m, "epsilon": cloud.epsilon_used, "rho": c}
    return value
