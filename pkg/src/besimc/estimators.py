"""scikit-learn compatible wrappers.

``HalfNormalEstimator`` fits HN(xi, eta) to a 1-d sample with the unbiased,
maximum likelihood or minimum risk equivariant estimators, and behaves as a
density model afterwards (``score_samples``, ``score``, ``sample``).
``WindowConditionalExpectation`` is a regressor predicting ``E(y | X = x)`` by
averaging training targets inside a sup-norm window around ``x``.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from . import hn_estimators as hn
from ._validation import check_sample
from .condexp import ArraySource, BallQuery, estimate_fixed_k
from .distributions import HalfNormalParams, RandomStream, half_normal_logpdf, sample_half_normal
from .errors import DomainError, NoHits
from .mre_location import MreLocationConfig, mre_location

METHODS = ("unbiased", "mle", "mre")


def _stream(random_state):
    if random_state is None:
        return np.random.default_rng()
    if isinstance(random_state, (RandomStream, np.random.Generator)):
        return random_state
    return RandomStream(int(random_state))


class HalfNormalEstimator(BaseEstimator):
    """Estimate the location and scale of a general half-normal sample.

    Parameters
    ----------
    method : {"unbiased", "mle", "mre"}
        Estimator family.  ``"mre"`` uses the Monte Carlo approximation for the
        location (needs ``random_state`` for reproducibility) and the closed
        form for the scale.
    location, scale : float or None
        Known parameter values.  With a known scale the ``"mre"`` location is
        the Pitman estimator; with a known location the scale estimate is the
        MRE (``"mre"``), the MVUE (``"unbiased"``) or the MLE.
    samples_per_n, epsilon_cap, epsilon_fraction, box_upper, shift
        Constrained-cloud settings for the ``"mre"`` location.
    random_state : int, RandomStream, Generator or None
    """

    def __init__(self, method="mre", location=None, scale=None, samples_per_n=100,
                 epsilon_cap=0.1, epsilon_fraction=0.5, box_upper=10.0,
                 shift="per_vector", random_state=None):
        self.method = method
        self.location = location
        self.scale = scale
        self.samples_per_n = samples_per_n
        self.epsilon_cap = epsilon_cap
        self.epsilon_fraction = epsilon_fraction
        self.box_upper = box_upper
        self.shift = shift
        self.random_state = random_state

    def _mre_config(self):
        return MreLocationConfig(
            epsilon_cap=self.epsilon_cap, samples_per_n=self.samples_per_n,
            box_upper=self.box_upper, epsilon_fraction=self.epsilon_fraction, shift=self.shift,
        )

    def fit(self, X, y=None):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.location is not None and self.scale is not None:
            raise DomainError("at most one of location and scale may be fixed")
        sample = hn.Sample(check_sample(X, min_size=2, name="X"))

        if self.location is not None:
            xi = float(self.location)
            if self.method == "mre":
                eta = hn.mre_scale_known_location(sample, xi)
            elif self.method == "unbiased":
                eta = hn.mvue_scale_known_location(sample, xi)
            else:
                hn.mre_scale_known_location(sample, xi)  # support check
                eta = math.sqrt(math.fsum((sample.values - xi) ** 2) / sample.n)
        elif self.scale is not None:
            eta = float(self.scale)
            if self.method == "mre":
                xi = hn.pitman_location_known_scale(sample, eta)
            elif self.method == "unbiased":
                xi = hn.unbiased_location(sample)
            else:
                xi = hn.mle_location(sample)
        elif self.method == "unbiased":
            xi, eta = hn.unbiased_location(sample), hn.unbiased_scale(sample)
        elif self.method == "mle":
            xi, eta = hn.mle_location(sample), hn.mle_scale(sample)
        else:
            xi = mre_location(sample, self._mre_config(), _stream(self.random_state))
            eta = hn.mre_scale(sample)

        self.location_ = float(xi)
        self.scale_ = float(eta)
        self.n_samples_ = sample.n
        return self

    @property
    def params_(self):
        check_is_fitted(self, ("location_", "scale_"))
        return HalfNormalParams(self.location_, self.scale_)

    def score_samples(self, X):
        """Log-density of each observation under the fitted law."""
        x = check_sample(X, min_size=1, name="X")
        return half_normal_logpdf(self.params_, x)

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))

    def sample(self, n_samples=1, random_state=None):
        return sample_half_normal(self.params_, _stream(random_state), n_samples)


class WindowConditionalExpectation(RegressorMixin, BaseEstimator):
    """Regress ``y`` on ``X`` by window averages of the training targets.

    Parameters
    ----------
    epsilon : float
        Half-width of the closed sup-norm window.
    on_empty : {"raise", "nan"}
        What ``predict`` does for a query whose window holds no training row.
    """

    def __init__(self, epsilon=0.1, on_empty="raise"):
        self.epsilon = epsilon
        self.on_empty = on_empty

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        self.U_ = X
        self.f_ = y.astype(np.float64)
        self.n_features_in_ = X.shape[1]
        return self

    def estimate(self, center):
        """Full :class:`CondExpEstimate` (value, hits, draws) for one query."""
        check_is_fitted(self, ("U_", "f_"))
        query = BallQuery(np.ravel(center), self.epsilon)
        return estimate_fixed_k(ArraySource(self.U_, self.f_), query, self.f_.size)

    def predict(self, X):
        check_is_fitted(self, ("U_", "f_"))
        if self.on_empty not in ("raise", "nan"):
            raise DomainError(f"on_empty must be 'raise' or 'nan', got {self.on_empty!r}")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise DomainError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            try:
                out[i] = self.estimate(row).value
            except NoHits:
                if self.on_empty == "raise":
                    raise
                out[i] = np.nan
        return out
