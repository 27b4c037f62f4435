"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`BesimcError`
so callers (and the CLI) can map failures to exit codes by class.
"""


class BesimcError(Exception):
    """Base class for library errors."""


class DomainError(BesimcError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateSample(DomainError):
    """The sample makes a required ratio undefined (e.g. zero spread)."""


class SupportViolation(DomainError):
    """An observation lies below the known location parameter."""


class DegenerateCloud(DomainError):
    """Every weight in a constrained cloud vanished."""


class MembershipViolation(BesimcError, RuntimeError):
    """A constrained-sampler point fell outside its target window."""


class QuadratureError(BesimcError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class NoHits(BesimcError):
    """A fixed-size run produced no draws inside the window."""

    def __init__(self, draws, epsilon):
        self.draws = draws
        self.epsilon = epsilon
        super().__init__(f"no hits in {draws} draws with epsilon={epsilon}")


class Underfilled(BesimcError):
    """The draw budget ran out before the target hit count was reached."""

    def __init__(self, hits, target_hits, draws, epsilon):
        self.hits = hits
        self.target_hits = target_hits
        self.draws = draws
        self.epsilon = epsilon
        super().__init__(
            f"only {hits} of {target_hits} hits after {draws} draws "
            f"(epsilon={epsilon})"
        )
