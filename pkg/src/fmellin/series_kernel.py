"""Series families ``f(x) = sum_n phi(n) (-x)**n / n!``.

Each family knows its coefficients ``phi(n)``, the analytic continuation
``s -> phi(-s)``, its elementary closed form and its convergence radius.
The ``geometric`` family is stored in its base variable, ``1/(1+y)``; the
``x -> x**k`` substitution is handled by :mod:`fmellin.mellin_engine`.
"""

import math
from dataclasses import dataclass
from typing import ClassVar, NamedTuple

import numpy as np

from .errors import DivergenceError, DomainError, NonConvergenceError, PoleError
from .gammakit import signed_log_gamma

__all__ = [
    "POLE_GUARD",
    "PhiSpec",
    "Exponential",
    "Geometric",
    "Binomial",
    "Catalan",
    "SeriesEvalConfig",
    "SeriesValue",
    "FAMILIES",
    "make_family",
    "eval_series",
    "closed_form",
    "phi_continuation",
    "catalan_printed_continuation",
]

#: Distance from a gamma pole below which a continuation refuses to evaluate.
POLE_GUARD = 1e-8
_NEAR_POLE = 1e-4


class GammaArg(NamedTuple):
    """A gamma-function argument appearing in ``phi(-s)``."""

    label: str
    value: float
    numerator: bool


@dataclass(frozen=True)
class SeriesEvalConfig:
    max_terms: int = 10_000
    tolerance: float = 1e-14

    def __post_init__(self):
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if not self.tolerance > 0:
            raise DomainError("tolerance must be > 0")


class SeriesValue(NamedTuple):
    value: float
    est_error: float
    n_terms: int
    truncated: bool = False


@dataclass(frozen=True)
class PhiSpec:
    """Base class of the series families.

    Subclasses provide the gamma arguments of ``phi(-s)`` and of ``phi(n)``
    (through :meth:`gamma_args`), the closed form and the exact ratio of
    consecutive normalised coefficients ``c_n = phi(n)/n!``.
    """

    family_id: ClassVar[str] = ""
    radius: ClassVar[float] = math.inf

    @property
    def params(self):
        return {}

    def gamma_args(self, s):
        """Gamma arguments of ``phi(-s)`` and the constant prefactor."""
        return 1.0, ()

    def term_ratio(self, n):
        """``c_{n+1} / c_n`` as a ``(numerator, denominator)`` pair."""
        raise NotImplementedError

    def strip(self):
        """Open s-interval where the classical Mellin integral converges."""
        return 0.0, math.inf

    def in_strip(self, s):
        lo, hi = self.strip()
        return lo < s < hi

    def closed_form(self, x):
        raise NotImplementedError

    # -- derived quantities -------------------------------------------------

    def poles_near(self, s, guard=POLE_GUARD):
        """Gamma arguments of ``phi(-s)`` within ``guard`` of a pole."""
        _, args = self.gamma_args(s)
        return [a for a in args if _pole_distance(a.value) < guard]

    def is_pole(self, s):
        return bool(self.poles_near(s))

    def continuation(self, s):
        """``phi(-s)`` evaluated through log-gamma ratios."""
        const, args = self.gamma_args(s)
        bad = self.poles_near(s)
        if bad:
            a = bad[0]
            raise PoleError(
                f"{self.family_id}: pole of {a.label} at argument {a.value:.12g} (s={s:g})",
                argument=a.value,
            )
        sign = math.copysign(1.0, const)
        logv = math.log(abs(const))
        for a in args:
            sg, lg = signed_log_gamma(a.value)
            sign *= sg
            logv += lg if a.numerator else -lg
        return sign * math.exp(logv)

    def coeff(self, n):
        """``phi(n)``; the continuation evaluated at ``s = -n``."""
        return self.continuation(-float(n))

    def near_pole(self, s):
        return bool(self.poles_near(s, _NEAR_POLE))

    def describe(self):
        bits = [f"{k}={v:g}" for k, v in self.params.items()]
        return self.family_id + (f"({', '.join(bits)})" if bits else "")


def _pole_distance(a):
    # distance of a gamma argument to the nearest nonpositive integer
    if a > 0.5:
        return math.inf
    return abs(a - round(a)) if a <= 0.0 else a


@dataclass(frozen=True)
class Exponential(PhiSpec):
    """``phi = 1``: ``f(x) = exp(-x)``."""

    family_id: ClassVar[str] = "exponential"
    radius: ClassVar[float] = math.inf

    def term_ratio(self, n):
        return 1, n + 1

    def closed_form(self, x):
        return np.exp(-np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Geometric(PhiSpec):
    """``phi(n) = Gamma(n+1)``: ``f(y) = 1/(1+y)`` in the base variable.

    ``k`` is carried along for the ``x -> x**k`` substitution but does not
    enter the base-variable coefficients.
    """

    k: float = 1.0
    family_id: ClassVar[str] = "geometric"
    radius: ClassVar[float] = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"geometric: k must be > 0, got {self.k!r}")

    @property
    def params(self):
        return {"k": self.k}

    def gamma_args(self, s):
        return 1.0, (GammaArg("Gamma(1 - s)", 1.0 - s, True),)

    def term_ratio(self, n):
        return 1, 1

    def strip(self):
        return 0.0, 1.0

    def closed_form(self, x):
        return 1.0 / (1.0 + np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Binomial(PhiSpec):
    """``phi(n) = Gamma(n+k)/Gamma(k)``: ``f(x) = (1+x)**-k``."""

    k: float = 1.0
    family_id: ClassVar[str] = "binomial"
    radius: ClassVar[float] = 1.0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"binomial: k must be > 0, got {self.k!r}")

    @property
    def params(self):
        return {"k": self.k}

    def gamma_args(self, s):
        return 1.0, (
            GammaArg("Gamma(k - s)", self.k - s, True),
            GammaArg("Gamma(k)", self.k, False),
        )

    def term_ratio(self, n):
        return n + self.k, n + 1

    def strip(self):
        return 0.0, self.k

    def closed_form(self, x):
        return (1.0 + np.asarray(x, dtype=float)) ** (-self.k)


@dataclass(frozen=True)
class Catalan(PhiSpec):
    """``phi(n) = mu Gamma(2n+mu)/Gamma(n+mu+1)``.

    ``f(x) = (2/(1+sqrt(1+4x)))**mu``, summed from ``n = 0``.
    """

    mu: int = 1
    family_id: ClassVar[str] = "catalan"
    radius: ClassVar[float] = 0.25

    def __post_init__(self):
        if int(self.mu) != self.mu or self.mu < 1:
            raise DomainError(f"catalan: mu must be a positive integer, got {self.mu!r}")
        object.__setattr__(self, "mu", int(self.mu))

    @property
    def params(self):
        return {"mu": self.mu}

    def gamma_args(self, s):
        # Gamma(mu-s+1) sits in the denominator, where a "pole" is a zero of
        # phi(-s); it is guarded all the same (the printed identity divides by it)
        return float(self.mu), (
            GammaArg("Gamma(mu - 2s)", self.mu - 2.0 * s, True),
            GammaArg("Gamma(mu - s + 1)", self.mu - s + 1.0, False),
        )

    def term_ratio(self, n):
        mu = self.mu
        return (2 * n + mu) * (2 * n + mu + 1), (n + mu + 1) * (n + 1)

    def strip(self):
        return 0.0, self.mu / 2.0

    def closed_form(self, x):
        x = np.asarray(x, dtype=float)
        return (2.0 / (1.0 + np.sqrt(1.0 + 4.0 * x))) ** self.mu


FAMILIES = {
    cls.family_id: cls for cls in (Exponential, Geometric, Binomial, Catalan)
}


def make_family(name, k=None, mu=None):
    """Build a family from its CLI vocabulary name and parameters."""
    try:
        cls = FAMILIES[name]
    except KeyError:
        raise DomainError(
            f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}"
        ) from None
    if cls is Exponential:
        return Exponential()
    if cls is Catalan:
        if mu is None:
            raise DomainError("catalan requires mu")
        return Catalan(mu=mu)
    if cls is Binomial and k is None:
        raise DomainError("binomial requires k")
    return cls(k=1.0 if k is None else float(k))


def phi_continuation(spec, s):
    return spec.continuation(s)


def catalan_printed_continuation(mu, s):
    """The catalan factor exactly as printed: ``Gamma(mu-2s)/(mu-s+1)``."""
    sg, lg = signed_log_gamma(mu - 2.0 * s)
    return sg * math.exp(lg) / (mu - s + 1.0)


def closed_form(spec, x):
    if np.any(np.asarray(x) < 0):
        raise DomainError("closed_form: requires x >= 0")
    out = spec.closed_form(x)
    return float(out) if np.ndim(out) == 0 else out


def _log_abs_coeff(spec, n):
    # log|phi(n)/n!| and its sign
    const, args = spec.gamma_args(-float(n))
    sign = math.copysign(1.0, const)
    logv = math.log(abs(const)) - math.lgamma(n + 1.0)
    for a in args:
        sg, lg = signed_log_gamma(a.value)
        sign *= sg
        logv += lg if a.numerator else -lg
    return sign, logv


def eval_series(spec, x, cfg=None):
    """Partial sum of the defining series of ``spec`` at ``x``.

    Coefficients are formed in log space with the sign carried separately.
    Summation stops once a term falls below ``cfg.tolerance`` times the
    partial sum while the terms are shrinking. ``est_error`` bounds the
    tail by a geometric series on the last term ratio and adds the
    rounding floor of the log-space coefficients.
    """
    cfg = cfg or SeriesEvalConfig()
    x = float(x)
    if abs(x) >= spec.radius:
        raise DivergenceError(
            f"eval_series: |x|={abs(x):g} is outside the convergence radius {spec.radius:g}"
        )
    if x == 0.0:
        return SeriesValue(spec.coeff(0), 0.0, 1)
    logx = math.log(abs(x))
    xsign = -1.0 if x > 0 else 1.0  # the series variable is -x
    terms = []
    floor = 0.0
    prev = math.inf
    for n in range(cfg.max_terms):
        sg, lc = _log_abs_coeff(spec, n)
        logmag = lc + n * logx
        mag = math.exp(logmag)
        terms.append(sg * (xsign ** n) * mag)
        # exp() of a log carries an error proportional to the log's size
        floor += mag * (abs(logmag) + abs(lc) + math.log(n + 1.0) + 2.0)
        if n > 0 and mag <= prev:
            partial = math.fsum(terms)
            if mag <= cfg.tolerance * abs(partial):
                err = _tail_bound(spec, n, logx, mag) + _EPS * floor
                return SeriesValue(partial, err, n + 1)
        prev = mag
    partial = math.fsum(terms)
    if mag > prev:
        raise NonConvergenceError(
            f"eval_series: terms still growing after {cfg.max_terms} terms at x={x:g}"
        )
    err = _tail_bound(spec, cfg.max_terms - 1, logx, mag) + _EPS * floor
    return SeriesValue(partial, err, cfg.max_terms, truncated=True)


_EPS = float(np.finfo(float).eps)


def _tail_bound(spec, n, logx, last):
    _, lc = _log_abs_coeff(spec, n + 1)
    nxt = math.exp(lc + (n + 1) * logx)
    ratio = nxt / last if last > 0 else 0.0
    if ratio < 0.99:
        return nxt / (1.0 - ratio)
    return 100.0 * nxt
