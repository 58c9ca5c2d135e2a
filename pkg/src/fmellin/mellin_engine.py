"""Finite, band, tail and classical Mellin transforms of the series families.

Closed forms:

* ``finite_mellin_thm1``  ``int_0^t x^(s-1) f(x) dx  ->  lower(s, t) phi(-s)``
* ``band_mellin``         ``int_u^t ...              ->  (lower(s,t) - lower(s,u)) phi(-s)``
* ``tail_mellin_thm2``    ``int_t^inf ...            ->  upper(s, t) phi(-s)``
* ``classical_mellin``    ``int_0^inf ...            ->  gamma(s) phi(-s)``

The finite-limit closed forms are exact only for ``f = exp(-x)``; for the
other families they are approached as ``t`` grows. Two exact oracles are
provided to measure the gap: :func:`termwise_mellin` (the series integrated
term by term, valid inside the convergence radius) and
:func:`quadrature_mellin`.

For ``1/(1 + x**k)`` two closed forms are kept side by side: ``paper_literal``
(``lower(s/k, t) Gamma(1 - s/k)``) and ``substitution_consistent``
(``lower(s/k, t**k) Gamma(1 - s/k) / k``, what the change of variables
``y = x**k`` produces).
"""

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from typing import FrozenSet, Tuple

import numpy as np

from . import gammakit
from .errors import DivergenceError, DomainError, NonConvergenceError, PoleError
from .quadrature import QuadratureConfig, integrate_finite, integrate_semi_infinite
from .series_kernel import POLE_GUARD, Geometric, PhiSpec, SeriesEvalConfig

__all__ = [
    "METHODS",
    "GEO_VARIANTS",
    "DIRICHLET_VARIANTS",
    "MellinQuery",
    "MellinResult",
    "DirichletSpec",
    "finite_mellin_thm1",
    "band_mellin",
    "tail_mellin_thm2",
    "classical_mellin",
    "geometric_substitution",
    "geometric_interval",
    "geometric_classical",
    "dirichlet_finite_mellin",
    "termwise_mellin",
    "quadrature_mellin",
    "mellin_integrand",
    "dirichlet_integrand",
    "evaluate",
]

METHODS = (
    "theorem1",
    "theorem2",
    "corollary_band",
    "classical",
    "termwise",
    "quadrature",
    "paper_literal_geo",
    "substitution_geo",
)
GEO_VARIANTS = ("paper_literal", "substitution_consistent")
DIRICHLET_VARIANTS = ("paper_literal", "scale_consistent")

# relative error carried by a product of gammakit values
_CLOSED_REL = 1e-12


@dataclass(frozen=True)
class MellinResult:
    value: float
    method: str
    est_error: float = 0.0
    evals: int = 0
    flags: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class MellinQuery:
    """One transform request over ``[lower, upper]``.

    ``theorem1`` needs ``lower == 0``; ``theorem2`` needs ``upper == inf``
    and uses ``lower`` as its ``t``; ``classical`` needs ``[0, inf]``.
    """

    spec: PhiSpec
    s: float
    upper: float
    lower: float = 0.0
    method: str = "theorem1"

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if not self.s > 0:
            raise DomainError(f"s must be > 0, got {self.s!r}")
        if not 0.0 <= self.lower <= self.upper:
            raise DomainError(
                f"need 0 <= lower <= upper, got [{self.lower!r}, {self.upper!r}]"
            )


@dataclass(frozen=True)
class DirichletSpec:
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))
        if not self.coeffs:
            raise DomainError("DirichletSpec needs at least one coefficient")

    @property
    def M(self):
        return len(self.coeffs)

    def g(self, s):
        """The truncated Dirichlet series ``sum_m a_m m**-s``."""
        return math.fsum(a * m ** -s for m, a in enumerate(self.coeffs, start=1))


def _check_s(s):
    s = float(s)
    if not (s > 0 and math.isfinite(s)):
        raise DomainError(f"s must be a finite positive number, got {s!r}")
    return s


def _check_strip(spec, s, what):
    if not spec.in_strip(s):
        lo, hi = spec.strip()
        raise DivergenceError(
            f"{what}: the integral over [t, inf) diverges for {spec.describe()} "
            f"at s={s:g} (convergence strip {lo:g} < s < {hi:g})"
        )


def _flags(spec, s):
    return frozenset({"near_pole"}) if spec.near_pole(s) else frozenset()


def _closed(value, method, flags=frozenset()):
    return MellinResult(value, method, _CLOSED_REL * abs(value), 1, flags)


def finite_mellin_thm1(spec, s, t):
    """``lower_inc_gamma(s, t) * phi(-s)``; ``t = inf`` gives the classical value."""
    s = _check_s(s)
    t = float(t)
    if not t > 0:
        raise DomainError(f"theorem1: requires t > 0, got {t!r}")
    if math.isinf(t):
        return classical_mellin(spec, s)
    phi = spec.continuation(s)
    return _closed(gammakit.lower_inc_gamma(s, t) * phi, "theorem1", _flags(spec, s))


def band_mellin(spec, s, u, t):
    """``(lower(s, t) - lower(s, u)) * phi(-s)`` for ``0 <= u <= t``."""
    s = _check_s(s)
    u, t = float(u), float(t)
    if not 0.0 <= u <= t:
        raise DomainError(f"corollary_band: requires 0 <= u <= t, got u={u!r}, t={t!r}")
    phi = spec.continuation(s)
    if u == t:
        return MellinResult(0.0, "corollary_band", 0.0, 0, _flags(spec, s))
    if math.isinf(t):
        _check_strip(spec, s, "corollary_band")
        diff = gammakit.upper_inc_gamma(s, u)
    elif u == 0.0:
        diff = gammakit.lower_inc_gamma(s, t)
    elif u >= s + 1.0:
        # both in the continued-fraction regime; subtract the small tails
        diff = gammakit.upper_inc_gamma(s, u) - gammakit.upper_inc_gamma(s, t)
    else:
        diff = gammakit.lower_inc_gamma(s, t) - gammakit.lower_inc_gamma(s, u)
    return _closed(diff * phi, "corollary_band", _flags(spec, s))


def tail_mellin_thm2(spec, s, t):
    """``upper_inc_gamma(s, t) * phi(-s)``, only inside the convergence strip."""
    s = _check_s(s)
    t = float(t)
    if not t >= 0:
        raise DomainError(f"theorem2: requires t >= 0, got {t!r}")
    _check_strip(spec, s, "theorem2")
    phi = spec.continuation(s)
    return _closed(gammakit.upper_inc_gamma(s, t) * phi, "theorem2", _flags(spec, s))


def classical_mellin(spec, s):
    """``gamma(s) * phi(-s)``, the Mellin transform over ``[0, inf)``."""
    s = _check_s(s)
    if not spec.in_strip(s):
        lo, hi = spec.strip()
        raise DivergenceError(
            f"classical: s={s:g} is outside the convergence strip "
            f"{lo:g} < s < {hi:g} of {spec.describe()}"
        )
    phi = spec.continuation(s)
    return _closed(gammakit.gamma(s) * phi, "classical", _flags(spec, s))


# -- 1/(1 + x**k) -------------------------------------------------------------

def _geo_factor(s, k):
    a = s / k
    arg = 1.0 - a
    if arg <= 0.5 and abs(arg - round(arg)) < POLE_GUARD:
        raise PoleError(
            f"geometric: pole of Gamma(1 - s/k) at s/k={a:.12g} (s={s:g}, k={k:g})",
            argument=arg,
        )
    return a, gammakit.gamma(arg)


def _geo_limit(x, k, variant):
    # the upper/lower limit fed to the incomplete gamma, and an overflow flag
    if variant == "paper_literal" or math.isinf(x):
        return x, False
    try:
        return math.pow(x, k), False
    except OverflowError:
        return math.inf, True


def geometric_interval(s, k, u, t, variant="substitution_consistent"):
    """Closed form for ``int_u^t x^(s-1) / (1 + x**k) dx`` (``t`` may be inf)."""
    if variant not in GEO_VARIANTS:
        raise DomainError(f"unknown geometric variant {variant!r}")
    s = _check_s(s)
    k = float(k)
    if not k > 0:
        raise DomainError(f"geometric: k must be > 0, got {k!r}")
    u, t = float(u), float(t)
    if not 0.0 <= u <= t:
        raise DomainError(f"geometric: requires 0 <= u <= t, got u={u!r}, t={t!r}")
    a, g1 = _geo_factor(s, k)
    if math.isinf(t) and not s < k:
        raise DivergenceError(
            f"geometric: int x^(s-1)/(1+x^k) diverges at infinity for s={s:g} >= k={k:g}"
        )
    lt, over_t = _geo_limit(t, k, variant)
    lu, over_u = _geo_limit(u, k, variant)
    if lu == lt:
        diff = 0.0
    elif math.isinf(lt):
        diff = gammakit.upper_inc_gamma(a, lu)
    elif lu >= a + 1.0:
        diff = gammakit.upper_inc_gamma(a, lu) - gammakit.upper_inc_gamma(a, lt)
    else:
        diff = gammakit.lower_inc_gamma(a, lt) - gammakit.lower_inc_gamma(a, lu)
    scale = 1.0 if variant == "paper_literal" else 1.0 / k
    flags = set()
    if over_t or over_u:
        flags.add("limit_routed")
    if abs(a - round(a)) < 1e-4 and a > 0.5:
        flags.add("near_pole")
    method = "paper_literal_geo" if variant == "paper_literal" else "substitution_geo"
    return _closed(scale * diff * g1, method, frozenset(flags))


def geometric_substitution(s, k, t, variant="substitution_consistent"):
    """``int_0^t x^(s-1) / (1 + x**k) dx`` in either closed form.

    ``paper_literal`` returns ``lower(s/k, t) Gamma(1 - s/k)``;
    ``substitution_consistent`` returns ``lower(s/k, t**k) Gamma(1 - s/k) / k``.
    When ``t**k`` overflows the latter falls back to its ``t = inf`` limit and
    the result carries the ``limit_routed`` flag.
    """
    t = float(t)
    if not t > 0:
        raise DomainError(f"geometric: requires t > 0, got {t!r}")
    return geometric_interval(s, k, 0.0, t, variant)


def geometric_classical(s, k):
    """``int_0^inf x^(s-1) / (1 + x**k) dx = Gamma(s/k) Gamma(1 - s/k) / k``."""
    s = _check_s(s)
    if not s < k:
        raise DivergenceError(
            f"classical: s={s:g} is outside the convergence strip 0 < s < k={k:g}"
        )
    a, g1 = _geo_factor(s, k)
    return _closed(gammakit.gamma(a) * g1 / k, "classical")


# -- Dirichlet-weighted sums of dilations --------------------------------------

def dirichlet_finite_mellin(spec, d, s, t, variant="scale_consistent"):
    """Closed form for ``int_0^t x^(s-1) sum_m a_m f(m x) dx``.

    ``paper_literal`` multiplies the single-copy value by the truncated
    Dirichlet series, ``lower(s, t) phi(-s) sum_m a_m m**-s``.
    ``scale_consistent`` lets each dilated copy keep its own upper limit
    ``m t``: ``phi(-s) sum_m a_m m**-s lower(s, m t)``.
    """
    if variant not in DIRICHLET_VARIANTS:
        raise DomainError(f"unknown Dirichlet variant {variant!r}")
    if not isinstance(d, DirichletSpec):
        d = DirichletSpec(tuple(d))
    s = _check_s(s)
    t = float(t)
    if not t > 0:
        raise DomainError(f"dirichlet: requires t > 0, got {t!r}")
    phi = spec.continuation(s)
    if variant == "paper_literal":
        value = gammakit.lower_inc_gamma(s, t) * phi * d.g(s)
    else:
        value = phi * math.fsum(
            a * m ** -s * gammakit.lower_inc_gamma(s, m * t)
            for m, a in enumerate(d.coeffs, start=1)
        )
    return MellinResult(value, f"dirichlet_{variant}", _CLOSED_REL * abs(value), d.M,
                        _flags(spec, s))


# -- oracles -------------------------------------------------------------------

def termwise_mellin(spec, s, t, cfg=None):
    """Exact ``int_0^t x^(s-1) f(x) dx`` by integrating the series term by term.

    ``sum_n phi(n)/n! (-1)^n t^(s+n) / (s+n)``, valid for ``t`` inside the
    convergence radius. The sum is accumulated in decimal arithmetic from
    the exact ratio of consecutive coefficients, with the working precision
    raised until the digits lost to cancellation are covered. This keeps the
    oracle exact for ``exp(-x)`` at large ``t``, where the alternating terms
    exceed the result by twenty orders of magnitude.
    """
    cfg = cfg or SeriesEvalConfig()
    s = _check_s(s)
    t = float(t)
    if not t >= 0:
        raise DomainError(f"termwise: requires t >= 0, got {t!r}")
    if t >= spec.radius:
        raise DivergenceError(
            f"termwise: t={t:g} is outside the convergence radius {spec.radius:g} "
            f"of {spec.describe()}"
        )
    if t == 0.0:
        return MellinResult(0.0, "termwise", 0.0, 0)
    inner, inner_err, n_terms, truncated = _termwise_inner(spec, s, t, cfg)
    ts = t ** s
    value = ts * inner
    err = ts * inner_err + 2.0 * _EPS * abs(value)
    flags = frozenset({"truncated"}) if truncated else frozenset()
    return MellinResult(value, "termwise", err, n_terms, flags)


_EPS = float(np.finfo(float).eps)
_GUARD_DIGITS = 20


def _termwise_inner(spec, s, t, cfg):
    # sum_n c_n (-t)^n / (s + n), re-run at higher precision until the
    # digits cancelled between the largest term and the total are covered
    prec = 34
    while True:
        with localcontext() as ctx:
            ctx.prec = prec
            total, tail, biggest, n_terms, status = _termwise_pass(spec, s, t, cfg)
        lost = 0 if total == 0 else max(0, (biggest / abs(total)).adjusted())
        if total != 0 and prec - lost >= _GUARD_DIGITS:
            break
        if prec > 2000:
            raise NonConvergenceError("termwise: cancellation beyond 2000 digits")
        prec = lost + _GUARD_DIGITS + 14
    if status == "growing":
        raise NonConvergenceError(
            f"termwise: terms still growing after {cfg.max_terms} terms (t={t:g})"
        )
    err = float(tail) + float(abs(total)) * 10.0 ** (lost - prec + 1)
    return float(total), err, n_terms, status == "truncated"


def _termwise_pass(spec, s, t, cfg):
    ds, mt = Decimal(s), -Decimal(t)
    tol = Decimal(cfg.tolerance)
    c = Decimal(1)  # phi(0)/0! = 1 for every family
    p = Decimal(1)
    total = Decimal(0)
    biggest = Decimal(0)
    prev = None
    for n in range(cfg.max_terms):
        mag = abs(c * p / (ds + n))
        total += c * p / (ds + n)
        biggest = max(biggest, mag)
        num, den = spec.term_ratio(n)
        c = c * Decimal(num) / Decimal(den)
        p *= mt
        if prev is not None and mag <= prev and mag <= tol * abs(total):
            nxt = abs(c * p / (ds + n + 1))
            return total, _decimal_tail(nxt, mag), biggest, n + 1, "converged"
        prev = mag
    nxt = abs(c * p / (ds + cfg.max_terms))
    status = "growing" if nxt > prev else "truncated"
    return total, _decimal_tail(nxt, prev), biggest, cfg.max_terms, status


def _decimal_tail(nxt, last):
    ratio = nxt / last if last else Decimal(0)
    return nxt / (1 - ratio) if ratio < Decimal("0.99") else 100 * nxt


def mellin_integrand(spec, s, k=None):
    """Vectorised ``x -> x**(s-1) f(x)``; with ``k`` the geometric family
    is taken in the substituted variable, ``x**(s-1) / (1 + x**k)``."""
    sm1 = float(s) - 1.0

    if k is not None:
        def f(x):
            fx = 1.0 / (1.0 + x ** k)
            return np.where(fx == 0.0, 0.0, x ** sm1 * fx)
    else:
        def f(x):
            fx = spec.closed_form(x)
            return np.where(fx == 0.0, 0.0, x ** sm1 * fx)
    return f


def dirichlet_integrand(spec, d, s):
    """Vectorised ``x -> x**(s-1) sum_m a_m f(m x)``."""
    sm1 = float(s) - 1.0

    def f(x):
        fx = sum(a * spec.closed_form(m * x) for m, a in enumerate(d.coeffs, start=1))
        return np.where(fx == 0.0, 0.0, x ** sm1 * fx)
    return f


def _integrate(f, u, t, cfg):
    if math.isinf(t):
        return integrate_semi_infinite(f, u, cfg)
    return integrate_finite(f, u, t, cfg)


def quadrature_mellin(spec, s, u, t, cfg=None, k=None):
    """Numerical ``int_u^t x^(s-1) f(x) dx``; ``t`` may be inf."""
    s = _check_s(s)
    u, t = float(u), float(t)
    if not 0.0 <= u <= t:
        raise DomainError(f"quadrature: requires 0 <= u <= t, got u={u!r}, t={t!r}")
    if u == t:
        return MellinResult(0.0, "quadrature")
    r = _integrate(mellin_integrand(spec, s, k), u, t, cfg or QuadratureConfig())
    return MellinResult(r.value, "quadrature", r.est_error, r.evals)


def _termwise_interval(spec, s, u, t, cfg, k=None):
    if k is not None and k != 1.0:
        # int_u^t x^(s-1)/(1+x^k) dx = (1/k) int_{u^k}^{t^k} y^(s/k-1)/(1+y) dy
        base = _termwise_interval(Geometric(), s / k, u ** k, t ** k, cfg)
        return MellinResult(base.value / k, "termwise", base.est_error / k, base.evals,
                            base.flags)
    hi = termwise_mellin(spec, s, t, cfg)
    if u == 0.0:
        return hi
    lo = termwise_mellin(spec, s, u, cfg)
    return MellinResult(hi.value - lo.value, "termwise", hi.est_error + lo.est_error,
                        hi.evals + lo.evals, hi.flags | lo.flags)


def evaluate(query, series_cfg=None, quad_cfg=None):
    """Dispatch a :class:`MellinQuery` to the matching operation.

    For the geometric family the integrand is ``x**(s-1) / (1 + x**k)``;
    ``theorem1``, ``theorem2`` and ``corollary_band`` then use the
    ``paper_literal`` closed form and ``classical`` the exact infinite-range
    value.
    """
    spec, s, u, t, m = query.spec, query.s, query.lower, query.upper, query.method
    geo = isinstance(spec, Geometric)
    k = spec.k if geo else None

    if m == "quadrature":
        return quadrature_mellin(spec, s, u, t, quad_cfg, k=k)
    if m == "termwise":
        if math.isinf(t):
            raise DivergenceError("termwise: requires a finite upper limit")
        return _termwise_interval(spec, s, u, t, series_cfg, k=k)
    if m in ("paper_literal_geo", "substitution_geo"):
        if not geo:
            raise DomainError(f"{m} applies to the geometric family only")
        variant = "paper_literal" if m == "paper_literal_geo" else "substitution_consistent"
        return geometric_interval(s, k, u, t, variant)

    if m == "theorem1":
        if u != 0.0:
            raise DomainError("theorem1 integrates from 0; use corollary_band for u > 0")
        if math.isinf(t):
            return geometric_classical(s, k) if geo else classical_mellin(spec, s)
        if geo:
            return _renamed(geometric_interval(s, k, 0.0, t, "paper_literal"), m)
        return finite_mellin_thm1(spec, s, t)
    if m == "theorem2":
        if not math.isinf(t):
            raise DomainError("theorem2 integrates to infinity; set upper = inf")
        if geo:
            return _renamed(geometric_interval(s, k, u, t, "paper_literal"), m)
        return tail_mellin_thm2(spec, s, u)
    if m == "corollary_band":
        if geo:
            return _renamed(geometric_interval(s, k, u, t, "paper_literal"), m)
        return band_mellin(spec, s, u, t)
    if m == "classical":
        if u != 0.0 or not math.isinf(t):
            raise DomainError("classical integrates over [0, inf)")
        return geometric_classical(s, k) if geo else classical_mellin(spec, s)
    raise DomainError(f"unknown method {m!r}")  # pragma: no cover


def _renamed(result, method):
    return MellinResult(result.value, method, result.est_error, result.evals, result.flags)
