"""Finite Mellin transforms of power series through incomplete gamma functions."""

from .errors import (
    DivergenceError,
    DomainError,
    FMellinError,
    GammaOverflowError,
    NonConvergenceError,
    NumericalError,
    PoleError,
)
from .gammakit import gamma, log_gamma, lower_inc_gamma, upper_inc_gamma
from .mellin_engine import (
    DirichletSpec,
    MellinQuery,
    MellinResult,
    band_mellin,
    classical_mellin,
    dirichlet_finite_mellin,
    evaluate,
    finite_mellin_thm1,
    geometric_classical,
    geometric_interval,
    geometric_substitution,
    quadrature_mellin,
    tail_mellin_thm2,
    termwise_mellin,
)
from .quadrature import QuadratureConfig, integrate_finite, integrate_semi_infinite
from .series_kernel import (
    Binomial,
    Catalan,
    Exponential,
    Geometric,
    PhiSpec,
    SeriesEvalConfig,
    closed_form,
    eval_series,
    make_family,
    phi_continuation,
)

__version__ = "0.1.0"
