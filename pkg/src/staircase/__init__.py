"""Unimodality of distinct-part partitions in truncated staircases.

Exact enumeration (:mod:`staircase.exact`), exact Irwin-Hall densities
(:mod:`staircase.piecewise`), contour-integral numerics
(:mod:`staircase.saddle`) and a command-line front end
(:mod:`staircase.cli`).
"""

__version__ = "0.1.0"

from .exact import (  # noqa: E402, F401
    BULK_TAU,
    IntegerPolynomial,
    LogConcavityReport,
    StaircaseShape,
    UnimodalityReport,
    bulk_window,
    check_log_concave,
    check_unimodal,
    degree_bound,
    enumerate_strict_count,
    gaussian_binomial,
    staircase_gf_dp,
    staircase_gf_family,
    staircase_gf_identity,
    tail_monotonicity,
)
from .piecewise import (  # noqa: E402, F401
    GaussianDensity,
    PiecewisePolynomial,
    block_decomposition_check,
    closed_form_irwin_hall,
    convolve,
    derivative,
    irwin_hall,
    irwin_hall_lemma_case,
    lemma1_check,
    log_concavity_margin,
    uniform_indicator,
)
from .saddle import (  # noqa: E402, F401
    QuadratureConfig,
    asymptotic_main_term,
    coefficient_via_dft,
    coefficients_via_dft,
    complex_exponential,
    convergence_study,
    discriminant,
    empirical_orders,
    eval_gf_on_line,
    jm_integral,
)
