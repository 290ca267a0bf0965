"""Floating-point checks of the contour-integral analysis.

The coefficients ``c(l)`` of the staircase generating polynomial ``F`` are
recovered from values of ``F`` on the circle ``|z| = exp(-2 pi alpha)``.
Parameterizing ``z = e(theta + i alpha)`` with ``e(w) = exp(2 pi i w)``:

    c(l) = int_{-1/2}^{1/2} F(e(theta + i alpha)) e(-l (theta + i alpha)) dtheta.

Dropping the constant term and letting ``l`` be real gives a smooth function
``f(l)``; ``J_m`` is its ``m``-th derivative.  To leading order in ``n``,
``J_m`` is ``n^(b-m-1)/b!`` times the ``m``-th derivative of the Irwin-Hall
density at ``x = l/n - b(b+1)/(2n)``, and ``J_1^2 - J_0 J_2`` is governed by
``(I')^2 - I I''``.  This module computes both sides numerically.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import StaircaseShape, _as_shape
from .piecewise import OneSidedError, irwin_hall_derivatives

__all__ = [
    "AsymptoticComparison",
    "ConvergenceRow",
    "DerivativeEstimate",
    "Discriminant",
    "PrecisionError",
    "QuadratureConfig",
    "SingularEvaluationError",
    "asymptotic_main_term",
    "coefficient_via_dft",
    "coefficients_via_dft",
    "complex_exponential",
    "convergence_study",
    "discriminant",
    "empirical_orders",
    "eval_gf_on_line",
    "jm_integral",
]

TWO_PI = 2.0 * math.pi
BREAKPOINT_SHIFT = Fraction(1, 10**9)


class PrecisionError(ArithmeticError):
    """A floating-point result failed its residual check."""


class SingularEvaluationError(ZeroDivisionError):
    """The generating function was evaluated at ``z = 1`` via the quotient form."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for the contour integrals.

    ``alpha`` defaults to ``alpha_scale / n``.  The far part of the contour
    contributes to ``J_m`` with weight up to ``exp(2 pi alpha l)``, which for
    ``alpha = 1/n`` hides the leading-order law until ``n`` is in the tens of
    thousands; ``alpha_scale = 1/2`` keeps the same order of magnitude
    without that blow-up.  ``panels`` defaults to a count that keeps roughly
    two panels per oscillation of the integrand.
    """

    alpha: float | None = None
    alpha_scale: float = 0.5
    panels: int | None = None
    nodes_per_panel: int = 16
    scheme: str = "panel-gauss"
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.alpha_scale > 0:
            raise ValueError("alpha_scale must be positive")
        if self.scheme not in ("panel-gauss", "uniform-periodic"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.panels is not None and self.panels * self.nodes_per_panel < 8:
            raise ValueError("need at least 8 quadrature nodes")
        if self.nodes_per_panel < 1:
            raise ValueError("nodes_per_panel must be positive")

    def alpha_for(self, shape: StaircaseShape) -> float:
        return self.alpha if self.alpha is not None else self.alpha_scale / shape.n

    def panels_for(self, shape: StaircaseShape, ell: float) -> int:
        if self.panels is not None:
            return self.panels
        # highest frequency present in F(z) z^(-l) after dropping a = 0
        freq = max(abs(ell), abs(shape.degree - ell), shape.n) + shape.effective_b**2
        return max(64, 2 * math.ceil(freq))


@dataclass(frozen=True)
class DerivativeEstimate:
    m: int
    value: float
    imag_residual: float
    node_count: int

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AsymptoticComparison:
    n: int
    b: int
    ell: float
    m: int
    x: float
    main_term: float
    jm: float | None
    ratio: float | None
    shifted: bool = False

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Discriminant:
    n: int
    b: int
    ell: float
    x: float
    j0: float
    j1: float
    j2: float
    j_disc: float
    main_disc: float
    ratio: float

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    b: int
    ell: int
    m: int
    jm: float
    main_term: float
    ratio: float
    error: float
    relative: bool = field(default=True)

    def to_json(self) -> dict:
        return asdict(self)


def complex_exponential(z):
    """``e(z) = exp(2 pi i z)``; works elementwise on arrays."""
    if isinstance(z, np.ndarray):
        return np.exp(2j * np.pi * z)
    return cmath.exp(2j * math.pi * z)


def _one_minus_exp(w):
    """``1 - exp(i w)`` for complex ``w``, accurate when ``w`` is small."""
    x = -w.imag
    y = w.real
    # expm1(x + iy) = expm1(x) cos y - 2 sin^2(y/2) + i e^x sin y
    s = np.sin(0.5 * y)
    re = np.expm1(x) * np.cos(y) - 2.0 * s * s
    im = np.exp(x) * np.sin(y)
    return -(re + 1j * im)


def _terms(shape: StaircaseShape, theta, alpha: float):
    """Yield ``(a, T_a)`` with ``T_a = z^{a(a+1)/2} [n choose a]_q at q=z``.

    Uses the quotient form, one factor pair per step, never the expanded
    polynomial.
    """
    w = TWO_PI * (np.asarray(theta, dtype=float) + 1j * alpha)
    n = shape.n
    term = np.ones_like(w)
    yield 0, term
    for a in range(1, shape.effective_b + 1):
        den = _one_minus_exp(a * w)
        if np.any(den == 0):
            raise SingularEvaluationError("evaluation hit a root of unity on |z| = 1")
        # z^a * (1 - z^(n-a+1)) / (1 - z^a)
        term = term * np.exp(1j * a * w) * _one_minus_exp((n - a + 1) * w) / den
        yield a, term


def eval_gf_on_line(shape, theta, alpha: float):
    """Evaluate the generating polynomial at ``z = e(theta + i alpha)``.

    ``theta`` may be a scalar or an array.  Cost is ``O(b)`` per point.
    """
    shape = _as_shape(shape)
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha == 0 and np.any(np.mod(np.asarray(theta, dtype=float), 1.0) == 0):
        raise SingularEvaluationError("z = 1 lies on the singular set of the quotient form")
    total = None
    for _, term in _terms(shape, theta, alpha):
        total = term if total is None else total + term
    if np.ndim(theta) == 0:
        return complex(total)
    return total


def _rounding_residual(value: complex, k: int) -> float:
    return max(abs(value.real - k), abs(value.imag)) / max(1, abs(k))


def coefficient_via_dft(
    shape,
    ell: int,
    M: int,
    alpha: float | None = None,
    tolerance: float = 1e-6,
) -> int:
    """Recover ``c(ell)`` from ``M`` equally spaced samples on a circle.

    The uniform rule is exact for trigonometric polynomials, so any ``M``
    above both the degree and ``ell`` reproduces the coefficient up to
    roundoff; ``M`` is raised to ``ell + 1`` when needed to keep aliases
    out.  ``alpha`` defaults to ``1/M``, which bounds the growth factor
    ``exp(2 pi alpha ell)``.  Raises :class:`PrecisionError` when the value
    before rounding is farther than ``tolerance`` (relative) from an integer.
    """
    shape = _as_shape(shape)
    if ell < 0:
        return 0
    if M <= shape.degree:
        raise ValueError(f"need M > degree {shape.degree}, got M={M}")
    M = max(M, ell + 1)
    alpha = 1.0 / M if alpha is None else alpha
    theta = np.arange(M) / M - 0.5
    values = eval_gf_on_line(shape, theta, alpha)
    kernel = np.exp(-2j * np.pi * ell * theta) * math.exp(TWO_PI * alpha * ell)
    value = complex(np.sum(values * kernel) / M)
    k = int(round(value.real))
    res = _rounding_residual(value, k)
    if res >= tolerance:
        raise PrecisionError(
            f"c({ell}) residual {res:.3e} >= {tolerance:.1e}; raise M or reduce n"
        )
    return k


def coefficients_via_dft(
    shape,
    M: int | None = None,
    alpha: float | None = None,
    tolerance: float = 1e-6,
) -> tuple[list[int], float]:
    """All coefficients at once by FFT; returns ``(coeffs, max_residual)``."""
    shape = _as_shape(shape)
    D = shape.degree
    if M is None:
        M = 1 << max(3, (D + 1).bit_length())
    if M <= D:
        raise ValueError(f"need M > degree {D}, got M={M}")
    alpha = 1.0 / M if alpha is None else alpha
    theta = np.arange(M) / M
    values = eval_gf_on_line(shape, theta, alpha)
    raw = np.fft.fft(values) / M
    ells = np.arange(D + 1)
    scaled = raw[: D + 1] * np.exp(TWO_PI * alpha * ells)
    coeffs = [int(round(v.real)) for v in scaled]
    worst = max(_rounding_residual(complex(v), k) for v, k in zip(scaled, coeffs))
    if worst >= tolerance:
        raise PrecisionError(f"max residual {worst:.3e} >= {tolerance:.1e}")
    return coeffs, worst


def _gauss_nodes(panels: int, per_panel: int):
    x, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(-0.5, 0.5, panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def jm_integral(
    shape, ell: float, m: int, cfg: QuadratureConfig | None = None
) -> DerivativeEstimate:
    """``J_m = f^(m)(ell)`` by quadrature of its defining integral.

    The ``(theta + i alpha)^m`` factor breaks periodicity for ``m >= 1`` and
    so does a non-integer ``ell``; the composite Gauss rule handles both.
    """
    shape = _as_shape(shape)
    cfg = cfg or QuadratureConfig()
    if m not in (0, 1, 2):
        raise ValueError("m must be 0, 1 or 2")
    if not ell > 2:
        raise ValueError("the constant term is dropped, which needs ell > 2")
    alpha = cfg.alpha_for(shape)
    if cfg.scheme == "uniform-periodic":
        if m != 0 or ell != int(ell):
            raise ValueError("uniform-periodic needs m = 0 and integer ell")
        M = cfg.panels * cfg.nodes_per_panel if cfg.panels else 1 << (shape.degree + 1).bit_length()
        nodes = np.arange(M) / M - 0.5
        weights = np.full(M, 1.0 / M)
    else:
        nodes, weights = _gauss_nodes(cfg.panels_for(shape, ell), cfg.nodes_per_panel)
    w = nodes + 1j * alpha
    acc = np.zeros_like(w)
    for a, term in _terms(shape, nodes, alpha):
        if a:
            acc += term
    # z^{a(a+1)/2} e(-(l - a(a+1)/2) w) = e(-l w)
    acc *= np.exp(-1j * TWO_PI * ell * nodes) * math.exp(TWO_PI * ell * alpha)
    if m:
        acc *= (-2j * math.pi * w) ** m
    value = complex(np.sum(acc * weights))
    est = DerivativeEstimate(m, value.real, abs(value.imag), len(nodes))
    if est.imag_residual > cfg.tolerance * abs(est.value) + 1e-12:
        raise PrecisionError(
            f"imaginary residual {est.imag_residual:.3e} exceeds tolerance"
        )
    return est


def _density_argument(shape: StaircaseShape, ell) -> Fraction:
    b = shape.effective_b
    if isinstance(ell, int) or (isinstance(ell, float) and ell.is_integer()):
        ell = int(ell)
    return Fraction(ell) / shape.n - Fraction(b * (b + 1), 2 * shape.n)


def _density_derivative(b: int, m: int, x: Fraction) -> tuple[Fraction, bool]:
    """``I_b^(m)(x)`` exactly; shifts off a breakpoint where only one side exists."""
    density = irwin_hall_derivatives(b, m)
    try:
        return density.evaluate(x), False
    except OneSidedError:
        return density.evaluate(x + BREAKPOINT_SHIFT), True


def asymptotic_main_term(
    shape,
    ell: float,
    m: int,
    cfg: QuadratureConfig | None = None,
    with_jm: bool = True,
) -> AsymptoticComparison:
    """Compare ``J_m`` with ``n^(b-m-1)/b! * I^(m)(x)``.

    The density derivative is evaluated exactly and converted to float last.
    With ``with_jm=False`` only the main term is computed.
    """
    shape = _as_shape(shape)
    b, n = shape.effective_b, shape.n
    if m not in (0, 1, 2):
        raise ValueError("m must be 0, 1 or 2")
    if b < 3 or (m == 2 and b < 4):
        raise ValueError(f"I^({m}) is not continuous for b={b}")
    x = _density_argument(shape, ell)
    dens, shifted = _density_derivative(b, m, x)
    main = float(Fraction(n ** (b - m - 1), math.factorial(b)) * dens)
    jm = ratio = None
    if with_jm:
        jm = jm_integral(shape, ell, m, cfg).value
        ratio = jm / main if main else math.inf
    return AsymptoticComparison(n, b, ell, m, float(x), main, jm, ratio, shifted)


def discriminant(shape, ell: float, cfg: QuadratureConfig | None = None) -> Discriminant:
    """``J_1^2 - J_0 J_2`` against ``n^(2b-4)/(b!)^2 [(I')^2 - I I''](x)``."""
    shape = _as_shape(shape)
    b, n = shape.effective_b, shape.n
    if b < 5:
        raise ValueError("the error terms are lower order only for b >= 5")
    j0, j1, j2 = (jm_integral(shape, ell, m, cfg).value for m in (0, 1, 2))
    x = _density_argument(shape, ell)
    i0, _ = _density_derivative(b, 0, x)
    i1, _ = _density_derivative(b, 1, x)
    i2, _ = _density_derivative(b, 2, x)
    main = float(Fraction(n ** (2 * b - 4), math.factorial(b) ** 2) * (i1 * i1 - i0 * i2))
    j_disc = j1 * j1 - j0 * j2
    return Discriminant(n, b, ell, float(x), j0, j1, j2, j_disc, main, j_disc / main)


def convergence_study(
    b: int,
    m: int,
    x0: float,
    n_list: Sequence[int],
    cfg: QuadratureConfig | None = None,
) -> list[ConvergenceRow]:
    """Error of the leading-order law for ``J_m`` along increasing ``n``.

    For each ``n`` the index is ``l = round(n x0 + b(b+1)/2)``.  The error
    is ``|J_m b!/n^(b-m-1) - I^(m)(x)| / |I^(m)(x)|``; when ``I^(m)(x) = 0``
    (e.g. ``m = 1`` at the centre) the unnormalized difference is reported
    and ``relative`` is False.  Empirical orders are unaffected by the
    normalization because ``x`` stays fixed.
    """
    rows = []
    for n in n_list:
        shape = StaircaseShape(n, b)
        ell = round(n * x0 + b * (b + 1) / 2)
        cmp_ = asymptotic_main_term(shape, ell, m, cfg)
        x = _density_argument(shape, ell)
        dens, _ = _density_derivative(b, m, x)
        scaled = cmp_.jm * math.factorial(b) / n ** (b - m - 1)
        if dens:
            err = abs(scaled - float(dens)) / abs(float(dens))
        else:
            err = abs(scaled)
        rows.append(
            ConvergenceRow(n, b, ell, m, cmp_.jm, cmp_.main_term,
                           cmp_.ratio if dens else math.nan, err, bool(dens))
        )
    return rows


def empirical_orders(rows: Sequence[ConvergenceRow]) -> list[float]:
    """``log(err_i / err_{i+1}) / log(n_{i+1} / n_i)`` for consecutive rows."""
    out = []
    for r0, r1 in zip(rows, rows[1:]):
        out.append(math.log(r0.error / r1.error) / math.log(r1.n / r0.n))
    return out
