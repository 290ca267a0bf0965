"""Exact-rational piecewise polynomials and the Irwin-Hall density.

A :class:`PiecewisePolynomial` is a compactly supported function given by a
polynomial on each interval of a breakpoint grid and zero outside it.  All
arithmetic uses :class:`fractions.Fraction`, so convolution, differentiation,
integration and point evaluation are exact.  The b-fold convolution of the
indicator of ``[0, 1]`` is the Irwin-Hall density, which drives the
leading-order analysis in :mod:`staircase.saddle`.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

__all__ = [
    "GaussianDensity",
    "HypothesisError",
    "LemmaReport",
    "MarginReport",
    "OneSidedError",
    "PiecewisePolynomial",
    "block_decomposition_check",
    "closed_form_irwin_hall",
    "convolve",
    "derivative",
    "irwin_hall",
    "irwin_hall_derivatives",
    "irwin_hall_lemma_case",
    "lemma1_check",
    "log_concavity_margin",
    "neg_log_second_derivative",
    "parse_rational",
    "rational_str",
    "uniform_indicator",
]

RationalLike = Union[int, Fraction, str]
Poly = tuple  # ascending coefficients, Fractions


class OneSidedError(ValueError):
    """Raised when a value at a breakpoint exists only as a one-sided limit."""


class HypothesisError(ValueError):
    """The inputs to :func:`lemma1_check` fail its hypotheses.

    This is a precondition failure, distinct from a failed conclusion.
    """

    def __init__(self, message: str, point=None, value=None):
        super().__init__(message)
        self.point = point
        self.value = value


def parse_rational(x: RationalLike) -> Fraction:
    """Accept ints, Fractions, floats (exactly) and strings like ``"3/2"``."""
    return Fraction(x)


def rational_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# -- dense univariate polynomials over Q ------------------------------------

def _trim(p: Sequence[Fraction]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _padd(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] += c
    return _trim(out)


def _pscale(p: Poly, c) -> Poly:
    return _trim(c * a for a in p)


def _pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, c in enumerate(q):
                out[i + j] += a * c
    return _trim(out)


def _peval(p: Poly, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pderiv(p: Poly) -> Poly:
    return _trim(i * p[i] for i in range(1, len(p)))


def _pantideriv(p: Poly) -> Poly:
    return _trim([Fraction(0)] + [c / (i + 1) for i, c in enumerate(p)])


def _ppow(p: Poly, k: int) -> Poly:
    out: Poly = (Fraction(1),)
    for _ in range(k):
        out = _pmul(out, p)
    return out


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Polynomial pieces on consecutive intervals, zero outside.

    ``pieces[j]`` holds ascending coefficients in the global variable ``x``
    for the interval ``(breakpoints[j], breakpoints[j + 1])``.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[Poly, ...]

    def __init__(self, breakpoints: Iterable[RationalLike], pieces: Iterable[Iterable]):
        bps = tuple(parse_rational(t) for t in breakpoints)
        pcs = tuple(_trim(parse_rational(c) for c in piece) for piece in pieces)
        if bps and len(pcs) != len(bps) - 1:
            raise ValueError("need exactly one piece per interval")
        if not bps and pcs:
            raise ValueError("pieces given without breakpoints")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)

    @classmethod
    def zero(cls) -> "PiecewisePolynomial":
        return cls((), ())

    def is_zero(self) -> bool:
        return all(not p for p in self.pieces)

    @property
    def support(self) -> tuple[Fraction, Fraction] | None:
        n = self.normalized()
        if not n.breakpoints:
            return None
        return n.breakpoints[0], n.breakpoints[-1]

    def piece_at(self, x) -> Poly:
        """Polynomial of the open interval containing ``x`` (not a breakpoint)."""
        bps = self.breakpoints
        j = bisect.bisect_right(bps, x) - 1
        if j < 0 or j >= len(self.pieces):
            return ()
        return self.pieces[j]

    def limits(self, x) -> tuple[Fraction, Fraction]:
        """Left and right limits at ``x``."""
        x = parse_rational(x)
        bps = self.breakpoints
        if not bps:
            return Fraction(0), Fraction(0)
        j = bisect.bisect_left(bps, x)
        if j < len(bps) and bps[j] == x:
            left = _peval(self.pieces[j - 1], x) if j >= 1 else Fraction(0)
            right = _peval(self.pieces[j], x) if j < len(self.pieces) else Fraction(0)
            return left, right
        v = _peval(self.piece_at(x), x)
        return v, v

    def evaluate(self, x, side: str | None = None) -> Fraction:
        """Exact value at ``x``.

        At a breakpoint where the left and right limits differ, ``side``
        (``"left"`` or ``"right"``) must be given; otherwise
        :class:`OneSidedError` is raised.
        """
        left, right = self.limits(x)
        if side == "left":
            return left
        if side == "right":
            return right
        if side is not None:
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        if left != right:
            raise OneSidedError(
                f"discontinuity at {x}: left limit {left}, right limit {right}"
            )
        return left

    __call__ = evaluate

    def integral(self) -> Fraction:
        total = Fraction(0)
        for a, b, p in zip(self.breakpoints, self.breakpoints[1:], self.pieces):
            P = _pantideriv(p)
            total += _peval(P, b) - _peval(P, a)
        return total

    def moment(self, k: int) -> Fraction:
        """Exact ``integral of x**k * p(x) dx``."""
        xk = tuple([Fraction(0)] * k + [Fraction(1)])
        return PiecewisePolynomial(
            self.breakpoints, [_pmul(p, xk) for p in self.pieces]
        ).integral()

    def normalized(self) -> "PiecewisePolynomial":
        """Canonical form: equal neighbours merged, zero end pieces dropped."""
        bps = list(self.breakpoints)
        pcs = list(self.pieces)
        while pcs and not pcs[0]:
            pcs.pop(0)
            bps.pop(0)
        while pcs and not pcs[-1]:
            pcs.pop()
            bps.pop()
        if not pcs:
            return PiecewisePolynomial.zero()
        out_b = [bps[0]]
        out_p = [pcs[0]]
        for t, p in zip(bps[1:-1], pcs[1:]):
            if p == out_p[-1]:
                continue
            out_b.append(t)
            out_p.append(p)
        out_b.append(bps[-1])
        return PiecewisePolynomial(out_b, out_p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewisePolynomial):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.breakpoints == b.breakpoints and a.pieces == b.pieces

    def __hash__(self):
        n = self.normalized()
        return hash((n.breakpoints, n.pieces))

    def __add__(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        grid = sorted(set(self.breakpoints) | set(other.breakpoints))
        pieces = []
        for a, b in zip(grid, grid[1:]):
            mid = (a + b) / 2
            pieces.append(_padd(self.piece_at(mid), other.piece_at(mid)))
        return PiecewisePolynomial(grid, pieces)

    def scale(self, c) -> "PiecewisePolynomial":
        c = parse_rational(c)
        return PiecewisePolynomial(self.breakpoints, [_pscale(p, c) for p in self.pieces])

    def smoothness_order(self, max_order: int = 32) -> int:
        """Largest ``k`` with derivatives of order ``0..k`` continuous on R.

        The support endpoints count as breakpoints, where the function must
        join zero.  Returns ``-1`` when the function itself jumps.
        """
        cur = self
        for k in range(max_order + 1):
            for t in cur.breakpoints:
                left, right = cur.limits(t)
                if left != right:
                    return k - 1
            if cur.is_zero():
                return max_order
            cur = derivative(cur, 1)
        return max_order

    def to_json(self) -> dict:
        return {
            "breakpoints": [rational_str(t) for t in self.breakpoints],
            "pieces": [[rational_str(c) for c in p] for p in self.pieces],
        }

    @classmethod
    def from_json(cls, d: dict) -> "PiecewisePolynomial":
        return cls(d["breakpoints"], d["pieces"])


def uniform_indicator() -> PiecewisePolynomial:
    """The indicator function of ``[0, 1]``."""
    return PiecewisePolynomial([0, 1], [[1]])


def _convolve_pieces(a0, a1, P: Poly, c0, c1, R: Poly):
    """Convolution of ``P * 1[a0,a1]`` with ``R * 1[c0,c1]``.

    Returns ``(lo, hi, poly)`` triples.  On each region the integration
    limits ``max(a0, x - c1)`` and ``min(a1, x - c0)`` are affine in ``x``,
    so integrating ``P(t) R(x - t)`` in ``t`` gives a polynomial in ``x``.
    """
    # Q[i][j]: coefficient of x^i t^j in P(t) R(x - t)
    deg = len(P) + len(R)
    Q = [[Fraction(0)] * (deg + 1) for _ in range(deg + 1)]
    for k, r in enumerate(R):
        if not r:
            continue
        for j in range(k + 1):
            coef = r * math.comb(k, j) * (-1) ** j
            for s, p in enumerate(P):
                if p:
                    Q[k - j][j + s] += coef * p
    # antiderivative in t, as a polynomial in t whose coefficients are polys in x
    anti = []
    for j in range(deg + 1):
        col = _trim(Q[i][j] / (j + 1) for i in range(deg + 1))
        anti.append(col)  # multiplies t^(j+1)

    def at(limit: Poly) -> Poly:
        acc: Poly = ()
        for j, col in enumerate(anti):
            if col:
                acc = _padd(acc, _pmul(col, _ppow(limit, j + 1)))
        return acc

    cuts = sorted({a0 + c0, a0 + c1, a1 + c0, a1 + c1})
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        lower = (a0,) if a0 >= mid - c1 else (-c1, Fraction(1))
        upper = (a1,) if a1 <= mid - c0 else (-c0, Fraction(1))
        poly = _padd(at(_trim(upper)), _pscale(at(_trim(lower)), -1))
        out.append((lo, hi, poly))
    return out


def convolve(p: PiecewisePolynomial, r: PiecewisePolynomial) -> PiecewisePolynomial:
    """Exact convolution ``(p * r)(x) = integral of p(t) r(x - t) dt``."""
    parts = []
    for a0, a1, P in zip(p.breakpoints, p.breakpoints[1:], p.pieces):
        if not P:
            continue
        for c0, c1, R in zip(r.breakpoints, r.breakpoints[1:], r.pieces):
            if R:
                parts.extend(_convolve_pieces(a0, a1, P, c0, c1, R))
    if not parts:
        return PiecewisePolynomial.zero()
    grid = sorted({lo for lo, _, _ in parts} | {hi for _, hi, _ in parts})
    pieces = []
    for a, b in zip(grid, grid[1:]):
        acc: Poly = ()
        for lo, hi, poly in parts:
            if lo <= a and b <= hi:
                acc = _padd(acc, poly)
        pieces.append(acc)
    return PiecewisePolynomial(grid, pieces).normalized()


def derivative(p: PiecewisePolynomial, m: int = 1) -> PiecewisePolynomial:
    """Differentiate every piece ``m`` times; the breakpoint grid is kept."""
    if m < 0:
        raise ValueError("derivative order must be nonnegative")
    pieces = p.pieces
    for _ in range(m):
        pieces = tuple(_pderiv(q) for q in pieces)
    return PiecewisePolynomial(p.breakpoints, pieces)


@lru_cache(maxsize=None)
def irwin_hall(b: int) -> PiecewisePolynomial:
    """Density of the sum of ``b`` independent uniforms on ``[0, 1]``."""
    if b < 1:
        raise ValueError("irwin_hall needs b >= 1")
    chi = uniform_indicator()
    out = chi
    for _ in range(b - 1):
        out = convolve(out, chi)
    return out


@lru_cache(maxsize=None)
def irwin_hall_derivatives(b: int, m: int) -> PiecewisePolynomial:
    return derivative(irwin_hall(b), m)


def closed_form_irwin_hall(b: int, x: RationalLike) -> Fraction:
    """Alternating-sum formula for the Irwin-Hall density at ``x``.

    ``1/(b-1)! * sum_{k <= floor(x)} (-1)^k C(b, k) (x - k)^(b-1)``; zero
    outside ``[0, b]``.
    """
    if b < 1:
        raise ValueError("b must be positive")
    x = parse_rational(x)
    if x < 0 or x > b:
        return Fraction(0)
    total = Fraction(0)
    for k in range(0, min(math.floor(x), b) + 1):
        total += (-1) ** k * math.comb(b, k) * (x - k) ** (b - 1)
    return total / math.factorial(b - 1)


def neg_log_second_derivative(p: PiecewisePolynomial, x) -> Fraction:
    """``(-log p)''(x) = (p'^2 - p p'') / p^2``, exactly, off breakpoints."""
    x = parse_rational(x)
    if x in p.breakpoints:
        raise OneSidedError(f"{x} is a breakpoint")
    f = p.piece_at(x)
    v = _peval(f, x)
    if v == 0:
        raise ZeroDivisionError(f"density vanishes at {x}")
    d1 = _pderiv(f)
    v1 = _peval(d1, x)
    v2 = _peval(_pderiv(d1), x)
    return (v1 * v1 - v * v2) / (v * v)


@dataclass(frozen=True)
class MarginReport:
    interval: tuple[Fraction, Fraction]
    grid_step: Fraction
    min_value: Fraction
    argmin: Fraction
    points: int
    shifted: tuple[Fraction, ...] = ()

    def to_json(self) -> dict:
        return {
            "interval": [rational_str(self.interval[0]), rational_str(self.interval[1])],
            "grid_step": rational_str(self.grid_step),
            "min_value": rational_str(self.min_value),
            "min_value_float": float(self.min_value),
            "argmin": rational_str(self.argmin),
            "points": self.points,
            "shifted": [rational_str(t) for t in self.shifted],
        }


def _grid(u: Fraction, v: Fraction, step: Fraction, avoid: Sequence[Fraction]):
    avoid = set(avoid)
    points, shifted = [], []
    k = 0
    while u + k * step <= v:
        x = u + k * step
        if x in avoid:
            x += step / 2
            shifted.append(x)
        points.append(x)
        k += 1
    return points, shifted


def log_concavity_margin(
    b: int,
    u: RationalLike = Fraction(1, 2),
    v: RationalLike | None = None,
    step: RationalLike = Fraction(1, 64),
    diagnostic: bool = False,
) -> MarginReport:
    """Minimum of ``(-log I_b)''`` over a rational grid of ``[u, v]``.

    Grid points landing on a breakpoint move right by ``step / 2``.  Orders
    ``b < 4`` have a discontinuous second derivative and are accepted only
    with ``diagnostic=True``.
    """
    u = parse_rational(u)
    v = parse_rational(v) if v is not None else Fraction(b) - Fraction(1, 2)
    step = parse_rational(step)
    if b < 4 and not diagnostic:
        raise ValueError("b >= 4 required for a continuous second derivative")
    if v <= u:
        raise ValueError(f"empty interval [{u}, {v}]")
    if step <= 0:
        raise ValueError("step must be positive")
    density = irwin_hall(b)
    points, shifted = _grid(u, v, step, density.breakpoints)
    best = None
    for x in points:
        val = neg_log_second_derivative(density, x)
        if best is None or val < best[0]:
            best = (val, x)
    return MarginReport((u, v), step, best[0], best[1], len(points), tuple(shifted))


@dataclass(frozen=True)
class GaussianDensity:
    """Normal density, convolved analytically rather than by quadrature."""

    variance: Fraction = Fraction(1)
    mean: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "variance", parse_rational(self.variance))
        object.__setattr__(self, "mean", parse_rational(self.mean))
        if self.variance <= 0:
            raise ValueError("variance must be positive")

    def neg_log_second_derivative(self, x) -> Fraction:
        return 1 / self.variance

    def convolve(self, other: "GaussianDensity") -> "GaussianDensity":
        return GaussianDensity(self.variance + other.variance, self.mean + other.mean)


Density = Union[PiecewisePolynomial, GaussianDensity]


@dataclass(frozen=True)
class LemmaReport:
    holds: bool
    min_slack: Fraction
    argmin: Fraction
    bound: Fraction
    points: int

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "min_slack": rational_str(self.min_slack),
            "min_slack_float": float(self.min_slack),
            "argmin": rational_str(self.argmin),
            "bound": rational_str(self.bound),
            "points": self.points,
        }


def _check_hypothesis(f: Density, A: Fraction, step: Fraction, name: str):
    if isinstance(f, GaussianDensity):
        if f.neg_log_second_derivative(f.mean) < 1 / A:
            raise HypothesisError(
                f"{name}: (-log {name})'' = {1 / f.variance} < 1/A = {1 / A}"
            )
        return
    if f.smoothness_order(2) < 2:
        raise HypothesisError(f"{name} is not twice continuously differentiable")
    support = f.support
    if support is None:
        raise HypothesisError(f"{name} is identically zero")
    lo, hi = support
    points, _ = _grid(lo + step / 2, hi - step / 2, step, f.breakpoints)
    for x in points:
        if f.evaluate(x) <= 0:
            raise HypothesisError(f"{name} is not positive at {x}", x, f.evaluate(x))
        val = neg_log_second_derivative(f, x)
        if val < 1 / A:
            raise HypothesisError(
                f"{name}: (-log {name})''({x}) = {val} < 1/A = {1 / A}", x, val
            )


def lemma1_check(
    f: Density,
    g: Density,
    A: RationalLike,
    B: RationalLike,
    grid: Sequence[RationalLike],
    hypothesis_step: RationalLike = Fraction(1, 64),
    tolerance: RationalLike = 0,
) -> LemmaReport:
    """Check ``(-log(f*g))'' >= 1/(A+B)`` on ``grid``.

    Hypotheses ``(-log f)'' >= 1/A`` and ``(-log g)'' >= 1/B`` are verified
    first (on a grid of the support for piecewise inputs); failure raises
    :class:`HypothesisError`.  The slack reported is the smallest
    ``(-log(f*g))'' - 1/(A+B)`` over the grid.
    """
    A, B = parse_rational(A), parse_rational(B)
    if A <= 0 or B <= 0:
        raise ValueError("A and B must be positive")
    step = parse_rational(hypothesis_step)
    _check_hypothesis(f, A, step, "f")
    _check_hypothesis(g, B, step, "g")
    bound = 1 / (A + B)

    if isinstance(f, GaussianDensity) and isinstance(g, GaussianDensity):
        h = f.convolve(g)
        second = h.neg_log_second_derivative
    elif isinstance(f, PiecewisePolynomial) and isinstance(g, PiecewisePolynomial):
        h = convolve(f, g)

        def second(x):
            return neg_log_second_derivative(h, x)

    else:
        raise TypeError("f and g must both be Gaussian or both piecewise polynomial")

    xs = [parse_rational(x) for x in grid]
    if not xs:
        raise ValueError("empty evaluation grid")
    slacks = [(second(x) - bound, x) for x in xs]
    worst, where = min(slacks)
    return LemmaReport(worst >= -parse_rational(tolerance), worst, where, bound, len(xs))


def block_decomposition_check(b: int) -> bool:
    """Compare ``I_b`` with ``I_4^{*(b//4 - 1)} * I_{4 + b % 4}`` exactly."""
    if b < 4:
        raise ValueError("block decomposition needs b >= 4")
    if b < 8:
        return True
    blocks = b // 4 - 1
    lhs = irwin_hall(4 + b % 4)
    for _ in range(blocks):
        lhs = convolve(lhs, irwin_hall(4))
    rhs = uniform_indicator()
    for _ in range(b - 1):
        rhs = convolve(rhs, uniform_indicator())
    return lhs == rhs


def irwin_hall_lemma_case(
    b1: int, b2: int, step: RationalLike = Fraction(1, 64)
) -> LemmaReport:
    """Run :func:`lemma1_check` on ``I_b1`` and ``I_b2``.

    ``A`` and ``B`` are the reciprocals of the grid margins of each factor,
    measured on the same grid the hypothesis check uses, and the conclusion
    is checked on ``[1/2, b1 + b2 - 1/2]``.
    """
    step = parse_rational(step)
    consts = []
    for b in (b1, b2):
        report = log_concavity_margin(b, step / 2, b - step / 2, step)
        consts.append(1 / report.min_value)
    total = b1 + b2
    grid, _ = _grid(Fraction(1, 2), Fraction(total) - Fraction(1, 2), step,
                    [Fraction(k) for k in range(total + 1)])
    return lemma1_check(irwin_hall(b1), irwin_hall(b2), consts[0], consts[1], grid,
                        hypothesis_step=step)
