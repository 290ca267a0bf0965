"""Exact counting of distinct-part partitions inside truncated staircases.

The truncated staircase ``(n, n-1, ..., n-b+1)`` admits exactly the
partitions into at most ``b`` distinct parts, each at most ``n``.  Writing
``c(l)`` for the number of such partitions of ``l``, this module builds the
rank-generating polynomial ``sum_l c(l) q^l`` in exact integer arithmetic by
two independent routes and provides checkers for unimodality and
log-concavity of the coefficient sequence.

All integers are Python ints, so coefficients never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

__all__ = [
    "BULK_TAU",
    "IntegerPolynomial",
    "LogConcavityReport",
    "StaircaseShape",
    "UnimodalityReport",
    "bulk_window",
    "check_log_concave",
    "check_unimodal",
    "degree_bound",
    "enumerate_strict_count",
    "gaussian_binomial",
    "staircase_gf_dp",
    "staircase_gf_family",
    "staircase_gf_identity",
    "tail_monotonicity",
]

#: Default distance (in units of n) of the bulk window from either end.
BULK_TAU = Fraction(1728, 1729)


@dataclass(frozen=True)
class StaircaseShape:
    """The truncated staircase with largest row ``n`` and ``b`` rows."""

    n: int
    b: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.b, int):
            raise TypeError("n and b must be integers")
        if self.n < 1 or self.b < 1:
            raise ValueError(f"need n >= 1 and b >= 1, got n={self.n}, b={self.b}")

    @property
    def effective_b(self) -> int:
        # at most n distinct parts fit below n
        return min(self.b, self.n)

    @property
    def clamped(self) -> bool:
        return self.b > self.n

    def clamp(self) -> "StaircaseShape":
        return StaircaseShape(self.n, self.effective_b)

    @property
    def degree(self) -> int:
        b = self.effective_b
        return b * self.n - b * (b - 1) // 2


@dataclass(frozen=True)
class IntegerPolynomial:
    """Dense polynomial in ``q`` with integer coefficients.

    ``coeffs[i]`` is the coefficient of ``q**i``.  Trailing zeros are stripped
    on construction, so the zero polynomial is ``coeffs == (0,)``.
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int]):
        cs = [int(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0]
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntegerPolynomial":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return -1 if self.is_zero() else len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0,)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[int]:
        return iter(self.coeffs)

    def __getitem__(self, k: int) -> int:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __add__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntegerPolynomial(out)

    def __sub__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        return self + IntegerPolynomial([-c for c in other.coeffs])

    def __mul__(self, other: "IntegerPolynomial") -> "IntegerPolynomial":
        if self.is_zero() or other.is_zero():
            return IntegerPolynomial([0])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntegerPolynomial(out)

    def shift(self, k: int) -> "IntegerPolynomial":
        """Multiply by ``q**k``."""
        if self.is_zero():
            return self
        return IntegerPolynomial([0] * k + list(self.coeffs))

    def __call__(self, q):
        acc = 0 * q
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    def total(self) -> int:
        """Value at ``q = 1``."""
        return sum(self.coeffs)

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "IntegerPolynomial":
        return cls([int(s) for s in items])


@dataclass(frozen=True)
class UnimodalityReport:
    is_unimodal: bool
    peak_index: int | None
    violations: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "is_unimodal": self.is_unimodal,
            "peak_index": self.peak_index,
            "violations": list(self.violations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UnimodalityReport":
        return cls(d["is_unimodal"], d["peak_index"], tuple(d["violations"]))


@dataclass(frozen=True)
class LogConcavityReport:
    holds: bool
    checked_range: tuple[int, int]
    violations: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "checked_range": list(self.checked_range),
            "violations": list(self.violations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogConcavityReport":
        return cls(d["holds"], tuple(d["checked_range"]), tuple(d["violations"]))


def _as_shape(shape) -> StaircaseShape:
    if isinstance(shape, StaircaseShape):
        return shape
    n, b = shape
    return StaircaseShape(n, b)


def degree_bound(shape) -> int:
    """Largest ``l`` with a nonzero count: ``b*n - b*(b-1)/2``.

    For ``b > n`` the shape is clamped to ``b = n`` first.
    """
    return _as_shape(shape).degree


def enumerate_strict_count(shape, ell: int) -> int:
    """Count partitions of ``ell`` into at most ``b`` distinct parts ``<= n``.

    Plain recursion on the largest part; no generating functions involved, so
    this serves as an oracle for the polynomial constructions below.
    """
    shape = _as_shape(shape)
    if ell < 0:
        return 0

    @lru_cache(maxsize=None)
    def count(rest: int, max_part: int, parts_left: int) -> int:
        if rest == 0:
            return 1
        if parts_left == 0 or max_part == 0:
            return 0
        return sum(
            count(rest - largest, largest - 1, parts_left - 1)
            for largest in range(1, min(max_part, rest) + 1)
        )

    return count(ell, shape.n, shape.b)


def gaussian_binomial(n: int, b: int) -> IntegerPolynomial:
    """The q-binomial coefficient ``[n choose b]_q`` as an integer polynomial.

    Built from the q-Pascal rule ``[m, k] = [m-1, k-1] + q^k [m-1, k]``, so
    only integer additions are used.  Its ``q^l`` coefficient counts
    partitions of ``l`` inside a ``b x (n-b)`` box.
    """
    if n < 0 or b < 0:
        raise ValueError("n and b must be nonnegative")
    if b > n:
        raise ValueError(f"gaussian_binomial needs b <= n, got n={n}, b={b}")
    # row[k] holds [m, k] for the current m; only k <= b is needed
    row: list[list[int]] = [[1]] + [[0] for _ in range(b)]
    for m in range(1, n + 1):
        for k in range(min(m, b), 0, -1):
            left = row[k - 1]
            right = row[k]
            size = max(len(left), len(right) + k)
            new = left + [0] * (size - len(left))
            for i, c in enumerate(right):
                new[i + k] += c
            row[k] = new
    return IntegerPolynomial(row[b])


def staircase_gf_family(b: int, n_max: int) -> Iterator[IntegerPolynomial]:
    """Yield the generating polynomials for ``n = 1, ..., n_max`` at fixed ``b``.

    Dynamic programming over part sizes: ``layer[k]`` is the polynomial of
    ``k``-element subsets of ``{1..n}`` weighted by their sum.  Allowing part
    ``n`` adds ``q^n`` times layer ``k-1`` to layer ``k``.
    """
    if b < 1:
        raise ValueError("b must be positive")
    layers: list[list[int]] = [[1]] + [[] for _ in range(b)]
    for n in range(1, n_max + 1):
        for k in range(min(n, b), 0, -1):
            prev = layers[k - 1]
            cur = layers[k]
            size = max(len(cur), len(prev) + n)
            cur.extend([0] * (size - len(cur)))
            for i, c in enumerate(prev):
                if c:
                    cur[i + n] += c
        total = [0] * max(len(layer) for layer in layers)
        for layer in layers:
            for i, c in enumerate(layer):
                total[i] += c
        yield IntegerPolynomial(total)


def staircase_gf_dp(shape) -> IntegerPolynomial:
    """Rank-generating polynomial of the staircase by subset-sum DP."""
    shape = _as_shape(shape)
    poly = None
    for poly in staircase_gf_family(shape.b, shape.n):
        pass
    return poly


def staircase_gf_identity(shape) -> IntegerPolynomial:
    """Rank-generating polynomial as ``sum_a q^{a(a+1)/2} [n choose a]_q``.

    Partitions with exactly ``a`` distinct parts biject with partitions of
    ``l - a(a+1)/2`` in an ``a x (n-a)`` box.  Raises ``ValueError`` when
    ``b > n``; clamp with :meth:`StaircaseShape.clamp` first.
    """
    shape = _as_shape(shape)
    if shape.clamped:
        raise ValueError(
            f"b={shape.b} exceeds n={shape.n}; clamp the shape to b=n first"
        )
    acc = IntegerPolynomial([0])
    for a in range(shape.b + 1):
        acc = acc + gaussian_binomial(shape.n, a).shift(a * (a + 1) // 2)
    return acc


def _coeff_list(p) -> list[int]:
    if isinstance(p, IntegerPolynomial):
        return list(p.coeffs)
    return [int(c) for c in p]


def check_unimodal(p) -> UnimodalityReport:
    """Test whether the coefficients rise weakly to a peak, then fall weakly.

    A violation is recorded at each index where the sequence starts rising
    again after having strictly fallen: the bottom of every valley.
    """
    cs = _coeff_list(p)
    if not any(cs):
        raise ValueError("check_unimodal needs a nonzero polynomial")
    violations = []
    fallen = False
    last_move = 0
    for i in range(len(cs) - 1):
        d = cs[i + 1] - cs[i]
        if d < 0:
            fallen = True
            last_move = -1
        elif d > 0:
            if fallen and last_move < 0:
                violations.append(i)
            last_move = 1
    if violations:
        return UnimodalityReport(False, None, tuple(violations))
    top = max(cs)
    return UnimodalityReport(True, cs.index(top), ())


def check_log_concave(p, lo: int, hi: int) -> LogConcavityReport:
    """Check ``c(l)^2 >= c(l-1) c(l+1)`` for every ``l`` in ``[lo, hi]``."""
    cs = _coeff_list(p)
    deg = len(cs) - 1
    if not (1 <= lo <= hi <= deg - 1):
        raise ValueError(f"need 1 <= lo <= hi <= {deg - 1}, got [{lo}, {hi}]")
    bad = tuple(
        ell for ell in range(lo, hi + 1) if cs[ell] ** 2 < cs[ell - 1] * cs[ell + 1]
    )
    return LogConcavityReport(not bad, (lo, hi), bad)


def bulk_window(shape, tau: Fraction = BULK_TAU) -> tuple[int, int]:
    """Index range ``[ceil(tau*n), floor((b - tau)*n)]`` away from both tails."""
    shape = _as_shape(shape)
    tau = Fraction(tau)
    n, b = shape.n, shape.effective_b
    return math.ceil(tau * n), math.floor((b - tau) * n)


def tail_monotonicity(shape, poly: IntegerPolynomial | None = None) -> tuple[bool, bool]:
    """Check both tail chains of the coefficient sequence.

    Returns ``(ascending_ok, descending_ok)`` where ascending means
    ``c(0) <= ... <= c(n)`` and descending means
    ``c((b-1)n) >= ... >= c(D)`` with ``D`` the degree.  Both hold for every
    shape, so ``False`` points at a bug upstream.
    """
    shape = _as_shape(shape)
    if poly is None:
        poly = staircase_gf_dp(shape)
    n, b = shape.n, shape.effective_b
    top = degree_bound(shape)
    cs = [poly[i] for i in range(top + 1)]
    ascending = all(cs[i] <= cs[i + 1] for i in range(min(n, top)))
    start = (b - 1) * n
    descending = all(cs[i] >= cs[i + 1] for i in range(start, top))
    return ascending, descending
