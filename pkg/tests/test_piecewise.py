import json
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from staircase.piecewise import (
    GaussianDensity,
    HypothesisError,
    OneSidedError,
    PiecewisePolynomial,
    block_decomposition_check,
    closed_form_irwin_hall,
    convolve,
    derivative,
    irwin_hall,
    irwin_hall_lemma_case,
    lemma1_check,
    log_concavity_margin,
    neg_log_second_derivative,
    uniform_indicator,
)

from oracles import irwin_hall_cdf_oracle


def pointwise_convolution(p, r, x):
    """``int p(t) r(x - t) dt`` by exact integration between all kinks in t."""
    cuts = sorted(set(p.breakpoints) | {x - c for c in r.breakpoints})
    total = F(0)
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        P = p.piece_at(mid)
        R = r.piece_at(x - mid)
        if not P or not R:
            continue
        # expand P(t) R(x - t) in powers of t
        poly = [F(0)] * (len(P) + len(R))
        for k, rc in enumerate(R):
            for j in range(k + 1):
                coef = rc * math.comb(k, j) * x ** (k - j) * (-1) ** j
                for s, pc in enumerate(P):
                    poly[j + s] += coef * pc
        total += sum(c * (b ** (i + 1) - a ** (i + 1)) / (i + 1) for i, c in enumerate(poly))
    return total


def closed_form_derivative(b, m, x):
    """I_b^(m) via the finite-difference identity on lower orders."""
    return sum(
        (-1) ** k * math.comb(m, k) * closed_form_irwin_hall(b - m, x - k)
        for k in range(m + 1)
    )


SAMPLES = [
    uniform_indicator(),
    PiecewisePolynomial([0, 2], [[0, 1]]),
    PiecewisePolynomial([F(1, 2), F(3, 2), 3], [[1, 0, 1], [F(-1, 3), 2]]),
    PiecewisePolynomial([-1, 0, 1], [[1, 1], [1, -1]]),
]


def test_uniform_indicator():
    chi = uniform_indicator()
    assert chi(F(1, 2)) == 1
    assert chi(F(3, 2)) == 0
    assert chi.integral() == 1
    with pytest.raises(OneSidedError):
        chi(1)
    assert chi.evaluate(1, side="left") == 1
    assert chi.evaluate(1, side="right") == 0


def test_convolution_examples():
    chi = uniform_indicator()
    tri = convolve(chi, chi)
    assert tri(1) == 1
    assert tri(0) == 0
    assert convolve(tri, chi)(F(3, 2)) == F(3, 4)
    assert closed_form_irwin_hall(3, F(3, 2)) == F(3, 4)


@pytest.mark.parametrize("i", range(len(SAMPLES)))
@pytest.mark.parametrize("j", range(len(SAMPLES)))
def test_convolution_matches_pointwise_integral(i, j):
    p, r = SAMPLES[i], SAMPLES[j]
    h = convolve(p, r)
    rng = random.Random(100 * i + j)
    lo = p.breakpoints[0] + r.breakpoints[0]
    hi = p.breakpoints[-1] + r.breakpoints[-1]
    for _ in range(15):
        x = lo + (hi - lo) * F(rng.randrange(1, 997), 997)
        assert h.evaluate(x, side="right") == pointwise_convolution(p, r, x)
    assert h.integral() == p.integral() * r.integral()


def test_convolution_support_and_breakpoints():
    p, r = SAMPLES[1], SAMPLES[2]
    h = convolve(p, r)
    sums = {a + c for a in p.breakpoints for c in r.breakpoints}
    assert set(h.breakpoints) <= sums
    assert h.support == (F(1, 2), F(5))


@pytest.mark.parametrize("a,b,c", [(0, 1, 2), (1, 2, 3), (0, 2, 3), (3, 3, 1)])
def test_convolution_commutative_associative(a, b, c):
    p, q, r = SAMPLES[a], SAMPLES[b], SAMPLES[c]
    assert convolve(p, q) == convolve(q, p)
    assert convolve(convolve(p, q), r) == convolve(p, convolve(q, r))


def test_irwin_hall_examples():
    assert irwin_hall(1) == uniform_indicator()
    assert irwin_hall(2)(1) == 1
    assert irwin_hall(5).integral() == 1
    assert closed_form_irwin_hall(2, F(1, 2)) == F(1, 2)
    assert closed_form_irwin_hall(4, 0) == 0
    assert closed_form_irwin_hall(4, 5) == 0
    with pytest.raises(ValueError):
        irwin_hall(0)


@pytest.mark.parametrize("b", range(1, 13))
def test_irwin_hall_structure(b):
    I = irwin_hall(b)
    assert I.breakpoints == tuple(F(k) for k in range(b + 1))
    assert I.integral() == 1
    assert I.moment(1) == F(b, 2)
    assert I.moment(2) - F(b, 2) ** 2 == F(b, 12)
    if b >= 2:
        assert I.smoothness_order() == b - 2
    rng = random.Random(b)
    for _ in range(20):
        x = F(rng.randrange(1, 1000 * b), 1000)
        assert I.evaluate(x, side="right") == I.evaluate(b - x, side="left")


def test_irwin_hall_cdf_oracle_derivative():
    # the difference quotient of the exact CDF converges to the density
    h = F(1, 10**12)
    for b in (3, 6):
        x = F(7, 5)
        approx = (irwin_hall_cdf_oracle(b, x + h) - irwin_hall_cdf_oracle(b, x - h)) / (2 * h)
        assert abs(approx - irwin_hall(b)(x)) < F(1, 10**9)


@pytest.mark.parametrize("b", range(3, 9))
def test_derivatives_against_closed_form(b):
    rng = random.Random(7 * b)
    for m in (1, 2):
        if b - m < 1:
            continue
        d = derivative(irwin_hall(b), m)
        for _ in range(20):
            x = F(rng.randrange(1, 1000 * b), 1000)
            if x.denominator == 1:
                continue
            assert d(x) == closed_form_derivative(b, m, x)


def test_derivative_examples():
    d = derivative(irwin_hall(2), 1)
    assert d.piece_at(F(1, 2)) == (F(1),)
    assert derivative(uniform_indicator(), 1).piece_at(F(1, 2)) == ()
    assert derivative(irwin_hall(3), 1)(F(3, 2)) == 0
    with pytest.raises(OneSidedError):
        derivative(irwin_hall(2), 1)(1)


def test_margin_low_order_diagnostic():
    assert neg_log_second_derivative(irwin_hall(2), F(1, 2)) == 4
    with pytest.raises(ValueError):
        log_concavity_margin(2, F(1, 4), F(3, 4), F(1, 4))
    rep = log_concavity_margin(2, F(1, 4), F(3, 4), F(1, 4), diagnostic=True)
    assert rep.min_value == F(16, 9) and rep.argmin == F(3, 4)


def test_margin_errors():
    with pytest.raises(ValueError):
        log_concavity_margin(5, 2, 2, F(1, 64))
    with pytest.raises(ValueError):
        log_concavity_margin(5, 3, 2, F(1, 64))


def test_margin_baselines():
    rep4 = log_concavity_margin(4, F(1, 2), F(7, 2), F(1, 64))
    assert rep4.min_value > 0
    assert rep4.min_value == F(2249882185728, 906949570921)
    assert rep4.argmin == F(111, 64)
    assert rep4.shifted == (F(129, 128), F(257, 128), F(385, 128))
    rep5 = log_concavity_margin(5, F(1, 2), F(9, 2), F(1, 64))
    assert rep5.min_value == F(48, 23) and rep5.argmin == F(5, 2)
    assert rep5.points == 257


def test_margin_matches_closed_form_oracle():
    for b in (4, 7):
        rep = log_concavity_margin(b, F(1, 2), b - F(1, 2), F(1, 16))
        x = rep.argmin
        i0 = closed_form_irwin_hall(b, x)
        i1 = closed_form_derivative(b, 1, x)
        i2 = closed_form_derivative(b, 2, x)
        assert rep.min_value == (i1 * i1 - i0 * i2) / (i0 * i0)


def test_lemma_gaussian_equality_case():
    rep = lemma1_check(GaussianDensity(1), GaussianDensity(1), 1, 1, [F(k, 3) for k in range(-9, 10)])
    assert rep.holds and rep.min_slack == 0 and rep.bound == F(1, 2)


def test_lemma_gaussian_strict():
    rep = lemma1_check(GaussianDensity(F(1, 2)), GaussianDensity(1), 1, 2, [0])
    # (-log)'' of the variance-3/2 convolution is 2/3 >= 1/3
    assert rep.min_slack == F(1, 3)


def test_lemma_hypothesis_failures():
    with pytest.raises(HypothesisError):
        lemma1_check(uniform_indicator(), uniform_indicator(), 1, 1, [1])
    with pytest.raises(HypothesisError):
        lemma1_check(GaussianDensity(2), GaussianDensity(1), 1, 1, [0])
    with pytest.raises(TypeError):
        lemma1_check(GaussianDensity(1), irwin_hall(4), 1, 10, [1])


def test_lemma_irwin_hall_block():
    rep = irwin_hall_lemma_case(4, 4)
    assert rep.holds and rep.min_slack >= 0
    rep = irwin_hall_lemma_case(4, 5, F(1, 32))
    assert rep.holds and rep.min_slack >= 0


@pytest.mark.parametrize("b", [4, 5, 8, 9, 10, 11])
def test_block_decomposition(b):
    assert block_decomposition_check(b)


def test_block_decomposition_rejects_small():
    with pytest.raises(ValueError):
        block_decomposition_check(3)


def test_normalization_and_equality():
    p = PiecewisePolynomial([0, 1, 2, 3], [[], [1], [1]])
    q = PiecewisePolynomial([1, 3], [[1]])
    assert p == q
    assert p.normalized().breakpoints == (1, 3)
    assert PiecewisePolynomial([0, 1], [[]]) == PiecewisePolynomial.zero()
    with pytest.raises(ValueError):
        PiecewisePolynomial([0, 0], [[1]])
    with pytest.raises(ValueError):
        PiecewisePolynomial([0, 1, 2], [[1]])


def test_json_round_trip():
    for b in (1, 3, 6):
        I = irwin_hall(b)
        blob = json.dumps(I.to_json())
        assert PiecewisePolynomial.from_json(json.loads(blob)) == I
    assert irwin_hall(2).to_json()["breakpoints"] == ["0/1", "1/1", "2/1"]


@given(st.integers(2, 9), st.fractions(min_value=0, max_value=1))
def test_irwin_hall_nonnegative_and_symmetric(b, t):
    x = t * b
    I = irwin_hall(b)
    v = I.evaluate(x, side="left")
    assert v >= 0
    assert v == I.evaluate(b - x, side="right")
