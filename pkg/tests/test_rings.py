from fractions import Fraction

import pytest

from nhq.rings import HBarPolynomial


def test_trailing_zeros_dropped():
    assert HBarPolynomial((1, 0, 0)) == HBarPolynomial((1,))
    assert not HBarPolynomial((0, 0))
    assert HBarPolynomial(()).coeffs == ()


def test_arithmetic():
    h = HBarPolynomial.h()
    p = 2 + 3 * h
    assert p.coeffs == (2, 3)
    assert (p * p).coeffs == (4, 12, 9)
    assert (p - p).coeffs == ()
    assert (-p).coeffs == (-2, -3)
    assert p * Fraction(1, 2) == HBarPolynomial((1, Fraction(3, 2)))


def test_h_division():
    h = HBarPolynomial.h()
    assert (h * 5).div_h() == HBarPolynomial.constant(5)
    assert HBarPolynomial.zero().is_divisible_by_h()
    with pytest.raises(ArithmeticError):
        HBarPolynomial.one().div_h()


def test_shift_and_terms():
    p = HBarPolynomial((1, 2))
    assert p.shift(2).coeffs == (0, 0, 1, 2)
    assert p.constant_term() == 1
    assert p.coefficient(1) == 2
    assert p.coefficient(9) == 0


def test_str_forms():
    h = HBarPolynomial.h()
    assert str(HBarPolynomial.zero()) == "0"
    assert str(HBarPolynomial.one()) == "1"
    assert str(h) == "h"
    assert str(2 * h) == "2*h"
    assert str(h * h) == "h^2"
    assert str(1 - h) == "1 - h"
    assert str(HBarPolynomial.constant(Fraction(-3, 2))) == "-3/2"


def test_exactness_rejects_floats():
    with pytest.raises(TypeError):
        HBarPolynomial((0.5,))
