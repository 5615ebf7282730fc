"""Trigonometric field ring: arithmetic, calculus, series ops, cap policy."""

import math
from fractions import Fraction

import pytest

from ggk.rational import CRat
from ggk.trig import CapOverflow, TrigRing


def exact_ring(nvars=2, cap=8):
    return TrigRing(nvars, exact=True, cap=cap)


def float_ring(nvars=2, cap=12):
    return TrigRing(nvars, exact=False, cap=cap)


def test_product_frozen():
    R = exact_ring()
    # cos(x1)*cos(x1) = 1/2 + cos(2 x1)/2
    c = R.cos((1, 0))
    got = c * c
    expect = R.lift(Fraction(1, 2)) + R.cos((2, 0), Fraction(1, 2))
    assert not (got - expect)


def test_sin_cos_identity():
    R = exact_ring()
    s, c = R.sin((1, 1)), R.cos((1, 1))
    assert not (s * s + c * c + R.cos((2, 2)) - R.one() - R.cos((2, 2)))
    assert not (s * s + c * c - R.one())


def test_deriv_and_reality():
    R = exact_ring()
    f = R.cos((1, 0)) + R.sin((0, 2), Fraction(1, 3))
    # d/dx1: -sin(x1); d/dx2: (2/3) cos(2 x2)
    assert not (f.deriv(0) + R.sin((1, 0)))
    assert not (f.deriv(1) - R.cos((0, 2), Fraction(2, 3)))
    assert R.is_real(f)
    assert not R.is_real(R.i() * f)


def test_eval_matches_math():
    R = float_ring()
    f = R.cos((2, 0), 0.5) + R.sin((1, 1), 2.0)
    for x in [(0.3, -0.7), (1.1, 2.2)]:
        expect = 0.5 * math.cos(2 * x[0]) + 2.0 * math.sin(x[0] + x[1])
        assert abs(f.eval_at(x) - expect) < 1e-12


def test_mean_and_constants():
    R = exact_ring()
    f = R.lift(Fraction(3, 4)) + R.cos((1, 0))
    assert f.constant_term() == CRat(Fraction(3, 4))
    assert not f.is_constant()
    assert R.as_constant(R.lift(2)) == CRat(2)


def test_cap_exact_raises():
    R = exact_ring(cap=3)
    f = R.cos((3, 0))
    with pytest.raises(CapOverflow):
        f * f  # frequency 6 exceeds cap 3


def test_cap_float_monitored():
    # Small coefficients outside the window are dropped quietly, large
    # ones must raise: silent information loss is the one forbidden state.
    R = TrigRing(1, exact=False, cap=3, tail_tol=1e-9)
    big = R.poly({(3,): 1e-3})
    with pytest.raises(CapOverflow):
        big * big  # 1e-6 at frequency 6 exceeds tail_tol
    tiny = R.poly({(3,): 1e-5})
    out = tiny * tiny  # 1e-10 at frequency 6: below tail_tol, dropped
    assert not out.terms


def test_inverse_residual():
    R = float_ring()
    f = R.one() + R.cos((1, 0), 0.3)
    g = R.inv(f, tol=1e-13)
    assert (f * g - R.one()).norm1() < 1e-12


def test_sqrt_and_log_exp_roundtrip():
    R = float_ring(cap=32)
    f = R.one() + R.cos((1, 0), 0.2)
    r = R.sqrt(f, tol=1e-13)
    assert (r * r - f).norm1() < 1e-12
    lf = R.log(f)
    back = R.exp(lf)
    assert (back - f).norm1() < 1e-11


def test_exact_sqrt_perfect_square_constant():
    R = exact_ring()
    assert not (R.sqrt(R.lift(Fraction(9, 4))) - R.lift(Fraction(3, 2)))
    with pytest.raises(ValueError):
        R.sqrt(R.lift(2))
    with pytest.raises(ValueError):
        R.sqrt(R.one() + R.cos((1, 0)))


def test_conjugate_is_ring_map():
    R = exact_ring()
    f = R.cos((1, 0)) + R.exp_i((0, 1), CRat(0, 1))
    g = R.sin((1, 1), Fraction(2, 5))
    assert not ((f * g).conjugate() - f.conjugate() * g.conjugate())
    assert not ((f + g).conjugate() - (f.conjugate() + g.conjugate()))
