from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from geolink.exact import (INF, Mat2, QuadIrr, SymT, delta, ext_cmp, format_rat, parse_rat,
                           parse_symt, qirr_cmp, rat_arith, rational_sqrt, reduce_sym)

mpmath.mp.dps = 60

small = st.integers(-40, 40)
qirrs = st.builds(QuadIrr, small, small, st.integers(1, 30), st.integers(0, 60))


def _mp(x: QuadIrr):
    return (mpmath.mpf(x.p) + x.q * mpmath.sqrt(x.d)) / x.r


def test_rat_arith_and_format():
    assert rat_arith("1/2", "1/3", "+") == Fraction(5, 6)
    assert rat_arith(1, "2/3", "−") == Fraction(1, 3)
    assert format_rat(Fraction(6, 3)) == "2"
    assert format_rat(Fraction(-3, 4)) == "-3/4"
    with pytest.raises(ZeroDivisionError):
        rat_arith(1, 0, "/")
    with pytest.raises(ValueError):
        rat_arith(1, 2, "^")


@given(st.fractions())
def test_rat_roundtrip(x):
    assert parse_rat(format_rat(x)) == x


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None
    assert rational_sqrt(Fraction(-1)) is None


@given(qirrs, qirrs)
def test_qirr_cmp_matches_high_precision(x, y):
    ref = _mp(x) - _mp(y)
    expect = 0 if abs(ref) < mpmath.mpf(10) ** -40 else (1 if ref > 0 else -1)
    assert qirr_cmp(x, y) == expect
    assert qirr_cmp(y, x) == -expect


@given(qirrs, qirrs, qirrs)
def test_qirr_order_transitive(x, y, z):
    a, b, c = sorted([x, y, z])
    assert qirr_cmp(a, b) <= 0 and qirr_cmp(b, c) <= 0 and qirr_cmp(a, c) <= 0


def test_qirr_canonical_form():
    assert QuadIrr(0, 1, 1, 8) == QuadIrr(0, 2, 1, 2)
    assert QuadIrr(1, 1, 1, 4).is_rational and QuadIrr(1, 1, 1, 4) == 3
    assert ext_cmp(INF, QuadIrr(10**6, 1, 1, 2)) == 1


def test_mat2_group_ops():
    g = Mat2(2, 1, 1, 1)
    assert g @ g.inv() == Mat2.identity()
    assert g.det == 1 and g.trace == 3
    assert Mat2(-1, 0, 0, -1).canonical() == Mat2.identity()


@st.composite
def posdef_T(draw):
    t1 = draw(st.integers(1, 30))
    t2 = draw(st.integers(1, 30))
    h = draw(st.integers(-40, 40))
    T = SymT(t1, Fraction(h, 2), t2)
    if not T.is_posdef():
        T = SymT(t1, Fraction(h % 2, 2), t2 + abs(h))
    return T


@given(posdef_T())
def test_reduce_sym(T):
    red, g, flipped = reduce_sym(T)
    assert g.det == 1
    img = T.conj(g)
    assert (img.flip() if flipped else img) == red
    assert red.det == T.det and red.trace <= T.trace
    assert 0 <= 2 * red.t0 <= red.t1 <= red.t2


@given(st.builds(SymT, st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20)))
def test_delta_radicand(T):
    r, x = delta(T)
    assert r == T.trace ** 2 - 4 * T.det
    assert abs(x * x - float(r)) <= 1e-12 * max(1.0, float(r))


def test_symt_parse_and_str():
    T = parse_symt("2,1/2,3")
    assert str(T) == "2,1/2,3" and T.det == Fraction(23, 4)
    assert T.form_coeffs() == (2, 1, 3)
    with pytest.raises(ValueError):
        parse_symt("1,2")
