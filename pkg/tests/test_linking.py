from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from geolink.bqf import BQF, act
from geolink.exact import SymT, rational_sqrt
from geolink.gamma15 import PAIRINGS, traverse
from geolink.linking import (TRIPLE_FORMS, CoeffRow, CycleSet, growth_check, iota_full,
                             iota_prime, reduced_T, series_table, bounding_triple, theta_shifts,
                             winding_sums)

T0 = SymT(2, Fraction(1, 2), 3)
KNOWN_SERIES = {(2, 3, Fraction(1, 2)): 8, (2, 4, Fraction(1, 2)): 24, (2, 5, Fraction(1, 2)): 16,
          (3, 4, Fraction(1)): 2, (2, 6, Fraction(1, 2)): -4, (3, 4, Fraction(1, 2)): -4,
          (2, 7, Fraction(1, 2)): 8, (3, 5, Fraction(1)): 4, (3, 5, Fraction(1, 2)): -32}

reduced = st.sampled_from(reduced_T(Fraction(12)))


def test_iota_example():
    cs = bounding_triple()
    assert cs.homology == (0, 0, 0)
    assert iota_prime(T0, cs) == 8 and iota_full(T0, cs) == 8


def test_per_cycle_winding_sums():
    sums = []
    for cyc in bounding_triple().cycles:
        sums.append({str(rep): s for rep, m, s in winding_sums(T0, cyc) if m})
    # only 2x^2 + xy + 3y^2 has m != 0 (m = 2)
    assert [list(s) for s in sums] == [["2,1,3"]] * 3
    assert [s["2,1,3"] for s in sums] == [0, 0, 4]


def test_iota_vanishes_below_23_4():
    cs = bounding_triple()
    for T in reduced_T(Fraction(23, 4)):
        assert iota_full(T, cs) == 0 and iota_prime(T, cs) == 0


def brute_shifts(T):
    out = []
    for n, m in product(range(-5, 6), repeat=2):
        if (T - SymT(n * n, n * m, m * m)).is_posdef():
            out.append((n, m))
    return out


@given(reduced)
def test_theta_shifts(T):
    assert sorted(theta_shifts(T)) == sorted(brute_shifts(T))


def test_theta_shifts_example():
    assert sorted(theta_shifts(T0)) == [(-1, -1), (-1, 0), (0, -1), (0, 0), (0, 1), (1, 0), (1, 1)]


@given(reduced)
def test_t0_sign_reversal(T):
    cs = CycleSet.named(["c3"])
    flipped = SymT(T.t1, -T.t0, T.t2)
    assert iota_full(flipped, cs) == -iota_full(T, cs)
    if T.t0 == 0:
        assert iota_full(T, cs) == 0


@pytest.mark.parametrize("k", range(6))
def test_iota_prime_invariant_under_translate(k):
    c3 = TRIPLE_FORMS["c3"]
    moved = act(c3, PAIRINGS[k])
    a = CycleSet.of_forms([c3])
    b = CycleSet.of_forms([moved])
    for T in reduced_T(Fraction(10)):
        assert iota_prime(T, a) == iota_prime(T, b)


def test_series_values():
    tab = series_table(15, CycleSet.named(["c₃′"]), nonsquare_only=True)
    assert tab.as_dict() == KNOWN_SERIES
    assert tab.values() == [8, 24, 16, 2, -4, -4, 8, 4, -32]


def test_series_parallel_matches_serial():
    cs = CycleSet.named(["c3"])
    assert series_table(12, cs, workers=4) == series_table(12, cs, workers=1)


def test_series_square_det_rows_flagged():
    tab = series_table(15, CycleSet.named(["c3"]), nonsquare_only=False, keep_zero=True)
    sq = [r for r in tab.rows if r.surface_dependent]
    assert sq and all(isinstance(r.value, Fraction) for r in tab.rows)
    assert all(rational_sqrt(r.det) is not None for r in sq)
    assert {r.det for r in sq} >= {1, 4, 9}


def test_reduced_T_enumeration():
    Ts = reduced_T(Fraction(8))
    brute = [SymT(t1, Fraction(h, 2), t2) for t1, t2, h in product(range(1, 9), range(1, 9),
                                                                  range(0, 9))
             if h <= t1 <= t2 and t1 * t2 - Fraction(h * h, 4) < 8]
    assert sorted(Ts, key=str) == sorted(brute, key=str)
    keys = [(T.det, T.t1, T.t2, T.t0) for T in Ts]
    assert keys == sorted(keys)


def test_growth_regression():
    ratio, T = growth_check(15, CycleSet.named(["c3"]))
    assert T == SymT(2, Fraction(1, 2), 4)
    assert ratio == pytest.approx(24 / (Fraction(31, 4) ** 1.5), rel=1e-12)
    assert ratio == pytest.approx(1.1123941286819607, rel=1e-12)


def test_row_json():
    row = CoeffRow(T0, Fraction(8))
    assert row.to_json() == {"T": "2,1/2,3", "det": "23/4", "value": "8",
                             "surface_dependent": False}


def test_cycle_names():
    a = CycleSet.named(["c3"])
    for nm in ("c₃′", "C3'", "-3,-11,9"):
        assert CycleSet.named([nm]) == a
    assert CycleSet.of_forms([BQF(1, 0, -3)]).cycles[0] == traverse(BQF(1, 0, -3))
