"""
Chow 环测试
"""

import pytest
from sympy import QQ

from src.core.chow import (CanonicalData, ChowClass, Polarization, chern_character, charge, chi_line, degree,
                           delta, hrr_chi, slope, to_plain, total_chern, twist_character)
from src.utils.errors import DimensionMismatchError, HypothesisError, PreconditionError


def test_multiplication_rules():
    n = 5
    xi, alpha = ChowClass.xi(n), ChowClass.alpha(n)
    assert xi * alpha == ChowClass.xi(n, 2)
    assert alpha ** 4 == ChowClass.alpha(n, 4)
    assert (alpha ** 5).is_zero()
    assert degree(xi ** 5) == 1
    assert degree(xi * alpha ** 4) == 1
    assert degree(alpha ** 4) == 0


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionMismatchError):
        ChowClass.xi(4) + ChowClass.xi(5)


def test_parse():
    n = 5
    parsed = ChowClass.parse('(xi + alpha)**2', n)
    xi, alpha = ChowClass.xi(n), ChowClass.alpha(n)
    assert parsed == xi * xi + xi * alpha * 2 + alpha * alpha
    with pytest.raises(PreconditionError):
        ChowClass.parse('1/xi', n)


@pytest.mark.parametrize('n', [3, 4, 5, 6, 7])
def test_hrr_matches_closed_form(n):
    for p in range(-4, 5):
        for q in range(-4, 5):
            assert hrr_chi(twist_character(p, q, n), n) == chi_line(p, q, n)


def test_chern_round_trip():
    n = 5
    total = ChowClass.one(n) + ChowClass.alpha(n) * (-2) + ChowClass.xi(n, 2)
    ch = chern_character(2, total)
    assert ch.r0 == 2
    assert total_chern(ch) == total


def test_whitney_for_sum_of_lines():
    n = 4
    ch = twist_character(1, -1, n) + twist_character(0, 2, n)
    expected = (ChowClass.one(n) + ChowClass.from_twist(1, -1, n)) * (ChowClass.one(n) + ChowClass.from_twist(0, 2, n))
    assert total_chern(ch) == expected


@pytest.mark.parametrize('n, A, B', [(5, 16, 15), (7, 729, 665), (9, 4 ** 8, 4 ** 8 - 3 ** 8)])
def test_delta_of_generators(n, A, B):
    L = Polarization.default(n)
    assert delta((1, 0), L) == A
    assert delta((0, 1), L) == B


def test_delta_even_example():
    L = Polarization.explicit_twist(4, 1, 1)
    assert delta((1, 0), L) == 8
    assert delta((0, 1), L) == 7
    assert slope(ChowClass.from_twist(0, -1, 4), 2, L) == QQ(-7, 2)


@pytest.mark.parametrize('n, expected', [(5, 8), (7, 243), (9, 16384)])
def test_charge_of_xi_squared(n, expected):
    L = Polarization.default(n)
    assert charge(ChowClass.xi(n, 2), L) == expected
    assert expected == ((n - 1) // 2) ** (n - 2)


def test_default_polarization():
    assert Polarization.default(3).twist == (1, 1)
    assert Polarization.default(5).twist == (1, 1)
    assert Polarization.default(9).twist == (1, 3)
    with pytest.raises(HypothesisError):
        Polarization.default(4)


def test_det_target():
    assert CanonicalData(5).det_target(Polarization.default(5)) == (0, -2)
    assert CanonicalData(4).det_target(Polarization.explicit_twist(4, 1, 1)) == (0, -1)
    assert CanonicalData(7).det_target(Polarization.default(7)) == (0, -2)


def test_to_plain():
    assert to_plain(QQ(6, 3)) == 2
    assert to_plain(QQ(-7, 2)) == '-7/2'
