"""
线丛与扭微分上同调测试
"""

import pytest

from src.core.chow import chi_line, hrr_chi
from src.core.projcoh import (bott_h, ch_omega, chi_omega, exceptional_collection, h_line, h_line_printed,
                              h_line_vector, h_omega, h_omega_printed, line_chi_matches, printed_omega_covers,
                              serre_dual_line, serre_dual_omega)
from src.utils.errors import PreconditionError


def test_bott_on_projective_space():
    assert bott_h(4, 0, 0, 1) == 5
    assert bott_h(4, 0, 1, 2) == 10
    assert bott_h(4, 1, 1, 0) == 1
    assert bott_h(4, 4, 0, -5) == 1
    assert bott_h(4, 2, 0, -3) == 0


def test_structure_sheaf():
    assert h_line_vector(0, 0, 5) == [1, 0, 0, 0, 0, 0]
    assert h_line(0, 1, 0, 5) == 6


@pytest.mark.parametrize('n', [3, 4, 5, 7])
def test_line_rows_and_duality(n):
    for p in range(-5, 6):
        for q in range(-5, 6):
            assert line_chi_matches(p, q, n)
            for i in range(n + 1):
                value = h_line(i, p, q, n)
                assert value == h_line_printed(i, p, q, n)
                j, dp, dq = serre_dual_line(i, p, q, n)
                assert value == h_line(j, dp, dq, n)
                if 2 <= i <= n - 2:
                    assert value == 0


@pytest.mark.parametrize('n', [4, 5])
def test_omega_rows_and_duality(n):
    for l in range(n):
        for p in range(-4, 5):
            for q in range(-4, 5):
                for i in range(n + 1):
                    value = h_omega(i, l, p, q, n)
                    j, dl, dp, dq = serre_dual_omega(i, l, p, q, n)
                    assert value == h_omega(j, dl, dp, dq, n)
                    if printed_omega_covers(i, l, p, q):
                        assert value == h_omega_printed(i, l, p, q, n)


@pytest.mark.parametrize('n', [4, 5])
def test_omega_chi_matches_hrr(n):
    for l in range(n):
        for p in range(-3, 4):
            for q in range(-3, 4):
                assert chi_omega(l, p, q, n) == hrr_chi(ch_omega(l, p, q, n), n)


def test_omega_degree_range():
    with pytest.raises(PreconditionError):
        h_omega(0, 5, 0, 0, 5)
    with pytest.raises(PreconditionError):
        h_omega(6, 1, 0, 0, 5)


def test_omega_extremes_are_lines():
    n = 5
    for p in range(-3, 4):
        for q in range(-3, 4):
            assert h_omega(0, 0, p, q, n) == h_line(0, p, q, n)
            for i in range(n + 1):
                assert h_omega(i, n - 1, p, q, n) == h_line(i, p, q - n, n)


@pytest.mark.parametrize('n', [3, 4, 5, 6])
def test_exceptional_collection(n):
    collection = exceptional_collection(n)
    assert len(collection.twists) == 2 * n
    assert collection.report['ok']


def test_chi_line_small_cases():
    assert chi_line(0, 0, 5) == 1
    assert chi_line(-1, 0, 5) == 0
    assert chi_line(2, 0, 5) == 21
