"""
理想层截面测试
"""

from math import comb

import pytest

from src.core.projcoh import h_line
from src.core.sections import (KAPPA, Q1, Q2, WP, SectionBasis, SubvarietySpec, h0_ideal, h0_line_model,
                               restrict_matrix, validate_components)
from src.utils.errors import OverlappingComponentsError, PreconditionError


def prototype_components(n=5, seed=None):
    return (SubvarietySpec(WP, n, seed), SubvarietySpec(KAPPA, n, seed))


@pytest.mark.parametrize('n', [3, 4, 5, 7])
def test_section_basis_size(n):
    for p in range(0, 9):
        for q in range(-8, 9):
            assert h0_line_model(p, q, n) == h_line(0, p, q, n)


def test_section_basis_monomials():
    basis = SectionBasis(3, 1, 1)
    monomials = basis.monomials()
    assert len(monomials) == len(basis)
    assert all(sum(m) == 2 and m[0] <= 1 for m in monomials)


@pytest.mark.parametrize('twist, expected', [
    ((2, 0), 10),
    ((1, -1), 0),
    ((0, 1), 0),
    ((1, 0), 1),
    ((3, 1), 86),
])
def test_h0_ideal_prototype(twist, expected):
    assert h0_ideal(prototype_components(), *twist) == expected


@pytest.mark.parametrize('p', [-2, 0, 1, 3])
def test_h0_ideal_degree_zero_on_wp(p):
    assert h0_ideal(prototype_components(), 1 - p, p - 1) == 0


@pytest.mark.parametrize('q', [2, 3, 4, 5])
def test_h0_ideal_pure_alpha_twists(q):
    assert h0_ideal(prototype_components(), 0, q) == comb(q + 2, 4)


def test_generic_coordinates_agree():
    fixed = prototype_components()
    generic = prototype_components(seed=7)
    for twist in [(2, 0), (1, 0), (3, 1), (0, 3)]:
        assert h0_ideal(generic, *twist) == h0_ideal(fixed, *twist)


def test_even_witness_matrix():
    X = (SubvarietySpec(Q1, 4), SubvarietySpec(Q2, 4))
    matrix = restrict_matrix(X, 2, -1)
    assert matrix.shape == (4, 5)
    assert matrix.kernel_dim() == 1
    assert len(matrix.kernel_polynomials()) == 1
    data = matrix.to_dict()
    assert data['kernel_dim'] == 1
    assert data['shape'] == [4, 5]


def test_subvariety_facts():
    wp, kappa = prototype_components()
    assert wp.restriction_degree(2, 0) == 2
    assert kappa.restriction_degree(2, 0) == 0
    assert wp.det_normal_degree == 2
    assert kappa.det_normal_degree == 0
    assert wp.cohomology(0, 1) == 4
    assert kappa.cohomology(3, -4) == 1


def test_components_validation():
    with pytest.raises(OverlappingComponentsError):
        validate_components((SubvarietySpec(WP, 5), SubvarietySpec(WP, 5)))
    with pytest.raises(PreconditionError):
        validate_components(())
    with pytest.raises(PreconditionError):
        SubvarietySpec(Q1, 5)
    with pytest.raises(PreconditionError):
        SubvarietySpec('plane', 5)
