"""
瞬子检验、除子限制、模空间维数与 Ulrich 检查测试
"""

import pytest

from src.core.chow import ChowClass
from src.core.instanton import (DIVISOR_E, DIVISOR_H, INSTANTON, NOT_INSTANTON, PASS, InstantonChecker,
                                build_elementary, build_odd, check, definition_items, even_witness, moduli_dimension,
                                restrict_to_divisor, split_degrees, ulrich_check, uniform_vanishing)
from src.core.stability import SEMISTABLE_CERTIFIED, VIOLATION, certify
from src.utils.errors import PreconditionError


def test_definition_items():
    items = definition_items(5)
    assert len(items) == 8
    assert ('ii', 4, (0, -2)) in items
    assert ('iii', 5, (-1, -1)) in items
    assert len(definition_items(3)) == 6


def test_build_odd_rejects_even_dimension():
    with pytest.raises(PreconditionError):
        build_odd(4)
    with pytest.raises(PreconditionError):
        build_odd(3)


def test_uniform_vanishing(prototype):
    assert {2, 3} <= uniform_vanishing(prototype.registry, prototype.E)


def test_prototype_is_instanton(prototype, prototype_solver):
    report = InstantonChecker(prototype, prototype_solver).check(grid=1)
    assert all(c.verdict == PASS for c in report.conditions)
    assert report.middle_range['verdict'] == PASS
    assert report.middle_range['symbolic']
    assert report.middle_range['sampled'] == 9
    assert report.c1_check['ok']
    assert report.stability.verdict == SEMISTABLE_CERTIFIED
    assert report.verdict == INSTANTON
    assert report.monad['display'] == 'O(-1,-1) → O(-1,0) ⊕ O(0,-1)^⊕6 → Ω^3(0,3)'
    data = report.to_dict()
    assert data['construction']['charge'] == 8
    assert data['verdict'] == INSTANTON


def test_seven_dimensional_member():
    construction = build_odd(7)
    assert construction.c1() == ChowClass.alpha(7) * (-2)
    assert construction.charge() == 243
    certificate = certify(construction.registry, construction.E, construction.L, construction.solver())
    assert certificate.verdict == SEMISTABLE_CERTIFIED
    assert len(certificate.cases) == 13


@pytest.mark.slow
def test_seven_dimensional_member_is_instanton():
    report = check(build_odd(7), grid=1)
    assert report.verdict == INSTANTON
    assert report.monad['display'] == 'O(-1,-1) → O(-1,0) ⊕ O(0,-1)^⊕8 → Ω^5(0,5)'


def test_even_example(even_example):
    n = 4
    assert even_example.c2() == ChowClass.xi(n, 2) * 2 - ChowClass.alpha(n, 2) * 2
    assert even_example.charge() == 2
    witness = even_witness(even_example)
    assert witness['shape'] == [4, 5]
    assert witness['kernel_dim'] == 1
    report = check(even_example, with_monad=False, grid=1)
    assert report.c1_check['target'] == [0, -1]
    assert report.c1_check['ok']
    assert report.stability.verdict == VIOLATION
    assert report.verdict == NOT_INSTANTON


def test_elementary_transform():
    parent = build_odd(5)
    G = build_elementary(parent)
    assert G.parent is parent
    assert G.c2() == ChowClass.xi(5, 2) * 2
    assert G.charge() == 16
    assert not G.registry.is_locally_free(G.E)
    report = check(G, with_monad=False, grid=1)
    assert report.cohomological_verdict == PASS
    assert report.stability.verdict == SEMISTABLE_CERTIFIED


def test_split_degrees():
    assert split_degrees(DIVISOR_H, 0) == [-1, -1]
    assert split_degrees(DIVISOR_E, 0) == [0, -2]


@pytest.fixture(scope='module')
def restriction_construction():
    return build_odd(5)


def test_restriction_to_hyperplane(restriction_construction):
    result = restrict_to_divisor(restriction_construction, DIVISOR_H)
    assert result['sheaf'] == 'E|H'
    assert result['ok']
    assert result['failures'] == []
    assert result['h2_vanishing']
    k0 = next(c for c in result['comparisons'] if c['k'] == 0)
    assert all(cell == [0, 0] for cell in k0['h'])


def test_restriction_to_exceptional_divisor(restriction_construction):
    result = restrict_to_divisor(restriction_construction, DIVISOR_E)
    assert result['sheaf'] == 'E|Ediv'
    assert result['ok']
    assert result['failures'] == []
    assert result['h2_vanishing']
    k0 = next(c for c in result['comparisons'] if c['k'] == 0)
    assert k0['h'][0] == [1, 1]
    assert all(cell == [0, 0] for cell in k0['h'][1:])


def test_restriction_order_does_not_matter():
    construction = build_odd(5)
    restrict_to_divisor(construction, DIVISOR_H)
    result = restrict_to_divisor(construction, DIVISOR_E)
    assert result['h2_vanishing']
    assert result['ok']
    assert result['failures'] == []


def test_restriction_rejects_unknown_divisor(restriction_construction):
    with pytest.raises(PreconditionError):
        restrict_to_divisor(restriction_construction, 'Q')


def test_moduli_dimension():
    result = moduli_dimension(build_odd(5))
    delta = result['delta01']
    assert delta['I_X(2,0)']['interval'] == [10, 10]
    assert delta['I2']['interval'] == [-2, -2]
    assert delta['EI']['interval'] == [-3, -3]
    assert delta['EE']['interval'] == [-4, -4]
    assert result['normal_h0']['interval'] == [12, 12]
    low, high = result['h1']['interval']
    assert low == 5
    assert high is not None and high <= 14
    assert result['kernel_bound']['interval'] == [6, 6]
    agreements = {c['quantity']: c['agrees'] for c in result['comparisons']}
    assert agreements['delta01(I_X(2,0))']
    assert agreements['h0(normal term)']
    assert not agreements['delta01(I_X^2(2,0))']
    assert not agreements['h0(E⊗K(0,2)) bound']
    assert all(entry['rank_ok'] and entry['chern_ok'] for entry in result['whitney_audit'])


def test_moduli_requires_five_dimensions(even_example):
    with pytest.raises(PreconditionError):
        moduli_dimension(even_example)


def test_ulrich_check(prototype, prototype_solver):
    result = ulrich_check(prototype, prototype_solver)
    assert result['F'] == 'E(1,1)'
    assert not result['ulrich']
    assert result['comparison']['engine'] == [106, 106]
    assert not result['comparison']['agrees']
    assert any(entry['group'] == 'h^5(E(-4,-4))' for entry in result['failures'])
