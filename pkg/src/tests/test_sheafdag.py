"""
层表达式与注册表测试
"""

import pytest

from src.core.chow import ChowClass
from src.core.sections import KAPPA, WP, SubvarietySpec
from src.core.sheafdag import (SERRE_CONSTRUCTION, USER_AXIOM, Dual, IdealTwist, Line, Named, Omega, Push,
                               SheafRegistry, Sum, Twist, elementary_transform, expr_from_dict, expr_to_dict,
                               omega_bundle, serre_construct, twist)
from src.utils.errors import HypothesisError, PreconditionError, UnresolvableSheafError


def test_twist_normalization():
    wp = SubvarietySpec(WP, 5)
    kappa = SubvarietySpec(KAPPA, 5)
    assert twist(Line(1, 2), -1, 1) == Line(0, 3)
    assert twist(Push(wp, 0), 2, 1) == Push(wp, 3)
    assert twist(Push(kappa, 0), 2, 1) == Push(kappa, 1)
    assert twist(Twist(Named('F'), 1, 1), -1, -1) == Named('F')
    assert twist(Named('F'), 0, 0) == Named('F')
    assert omega_bundle(0, 1, 2, 5) == Line(1, 2)
    assert omega_bundle(4, 0, 4, 5) == Line(0, -1)
    assert omega_bundle(3, 0, 3, 5) == Omega(3, 0, 3)


def test_expression_serialization():
    wp = SubvarietySpec(WP, 5)
    expr = Sum((Line(1, 0), Push(wp, -1), IdealTwist((wp,), 2, 0), Twist(Named('F'), -1, -1)))
    assert expr_from_dict(expr_to_dict(expr)) == expr


def test_prototype_chern_classes(prototype):
    registry = prototype.registry
    n = 5
    assert prototype.c1() == ChowClass.alpha(n) * (-2)
    assert prototype.c2() == ChowClass.xi(n, 2)
    assert registry.det(prototype.E) == (0, -2)
    assert registry.rank(prototype.E) == 2
    assert registry.is_locally_free(prototype.E)


def test_display_and_parse(prototype):
    registry = prototype.registry
    E = prototype.E
    assert registry.display(twist(E, 0, -4)) == 'E(0,-4)'
    assert registry.parse('E(0,-4)') == twist(E, 0, -4)
    assert registry.display(registry.parse('I_X(2,0)')) == 'I_X(2,0)'
    assert registry.parse('O(1,-1)') == Line(1, -1)
    assert registry.parse('Omega^3(0,3)') == Omega(3, 0, 3)
    with pytest.raises(UnresolvableSheafError):
        registry.parse('Q(1,1)')
    with pytest.raises(PreconditionError):
        registry.parse('E(1')


def test_dual_and_serre_partner(prototype):
    registry = prototype.registry
    E = registry.normalize(prototype.E)
    assert registry.normalize(Dual(E)) == twist(E, 0, 2)
    assert registry.serre_dual_partner(E) == twist(E, -2, -2)
    assert registry.serre_dual_partner(IdealTwist(prototype.X, 0, 0)) is None


def test_whitney_audit(prototype):
    audit = prototype.registry.whitney_audit()
    assert audit
    assert all(entry['rank_ok'] and entry['chern_ok'] for entry in audit)


def test_instances_are_twist_closed(prototype):
    registry = prototype.registry
    target = twist(prototype.E, 3, -2)
    instances = registry.instances_touching(target)
    assert any(instance.mid == registry.normalize(target) for instance, position in instances
               if position == 'mid')
    serre = [instance for instance, _ in instances if instance.record_id == registry.info('F').record_id]
    assert serre and serre[0].sub == Line(2, -3)


def test_register_deduplicates_twists():
    registry = SheafRegistry(5)
    V = registry.define('V', rank=2, locally_free=True)
    first = registry.register(Line(0, 0), V, Line(1, 0), USER_AXIOM, defines='V')
    again = registry.register(Line(1, 1), twist(V, 1, 1), Line(2, 1), USER_AXIOM)
    assert again.id == first.id
    assert len(registry.records) == 1


def test_registry_round_trip(prototype):
    data = prototype.registry.to_dict()
    restored = SheafRegistry.from_dict(data)
    assert len(restored.records) == len(prototype.registry.records)
    assert restored.chern_character(prototype.E) == prototype.registry.chern_character(prototype.E)
    assert restored.to_dict() == data


def test_merge_axioms_adds_facts():
    source = SheafRegistry(5)
    V = source.define('V', rank=2, locally_free=True)
    source.register(Line(0, 0), V, Line(0, 1), USER_AXIOM, defines='V')
    target = SheafRegistry(5)
    target.merge_axioms(source.to_dict())
    assert target.has('V')
    assert len(target.records) == 1
    with pytest.raises(PreconditionError):
        SheafRegistry(4).merge_axioms(source.to_dict())


def test_serre_hypotheses():
    X = (SubvarietySpec(WP, 5), SubvarietySpec(KAPPA, 5))
    with pytest.raises(HypothesisError) as info:
        serre_construct(SheafRegistry(5), X, (1, 0))
    assert info.value.failed
    registry = SheafRegistry(5)
    F, record = serre_construct(registry, X, (2, 0))
    assert record.provenance == SERRE_CONSTRUCTION
    assert registry.info('F').position == 'mid'


def test_elementary_transform_requires_wp():
    registry = SheafRegistry(5)
    kappa = SubvarietySpec(KAPPA, 5)
    with pytest.raises(PreconditionError):
        elementary_transform(registry, Line(0, 0), kappa)
