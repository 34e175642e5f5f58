"""
长正合列求解器测试
"""

import numpy as np
import pytest

from src.core.lessolver import (FORMULA, ORACLE, DimInterval, LESSolver, TraceStep, replay_trace)
from src.core.projcoh import exceptional_twists, h_line, h_omega
from src.core.sheafdag import USER_AXIOM, Fact, Line, Omega, SheafRegistry, Sum, twist
from src.utils.errors import InfeasibleConstraintsError


def test_interval_arithmetic():
    a = DimInterval(1, 4)
    b = DimInterval(2, None)
    assert a.intersect(b) == DimInterval(2, 4)
    assert (a + b) == DimInterval(3, None)
    assert (a - DimInterval(0, 1)) == DimInterval(0, 4)
    assert a.scale(-2) == DimInterval(-8, -2)
    assert DimInterval(-3, 2).nonnegative() == DimInterval(0, 2)
    assert DimInterval(3, 1).empty
    assert DimInterval.exact_value(5).value == 5
    assert str(DimInterval(0, None)) == '[0,∞]'
    with pytest.raises(ValueError):
        DimInterval(0, 1).value


def test_replay_trace():
    trace = [
        TraceStep('h^0(V)', 0, 10, 'a', FORMULA),
        TraceStep('h^0(V)', 3, None, 'b', ORACLE),
        TraceStep('h^1(V)', 0, 0, 'c', FORMULA),
    ]
    replayed = replay_trace(trace)
    assert replayed['h^0(V)'] == DimInterval(3, 10)
    assert replayed['h^1(V)'].exact
    with pytest.raises(InfeasibleConstraintsError):
        replay_trace(trace + [TraceStep('h^0(V)', 11, None, 'd', FORMULA)])


def test_sum_is_exact():
    registry = SheafRegistry(5)
    solver = LESSolver(registry)
    expr = Sum((Line(1, 0), Line(0, 1), Line(-2, -4)))
    for i in range(6):
        expected = h_line(i, 1, 0, 5) + h_line(i, 0, 1, 5) + h_line(i, -2, -4, 5)
        assert solver.resolve_h(expr, i).interval == DimInterval.exact_value(expected)


def split_registry(n, first, second):
    registry = SheafRegistry(n)
    V = registry.define('V', rank=2, locally_free=True)
    registry.register(Line(*first), V, Line(*second), USER_AXIOM, defines='V')
    return registry, V


def test_extension_intervals_contain_split_values():
    rng = np.random.default_rng(20240601)
    n = 4
    for _ in range(20):
        first = tuple(int(v) for v in rng.integers(-2, 3, size=2))
        second = tuple(int(v) for v in rng.integers(-2, 3, size=2))
        registry, V = split_registry(n, first, second)
        solver = LESSolver(registry, max_depth=3)
        shift = tuple(int(v) for v in rng.integers(-2, 3, size=2))
        table = solver.table(V, [shift])
        for i in range(n + 1):
            split = (h_line(i, first[0] + shift[0], first[1] + shift[1], n)
                     + h_line(i, second[0] + shift[0], second[1] + shift[1], n))
            assert table.entry(i, 0).contains(split)


def random_summand(rng, n):
    p, q = (int(v) for v in rng.integers(-4, 5, size=2))
    if n > 2 and rng.random() < 0.5:
        return Omega(int(rng.integers(1, n - 1)), p, q)
    return Line(p, q)


def direct_h(expr, i, n):
    if isinstance(expr, Line):
        return h_line(i, expr.p, expr.q, n)
    return h_omega(i, expr.l, expr.p, expr.q, n)


def test_split_sums_are_recovered_exactly():
    rng = np.random.default_rng(20240601)
    registries = {n: SheafRegistry(n) for n in (3, 4, 5)}
    for _ in range(200):
        n = int(rng.choice([3, 4, 5]))
        parts = tuple(random_summand(rng, n) for _ in range(int(rng.integers(2, 4))))
        shift = tuple(int(v) for v in rng.integers(-2, 3, size=2))
        table = LESSolver(registries[n]).table(Sum(parts), [shift])
        assert table.exact
        for i in range(n + 1):
            expected = sum(direct_h(twist(part, *shift), i, n) for part in parts)
            assert table.entry(i, 0) == DimInterval.exact_value(expected)


def triangle_registry():
    """三条共享端点的扩张：h⁰ 两两之和为 2，逐项区间只能得到 [0,2]"""
    registry = SheafRegistry(3)
    A, B, C = (registry.define(name, rank=1, locally_free=True) for name in 'ABC')
    middles = [registry.define(f"T{k}", rank=2, locally_free=False) for k in (1, 2, 3)]
    for (sub, quot), mid in zip(((A, B), (A, C), (B, C)), middles):
        registry.register(sub, mid, quot, USER_AXIOM, defines=mid.name)
    for V in (A, B, C):
        for i in range(1, 4):
            registry.add_fact(Fact(V, i, 0, 0, 'USER'))
    for T in middles:
        registry.add_fact(Fact(T, 0, 2, 2, 'USER'))
    return registry, A


def test_linear_program_settles_coupled_sections():
    registry, A = triangle_registry()
    result = LESSolver(registry).resolve_h(A, 0)
    assert result.interval == DimInterval.exact_value(1)
    assert any(step.constraint.startswith('线性规划') for step in result.trace)


def test_interval_propagation_alone_is_weaker():
    registry, A = triangle_registry()
    result = LESSolver(registry, linear_elimination=False).resolve_h(A, 0)
    assert result.interval == DimInterval(0, 2)


def test_node_cap_marks_result_truncated(prototype):
    result = LESSolver(prototype.registry, max_nodes=1).resolve_h(prototype.E, 4, (0, -4))
    assert result.truncated
    assert result.to_dict()['truncated']
    assert result.interval.contains(6)


def test_injected_facts_are_used():
    registry, V = split_registry(4, (0, 0), (0, 0))
    registry.add_fact(Fact(V, 0, 2, 2, 'USER'))
    result = LESSolver(registry).resolve_h(V, 0)
    assert result.interval == DimInterval.exact_value(2)
    assert any(step.provenance == 'USER' for step in result.trace)


def test_inconsistent_facts_raise():
    registry, V = split_registry(4, (0, 0), (0, 0))
    registry.add_fact(Fact(V, 0, 7, 7, 'USER'))
    with pytest.raises(InfeasibleConstraintsError) as info:
        LESSolver(registry).resolve_h(V, 0)
    assert info.value.trace


def test_prototype_table(prototype_solver, prototype, golden):
    expected = golden('prototype_p5_table.json')
    twists = exceptional_twists(5)
    assert [list(t) for t in twists] == expected['twists']
    table = prototype_solver.table(prototype.E, twists)
    assert table.exact
    nonzero = {(item['i'], tuple(item['twist'])): item['h'] for item in expected['nonzero']}
    for i in range(6):
        for k, t in enumerate(twists):
            assert table.entry(i, k).value == nonzero.get((i, tuple(t)), 0)
    assert table.columns[5] == 'E(0,-4)'
    replayed = replay_trace(table.trace)
    assert replayed['h^4(E(0,-4))'] == DimInterval.exact_value(6)


def test_delta01_of_ideal(prototype_solver, prototype):
    ideal = prototype.registry.parse('I_X(2,0)')
    result = prototype_solver.delta01(ideal)
    assert result.interval == DimInterval.exact_value(10)
    assert result.key == 'δ01(I_X(2,0))'


def test_resolve_h_with_twist(prototype_solver, prototype):
    result = prototype_solver.resolve_h(prototype.E, 4, (0, -4))
    assert result.interval.value == 6
    assert result.key == 'h^4(E(0,-4))'
    assert result.trace
