"""
单子测试
"""

import pytest

from src.core.beilinson import (assemble_monad, compare_printed_tables, contribution_tables, monad_for,
                                obstruction_list, required_twists, term_list)
from src.core.lessolver import CohTable, DimInterval
from src.core.sheafdag import Line, Omega
from src.utils.errors import MonadObstructionError, NondegenerateIntervalError


def zero_table(n, twists):
    rows = [[DimInterval.exact_value(0) for _ in twists] for _ in range(n + 1)]
    return CohTable(n, [str(t) for t in twists], list(twists), rows)


def test_required_twists():
    assert required_twists(3) == [(0, 0), (0, -1), (0, -2), (-1, 1), (-1, 0), (-1, -1)]


def test_printed_tables_disagree_only_at_top_row():
    rows = compare_printed_tables(5)
    disagreements = [(row['p'], row['s']) for row in rows if not row['agrees']]
    assert disagreements == [(-1, 5)]
    assert contribution_tables(-1, 5)[5] == []


def test_obstruction_list():
    assert obstruction_list(5) == [(5, (0, -3)), (5, (-1, -1)), (4, (0, -2)), (4, (-1, 0))]


@pytest.fixture(scope='module')
def prototype_monad(prototype_solver, prototype):
    return monad_for(prototype_solver, prototype.E)


def test_prototype_monad_terms(prototype_monad):
    monad = prototype_monad
    assert [s.bundle for s in monad.left.summands] == [Line(-1, -1)]
    assert [(s.bundle, s.multiplicity) for s in monad.middle.summands] == [(Line(-1, 0), 1), (Line(0, -1), 6)]
    assert [(s.bundle, s.multiplicity) for s in monad.right.summands] == [(Omega(3, 0, 3), 1)]
    assert monad.middle.summands[0].sources == [(1, 1, 0)]
    assert monad.middle.summands[1].sources == [(4, 0, 4)]
    assert monad.display() == 'O(-1,-1) → O(-1,0) ⊕ O(0,-1)^⊕6 → Ω^3(0,3)'


def test_prototype_monad_checks(prototype_monad):
    checks = prototype_monad.checks
    assert checks['rank'] == 2
    assert checks['rank_ok']
    assert checks['chern_character_ok']
    assert checks['chi_ok']


def test_term_list_only_three_degrees(prototype_solver, prototype):
    table = prototype_solver.table(prototype.E, required_twists(5))
    assert [row['p'] for row in term_list(table, 5)] == [-1, 0, 1]


def test_obstruction_is_reported():
    n = 4
    twists = required_twists(n)
    table = zero_table(n, twists)
    table.rows[0][twists.index((0, -2))] = DimInterval.exact_value(1)
    with pytest.raises(MonadObstructionError) as info:
        assemble_monad(table, n)
    assert info.value.obstructions == [
        {'p': -2, 's': 0, 'twist': [0, -2], 'bundle': 'Ω^2(0,2)', 'multiplicity': 1}
    ]


def test_interval_entries_are_rejected():
    n = 4
    twists = required_twists(n)
    table = zero_table(n, twists)
    table.rows[1][0] = DimInterval(0, 3)
    with pytest.raises(NondegenerateIntervalError):
        assemble_monad(table, n)
