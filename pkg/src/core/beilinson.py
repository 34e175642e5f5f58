"""
Beilinson 型单子模块
全复形各项 C^p = ⊕_{s−i=p} ⊕_{q+h=i} H^s(F(−h,h−q)) ⊗ Ω^q(−h,q)，单子组装与一致性检查
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .chow import ChowClass, hrr_chi, rank_of, to_plain, twist_character
from .lessolver import CohTable, LESSolver
from .projcoh import ch_omega, chi_omega, omega_rank
from .sheafdag import Line, SheafExpr, omega_bundle
from ..utils.errors import MonadObstructionError, NondegenerateIntervalError
from ..utils.logger import logger

TERM_SOURCES = (0, 1)


def required_twists(n: int) -> List[Tuple[int, int]]:
    """c_terms 读取的全部扭 F(−h, h−q)，h ∈ {0,1}，q ∈ [0, n−1]"""
    return [(-h, h - q) for h in TERM_SOURCES for q in range(n)]


def contributions(p: int, s: int, n: int) -> List[Tuple[int, int]]:
    """s − (q+h) = p 的 (h, q)"""
    i = s - p
    return [(h, i - h) for h in TERM_SOURCES if 0 <= i - h <= n - 1]


def contribution_tables(p: int, n: int) -> Dict[int, List[Tuple[int, int]]]:
    """s ∈ {0, 1, n−1, n} 各行的 (h,q) 列表；中间行对瞬子恒为零"""
    return OrderedDict((s, contributions(p, s, n)) for s in (0, 1, n - 1, n))


def printed_tables(n: int) -> Dict[int, Dict[int, List[Tuple[int, int]]]]:
    """显示的三张索引表"""
    return {
        -1: OrderedDict([(0, [(0, 1), (1, 0)]), (1, [(0, 2), (1, 1)]), (n - 1, [(1, n - 1)]),
                         (n, [(0, n - 1), (1, n - 2)])]),
        0: OrderedDict([(0, [(0, 0)]), (1, [(0, 1), (1, 0)]), (n - 1, [(0, n - 1), (1, n - 2)]),
                        (n, [(1, n - 1)])]),
        1: OrderedDict([(0, []), (1, [(0, 0)]), (n - 1, [(0, n - 2), (1, n - 3)]),
                        (n, [(0, n - 1), (1, n - 2)])]),
    }


def compare_printed_tables(n: int) -> List[Dict[str, Any]]:
    rows = []
    for p, table in printed_tables(n).items():
        formula = contribution_tables(p, n)
        for s, printed in table.items():
            rows.append({'p': p, 's': s, 'formula': [list(t) for t in formula[s]],
                         'printed': [list(t) for t in printed], 'agrees': formula[s] == printed})
    return rows


def obstruction_list(n: int, p: int = 2) -> List[Tuple[int, Tuple[int, int]]]:
    """|p| = 2 时需要消失的群 (s, F 的扭)"""
    result = []
    for s in (n, n - 1, 1, 0):
        for h, q in contributions(p, s, n):
            result.append((s, (-h, h - q)))
    return result


# ======================================================================
# 单子项
# ======================================================================

def bundle_ch(bundle: SheafExpr, n: int) -> ChowClass:
    if isinstance(bundle, Line):
        return twist_character(bundle.p, bundle.q, n)
    return ch_omega(bundle.l, bundle.p, bundle.q, n)


def bundle_chi(bundle: SheafExpr, n: int) -> int:
    if isinstance(bundle, Line):
        return chi_omega(0, bundle.p, bundle.q, n)
    return chi_omega(bundle.l, bundle.p, bundle.q, n)


def bundle_rank(bundle: SheafExpr, n: int) -> int:
    return 1 if isinstance(bundle, Line) else omega_rank(bundle.l, n)


@dataclass
class Summand:
    multiplicity: int
    bundle: SheafExpr
    sources: List[Tuple[int, int, int]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {'multiplicity': self.multiplicity, 'bundle': str(self.bundle),
                'sources': [{'s': s, 'h': h, 'q': q} for s, h, q in self.sources]}


@dataclass
class MonadTerm:
    n: int
    p: int
    summands: List[Summand] = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return not self.summands

    def rank(self) -> int:
        return sum(s.multiplicity * bundle_rank(s.bundle, self.n) for s in self.summands)

    def chern_character(self) -> ChowClass:
        total = ChowClass.zero(self.n)
        for s in self.summands:
            total = total + bundle_ch(s.bundle, self.n) * s.multiplicity
        return total

    def chi(self) -> int:
        return sum(s.multiplicity * bundle_chi(s.bundle, self.n) for s in self.summands)

    def __str__(self):
        if self.is_zero:
            return '0'
        parts = []
        for s in self.summands:
            parts.append(str(s.bundle) if s.multiplicity == 1 else f"{s.bundle}^⊕{s.multiplicity}")
        return ' ⊕ '.join(parts)

    def to_dict(self) -> Dict[str, Any]:
        return {'p': self.p, 'display': str(self), 'rank': self.rank(),
                'summands': [s.to_dict() for s in self.summands]}


def c_terms(table: CohTable, p: int, n: int) -> MonadTerm:
    """
    全复形第 p 项

    Args:
        table: 扭为 required_twists(n) 的上同调表
        p: 复形次数

    Raises:
        NondegenerateIntervalError: 用到的表项不是精确值
    """
    columns = {tuple(t): k for k, t in enumerate(table.twists)}
    merged: Dict[SheafExpr, Summand] = OrderedDict()
    for s in range(n + 1):
        for h, q in contributions(p, s, n):
            twist_pair = (-h, h - q)
            if twist_pair not in columns:
                raise NondegenerateIntervalError(f"表中缺少 F{twist_pair}")
            cell = table.entry(s, columns[twist_pair])
            if not cell.exact:
                raise NondegenerateIntervalError(f"h^{s}(F{twist_pair}) = {cell} 不是精确值")
            if cell.lo == 0:
                continue
            bundle = omega_bundle(q, -h, q, n)
            summand = merged.setdefault(bundle, Summand(0, bundle))
            summand.multiplicity += cell.lo
            summand.sources.append((s, h, q))
    return MonadTerm(n, p, list(merged.values()))


@dataclass
class Monad:
    """C^{−1} → C⁰ → C¹"""
    n: int
    terms: Dict[int, MonadTerm]
    target: str = ''
    checks: Dict[str, Any] = field(default_factory=dict)

    @property
    def left(self) -> MonadTerm:
        return self.terms[-1]

    @property
    def middle(self) -> MonadTerm:
        return self.terms[0]

    @property
    def right(self) -> MonadTerm:
        return self.terms[1]

    def display(self) -> str:
        return f"{self.left} → {self.middle} → {self.right}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'target': self.target,
            'display': self.display(),
            'terms': {str(p): term.to_dict() for p, term in sorted(self.terms.items())},
            'checks': self.checks,
        }


def consistency_checks(monad: Monad, ch_target: ChowClass) -> Dict[str, Any]:
    """秩、陈特征 C⁰ − C^{−1} − C¹ = ch(E) 与 Σ(−1)^p χ(C^p) = χ(E)"""
    n = monad.n
    ch_monad = monad.middle.chern_character() - monad.left.chern_character() - monad.right.chern_character()
    chi_monad = sum((-1) ** p * term.chi() for p, term in monad.terms.items())
    chi_target = hrr_chi(ch_target, n)
    return {
        'rank': monad.middle.rank() - monad.left.rank() - monad.right.rank(),
        'rank_ok': rank_of(ch_monad) == rank_of(ch_target),
        'chern_character_ok': ch_monad == ch_target,
        'chi': chi_monad,
        'chi_target': to_plain(chi_target),
        'chi_ok': chi_monad == chi_target,
    }


def assemble_monad(table: CohTable, n: int, ch_target: Optional[ChowClass] = None, target: str = '') -> Monad:
    """全复形只在 −1, 0, 1 次非零时给出单子，否则报告障碍"""
    terms = {p: c_terms(table, p, n) for p in range(-n, n + 1)}
    obstructions = []
    for p, term in terms.items():
        if p in (-1, 0, 1) or term.is_zero:
            continue
        for summand in term.summands:
            for s, h, q in summand.sources:
                obstructions.append({'p': p, 's': s, 'twist': [-h, h - q], 'bundle': str(summand.bundle),
                                     'multiplicity': summand.multiplicity})
    if obstructions:
        raise MonadObstructionError(f"C^p 在 p ∉ {{−1,0,1}} 处非零: {len(obstructions)} 项", obstructions)
    monad = Monad(n, {p: terms[p] for p in (-1, 0, 1)}, target)
    if ch_target is not None:
        monad.checks = consistency_checks(monad, ch_target)
    logger.info(f"单子 {target}: {monad.display()}")
    return monad


def monad_for(solver: LESSolver, E: SheafExpr) -> Monad:
    registry = solver.registry
    n = registry.n
    table = solver.table(E, required_twists(n))
    return assemble_monad(table, n, registry.chern_character(E), registry.display(registry.normalize(E)))


def term_list(table: CohTable, n: int) -> List[Dict[str, Any]]:
    """所有 s 的贡献项，用于审计"""
    rows = []
    for p in range(-n, n + 1):
        term = c_terms(table, p, n)
        if not term.is_zero:
            rows.append(term.to_dict())
    return rows

