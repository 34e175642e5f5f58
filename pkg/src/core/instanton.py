"""
瞬子模块
瞬子定义的检验器、奇数维原型族与 P̃⁴ 偶数例子的构造、初等变换，以及除子限制、模空间维数与 Ulrich 检查
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from .beilinson import monad_for
from .chow import (CanonicalData, ChowClass, Polarization, charge, hrr_chi, to_plain,
                   total_chern, twist_character)
from .lessolver import DimInterval, LESSolver, USER
from .projcoh import bott_h
from .sections import KAPPA, Q1, Q2, WP, SubvarietySpec, restrict_matrix
from .sheafdag import (Fact, IdealTwist, Line, Named, Push, SheafExpr, SheafRegistry, Sum, RESTRICTION,
                       USER_AXIOM, elementary_transform, named_parts, serre_construct, twist)
from .stability import (SEMISTABLE_CERTIFIED, VIOLATION, StabilityCertificate, certify,
                        certify_subsheaf)
from ..config.config import config
from ..utils.errors import PreconditionError, ToolkitError
from ..utils.logger import logger

PASS = 'PASS'
FAIL = 'FAIL'
INCONCLUSIVE = 'INCONCLUSIVE'

INSTANTON = 'INSTANTON'
NOT_INSTANTON = 'NOT-INSTANTON'

DIVISOR_H = 'H'
DIVISOR_E = 'E'


# ======================================================================
# 构造
# ======================================================================

@dataclass
class Construction:
    """注册表中的一个待检验层及其构造数据"""
    name: str
    registry: SheafRegistry
    E: SheafExpr
    L: Polarization
    X: Tuple[SubvarietySpec, ...]
    S: Tuple[int, int]
    parent: Optional['Construction'] = None

    @property
    def n(self) -> int:
        return self.registry.n

    def c1(self) -> ChowClass:
        return total_chern(self.registry.chern_character(self.E)).part(1)

    def c2(self) -> ChowClass:
        return self.registry.chern_of(self.E).part(2)

    def charge(self):
        return charge(self.c2(), self.L)

    def solver(self, **kwargs) -> LESSolver:
        return LESSolver(self.registry, **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'n': self.n,
            'sheaf': self.registry.display(self.E),
            'polarization': self.L.to_dict(),
            'X': [Y.label for Y in self.X],
            'S': list(self.S),
            'c1': str(self.c1()),
            'c2': str(self.c2()),
            'charge': to_plain(self.charge()),
            'locally_free': self.registry.is_locally_free(self.E),
            'parent': self.parent.name if self.parent else None,
        }


def _serre_instanton(name: str, n: int, X: Tuple[SubvarietySpec, ...], S: Tuple[int, int],
                     L: Polarization, quote: str) -> Construction:
    registry = SheafRegistry(n)
    F, _ = serre_construct(registry, X, S, 'F', quote=quote)
    E = twist(F, -1, -1)
    registry.alias('E', E)
    registry.alias('I_X', IdealTwist(X, 0, 0))
    construction = Construction(name, registry, E, L, X, S)
    logger.info(f"构造 {name}: c₁ = {construction.c1()}, c₂ = {construction.c2()}, 荷 {to_plain(construction.charge())}")
    return construction


def build_odd(n: int, seed: Optional[int] = None) -> Construction:
    """
    奇数 n ≥ 5：E = F(−1,−1)，0 → O → F → I_{℘∪κ}(2,0) → 0

    Args:
        n: 奇数维数
        seed: None 为固定坐标，否则随机系数
    """
    if n % 2 == 0 or n < 5:
        raise PreconditionError(f"奇数维构造要求 n 为奇数且 n ≥ 5，收到 n={n}")
    X = (SubvarietySpec(WP, n, seed), SubvarietySpec(KAPPA, n, seed))
    return _serre_instanton(f"odd-{n}", n, X, (2, 0), Polarization.default(n),
                            "0→O→F→I_X(2,0)→0")


def build_even4(seed: Optional[int] = None) -> Construction:
    """P̃⁴：E = F(−1,−1)，0 → O → F → I_{Q₁∪Q₂}(2,1) → 0，L = O(1,1)"""
    X = (SubvarietySpec(Q1, 4, seed), SubvarietySpec(Q2, 4, seed))
    return _serre_instanton('even-4', 4, X, (2, 1), Polarization.explicit_twist(4, 1, 1),
                            "0→O→F→I_X(2,1)→0")


def build_elementary(construction: Construction) -> Construction:
    """沿 ℘ 的初等变换 G ⊂ E"""
    wp = next((Y for Y in construction.X if Y.kind == WP), None)
    if wp is None:
        raise PreconditionError(f"{construction.name} 没有 ℘ 型分量")
    G, _ = elementary_transform(construction.registry, construction.E, wp, 'G')
    return Construction(f"{construction.name}-elementary", construction.registry, G, construction.L,
                        construction.X, construction.S, parent=construction)


def even_witness(construction: Construction) -> Dict[str, Any]:
    """h⁰(I_X(2,−1)) 的求值矩阵与核"""
    matrix = restrict_matrix(construction.X, 2, -1)
    return {
        'twist': [2, -1],
        'shape': list(matrix.shape),
        'rank': matrix.rank(),
        'kernel_dim': matrix.kernel_dim(),
        'kernel': matrix.kernel_polynomials(),
    }


# ======================================================================
# 定义检验
# ======================================================================

def definition_items(n: int) -> List[Tuple[str, int, Tuple[int, int]]]:
    """(条目, 次数, F 的扭)"""
    items = [
        ('i', 0, (0, -2)), ('i', 0, (-1, 0)),
        ('ii', 1, (-1, -1)), ('ii', n - 1, (0, 3 - n)),
        ('iii', n, (0, 2 - n)), ('iii', n, (-1, 4 - n)),
    ]
    if n >= 4:
        items += [('iv', 1, (0, -3)), ('iv', n - 1, (-1, 5 - n))]
    return items


@dataclass
class ConditionResult:
    item: str
    i: int
    twist: Tuple[int, int]
    label: str
    interval: DimInterval

    @property
    def verdict(self) -> str:
        if self.interval.exact and self.interval.lo == 0:
            return PASS
        if self.interval.lo is not None and self.interval.lo >= 1:
            return FAIL
        return INCONCLUSIVE

    def to_dict(self) -> Dict[str, Any]:
        return {'item': self.item, 'i': self.i, 'twist': list(self.twist), 'group': self.label,
                'interval': self.interval.to_list(), 'verdict': self.verdict}


@dataclass
class InstantonReport:
    construction: Construction
    conditions: List[ConditionResult] = field(default_factory=list)
    middle_range: Dict[str, Any] = field(default_factory=dict)
    c1_check: Dict[str, Any] = field(default_factory=dict)
    stability: Optional[StabilityCertificate] = None
    monad: Optional[Dict[str, Any]] = None
    notes: List[str] = field(default_factory=list)

    @property
    def cohomological_verdict(self) -> str:
        verdicts = [c.verdict for c in self.conditions]
        if self.middle_range:
            verdicts.append(self.middle_range.get('verdict', INCONCLUSIVE))
        if FAIL in verdicts:
            return FAIL
        if INCONCLUSIVE in verdicts:
            return INCONCLUSIVE
        return PASS

    @property
    def verdict(self) -> str:
        cohomology = self.cohomological_verdict
        stability = self.stability.verdict if self.stability else None
        if cohomology == FAIL or stability == VIOLATION or not self.c1_check.get('ok', False):
            return NOT_INSTANTON
        if cohomology == PASS and stability == SEMISTABLE_CERTIFIED:
            return INSTANTON
        return INCONCLUSIVE

    def to_dict(self) -> Dict[str, Any]:
        return {
            'construction': self.construction.to_dict(),
            'verdict': self.verdict,
            'cohomological_verdict': self.cohomological_verdict,
            'conditions': [c.to_dict() for c in self.conditions],
            'middle_range': self.middle_range,
            'c1_check': self.c1_check,
            'stability': self.stability.to_dict() if self.stability else None,
            'monad': self.monad,
            'notes': list(self.notes),
        }


def uniform_vanishing(registry: SheafRegistry, expr: SheafExpr, _stack: Tuple[str, ...] = ()) -> Set[int]:
    """
    对所有线丛扭都为零的上同调次数

    线丛与理想层为 [2, n−2]，余维 2 子簇推出为 [1, n−3] ∪ [n−1, n]，
    命名层沿其定义序列的长正合列传递。
    """
    n = registry.n
    expr = registry.normalize(expr)
    middle = set(range(2, n - 1))
    if isinstance(expr, Line) or isinstance(expr, IdealTwist):
        return middle
    if isinstance(expr, Push):
        return set(range(1, n - 2)) | {n - 1, n}
    if isinstance(expr, Sum):
        result = set(range(n + 1))
        for part in expr.parts:
            result &= uniform_vanishing(registry, part, _stack)
        return result
    parts = named_parts(expr)
    if parts is None:
        return set()
    name = parts[0].name
    info = registry.info(name)
    if name in _stack or info.record_id is None:
        return set()
    record = registry.record(info.record_id)
    stack = _stack + (name,)
    sub, mid, quot = (uniform_vanishing(registry, t, stack) if named_parts(t) is None or named_parts(t)[0].name != name
                      else set() for t in record.terms)
    if info.position == 'mid':
        return sub & quot
    if info.position == 'sub':
        return {i for i in mid if i - 1 in quot or i == 0}
    return {i for i in mid if i + 1 in sub or i == n}


class InstantonChecker:
    """对一个构造逐项检验瞬子定义"""

    def __init__(self, construction: Construction, solver: Optional[LESSolver] = None):
        self.construction = construction
        self.registry = construction.registry
        self.solver = solver or construction.solver()

    def conditions(self) -> List[ConditionResult]:
        n = self.registry.n
        items = definition_items(n)
        twists = list(dict.fromkeys(t for _, _, t in items))
        table = self.solver.table(self.construction.E, twists)
        results = []
        for item, i, t in items:
            k = twists.index(t)
            results.append(ConditionResult(item, i, t, f"h^{i}({table.columns[k]})", table.entry(i, k)))
        return results

    def middle_range(self, grid: Optional[int] = None) -> Dict[str, Any]:
        """2 ≤ i ≤ n−2 的消失：结构论证加扭网格抽样"""
        n = self.registry.n
        middle = set(range(2, n - 1))
        if not middle:
            return {'degrees': [], 'verdict': PASS, 'symbolic': True, 'sampled': 0, 'failures': []}
        vanishing = uniform_vanishing(self.registry, self.construction.E)
        symbolic = middle <= vanishing
        grid = grid if grid is not None else (config.get('instanton.middle_grid') or n + 2)
        failures, inconclusive, sampled = [], [], 0
        for a in range(-grid, grid + 1):
            for b in range(-grid, grid + 1):
                target = twist(self.construction.E, a, b)
                system = self.solver.system([target])
                keys = [('h', self.registry.normalize(target), i) for i in sorted(middle)]
                system.solve(keys)
                sampled += 1
                for key in keys:
                    interval = system.get(key)
                    if interval.exact and interval.lo == 0:
                        continue
                    entry = {'twist': [a, b], 'i': key[2], 'interval': interval.to_list()}
                    (failures if interval.lo and interval.lo >= 1 else inconclusive).append(entry)
        if failures:
            verdict = FAIL
        elif symbolic or not inconclusive:
            verdict = PASS
        else:
            verdict = INCONCLUSIVE
        return {'degrees': sorted(middle), 'verdict': verdict, 'symbolic': symbolic, 'grid': grid,
                'sampled': sampled, 'failures': failures, 'inconclusive': inconclusive}

    def c1_check(self) -> Dict[str, Any]:
        c = self.construction
        det = self.registry.det(c.E)
        target = CanonicalData(c.n).det_target(c.L)
        return {'c1': list(det), 'target': list(target), 'ok': tuple(det) == tuple(target)}

    def stability(self) -> StabilityCertificate:
        c = self.construction
        if c.parent is not None:
            parent = certify(self.registry, c.parent.E, c.L, self.solver)
            return certify_subsheaf(self.registry, c.E, parent, c.parent.E)
        return certify(self.registry, c.E, c.L, self.solver)

    def check(self, with_monad: bool = True, grid: Optional[int] = None) -> InstantonReport:
        report = InstantonReport(self.construction)
        report.conditions = self.conditions()
        report.middle_range = self.middle_range(grid)
        report.c1_check = self.c1_check()
        report.stability = self.stability()
        if with_monad and report.cohomological_verdict == PASS:
            try:
                report.monad = monad_for(self.solver, self.construction.E).to_dict()
            except ToolkitError as e:
                report.notes.append(f"单子未组装: {e}")
        logger.info(f"{self.construction.name}: {report.verdict}")
        return report


def check(construction: Construction, with_monad: bool = True, grid: Optional[int] = None) -> InstantonReport:
    return InstantonChecker(construction).check(with_monad, grid)


# ======================================================================
# 除子限制
# ======================================================================

_DIVISOR_SHIFT = {DIVISOR_H: (-1, 0), DIVISOR_E: (-1, 1)}


def _divisor_twist(divisor: str, k: int) -> Tuple[int, int]:
    """O_D(k) 的一个提升：H 上 O(k,0)，例外除子上 O(0,k)"""
    return (k, 0) if divisor == DIVISOR_H else (0, k)


def split_degrees(divisor: str, k: int) -> List[int]:
    """分裂模型：H 上 O(k−1)², 例外除子上 O(k) ⊕ O(k−2)"""
    return [k - 1, k - 1] if divisor == DIVISOR_H else [k, k - 2]


def split_ch(divisor: str, k: int, n: int) -> ChowClass:
    total = ChowClass.zero(n)
    for m in split_degrees(divisor, k):
        lift = _divisor_twist(divisor, m)
        shift = _DIVISOR_SHIFT[divisor]
        total = total + twist_character(*lift, n) - twist_character(lift[0] + shift[0], lift[1] + shift[1], n)
    return total


def restriction_sheaf(construction: Construction, divisor: str) -> Named:
    """登记 0 → E(−D) → E → E|_D → 0"""
    if divisor not in _DIVISOR_SHIFT:
        raise PreconditionError(f"未知除子 {divisor}，应为 H 或 E")
    registry = construction.registry
    name = f"E|{'H' if divisor == DIVISOR_H else 'Ediv'}"
    if not registry.has(name):
        restricted = registry.define(name, rank=0, locally_free=False, torsion_free=False,
                                     description=f"{registry.display(construction.E)} 在除子 {divisor} 上的限制")
        shift = _DIVISOR_SHIFT[divisor]
        registry.register(twist(construction.E, *shift), construction.E, restricted, RESTRICTION,
                          quote=f"0 → E(−{divisor}) → E → E|_{divisor} → 0", defines=name)
    return Named(name)


def restrict_to_divisor(construction: Construction, divisor: str, ks: Sequence[int] = tuple(range(-6, 7)),
                        solver: Optional[LESSolver] = None) -> Dict[str, Any]:
    """
    h^•(E|_D(k)) 的表与分裂模型的比较

    Returns:
        表、逐 k 的 χ 与陈特征比较、精确处的 h⁰/h^{n−1} 比较、h² 消失列表；
        ok 要求每个 k 的 χ、精确处的 h⁰/h^{n−1} 与 h² = 0 全部成立，否则列入 failures
    """
    n = construction.n
    restricted = restriction_sheaf(construction, divisor)
    registry = construction.registry
    solver = solver or construction.solver()
    twists = [_divisor_twist(divisor, k) for k in ks]
    table = solver.table(restricted, twists)

    comparisons = []
    for index, k in enumerate(ks):
        ch = registry.chern_character(twist(restricted, *twists[index]))
        model = [sum(bott_h(n - 1, i, 0, m) for m in split_degrees(divisor, k)) for i in range(n + 1)]
        column = table.column(index)
        chi_model = sum((-1) ** i * v for i, v in enumerate(model))
        exact_matches = all(column[i].contains(model[i]) for i in (0, n - 1))
        comparisons.append({
            'k': k,
            'h': [cell.to_list() for cell in column],
            'model': model,
            'chi': to_plain(hrr_chi(ch, n)),
            'chi_model': chi_model,
            'chi_ok': hrr_chi(ch, n) == chi_model,
            'ch_ok': ch == split_ch(divisor, k, n),
            'h0_top_ok': exact_matches,
        })
    h2 = [{'k': k, 'h2': table.entry(2, index).to_list()} for index, k in enumerate(ks)]
    failures = []
    for index, comparison in enumerate(comparisons):
        reasons = []
        if not comparison['chi_ok']:
            reasons.append('chi')
        if not comparison['h0_top_ok']:
            reasons.append('h0/top')
        if h2[index]['h2'] != [0, 0]:
            reasons.append('h2')
        if reasons:
            failures.append({'k': comparison['k'], 'reasons': reasons})
    if failures:
        logger.warning(f"{registry.display(restricted)}: {len(failures)} 个扭未通过 {[f['k'] for f in failures]}")
    return {
        'divisor': divisor,
        'sheaf': registry.display(restricted),
        'split_model': 'O(-1)^2' if divisor == DIVISOR_H else 'O + O(-2)',
        'table': table.to_dict(),
        'comparisons': comparisons,
        'h2_vanishing': all(entry['h2'] == [0, 0] for entry in h2),
        'h2': h2,
        'failures': failures,
        'inexact': [k for index, k in enumerate(ks) if not all(cell.exact for cell in table.column(index))],
        'ok': not failures,
    }


# ======================================================================
# 模空间维数
# ======================================================================

def _comparison(quantity: str, engine: DimInterval, claimed: Any) -> Dict[str, Any]:
    if isinstance(claimed, (list, tuple, set)):
        values = sorted(claimed)
        agrees = engine.lo is not None and engine.hi is not None and all(v in values for v in range(engine.lo, engine.hi + 1))
    else:
        values = claimed
        agrees = engine.exact and engine.lo == claimed
    return {'quantity': quantity, 'engine': engine.to_list(), 'exact': engine.exact, 'claimed': values,
            'agrees': agrees}


def register_moduli_axioms(construction: Construction) -> Dict[str, Named]:
    """
    E⊗E^∨ 的三条链，作为用户公理登记

    0 → E(−1,1) → E⊗E^∨ → E⊗I_X(1,1) → 0
    0 → I_X → E⊗I_X(1,1) → I_X²(2,0) → 0
    0 → I_X²(2,0) → I_X(2,0) → O_κ(−1) ⊕ O_κ(1) ⊕ O_℘(1)^⊕2 → 0
    """
    registry = construction.registry
    wp = next(Y for Y in construction.X if Y.kind == WP)
    kappa = next(Y for Y in construction.X if Y.kind == KAPPA)
    X = construction.X
    if registry.has('EE'):
        return {name: Named(name) for name in ('EE', 'EI', 'I2')}
    assumption = (f"{USER_AXIOM}: Tor vanishing for the tensor products",)
    I2 = registry.define('I2', rank=1, locally_free=False, description='I_X²(2,0)')
    EI = registry.define('EI', rank=2, locally_free=False, description='E ⊗ I_X(1,1)')
    EE = registry.define('EE', rank=4, locally_free=True, description='E ⊗ E^∨')
    normal = Sum((Push(kappa, -1), Push(kappa, 1), Push(wp, 1), Push(wp, 1)))
    registry.register(I2, IdealTwist(X, 2, 0), normal, USER_AXIOM,
                      quote="(O_{P³}(−1)⊕O_{P³}(1)) ⊕ O_{P³}(1)^{⊕2}", assumptions=assumption, defines='I2')
    registry.register(IdealTwist(X, 0, 0), EI, I2, USER_AXIOM,
                      quote="0→I_X→E⊗I_X(1,1)→I²_X(2,0)→0", assumptions=assumption, defines='EI')
    registry.register(twist(construction.E, -1, 1), EE, EI, USER_AXIOM,
                      quote="twist this sequence with E^∨≃E(0,2)", assumptions=assumption, defines='EE')
    registry.add_fact(Fact(EE, 0, 1, None, USER, 'identity endomorphism'))
    return {'EE': EE, 'EI': EI, 'I2': I2}


def moduli_dimension(construction: Construction, solver: Optional[LESSolver] = None) -> Dict[str, Any]:
    """h¹(E⊗E^∨) 的区间与推导链中每一项的比较"""
    if construction.n != 5:
        raise PreconditionError(f"模空间维数的推导链只对 n=5 登记，收到 n={construction.n}")
    named = register_moduli_axioms(construction)
    registry = construction.registry
    solver = solver or construction.solver()
    EE, EI, I2 = named['EE'], named['EI'], named['I2']
    X = construction.X
    normal = registry.record(registry.info('I2').record_id).quot

    higher = {str(i): solver.resolve_h(EE, i).interval.to_list() for i in range(2, 6)}
    delta_ix = solver.delta01(IdealTwist(X, 2, 0))
    normal_h0 = solver.resolve_h(normal, 0)
    delta_i2 = solver.delta01(I2)
    delta_ei = solver.delta01(EI)
    delta_ee = solver.delta01(EE)
    h1 = solver.resolve_h(EE, 1)

    # 单子核 K 的界：h⁰(E⊗K(0,2)) ≤ h⁰(E(−1,2)) + 6·h⁰(E(0,1))
    kernel_bound = solver.bound_linear([(1, twist(construction.E, -1, 2), 0), (6, twist(construction.E, 0, 1), 0)])

    comparisons = [
        _comparison('delta01(I_X(2,0))', delta_ix.interval, 10),
        _comparison('h0(normal term)', normal_h0.interval, 12),
        _comparison('delta01(I_X^2(2,0))', delta_i2.interval, -4),
        _comparison('h1(E⊗E^∨)', h1.interval, [5, 6]),
        {'quantity': 'h0(E⊗K(0,2)) bound', 'engine': kernel_bound.interval.to_list(), 'claimed': '<= 1',
         'agrees': kernel_bound.interval.hi is not None and kernel_bound.interval.hi <= 1},
    ]
    audit = [entry for entry in registry.whitney_audit()
             if registry.record(entry['id']).provenance == USER_AXIOM]
    return {
        'higher_vanishing': higher,
        'delta01': {
            'I_X(2,0)': delta_ix.to_dict(),
            'I2': delta_i2.to_dict(),
            'EI': delta_ei.to_dict(),
            'EE': delta_ee.to_dict(),
        },
        'normal_h0': normal_h0.to_dict(),
        'h1': h1.to_dict(),
        'kernel_bound': kernel_bound.to_dict(),
        'comparisons': comparisons,
        'whitney_audit': audit,
        'notes': ['组件记为 c₂ = ξ²；推导末行写作 −ξ²+2α²，两者不一致'],
    }


# ======================================================================
# Ulrich 检查
# ======================================================================

def ulrich_check(construction: Construction, solver: Optional[LESSolver] = None) -> Dict[str, Any]:
    """
    F = E(1,1)，L = O(1,1)：h^i(F⊗L^{−i}), i > 0 与 h^j(F⊗L^{−(j+1)}), j < n
    """
    n = construction.n
    if construction.L.twist != (1, 1):
        raise PreconditionError(f"Ulrich 检查使用 L = O(1,1)，当前为 {construction.L.twist}")
    solver = solver or construction.solver()
    F = twist(construction.E, 1, 1)
    first = [(i, (-i, -i)) for i in range(1, n + 1)]
    second = [(j, (-j - 1, -j - 1)) for j in range(n)]
    twists = list(dict.fromkeys(t for _, t in first + second))
    table = solver.table(F, twists)

    def entry(i: int, t: Tuple[int, int]) -> Dict[str, Any]:
        cell = table.entry(i, twists.index(t))
        return {'i': i, 'group': f"h^{i}({table.columns[twists.index(t)]})", 'interval': cell.to_list(),
                'exact': cell.exact}

    first_entries = [entry(i, t) for i, t in first]
    second_entries = [entry(j, t) for j, t in second]
    failures = [e for e in first_entries + second_entries if e['interval'] != [0, 0]]
    claimed = table.entry(n, twists.index((-n, -n)))
    return {
        'F': registry_display(construction, F),
        'first_family': first_entries,
        'second_family': second_entries,
        'failures': failures,
        'ulrich': not failures,
        'comparison': _comparison(f"h^{n}(F(-{n},-{n}))", claimed, 54),
    }


def registry_display(construction: Construction, expr: SheafExpr) -> str:
    return construction.registry.display(construction.registry.normalize(expr))
