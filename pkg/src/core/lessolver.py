"""
长正合列求解模块
对层表达式的上同调维数做区间约束传播：登记的短正合列、公式基例、截面预言机与注入事实
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, lpmax, lpmin

from .projcoh import h_line, h_omega
from .sections import h0_ideal
from .sheafdag import (IdealTwist, Line, Omega, Push, SESInstance, SheafExpr, SheafRegistry, Sum,
                       twist)
from ..config.config import config
from ..utils.errors import InfeasibleConstraintsError, SolverLimitError
from ..utils.logger import get_logger

logger = get_logger('solver')

FORMULA = 'FORMULA'
ORACLE = 'ORACLE'
DUALITY = 'DUALITY'
LES = 'LES'
USER = 'USER'


# ======================================================================
# 区间
# ======================================================================

@dataclass(frozen=True)
class DimInterval:
    """整数区间 [lo, hi]，None 表示该侧无界"""
    lo: Optional[int] = 0
    hi: Optional[int] = None

    @classmethod
    def exact_value(cls, value: int) -> 'DimInterval':
        return cls(value, value)

    @property
    def exact(self) -> bool:
        return self.lo is not None and self.lo == self.hi

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError(f"区间 {self} 不是精确值")
        return self.lo

    @property
    def empty(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo > self.hi

    def intersect(self, other: 'DimInterval') -> 'DimInterval':
        lo = _max_lo(self.lo, other.lo)
        hi = _min_hi(self.hi, other.hi)
        return DimInterval(lo, hi)

    def __add__(self, other: 'DimInterval') -> 'DimInterval':
        lo = None if self.lo is None or other.lo is None else self.lo + other.lo
        hi = None if self.hi is None or other.hi is None else self.hi + other.hi
        return DimInterval(lo, hi)

    def __sub__(self, other: 'DimInterval') -> 'DimInterval':
        lo = None if self.lo is None or other.hi is None else self.lo - other.hi
        hi = None if self.hi is None or other.lo is None else self.hi - other.lo
        return DimInterval(lo, hi)

    def scale(self, c: int) -> 'DimInterval':
        if c >= 0:
            return DimInterval(None if self.lo is None else c * self.lo, None if self.hi is None else c * self.hi)
        return DimInterval(None if self.hi is None else c * self.hi, None if self.lo is None else c * self.lo)

    def nonnegative(self) -> 'DimInterval':
        return self.intersect(DimInterval(0, None))

    def contains(self, value: int) -> bool:
        return (self.lo is None or self.lo <= value) and (self.hi is None or value <= self.hi)

    def to_list(self) -> List[Optional[int]]:
        return [self.lo, self.hi]

    def to_dict(self) -> Dict[str, Any]:
        data = {'interval': self.to_list()}
        if self.exact:
            data['exact'] = True
        return data

    def __str__(self):
        if self.exact:
            return str(self.lo)
        lo = '-∞' if self.lo is None else self.lo
        hi = '∞' if self.hi is None else self.hi
        return f"[{lo},{hi}]"


def _max_lo(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _min_hi(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


UNKNOWN = DimInterval(0, None)


# ======================================================================
# 轨迹
# ======================================================================

@dataclass(frozen=True)
class TraceStep:
    key: str
    lo: Optional[int]
    hi: Optional[int]
    constraint: str
    provenance: str

    @property
    def interval(self) -> DimInterval:
        return DimInterval(self.lo, self.hi)

    def to_dict(self) -> Dict[str, Any]:
        return {'key': self.key, 'interval': [self.lo, self.hi], 'constraint': self.constraint,
                'provenance': self.provenance}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TraceStep':
        lo, hi = data['interval']
        return cls(data['key'], lo, hi, data['constraint'], data['provenance'])


def replay_trace(trace: Iterable[TraceStep]) -> Dict[str, DimInterval]:
    """按顺序求交，重放每个键的最终区间"""
    result: Dict[str, DimInterval] = {}
    for step in trace:
        current = result.get(step.key, UNKNOWN)
        result[step.key] = current.intersect(step.interval)
        if result[step.key].empty:
            raise InfeasibleConstraintsError(f"重放轨迹时 {step.key} 为空区间", trace=[step])
    return result


@dataclass
class Resolution:
    """单个查询的结果与完整推导轨迹"""
    key: str
    interval: DimInterval
    trace: List[TraceStep] = field(default_factory=list)
    truncated: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = {'key': self.key}
        data.update(self.interval.to_dict())
        data['trace'] = [step.to_dict() for step in self.trace]
        if self.truncated:
            data['truncated'] = True
        return data


@dataclass
class CohTable:
    """(n+1) × 扭 的上同调区间表"""
    n: int
    columns: List[str]
    twists: List[Tuple[int, int]]
    rows: List[List[DimInterval]]
    trace: List[TraceStep] = field(default_factory=list)
    truncated: bool = False

    def entry(self, i: int, k: int) -> DimInterval:
        return self.rows[i][k]

    def column(self, k: int) -> List[DimInterval]:
        return [row[k] for row in self.rows]

    @property
    def exact(self) -> bool:
        return all(cell.exact for row in self.rows for cell in row)

    def nonzero(self) -> List[Tuple[int, str, DimInterval]]:
        return [(i, self.columns[k], cell) for i, row in enumerate(self.rows)
                for k, cell in enumerate(row) if not (cell.exact and cell.lo == 0)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'columns': list(self.columns),
            'twists': [list(t) for t in self.twists],
            'rows': [[cell.to_list() for cell in row] for row in self.rows],
            'exact': self.exact,
            'trace': [step.to_dict() for step in self.trace],
            'truncated': self.truncated,
        }


# ======================================================================
# 约束
# ======================================================================

HKey = Tuple[str, SheafExpr, int]
RKey = Tuple[str, str, Tuple[int, int], int]


class _Constraint:
    provenance = LES

    def keys(self) -> List[Hashable]:
        raise NotImplementedError

    def equations(self) -> List[Dict[Hashable, int]]:
        """线性等式 Σ c·x = 0，以系数字典表示"""
        raise NotImplementedError

    def apply(self, system: 'LESSystem') -> bool:
        raise NotImplementedError


class _ChainConstraint(_Constraint):
    """
    短正合列诱导的长正合列

    位置 j 的维数 d_j = r_j + r_{j+1}，r_j 为进入该位置的映射的秩，r_0 = r_L = 0
    """

    def __init__(self, instance: SESInstance, n: int, description: str):
        self.instance = instance
        self.description = description
        self.groups: List[HKey] = [('h', term, i) for i in range(n + 1) for term in instance.terms]
        self.ranks: List[RKey] = [('r', instance.record_id, instance.shift, j) for j in range(len(self.groups) + 1)]
        self.provenance = LES

    def keys(self):
        return self.groups + self.ranks

    def equations(self):
        return [{self.groups[j]: 1, self.ranks[j]: -1, self.ranks[j + 1]: -1} for j in range(len(self.groups))]

    def init(self, system: 'LESSystem'):
        system.narrow(self.ranks[0], DimInterval(0, 0), self.description, LES)
        system.narrow(self.ranks[-1], DimInterval(0, 0), self.description, LES)

    def _step(self, system: 'LESSystem', j: int) -> bool:
        d, a, b = self.groups[j], self.ranks[j], self.ranks[j + 1]
        changed = system.narrow(d, system.get(a) + system.get(b), self.description, LES)
        changed |= system.narrow(a, (system.get(d) - system.get(b)).nonnegative(), self.description, LES)
        changed |= system.narrow(b, (system.get(d) - system.get(a)).nonnegative(), self.description, LES)
        return changed

    def apply(self, system: 'LESSystem') -> bool:
        changed_any = False
        length = len(self.groups)
        while True:
            changed = False
            for j in range(length):
                changed |= self._step(system, j)
            for j in reversed(range(length)):
                changed |= self._step(system, j)
            if not changed:
                return changed_any
            system.tick()
            changed_any = True


class _SumConstraint(_Constraint):
    def __init__(self, total: HKey, parts: List[HKey]):
        self.total = total
        self.parts = parts

    def keys(self):
        return [self.total] + self.parts

    def equations(self):
        equation = {self.total: 1}
        for part in self.parts:
            equation[part] = equation.get(part, 0) - 1
        return [equation]

    def apply(self, system: 'LESSystem') -> bool:
        description = f"直和 h^{self.total[2]}"
        total = DimInterval(0, 0)
        for part in self.parts:
            total = total + system.get(part)
        changed = system.narrow(self.total, total, description, LES)
        for k, part in enumerate(self.parts):
            others = DimInterval(0, 0)
            for m, other in enumerate(self.parts):
                if m != k:
                    others = others + system.get(other)
            changed |= system.narrow(part, (system.get(self.total) - others).nonnegative(), description, LES)
        return changed


class _EqualConstraint(_Constraint):
    def __init__(self, a: HKey, b: HKey, description: str, provenance: str = DUALITY):
        self.a = a
        self.b = b
        self.description = description
        self.provenance = provenance

    def keys(self):
        return [self.a, self.b]

    def equations(self):
        return [{self.a: 1, self.b: -1}]

    def apply(self, system: 'LESSystem') -> bool:
        changed = system.narrow(self.a, system.get(self.b), self.description, self.provenance)
        changed |= system.narrow(self.b, system.get(self.a), self.description, self.provenance)
        return changed


# ======================================================================
# 约束系统
# ======================================================================

def is_base(expr: SheafExpr) -> bool:
    if isinstance(expr, (Line, Omega, Push)):
        return True
    if isinstance(expr, Sum):
        return all(is_base(part) for part in expr.parts)
    return False


def formula_h(expr: SheafExpr, i: int, n: int) -> int:
    """基例上同调：线丛、扭微分、子簇推出及其直和"""
    if isinstance(expr, Line):
        return h_line(i, expr.p, expr.q, n)
    if isinstance(expr, Omega):
        return h_omega(i, expr.l, expr.p, expr.q, n)
    if isinstance(expr, Push):
        return expr.Y.cohomology(i, expr.m)
    return sum(formula_h(part, i, n) for part in expr.parts)


class LESSystem:
    """
    一次查询的约束网络

    从种子表达式出发按注册表逐层展开，每层完整展开后传播；查询全部精确即停止。
    节点数达到上限时不再加深，记录截断并写警告日志。
    """

    def __init__(self, solver: 'LESSolver', seeds: Sequence[SheafExpr]):
        self.solver = solver
        self.registry = solver.registry
        self.n = solver.registry.n
        self.nodes: Dict[SheafExpr, int] = {}
        self.constraints: List[_Constraint] = []
        self.intervals: Dict[Hashable, DimInterval] = {}
        self.trace: List[TraceStep] = []
        self.level = 0
        self.truncated = False
        self._instances = set()
        self._iterations = 0
        self._queue: List[Tuple[SheafExpr, int]] = []
        for seed in seeds:
            self._add_node(self.registry.normalize(seed), 0)

    # ------------------------------------------------------------------
    # 区间读写
    # ------------------------------------------------------------------
    def label(self, key: Hashable) -> str:
        if key[0] == 'h':
            return f"h^{key[2]}({self.registry.display(key[1])})"
        _, rid, shift, j = key
        return f"r[{rid}{shift}]_{j}"

    def get(self, key: Hashable) -> DimInterval:
        return self.intervals.get(key, UNKNOWN)

    def narrow(self, key: Hashable, bound: DimInterval, constraint: str, provenance: str) -> bool:
        current = self.get(key)
        new = current.intersect(bound)
        if new == current:
            return False
        step = TraceStep(self.label(key), new.lo, new.hi, constraint, provenance)
        if new.empty:
            raise InfeasibleConstraintsError(
                f"{self.label(key)} 的区间为空 ({current} ∩ {bound})，公理不一致", trace=self.trace + [step])
        self.intervals[key] = new
        self.trace.append(step)
        return True

    def h(self, expr: SheafExpr, i: int) -> DimInterval:
        return self.get(('h', self.registry.normalize(expr), i))

    def tick(self):
        self._iterations += 1
        if self._iterations > self.solver.max_iterations:
            raise SolverLimitError(f"约束传播超过 {self.solver.max_iterations} 次迭代")

    # ------------------------------------------------------------------
    # 展开
    # ------------------------------------------------------------------
    def _add_node(self, expr: SheafExpr, depth: int):
        """加入节点并写入局部信息（闭式公式、直和、注入事实），结构展开留给下一层"""
        if expr in self.nodes:
            return
        self.nodes[expr] = depth
        n = self.n
        display = self.registry.display(expr)
        if is_base(expr):
            for i in range(n + 1):
                self.narrow(('h', expr, i), DimInterval.exact_value(formula_h(expr, i, n)),
                            f"闭式公式 {display}", FORMULA)
            return
        if isinstance(expr, Sum):
            for part in expr.parts:
                self._add_node(part, depth)
            for i in range(n + 1):
                self.constraints.append(_SumConstraint(('h', expr, i), [('h', part, i) for part in expr.parts]))
            return
        for fact in self.registry.facts:
            if fact.expr == expr:
                self.narrow(('h', expr, fact.i), DimInterval(fact.lo, fact.hi),
                            fact.quote or f"注入事实 h^{fact.i}({display})", fact.provenance)
        if depth < self.solver.max_depth:
            self._queue.append((expr, depth))

    def grow(self) -> bool:
        """
        展开一整层

        Returns:
            是否展开了新的一层；队列为空或已截断时为 False
        """
        if not self._queue or self.truncated:
            return False
        if len(self.nodes) >= self.solver.max_nodes:
            self.truncated = True
            logger.warning(f"约束网络在第 {self.level} 层达到 {len(self.nodes)} 个节点"
                           f"（上限 {self.solver.max_nodes}），停止加深")
            # 最后一层只登记长正合列，不再排队
            frontier, self._queue = self._queue, []
            for expr, depth in frontier:
                self._expand(expr, depth)
            self._queue = []
            return False
        frontier, self._queue = self._queue, []
        for expr, depth in frontier:
            self._expand(expr, depth)
        self.level += 1
        logger.debug(f"约束网络第 {self.level} 层: {len(self.nodes)} 个节点, {len(self.constraints)} 条约束")
        return True

    def _expand(self, expr: SheafExpr, depth: int):
        n = self.n
        display = self.registry.display(expr)
        for instance, _ in self.registry.instances_touching(expr):
            key = (instance.record_id, instance.shift)
            if key in self._instances:
                continue
            self._instances.add(key)
            for term in instance.terms:
                self._add_node(term, depth + 1)
            names = ' → '.join(self.registry.display(t) for t in instance.terms)
            chain = _ChainConstraint(instance, n, f"LES {instance.record_id}{instance.shift}: 0 → {names} → 0")
            chain.init(self)
            self.constraints.append(chain)

        partner = self.registry.serre_dual_partner(expr)
        if partner is not None and partner != expr:
            self._add_node(partner, depth + 1)
            description = f"Serre 对偶 {display} ↔ {self.registry.display(partner)}"
            for i in range(n + 1):
                self.constraints.append(_EqualConstraint(('h', expr, i), ('h', partner, n - i), description))

    # ------------------------------------------------------------------
    # 传播
    # ------------------------------------------------------------------
    def propagate(self):
        """不动点传播；迭代计数按每次传播单独计算"""
        self._iterations = 0
        changed = True
        while changed:
            changed = False
            for constraint in self.constraints:
                changed |= constraint.apply(self)
            self.tick()

    def oracle_stage(self) -> int:
        """对仍非精确的理想层 h⁰ 查询截面预言机"""
        added = 0
        for expr in list(self.nodes):
            if not isinstance(expr, IdealTwist) or self.get(('h', expr, 0)).exact:
                continue
            sections = h_line(0, expr.p, expr.q, self.n)
            if sections > self.solver.oracle_max_sections:
                logger.debug(f"跳过预言机 {self.registry.display(expr)}: {sections} 个截面")
                continue
            value = h0_ideal(expr.X, expr.p, expr.q)
            self.narrow(('h', expr, 0), DimInterval.exact_value(value),
                        f"截面预言机 h⁰({self.registry.display(expr)})", ORACLE)
            added += 1
        return added

    def linear_enclosure(self, functional: Dict[Hashable, int]) -> DimInterval:
        return self.linear_enclosures([functional])[0]

    def linear_enclosures(self, functionals: Sequence[Dict[Hashable, int]]) -> List[DimInterval]:
        """
        线性泛函在全部约束下的有理线性规划包络

        精确量代入为常数；只保留与泛函经等式相连的未知量。linsolve 把等式化为自由参数，
        每个未知量的当前区间成为参数上的不等式，lpmin/lpmax 给出上下确界，再取整。
        """
        symbols: Dict[Hashable, sympy.Symbol] = {}

        def term(key):
            interval = self.get(key)
            if interval.exact:
                return sympy.Integer(interval.lo)
            if key not in symbols:
                symbols[key] = sympy.Symbol(f"v{len(symbols)}")
            return symbols[key]

        def combine(equation: Dict[Hashable, int]) -> sympy.Expr:
            return sympy.expand(sum((c * term(key) for key, c in equation.items()), sympy.Integer(0)))

        equations = []
        for constraint in self.constraints:
            for equation in constraint.equations():
                expression = combine(equation)
                if expression.is_number:
                    if expression != 0:
                        raise InfeasibleConstraintsError("精确值违反线性等式，公理不一致", trace=self.trace)
                    continue
                equations.append(expression)
        targets = [combine(functional) for functional in functionals]
        roots = set().union(*(target.free_symbols for target in targets))
        if not roots:
            return [DimInterval.exact_value(int(target)) for target in targets]

        equations, component = _component(equations, roots)
        ordered = sorted(component, key=str)
        solution = sympy.linsolve(equations, ordered) if equations else sympy.FiniteSet(tuple(ordered))
        if solution == sympy.S.EmptySet:
            raise InfeasibleConstraintsError("线性消元无解，公理不一致", trace=self.trace)
        substitution = dict(zip(ordered, next(iter(solution))))

        by_symbol = {sym: key for key, sym in symbols.items()}
        bounds = []
        for sym in ordered:
            expr = sympy.expand(substitution[sym])
            interval = self.get(by_symbol[sym])
            for relation in (None if interval.lo is None else sympy.Ge(expr, interval.lo),
                             None if interval.hi is None else sympy.Le(expr, interval.hi)):
                if relation is None or relation is sympy.true:
                    continue
                if relation is sympy.false:
                    raise InfeasibleConstraintsError(f"{self.label(by_symbol[sym])} 越界，公理不一致", trace=self.trace)
                bounds.append(relation)

        return [self._optimize(sympy.expand(target.subs(substitution, simultaneous=True)), bounds)
                for target in targets]

    def _optimize(self, objective: sympy.Expr, bounds: List[sympy.Rel]) -> DimInterval:
        if objective.is_number:
            return DimInterval.exact_value(int(objective))
        try:
            lo = int(sympy.ceiling(lpmin(objective, bounds)[0]))
        except UnboundedLPError:
            lo = None
        except InfeasibleLPError:
            raise InfeasibleConstraintsError("线性规划不可行，公理不一致", trace=self.trace)
        try:
            hi = int(sympy.floor(lpmax(objective, bounds)[0]))
        except UnboundedLPError:
            hi = None
        return DimInterval(lo, hi)

    def _settled(self, queries: Sequence[Hashable]) -> bool:
        return all(self.get(key).exact for key in queries)

    def solve(self, queries: Sequence[Hashable]):
        """逐层展开并传播；查询未精确时启用预言机，展开结束后再做线性规划"""
        while True:
            self.propagate()
            if self._settled(queries):
                return
            if self.solver.use_oracle and self.oracle_stage():
                self.propagate()
                if self._settled(queries):
                    return
            if not self.grow():
                break
        if self.truncated:
            self.propagate()
        if self.solver.linear_elimination:
            pending = [key for key in dict.fromkeys(queries) if not self.get(key).exact]
            enclosures = self.linear_enclosures([{key: 1} for key in pending]) if pending else []
            tightened = False
            for key, enclosure in zip(pending, enclosures):
                tightened |= self.narrow(key, enclosure.nonnegative(), f"线性规划 {self.label(key)}", LES)
            if tightened:
                self.propagate()


def _component(equations: List[sympy.Expr], roots: Iterable[sympy.Symbol]) -> Tuple[List[sympy.Expr], set]:
    """与 roots 经等式相连的未知量及其等式"""
    supports = [eq.free_symbols for eq in equations]
    component = set(roots)
    size = -1
    while size != len(component):
        size = len(component)
        for support in supports:
            if support & component:
                component |= support
    kept = [eq for eq, support in zip(equations, supports) if support & component]
    return kept, component


# ======================================================================
# 求解器
# ======================================================================

class LESSolver:
    """
    基于注册表的上同调维数求解器

    Args:
        registry: 层注册表
        其余参数默认取 config 的 solver 段
    """

    def __init__(self, registry: SheafRegistry, max_iterations: Optional[int] = None,
                 max_depth: Optional[int] = None, max_nodes: Optional[int] = None,
                 use_oracle: Optional[bool] = None, linear_elimination: Optional[bool] = None,
                 oracle_max_sections: Optional[int] = None):
        self.registry = registry
        self.max_iterations = max_iterations if max_iterations is not None else config.get('solver.max_iterations', 10000)
        self.max_depth = max_depth if max_depth is not None else config.get('solver.max_depth', 6)
        self.max_nodes = max_nodes if max_nodes is not None else config.get('solver.max_nodes', 1500)
        self.use_oracle = use_oracle if use_oracle is not None else config.get('solver.use_oracle', True)
        self.linear_elimination = (linear_elimination if linear_elimination is not None
                                   else config.get('solver.linear_elimination', True))
        self.oracle_max_sections = (oracle_max_sections if oracle_max_sections is not None
                                    else config.get('solver.oracle_max_sections', 2000))

    def system(self, seeds: Sequence[SheafExpr]) -> LESSystem:
        return LESSystem(self, seeds)

    def resolve_h(self, expr: SheafExpr, i: int, twist_pair: Tuple[int, int] = (0, 0)) -> Resolution:
        """h^i(expr ⊗ O(twist)) 的区间与推导轨迹"""
        target = twist(self.registry.normalize(expr), *twist_pair)
        system = self.system([target])
        key = ('h', system.registry.normalize(target), i)
        system.solve([key])
        result = Resolution(system.label(key), system.get(key), list(system.trace), system.truncated)
        logger.debug(f"{result.key} = {result.interval}")
        return result

    def table(self, expr: SheafExpr, twists: Sequence[Tuple[int, int]]) -> CohTable:
        """一个约束网络中同时求所有扭的上同调表"""
        base = self.registry.normalize(expr)
        targets = [self.registry.normalize(twist(base, *t)) for t in twists]
        system = self.system(targets)
        queries = [('h', target, i) for target in targets for i in range(self.registry.n + 1)]
        system.solve(queries)
        rows = [[system.get(('h', target, i)) for target in targets] for i in range(self.registry.n + 1)]
        columns = [self.registry.display(target) for target in targets]
        return CohTable(self.registry.n, columns, [tuple(t) for t in twists], rows, list(system.trace),
                        system.truncated)

    def bound_linear(self, terms: Sequence[Tuple[int, SheafExpr, int]]) -> Resolution:
        """
        线性泛函 Σ c·h^i(expr) 的区间

        比逐项区间运算更紧：长正合列耦合的项在线性规划中相互抵消。
        """
        normalized = [(c, self.registry.normalize(e), i) for c, e, i in terms]
        system = self.system([e for _, e, _ in normalized])
        functional: Dict[Hashable, int] = {}
        for c, e, i in normalized:
            functional[('h', e, i)] = functional.get(('h', e, i), 0) + c
        system.solve(list(functional))

        naive = DimInterval(0, 0)
        for key, c in functional.items():
            naive = naive + system.get(key).scale(c)
        interval = naive
        if self.linear_elimination and not naive.exact:
            interval = naive.intersect(system.linear_enclosure(functional))
        label = ' + '.join(f"{c}·{system.label(key)}" for key, c in functional.items())
        return Resolution(label, interval, list(system.trace), system.truncated)

    def delta01(self, expr: SheafExpr, twist_pair: Tuple[int, int] = (0, 0)) -> Resolution:
        """δ^{0,1} = h⁰ − h¹"""
        target = twist(self.registry.normalize(expr), *twist_pair)
        result = self.bound_linear([(1, target, 0), (-1, target, 1)])
        result.key = f"δ01({self.registry.display(self.registry.normalize(target))})"
        return result
