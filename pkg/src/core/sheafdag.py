"""
层表达式模块
符号层表达式、可扭短正合列注册表、陈类传播与 Hartshorne–Serre 构造检查
"""

import re
import threading
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .chow import ChowClass, rank_of, total_chern, twist_character
from .projcoh import ch_omega, h_line
from .sections import SubvarietySpec, WP, validate_components
from ..utils.errors import HypothesisError, PreconditionError, UnresolvableSheafError
from ..utils.logger import logger

RESOLUTION = 'RESOLUTION'
RESTRICTION = 'RESTRICTION'
SERRE_CONSTRUCTION = 'SERRE-CONSTRUCTION'
ELEMENTARY_TRANSFORM = 'ELEMENTARY-TRANSFORM'
USER_AXIOM = 'USER-AXIOM'

PROVENANCE_TAGS = (RESOLUTION, RESTRICTION, SERRE_CONSTRUCTION, ELEMENTARY_TRANSFORM, USER_AXIOM)


# ======================================================================
# 表达式
# ======================================================================

@dataclass(frozen=True)
class Line:
    p: int
    q: int

    def __str__(self):
        return f"O({self.p},{self.q})"


@dataclass(frozen=True)
class Omega:
    """pr*Ω^l_{P^{n−1}} ⊗ O(p,q)，l 在 [1, n−2] 内（端点化为线丛）"""
    l: int
    p: int
    q: int

    def __str__(self):
        return f"Ω^{self.l}({self.p},{self.q})"


@dataclass(frozen=True)
class Push:
    """ι_* O_Y(m)"""
    Y: SubvarietySpec
    m: int

    def __str__(self):
        return f"O_{self.Y.label}({self.m})"


@dataclass(frozen=True)
class Sum:
    parts: Tuple[Any, ...]

    def __str__(self):
        return ' ⊕ '.join(str(part) for part in self.parts)


@dataclass(frozen=True)
class IdealTwist:
    X: Tuple[SubvarietySpec, ...]
    p: int
    q: int

    def __str__(self):
        return f"I_{{{'∪'.join(Y.label for Y in self.X)}}}({self.p},{self.q})"


@dataclass(frozen=True)
class Named:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Twist:
    base: Named
    a: int
    b: int

    def __str__(self):
        return f"{self.base.name}({self.a},{self.b})"


@dataclass(frozen=True)
class Dual:
    base: Any

    def __str__(self):
        return f"({self.base})^∨"


SheafExpr = Union[Line, Omega, Push, Sum, IdealTwist, Named, Twist, Dual]

BASE_TYPES = (Line, Omega, Push)


def omega_bundle(l: int, p: int, q: int, n: int) -> SheafExpr:
    """Ω⁰(p,q) = O(p,q)，Ω^{n−1}(p,q) = O(p, q−n)"""
    if l == 0:
        return Line(p, q)
    if l == n - 1:
        return Line(p, q - n)
    return Omega(l, p, q)


def make_sum(parts: Sequence[SheafExpr]) -> SheafExpr:
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return Sum(parts)


def twist(expr: SheafExpr, a: int, b: int) -> SheafExpr:
    """⊗ O(a,b) 的规范形"""
    if a == 0 and b == 0 and not isinstance(expr, Twist):
        return expr
    if isinstance(expr, Line):
        return Line(expr.p + a, expr.q + b)
    if isinstance(expr, Omega):
        return Omega(expr.l, expr.p + a, expr.q + b)
    if isinstance(expr, Push):
        return Push(expr.Y, expr.m + expr.Y.restriction_degree(a, b))
    if isinstance(expr, Sum):
        return Sum(tuple(twist(part, a, b) for part in expr.parts))
    if isinstance(expr, IdealTwist):
        return IdealTwist(expr.X, expr.p + a, expr.q + b)
    if isinstance(expr, Named):
        return Twist(expr, a, b)
    if isinstance(expr, Twist):
        a, b = expr.a + a, expr.b + b
        return expr.base if (a, b) == (0, 0) else Twist(expr.base, a, b)
    raise UnresolvableSheafError(f"无法扭转 {expr}，请先规范化对偶")


def named_parts(expr: SheafExpr) -> Optional[Tuple[Named, int, int]]:
    if isinstance(expr, Named):
        return expr, 0, 0
    if isinstance(expr, Twist):
        return expr.base, expr.a, expr.b
    return None


def family_of(expr: SheafExpr) -> Optional[Tuple[Tuple[Any, ...], Tuple[int, int]]]:
    """可索引族及其扭偏移：理想层与命名层"""
    if isinstance(expr, IdealTwist):
        return ('ideal', expr.X), (expr.p, expr.q)
    parts = named_parts(expr)
    if parts is not None:
        base, a, b = parts
        return ('named', base.name), (a, b)
    return None


# ----------------------------------------------------------------------
# 序列化
# ----------------------------------------------------------------------

def expr_to_dict(expr: SheafExpr) -> Dict[str, Any]:
    if isinstance(expr, Line):
        return {'type': 'line', 'p': expr.p, 'q': expr.q}
    if isinstance(expr, Omega):
        return {'type': 'omega', 'l': expr.l, 'p': expr.p, 'q': expr.q}
    if isinstance(expr, Push):
        return {'type': 'push', 'Y': expr.Y.to_dict(), 'm': expr.m}
    if isinstance(expr, Sum):
        return {'type': 'sum', 'parts': [expr_to_dict(part) for part in expr.parts]}
    if isinstance(expr, IdealTwist):
        return {'type': 'ideal', 'X': [Y.to_dict() for Y in expr.X], 'p': expr.p, 'q': expr.q}
    if isinstance(expr, Dual):
        return {'type': 'dual', 'base': expr_to_dict(expr.base)}
    base, a, b = named_parts(expr)
    return {'type': 'named', 'name': base.name, 'a': a, 'b': b}


def expr_from_dict(data: Dict[str, Any]) -> SheafExpr:
    kind = data.get('type')
    if kind == 'line':
        return Line(int(data['p']), int(data['q']))
    if kind == 'omega':
        return Omega(int(data['l']), int(data['p']), int(data['q']))
    if kind == 'push':
        return Push(SubvarietySpec.from_dict(data['Y']), int(data['m']))
    if kind == 'sum':
        return make_sum([expr_from_dict(part) for part in data['parts']])
    if kind == 'ideal':
        return IdealTwist(tuple(SubvarietySpec.from_dict(Y) for Y in data['X']), int(data['p']), int(data['q']))
    if kind == 'dual':
        return Dual(expr_from_dict(data['base']))
    if kind == 'named':
        return twist(Named(data['name']), int(data.get('a', 0)), int(data.get('b', 0)))
    raise PreconditionError(f"未知的表达式类型: {kind}")


# ======================================================================
# 短正合列与事实
# ======================================================================

@dataclass(frozen=True)
class SESInstance:
    """某条记录的一个扭实例 0 → sub → mid → quot → 0"""
    record_id: str
    shift: Tuple[int, int]
    sub: SheafExpr
    mid: SheafExpr
    quot: SheafExpr
    provenance: str

    @property
    def terms(self) -> Tuple[SheafExpr, SheafExpr, SheafExpr]:
        return self.sub, self.mid, self.quot


@dataclass(frozen=True)
class SESRecord:
    id: str
    sub: SheafExpr
    mid: SheafExpr
    quot: SheafExpr
    provenance: str
    quote: str = ''
    assumptions: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.provenance not in PROVENANCE_TAGS:
            raise PreconditionError(f"未知来源标签 {self.provenance}")

    @property
    def terms(self) -> Tuple[SheafExpr, SheafExpr, SheafExpr]:
        return self.sub, self.mid, self.quot

    def twisted(self, a: int, b: int) -> SESInstance:
        return SESInstance(self.id, (a, b), twist(self.sub, a, b), twist(self.mid, a, b),
                           twist(self.quot, a, b), self.provenance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'sub': expr_to_dict(self.sub),
            'mid': expr_to_dict(self.mid),
            'quot': expr_to_dict(self.quot),
            'provenance': self.provenance,
            'quote': self.quote,
            'assumptions': list(self.assumptions),
        }


@dataclass(frozen=True)
class Fact:
    """注入的上同调事实 h^i(expr) ∈ [lo, hi]（hi 为 None 表示无上界）"""
    expr: SheafExpr
    i: int
    lo: int
    hi: Optional[int]
    provenance: str
    quote: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {'sheaf': expr_to_dict(self.expr), 'i': self.i, 'lo': self.lo, 'hi': self.hi,
                'provenance': self.provenance, 'quote': self.quote}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Fact':
        hi = data.get('hi')
        return cls(expr_from_dict(data['sheaf']), int(data['i']), int(data.get('lo', 0)),
                   None if hi is None else int(hi), data.get('provenance', 'USER'), data.get('quote', ''))


@dataclass
class NamedInfo:
    name: str
    rank: int
    locally_free: bool
    torsion_free: bool = True
    record_id: Optional[str] = None
    position: Optional[str] = None
    description: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'rank': self.rank, 'locally_free': self.locally_free,
                'torsion_free': self.torsion_free, 'record_id': self.record_id,
                'position': self.position, 'description': self.description}


# ======================================================================
# 注册表
# ======================================================================

class SheafRegistry:
    """
    只追加的层注册表

    记录在扭下封闭：按 (族, 偏移) 索引，查询时实例化所需的扭。
    """

    def __init__(self, n: int):
        self.n = n
        self._named: Dict[str, NamedInfo] = {}
        self._records: List[SESRecord] = []
        self._by_id: Dict[str, SESRecord] = {}
        self._index: Dict[Tuple[Any, ...], List[Tuple[str, str, Tuple[int, int]]]] = defaultdict(list)
        self._aliases: Dict[str, SheafExpr] = {}
        self._subvarieties: List[SubvarietySpec] = []
        self.facts: List[Fact] = []
        self._ch_cache: Dict[str, ChowClass] = {}
        self._lock = threading.Lock()

    # ------------------------------------------------------------------
    # 命名层与别名
    # ------------------------------------------------------------------
    def define(self, name: str, rank: int, locally_free: bool, torsion_free: bool = True,
               description: str = '') -> Named:
        with self._lock:
            if name in self._named:
                raise PreconditionError(f"命名层 {name} 已存在")
            self._named[name] = NamedInfo(name, rank, locally_free, torsion_free, description=description)
        return Named(name)

    def info(self, name: str) -> NamedInfo:
        if name not in self._named:
            raise UnresolvableSheafError(f"未注册的命名层 {name}")
        return self._named[name]

    def has(self, name: str) -> bool:
        return name in self._named

    def alias(self, alias: str, expr: SheafExpr):
        """显示与解析用别名，例如 E = F(−1,−1)，I_X = I_{℘∪κ}(0,0)"""
        self._aliases[alias] = expr

    def resolve_alias(self, alias: str) -> SheafExpr:
        if alias not in self._aliases:
            raise UnresolvableSheafError(f"未知别名 {alias}")
        return self._aliases[alias]

    def display(self, expr: SheafExpr) -> str:
        fam = family_of(expr)
        if fam is not None:
            family, (a, b) = fam
            for alias, target in self._aliases.items():
                target_fam = family_of(target)
                if target_fam is not None and target_fam[0] == family:
                    a0, b0 = target_fam[1]
                    return f"{alias}({a - a0},{b - b0})"
        if isinstance(expr, Sum):
            return ' ⊕ '.join(self.display(part) for part in expr.parts)
        return str(expr)

    def parse(self, text: str) -> SheafExpr:
        """解析 'O(1,-1)'、'Omega^3(0,3)'、'E(0,-4)'、'I_X(2,0)' 或裸别名"""
        text = text.replace(' ', '')
        match = re.fullmatch(r'(?:Omega|Ω)\^(\d+)\((-?\d+),(-?\d+)\)', text)
        if match:
            l, p, q = (int(g) for g in match.groups())
            return omega_bundle(l, p, q, self.n)
        match = re.fullmatch(r'([A-Za-z_][A-Za-z_0-9|]*)(?:\((-?\d+),(-?\d+)\))?', text)
        if not match:
            raise PreconditionError(f"无法解析层表达式 '{text}'")
        name, a, b = match.group(1), match.group(2), match.group(3)
        a, b = (int(a), int(b)) if a is not None else (0, 0)
        if name == 'O':
            return Line(a, b)
        if name in self._aliases:
            return twist(self._aliases[name], a, b)
        if name in self._named:
            return twist(Named(name), a, b)
        raise UnresolvableSheafError(f"未知层 '{name}'")

    # ------------------------------------------------------------------
    # 记录
    # ------------------------------------------------------------------
    def register(self, sub: SheafExpr, mid: SheafExpr, quot: SheafExpr, provenance: str,
                 quote: str = '', assumptions: Sequence[str] = (), defines: Optional[str] = None,
                 record_id: Optional[str] = None) -> SESRecord:
        """
        注册短正合列；若已有记录的某个扭与之相同则返回已有记录

        Args:
            defines: 以此记录为定义的命名层名称
        """
        sub, mid, quot = (self.normalize(t) for t in (sub, mid, quot))
        with self._lock:
            duplicate = self._find_twist_duplicate(sub, mid, quot)
            if duplicate is not None:
                logger.debug(f"记录与 {duplicate.id} 的扭重复，跳过")
                return duplicate
            rid = record_id or f"S{len(self._records) + 1}"
            record = SESRecord(rid, sub, mid, quot, provenance, quote, tuple(assumptions))
            self._records.append(record)
            self._by_id[rid] = record
            for position, term in zip(('sub', 'mid', 'quot'), record.terms):
                for piece in self._indexable_pieces(term):
                    fam = family_of(piece)
                    self._index[fam[0]].append((rid, position, fam[1]))
            if defines is not None:
                info = self._named[defines]
                info.record_id = rid
                info.position = next(pos for pos, term in zip(('sub', 'mid', 'quot'), record.terms)
                                     if named_parts(term) and named_parts(term)[0].name == defines)
            self._ch_cache.clear()
        logger.debug(f"注册短正合列 {rid} [{provenance}]: 0 → {sub} → {mid} → {quot} → 0")
        return record

    @staticmethod
    def _indexable_pieces(term: SheafExpr) -> List[SheafExpr]:
        if family_of(term) is not None:
            return [term]
        return []

    def _find_twist_duplicate(self, sub, mid, quot) -> Optional[SESRecord]:
        fam = family_of(mid) or family_of(sub) or family_of(quot)
        if fam is None:
            return None
        for record in self._records:
            for term in record.terms:
                other = family_of(term)
                if other is None or other[0] != fam[0]:
                    continue
                shift = (fam[1][0] - other[1][0], fam[1][1] - other[1][1])
                instance = record.twisted(*shift)
                if instance.terms == (sub, mid, quot):
                    return record
        return None

    @property
    def records(self) -> List[SESRecord]:
        return list(self._records)

    def record(self, rid: str) -> SESRecord:
        return self._by_id[rid]

    def instances_touching(self, expr: SheafExpr) -> List[Tuple[SESInstance, str]]:
        """所有以 expr 为某一项的记录扭实例"""
        fam = family_of(expr)
        if fam is None:
            return []
        result = []
        family, (a, b) = fam
        for rid, position, (a0, b0) in self._index.get(family, []):
            instance = self._by_id[rid].twisted(a - a0, b - b0)
            result.append((instance, position))
        return result

    def add_fact(self, fact: Fact):
        with self._lock:
            self.facts.append(Fact(self.normalize(fact.expr), fact.i, fact.lo, fact.hi,
                                   fact.provenance, fact.quote))

    def register_subvariety(self, Y: SubvarietySpec):
        """注册 O_Y 的 Koszul 消解（拆成两条短正合列）"""
        if Y in self._subvarieties:
            return
        self._subvarieties.append(Y)
        resolution = Y.resolution()
        ideal = IdealTwist((Y,), 0, 0)
        self.register(Line(*resolution[3][1]), Sum((Line(*resolution[1][1]), Line(*resolution[2][1]))), ideal,
                      RESOLUTION, quote=f"O_{Y.label} 的 Koszul 消解")
        self.register(ideal, Line(0, 0), Push(Y, 0), RESTRICTION, quote=f"0 → I_{Y.label} → O → O_{Y.label} → 0")

    def register_restriction(self, X: Sequence[SubvarietySpec], quote: str = '') -> SESRecord:
        """0 → I_X → O → ⊕ O_Y → 0"""
        X = tuple(X)
        validate_components(X)
        for Y in X:
            self.register_subvariety(Y)
        return self.register(IdealTwist(X, 0, 0), Line(0, 0), make_sum([Push(Y, 0) for Y in X]),
                             RESTRICTION, quote=quote)

    # ------------------------------------------------------------------
    # 规范化、秩、陈类
    # ------------------------------------------------------------------
    def normalize(self, expr: SheafExpr) -> SheafExpr:
        if isinstance(expr, Dual):
            return self.dual(self.normalize(expr.base))
        if isinstance(expr, Sum):
            return make_sum([self.normalize(part) for part in expr.parts])
        if isinstance(expr, Omega):
            return omega_bundle(expr.l, expr.p, expr.q, self.n)
        if isinstance(expr, Twist) and (expr.a, expr.b) == (0, 0):
            return expr.base
        return expr

    def is_locally_free(self, expr: SheafExpr) -> bool:
        if isinstance(expr, (Line, Omega)):
            return True
        if isinstance(expr, Sum):
            return all(self.is_locally_free(part) for part in expr.parts)
        parts = named_parts(expr)
        if parts is not None:
            return self.info(parts[0].name).locally_free
        return False

    def chern_character(self, expr: SheafExpr) -> ChowClass:
        n = self.n
        expr = self.normalize(expr)
        if isinstance(expr, Line):
            return twist_character(expr.p, expr.q, n)
        if isinstance(expr, Omega):
            return ch_omega(expr.l, expr.p, expr.q, n)
        if isinstance(expr, Push):
            return expr.Y.chern_character() * twist_character(*expr.Y.twist_restricting_to(expr.m), n)
        if isinstance(expr, Sum):
            total = ChowClass.zero(n)
            for part in expr.parts:
                total = total + self.chern_character(part)
            return total
        if isinstance(expr, IdealTwist):
            structure = ChowClass.one(n)
            for Y in expr.X:
                structure = structure - Y.chern_character()
            return structure * twist_character(expr.p, expr.q, n)
        parts = named_parts(expr)
        if parts is None:
            raise UnresolvableSheafError(f"无法计算 {expr} 的陈特征")
        base, a, b = parts
        return self._named_character(base.name) * twist_character(a, b, n)

    def _named_character(self, name: str, _stack: Tuple[str, ...] = ()) -> ChowClass:
        if name in self._ch_cache:
            return self._ch_cache[name]
        if name in _stack:
            raise UnresolvableSheafError(f"命名层 {name} 的定义成环")
        info = self.info(name)
        if info.record_id is None:
            raise UnresolvableSheafError(f"命名层 {name} 没有定义序列")
        record = self._by_id[info.record_id]
        ch = {}
        for position, term in zip(('sub', 'mid', 'quot'), record.terms):
            if position == info.position:
                continue
            ch[position] = self.chern_character(term)
        own_shift = named_parts(getattr(record, info.position))
        if info.position == 'mid':
            value = ch['sub'] + ch['quot']
        elif info.position == 'sub':
            value = ch['mid'] - ch['quot']
        else:
            value = ch['mid'] - ch['sub']
        value = value * twist_character(-own_shift[1], -own_shift[2], self.n)
        self._ch_cache[name] = value
        return value

    def rank(self, expr: SheafExpr) -> int:
        return rank_of(self.chern_character(expr))

    def chern_of(self, expr: SheafExpr) -> ChowClass:
        """全陈类"""
        return total_chern(self.chern_character(expr))

    def det(self, expr: SheafExpr) -> Tuple[int, int]:
        """c₁ 作为扭对"""
        return self.chern_character(expr).part(1).twist_pair()

    def dual(self, expr: SheafExpr) -> SheafExpr:
        """线丛取反；秩 2 局部自由命名层 V^∨ = V ⊗ det(V)^{−1}"""
        if isinstance(expr, Line):
            return Line(-expr.p, -expr.q)
        parts = named_parts(expr)
        if parts is None or not self.is_locally_free(expr) or self.rank(expr) != 2:
            raise UnresolvableSheafError(f"对偶只支持秩 2 局部自由层，收到 {expr}")
        dp, dq = self.det(expr)
        return twist(expr, -dp, -dq)

    def serre_dual_partner(self, expr: SheafExpr) -> Optional[SheafExpr]:
        """h^i(V) = h^{n−i}(V^∨ ⊗ ω)，仅对已知行列式的秩 2 局部自由命名层"""
        parts = named_parts(expr)
        if parts is None or not self.is_locally_free(expr):
            return None
        try:
            if self.rank(expr) != 2:
                return None
            dual = self.dual(expr)
        except UnresolvableSheafError:
            return None
        return twist(dual, -2, 1 - self.n)

    # ------------------------------------------------------------------
    # 审计与序列化
    # ------------------------------------------------------------------
    def whitney_audit(self) -> List[Dict[str, Any]]:
        """每条记录检查 rank 可加性与 c(mid) = c(sub)·c(quot)"""
        audit = []
        for record in self._records:
            try:
                ch_sub, ch_mid, ch_quot = (self.chern_character(t) for t in record.terms)
                rank_ok = rank_of(ch_mid) == rank_of(ch_sub) + rank_of(ch_quot)
                chern_ok = total_chern(ch_mid) == total_chern(ch_sub) * total_chern(ch_quot)
                audit.append({'id': record.id, 'rank_ok': rank_ok, 'chern_ok': chern_ok})
            except UnresolvableSheafError as e:
                audit.append({'id': record.id, 'rank_ok': None, 'chern_ok': None, 'error': str(e)})
        return audit

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'named': [info.to_dict() for info in self._named.values()],
            'aliases': {alias: expr_to_dict(expr) for alias, expr in self._aliases.items()},
            'subvarieties': [Y.to_dict() for Y in self._subvarieties],
            'records': [record.to_dict() for record in self._records],
            'facts': [fact.to_dict() for fact in self.facts],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SheafRegistry':
        registry = cls(int(data['n']))
        for item in data.get('named', []):
            registry._named[item['name']] = NamedInfo(
                item['name'], int(item['rank']), bool(item['locally_free']),
                bool(item.get('torsion_free', True)), item.get('record_id'), item.get('position'),
                item.get('description', ''))
        for item in data.get('records', []):
            record = SESRecord(item['id'], expr_from_dict(item['sub']), expr_from_dict(item['mid']),
                               expr_from_dict(item['quot']), item['provenance'], item.get('quote', ''),
                               tuple(item.get('assumptions', [])))
            registry._records.append(record)
            registry._by_id[record.id] = record
            for position, term in zip(('sub', 'mid', 'quot'), record.terms):
                fam = family_of(term)
                if fam is not None:
                    registry._index[fam[0]].append((record.id, position, fam[1]))
        for alias, expr in data.get('aliases', {}).items():
            registry._aliases[alias] = expr_from_dict(expr)
        registry._subvarieties = [SubvarietySpec.from_dict(Y) for Y in data.get('subvarieties', [])]
        registry.facts = [Fact.from_dict(fact) for fact in data.get('facts', [])]
        return registry

    def merge_axioms(self, data: Dict[str, Any]):
        """注入公理文件：追加其中的命名层、记录与事实"""
        if int(data.get('n', self.n)) != self.n:
            raise PreconditionError(f"公理文件的 n={data.get('n')} 与当前 n={self.n} 不一致")
        other = SheafRegistry.from_dict(dict(data, n=self.n))
        for info in other._named.values():
            if info.name not in self._named:
                self._named[info.name] = info
        for record in other._records:
            self.register(record.sub, record.mid, record.quot, record.provenance, record.quote,
                          record.assumptions)
        for alias, expr in other._aliases.items():
            self._aliases.setdefault(alias, expr)
        for fact in other.facts:
            self.add_fact(fact)
        logger.info(f"注入公理: {len(other._records)} 条记录, {len(other.facts)} 条事实")


# ======================================================================
# 构造
# ======================================================================

def serre_construct(registry: SheafRegistry, X: Sequence[SubvarietySpec], S: Tuple[int, int],
                    name: str = 'F', quote: str = '') -> Tuple[Named, SESRecord]:
    """
    Hartshorne–Serre 构造：0 → O → F → I_X ⊗ S → 0

    Args:
        registry: 注册表
        X: 两两不交的余维 2 子簇
        S: 线丛扭对

    Returns:
        (F, 定义记录)
    """
    X = tuple(X)
    validate_components(X)
    n = registry.n
    failed = []
    for i in (1, 2):
        if h_line(i, -S[0], -S[1], n):
            failed.append(f"h^{i}(S^-1) = {h_line(i, -S[0], -S[1], n)} ≠ 0")
    for Y in X:
        if Y.restriction_degree(*S) != Y.det_normal_degree:
            failed.append(f"S|_{Y.label} = O({Y.restriction_degree(*S)}) ≠ det N = O({Y.det_normal_degree})")
    if failed:
        raise HypothesisError(f"Hartshorne–Serre 假设不成立: {'; '.join(failed)}", failed=failed)

    registry.register_restriction(X, quote=f"0 → I_X → O → ⊕ O_Y → 0")
    F = registry.define(name, rank=2, locally_free=True, description=f"Serre 构造 S=O{S}")
    record = registry.register(Line(0, 0), F, IdealTwist(X, S[0], S[1]), SERRE_CONSTRUCTION,
                               quote=quote or f"0 → O → {name} → I_X({S[0]},{S[1]}) → 0", defines=name)
    logger.info(f"Serre 构造 {name}: c₁ = O{registry.det(F)}")
    return F, record


def elementary_transform(registry: SheafRegistry, E: SheafExpr, Y: SubvarietySpec,
                         name: str = 'G') -> Tuple[Named, SESRecord]:
    """
    初等变换 0 → G → E → ι_*O_℘ → 0

    满射 E ↠ ι_*M ⊗ ω^{−1} 的存在性作为用户公理记录。
    """
    if Y.kind != WP:
        raise PreconditionError(f"初等变换只沿 ℘ 型子簇，收到 {Y.label}")
    if registry.rank(E) != 2:
        raise PreconditionError(f"初等变换要求秩 2，{E} 的秩为 {registry.rank(E)}")
    registry.register_subvariety(Y)
    G = registry.define(name, rank=2, locally_free=False, torsion_free=True,
                        description=f"{registry.display(E)} 沿 {Y.label} 的初等变换")
    record = registry.register(G, E, Push(Y, 0), ELEMENTARY_TRANSFORM,
                               quote="we suppose that there is a surjective map",
                               assumptions=(f"{USER_AXIOM}: surjection {registry.display(E)} ->> i_*M ⊗ ω^-1",),
                               defines=name)
    return G, record

