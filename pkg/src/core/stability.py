"""
稳定性模块
广义 Hoppe 判据：把无穷测试区域约化为有限的已证明情形列表
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import sympy

from .chow import CanonicalData, ChowClass, Polarization, delta, slope, to_plain, to_qq
from .lessolver import DimInterval, LESSolver
from .projcoh import h_line
from .sections import SubvarietySpec, h0_ideal
from .sheafdag import IdealTwist, Line, SheafExpr, SheafRegistry, named_parts, twist
from ..config.config import config
from ..utils.errors import PreconditionError
from ..utils.logger import logger

SEMISTABLE_CERTIFIED = 'SEMISTABLE-CERTIFIED'
VIOLATION = 'VIOLATION'
INCONCLUSIVE = 'INCONCLUSIVE'

FRONTIER_MONOTONE = 'FRONTIER-MONOTONE'
LINE_BOUND = 'LINE-BOUND'
ORACLE = 'ORACLE'
LES_BOUND = 'LES'
SUBSHEAF = 'SUBSHEAF'


def _floor(value) -> int:
    value = to_qq(value)
    return int(value.numerator) // int(value.denominator)


def _ceil(value) -> int:
    return -_floor(-to_qq(value))


# ======================================================================
# 测试区域
# ======================================================================

@dataclass(frozen=True)
class HoppeRegion:
    """
    θ = O(−p,−q) 的测试集合

    strict=True 为半稳定测试集 δ(θ) < −μ，False 为稳定测试集 δ(θ) ≤ −μ。
    等价于 pA + qB > μ（或 ≥），A = δ(O(1,0))，B = δ(O(0,1))。
    """
    L: Polarization
    mu: Any
    strict: bool = True

    @property
    def n(self) -> int:
        return self.L.n

    @property
    def A(self) -> int:
        return delta((1, 0), self.L)

    @property
    def B(self) -> int:
        return delta((0, 1), self.L)

    def delta_theta(self, p: int, q: int) -> int:
        return delta((-p, -q), self.L)

    def contains(self, p: int, q: int) -> bool:
        value = to_qq(self.delta_theta(p, q))
        bound = -to_qq(self.mu)
        return value < bound if self.strict else value <= bound

    def on_boundary(self, p: int, q: int) -> bool:
        return to_qq(self.delta_theta(p, q)) == -to_qq(self.mu)

    def frontier(self, p: int) -> int:
        """列 p 中区域内最小的 q"""
        threshold = (to_qq(self.mu) - to_qq(p * self.A)) / to_qq(self.B)
        return _floor(threshold) + 1 if self.strict else _ceil(threshold)

    def coefficients(self) -> Tuple[Any, Any]:
        """区域 q > intercept + slope·p 的 (slope, intercept)"""
        return -to_qq(self.A) / to_qq(self.B), to_qq(self.mu) / to_qq(self.B)

    def to_dict(self) -> Dict[str, Any]:
        slope_value, intercept = self.coefficients()
        return {
            'polarization': self.L.to_dict(),
            'mu': to_plain(self.mu),
            'strict': self.strict,
            'A': self.A,
            'B': self.B,
            'inequality': f"q {'>' if self.strict else '>='} {to_plain(intercept)} + ({to_plain(slope_value)})·p",
        }


def region(L: Polarization, mu, n: Optional[int] = None, strict: bool = True) -> HoppeRegion:
    if n is not None and n != L.n:
        raise PreconditionError(f"极化的 n={L.n} 与 n={n} 不一致")
    return HoppeRegion(L, to_qq(mu), strict)


def displayed_region_coefficients(n: int) -> Dict[str, Any]:
    """
    显示形式的区域系数

    奇数 n：斜率 −1/(1 − (1 − 2/(n−1))^{n−1})，截距 −1；n=4 例子：斜率 −8/7，截距 −1/2
    """
    if n == 4:
        return {'slope': to_qq(-8) / to_qq(7), 'intercept': to_qq(-1) / to_qq(2)}
    if n % 2 == 0 or n < 3:
        raise PreconditionError(f"显示的区域只对奇数 n 与 n=4 给出，收到 n={n}")
    # N_3 = 1 时 N/(1+N) = 1/2，且 c₁ = 0
    ratio = to_qq(1) / to_qq(2) if n == 3 else to_qq(n - 3) / to_qq(n - 1)
    intercept = to_qq(0) if n == 3 else to_qq(-1)
    return {'slope': -1 / (1 - ratio ** (n - 1)), 'intercept': intercept}


def region_matches_displayed(n: int) -> bool:
    """由 δ 推出的区域系数与显示形式一致"""
    if n == 4:
        L = Polarization.explicit_twist(4, 1, 1)
        mu = slope(ChowClass.from_twist(0, -1, 4), 2, L)
    else:
        L = Polarization.default(n)
        mu = to_qq(delta(CanonicalData(n).det_target(L), L)) / 2
    slope_value, intercept = region(L, mu).coefficients()
    expected = displayed_region_coefficients(n)
    return slope_value == expected['slope'] and intercept == expected['intercept']


def window_bound(n: int):
    """f(n) = (1 − r)/r，r = (1 − 2/(n−1))^{n−1}"""
    if n % 2 == 0 or n < 5:
        raise PreconditionError(f"f(n) 只对奇数 n ≥ 5 定义，收到 n={n}")
    r = (to_qq(n - 3) / to_qq(n - 1)) ** (n - 1)
    return (1 - r) / r


def window_limit() -> Dict[str, Any]:
    """f(n) 的极限与显示的闭式 e^{−2}/(1−e^{−2}) 的比较"""
    m = sympy.Symbol('m', positive=True)
    r = (1 - 2 / (m - 1)) ** (m - 1)
    limit = sympy.simplify(sympy.limit((1 - r) / r, m, sympy.oo))
    printed = sympy.exp(-2) / (1 - sympy.exp(-2))
    return {
        'limit': str(limit),
        'limit_value': float(limit.evalf()),
        'printed': str(sympy.simplify(printed)),
        'printed_value': float(printed.evalf()),
        'agrees': bool(sympy.simplify(limit - printed) == 0),
    }


# ======================================================================
# 证书
# ======================================================================

@dataclass
class CaseRecord:
    p: int
    q: int
    mechanism: str
    h0: DimInterval
    bound: Optional[int] = None
    detail: str = ''

    @property
    def zero(self) -> bool:
        return self.h0.exact and self.h0.lo == 0

    def to_dict(self) -> Dict[str, Any]:
        return {'p': self.p, 'q': self.q, 'twist': [-self.p, -self.q], 'mechanism': self.mechanism,
                'h0': self.h0.to_list(), 'bound': self.bound, 'detail': self.detail}


@dataclass
class StabilityCertificate:
    sheaf: str
    verdict: str
    region: HoppeRegion
    column_threshold: int
    half_plane: int
    cases: List[CaseRecord] = field(default_factory=list)
    boundary: List[CaseRecord] = field(default_factory=list)
    witness: Optional[CaseRecord] = None
    notes: List[str] = field(default_factory=list)

    @property
    def stable(self) -> Optional[bool]:
        """半稳定已证明时，边界情形决定稳定性"""
        if self.verdict != SEMISTABLE_CERTIFIED:
            return False if self.verdict == VIOLATION else None
        if any(case.h0.lo and case.h0.lo >= 1 for case in self.boundary):
            return False
        if all(case.zero for case in self.boundary):
            return True
        return None

    def case(self, p: int, q: int) -> Optional[CaseRecord]:
        for case in self.cases:
            if (case.p, case.q) == (p, q):
                return case
        return None

    def covers(self, p: int, q: int) -> Optional[Tuple[str, str]]:
        """区域点的覆盖机制；区域外返回 None"""
        if not self.region.contains(p, q):
            return None
        case = self.case(p, q)
        if case is not None and case.zero:
            return case.mechanism, f"显式情形 ({p},{q})"
        frontier_q = self.region.frontier(p)
        frontier_case = self.case(p, frontier_q)
        if frontier_case is not None and frontier_case.zero and q >= frontier_q:
            return FRONTIER_MONOTONE, f"({p},{q}) → ({p},{frontier_q})"
        if p >= self.column_threshold:
            return LINE_BOUND, f"p ≥ {self.column_threshold}：两项首坐标为负"
        if p + q > self.half_plane:
            return LINE_BOUND, f"p+q > {self.half_plane}：两项总次数为负"
        return None

    def check_coverage(self, sample_size: Optional[int] = None, window: Optional[int] = None,
                       seed: Optional[int] = None) -> Dict[str, Any]:
        """随机抽样区域点，每个都必须被覆盖"""
        sample_size = sample_size or config.get('stability.sample_size', 1000)
        window = window or config.get('stability.max_window', 200)
        rng = np.random.default_rng(seed if seed is not None else config.get('toolkit.seed', 20240601))
        uncovered = []
        ps = rng.integers(-window, window + 1, size=sample_size)
        offsets = rng.integers(0, window + 1, size=sample_size)
        for p, offset in zip(ps.tolist(), offsets.tolist()):
            q = self.region.frontier(p) + offset
            if self.covers(p, q) is None:
                uncovered.append([p, q])
        return {'sample_size': sample_size, 'uncovered': uncovered, 'ok': not uncovered}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sheaf': self.sheaf,
            'verdict': self.verdict,
            'stable': self.stable,
            'region': self.region.to_dict(),
            'column_threshold': self.column_threshold,
            'half_plane': self.half_plane,
            'cases': [case.to_dict() for case in self.cases],
            'boundary': [case.to_dict() for case in self.boundary],
            'witness': self.witness.to_dict() if self.witness else None,
            'notes': list(self.notes),
        }


# ======================================================================
# 认证
# ======================================================================

@dataclass(frozen=True)
class DefiningSequence:
    """0 → O(s) → E → I_X(c) → 0"""
    s: Tuple[int, int]
    X: Tuple[SubvarietySpec, ...]
    c: Tuple[int, int]


def defining_sequence(registry: SheafRegistry, E: SheafExpr) -> DefiningSequence:
    parts = named_parts(registry.normalize(E))
    if parts is None:
        raise PreconditionError(f"{E} 不是命名层")
    base, a, b = parts
    info = registry.info(base.name)
    if info.record_id is None or info.position != 'mid':
        raise PreconditionError(f"{base.name} 没有形如 0 → O(s) → E → I_X(c) → 0 的定义序列")
    record = registry.record(info.record_id)
    own = named_parts(record.mid)
    instance = record.twisted(a - own[1], b - own[2])
    if not isinstance(instance.sub, Line) or not isinstance(instance.quot, IdealTwist):
        raise PreconditionError(f"{base.name} 的定义序列不是线丛与理想层的扩张")
    return DefiningSequence((instance.sub.p, instance.sub.q), instance.quot.X,
                            (instance.quot.p, instance.quot.q))


class StabilityCertifier:
    """
    有限情形证书

    情形按 p 从 P*−1 递减，列内 q 从前沿到 H*−p；列为空即停止（要求斜率 < −1）。
    """

    def __init__(self, registry: SheafRegistry, solver: Optional[LESSolver] = None,
                 max_window: Optional[int] = None):
        self.registry = registry
        self.solver = solver or LESSolver(registry)
        self.max_window = max_window or config.get('stability.max_window', 200)

    def _bound(self, seq: DefiningSequence, p: int, q: int) -> int:
        """h⁰(E(−p,−q)) ≤ h⁰(O(s−θ)) + h⁰(I_X(c−θ))"""
        line = h_line(0, seq.s[0] - p, seq.s[1] - q, self.registry.n)
        ideal = h0_ideal(seq.X, seq.c[0] - p, seq.c[1] - q)
        return line + ideal

    def evaluate(self, E: SheafExpr, seq: DefiningSequence, p: int, q: int) -> CaseRecord:
        bound = self._bound(seq, p, q)
        if bound == 0:
            return CaseRecord(p, q, ORACLE, DimInterval(0, 0), bound,
                              f"h⁰(O{(seq.s[0] - p, seq.s[1] - q)}) + h⁰(I_X{(seq.c[0] - p, seq.c[1] - q)}) = 0")
        resolution = self.solver.resolve_h(E, 0, (-p, -q))
        interval = resolution.interval.intersect(DimInterval(0, bound))
        return CaseRecord(p, q, LES_BOUND, interval, bound, f"长正合列: {resolution.key} ∈ {interval}")

    def certify(self, E: SheafExpr, L: Polarization) -> StabilityCertificate:
        registry = self.registry
        E = registry.normalize(E)
        if registry.rank(E) != 2:
            raise PreconditionError(f"稳定性证书只支持秩 2，{registry.display(E)} 的秩为 {registry.rank(E)}")
        seq = defining_sequence(registry, E)
        mu = slope(registry.chern_character(E).part(1), 2, L)
        semistable = region(L, mu, strict=True)
        if semistable.A <= semistable.B:
            raise PreconditionError(f"区域斜率 −{semistable.A}/{semistable.B} 不小于 −1，无法有限化")

        column_threshold = max(seq.s[0], seq.c[0]) + 1
        half_plane = max(seq.s[0] + seq.s[1], seq.c[0] + seq.c[1])
        certificate = StabilityCertificate(registry.display(E), SEMISTABLE_CERTIFIED, semistable,
                                           column_threshold, half_plane)
        certificate.notes.append(f"μ = {to_plain(mu)}；p ≥ {column_threshold} 或 p+q > {half_plane} 由线丛截面消失覆盖")

        p = column_threshold - 1
        while True:
            if p < column_threshold - 1 - self.max_window:
                certificate.verdict = INCONCLUSIVE
                certificate.notes.append(f"枚举超过窗口 {self.max_window}")
                break
            column = range(semistable.frontier(p), half_plane - p + 1)
            if not column:
                break
            for q in column:
                case = self.evaluate(E, seq, p, q)
                certificate.cases.append(case)
                if case.zero:
                    continue
                if case.h0.lo is not None and case.h0.lo >= 1:
                    if certificate.witness is None:
                        certificate.witness = case
                    certificate.verdict = VIOLATION
                elif certificate.verdict != VIOLATION:
                    certificate.verdict = INCONCLUSIVE
            p -= 1

        certificate.boundary = self._boundary_cases(E, seq, semistable, column_threshold, half_plane)
        certificate.cases.sort(key=lambda c: (-c.p, c.q))
        logger.info(f"{certificate.sheaf} 稳定性证书: {certificate.verdict}，{len(certificate.cases)} 个显式情形")
        return certificate

    def _boundary_cases(self, E, seq, semistable: HoppeRegion, column_threshold: int,
                        half_plane: int) -> List[CaseRecord]:
        """δ(θ) = −μ 的点，只在线丛界之内求值"""
        cases = []
        p = column_threshold - 1
        A, B = to_qq(semistable.A), to_qq(semistable.B)
        for _ in range(self.max_window):
            threshold = (to_qq(semistable.mu) - p * A) / B
            if threshold + p > half_plane:
                break
            if threshold.denominator == 1:
                cases.append(self.evaluate(E, seq, p, int(threshold.numerator)))
            p -= 1
        return cases


def certify(registry: SheafRegistry, E: SheafExpr, L: Polarization,
            solver: Optional[LESSolver] = None) -> StabilityCertificate:
    return StabilityCertifier(registry, solver).certify(E, L)


def certify_subsheaf(registry: SheafRegistry, G: SheafExpr, parent: StabilityCertificate,
                     E: SheafExpr) -> StabilityCertificate:
    """
    G ⊂ E 且 c₁ 相同：斜率相同，h⁰(G(θ)) ≤ h⁰(E(θ))，沿用 E 的证书
    """
    if registry.det(G) != registry.det(E):
        raise PreconditionError(f"{registry.display(G)} 与 {registry.display(E)} 的 c₁ 不同")

    def transfer(c: CaseRecord) -> CaseRecord:
        return CaseRecord(c.p, c.q, SUBSHEAF, DimInterval(0, c.h0.hi), c.bound,
                          f"h⁰({registry.display(twist(G, -c.p, -c.q))}) ≤ h⁰({registry.display(twist(E, -c.p, -c.q))})")

    cases = [transfer(c) for c in parent.cases]
    verdict = parent.verdict if parent.verdict == SEMISTABLE_CERTIFIED else INCONCLUSIVE
    certificate = StabilityCertificate(registry.display(G), verdict, parent.region, parent.column_threshold,
                                       parent.half_plane, cases, [transfer(c) for c in parent.boundary], None,
                                       [f"子层 {registry.display(G)} ⊂ {registry.display(E)}，c₁ 相同"])
    return certificate
