"""
整体截面模块
O(p,q) 的单项式基模型，以及子簇构形理想层 h⁰ 的精确计算（限制矩阵的核维数）
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grevlex
from sympy.polys.rings import ring

from .chow import ChowClass, total_chern, twist_character
from .projcoh import binom, bott_h, h_line
from ..utils.errors import OverlappingComponentsError, PreconditionError
from ..utils.logger import logger

WP = 'wp'
KAPPA = 'kappa'
Q1 = 'Q1'
Q2 = 'Q2'

KINDS = (WP, KAPPA, Q1, Q2)
AMBIENT_KINDS = (WP, Q1)
QUADRIC_KINDS = (Q1, Q2)

Exponent = Tuple[int, ...]


@lru_cache(maxsize=None)
def monomials(num_vars: int, deg: int) -> Tuple[Exponent, ...]:
    """num_vars 个变量的 deg 次单项式指数（确定性顺序）"""
    if deg < 0:
        return ()
    if num_vars == 0:
        return ((),) if deg == 0 else ()
    result = []
    for combo in combinations_with_replacement(range(num_vars), deg):
        exps = [0] * num_vars
        for v in combo:
            exps[v] += 1
        result.append(tuple(exps))
    return tuple(result)


# ======================================================================
# 截面基
# ======================================================================

class SectionBasis:
    """
    H⁰(O(p,q)) 的单项式基：x₀..x_n 的 (p+q) 次单项式且 x₀ 指数 ≤ p

    即在 p₀ = [1:0:…:0] 处消没阶 ≥ q 的 (p+q) 次型。
    """

    def __init__(self, n: int, p: int, q: int):
        self.n = n
        self.p = p
        self.q = q
        self.degree = p + q

    def __len__(self) -> int:
        if self.p < 0 or self.degree < 0:
            return 0
        d = self.degree
        return sum(binom(d - a0 + self.n - 1, self.n - 1) for a0 in range(min(self.p, d) + 1))

    def __iter__(self):
        if self.p < 0 or self.degree < 0:
            return
        d = self.degree
        for a0 in range(min(self.p, d) + 1):
            for rest in monomials(self.n, d - a0):
                yield (a0,) + rest

    def monomials(self) -> List[Exponent]:
        return list(self)


def h0_line_model(p: int, q: int, n: int) -> int:
    """|SectionBasis|，必须等于 h_line(0,p,q,n)"""
    return len(SectionBasis(n, p, q))


# ======================================================================
# 子簇
# ======================================================================

_RESOLUTIONS = {
    WP: [(1, (0, 0)), (-1, (-1, 0)), (-1, (-1, 0)), (1, (-2, 0))],
    KAPPA: [(1, (0, 0)), (-1, (-1, 1)), (-1, (0, -1)), (1, (-1, 0))],
    Q1: [(1, (0, 0)), (-1, (-2, 0)), (-1, (-1, 0)), (1, (-3, 0))],
    Q2: [(1, (0, 0)), (-1, (-1, 1)), (-1, (-2, -2)), (1, (-3, -1))],
}

_DET_NORMAL = {WP: 2, KAPPA: 0, Q1: 3, Q2: 1}

_LABELS = {WP: '℘', KAPPA: 'κ', Q1: 'Q₁', Q2: 'Q₂'}


@dataclass(frozen=True)
class SubvarietySpec:
    """
    子簇规格

    kind:
        wp     拉回的余维 2 线性子空间，避开 p₀
        kappa  例外除子中的超平面
        Q1     拉回的 (1,2) 完全交二次曲面（仅 P̃⁴）
        Q2     例外除子中的二次超曲面（仅 P̃⁴）
    seed: None 表示固定坐标，否则为随机系数种子
    """
    kind: str
    n: int
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"未知子簇类型 {self.kind}")
        if self.kind in QUADRIC_KINDS and self.n != 4:
            raise PreconditionError(f"{self.kind} 只在 P̃⁴ 上定义，收到 n={self.n}")
        if self.n < 3:
            raise PreconditionError(f"子簇要求 n ≥ 3，收到 n={self.n}")

    @property
    def label(self) -> str:
        return _LABELS[self.kind]

    @property
    def in_exceptional(self) -> bool:
        return self.kind not in AMBIENT_KINDS

    @property
    def dim(self) -> int:
        return self.n - 2

    def restriction_degree(self, p: int, q: int) -> int:
        """O(p,q) 限制到子簇上的次数"""
        return q if self.in_exceptional else p + q

    def twist_restricting_to(self, m: int) -> Tuple[int, int]:
        """限制为 O_Y(m) 的一个线丛"""
        return (0, m) if self.in_exceptional else (m, 0)

    @property
    def det_normal_degree(self) -> int:
        return _DET_NORMAL[self.kind]

    def resolution(self) -> List[Tuple[int, Tuple[int, int]]]:
        """O_Y 的 Koszul 消解，(符号, 扭) 列表"""
        return list(_RESOLUTIONS[self.kind])

    def chern_character(self) -> ChowClass:
        total = ChowClass.zero(self.n)
        for sign, (a, b) in self.resolution():
            total = total + twist_character(a, b, self.n) * sign
        return total

    def c2(self) -> ChowClass:
        return total_chern(self.chern_character()).part(2)

    def cohomology(self, i: int, m: int) -> int:
        """h^i(Y, O_Y(m))；二次曲面 ≅ P¹×P¹ 上 O_Y(m) = O(m,m)"""
        if self.kind in QUADRIC_KINDS:
            if i == 0 and m >= 0:
                return (m + 1) ** 2
            if i == 2 and m <= -2:
                return (-m - 1) ** 2
            return 0
        return bott_h(self.dim, i, 0, m)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'n': self.n, 'seed': self.seed}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SubvarietySpec':
        return cls(data['kind'], int(data['n']), data.get('seed'))

    def __str__(self):
        return self.label


def validate_components(components: Sequence[SubvarietySpec]):
    """分量两两不交：环境型（℘/Q₁）与例外型（κ/Q₂）各至多一个"""
    if not components:
        raise PreconditionError("子簇列表为空")
    ns = {c.n for c in components}
    if len(ns) != 1:
        raise PreconditionError(f"分量的 n 不一致: {sorted(ns)}")
    ambient = [c for c in components if not c.in_exceptional]
    exceptional = [c for c in components if c.in_exceptional]
    if len(ambient) > 1:
        raise OverlappingComponentsError(f"{len(ambient)} 个环境型分量在 P̃ⁿ 中相交")
    if len(exceptional) > 1:
        raise OverlappingComponentsError(f"{len(exceptional)} 个例外型分量在例外除子中相交")


# ======================================================================
# 定义方程
# ======================================================================

def _rng(seed: int):
    return np.random.default_rng(seed)


def _random_int_row(rng, length: int, nonzero: bool = False) -> List[int]:
    row = [int(v) for v in rng.integers(-5, 6, size=length)]
    if nonzero:
        row = [v if v else 1 for v in row]
    return row


def _nullspace_rows(matrix: List[List[int]], width: int) -> List[List['QQ.dtype']]:
    dm = DomainMatrix([[QQ(v) for v in row] for row in matrix], (len(matrix), width), QQ)
    return dm.nullspace().to_list()


@dataclass
class ComponentModel:
    """一个分量的坐标模型：线性参数化与（二次型的）约化多项式"""
    spec: SubvarietySpec
    linear_forms: List[Any]
    ring: Any
    gens: Tuple[Any, ...]
    quadric: Any = None
    equations: Dict[str, Any] = field(default_factory=dict)

    def target_monomials(self, m: int) -> List[Exponent]:
        if m < 0:
            return []
        basis = list(monomials(len(self.gens), m))
        if self.quadric is None:
            return basis
        lead = self.quadric.LM
        return [mono for mono in basis if not all(a >= b for a, b in zip(mono, lead))]


@lru_cache(maxsize=None)
def component_model(spec: SubvarietySpec) -> ComponentModel:
    """
    构造分量的坐标模型

    固定坐标：℘ = {x₀ = x₁ = 0}；κ = {y_n = 0}；Q₁ = {x₀ + x₂ = 0} ∩ {Σt² = 0}；Q₂ = {Σy² = 0}
    随机模式：同类型的随机整数系数（numpy 种子）
    """
    n = spec.n
    rng = _rng(spec.seed) if spec.seed is not None else None

    if spec.kind == WP:
        if rng is None:
            eqs = [[1, 0] + [0] * (n - 1), [0, 1] + [0] * (n - 1)]
        else:
            while True:
                eqs = [_random_int_row(rng, n + 1) for _ in range(2)]
                if any(row[0] for row in eqs) and _rank(eqs) == 2:
                    break
        kernel = _nullspace_rows(eqs, n + 1)
        width = n + 1
    elif spec.kind == KAPPA:
        eqs = [[0] * (n - 1) + [1]] if rng is None else [_random_int_row(rng, n, nonzero=True)]
        kernel = _nullspace_rows(eqs, n)
        width = n
    elif spec.kind == Q1:
        eqs = [[1, 0, 1, 0, 0]] if rng is None else [[1] + _random_int_row(rng, n)]
        kernel = _nullspace_rows(eqs, n + 1)
        width = n + 1
    else:
        eqs = []
        kernel = [[QQ(int(i == j)) for j in range(n)] for i in range(n)]
        width = n

    num_gens = len(kernel)
    R, *gens = ring(','.join(f"t{j}" for j in range(num_gens)), QQ, grevlex)
    linear_forms = []
    for i in range(width):
        form = R.zero
        for j in range(num_gens):
            if kernel[j][i]:
                form += gens[j] * kernel[j][i]
        linear_forms.append(form)

    quadric = None
    if spec.kind in QUADRIC_KINDS:
        if rng is None:
            sym = [[int(i == j) for j in range(num_gens)] for i in range(num_gens)]
        else:
            raw = rng.integers(-3, 4, size=(num_gens, num_gens))
            sym = (raw + raw.T).tolist()
            for i in range(num_gens):
                sym[i][i] = int(sym[i][i]) or 1
        quadric = R.zero
        for i in range(num_gens):
            for j in range(num_gens):
                if sym[i][j]:
                    quadric += gens[i] * gens[j] * int(sym[i][j])
        if quadric == R.zero:
            raise PreconditionError("二次型退化为零")

    equations = {'linear': eqs, 'quadric': str(quadric.as_expr()) if quadric is not None else None}
    return ComponentModel(spec, linear_forms, R, tuple(gens), quadric, equations)


def _rank(rows: List[List[int]]) -> int:
    if not rows:
        return 0
    dm = DomainMatrix([[ZZ(v) for v in row] for row in rows], (len(rows), len(rows[0])), ZZ)
    return len(dm.rref_den()[2])


# ======================================================================
# 限制矩阵
# ======================================================================

@dataclass
class RestrictionMatrix:
    """求值映射 H⁰(O(p,q)) → ⊕ H⁰(O_Y(m_Y)) 的精确矩阵"""
    n: int
    p: int
    q: int
    components: Tuple[SubvarietySpec, ...]
    source: List[Exponent]
    rows: List[Tuple[str, Exponent]]
    matrix: DomainMatrix

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.source)

    def rank(self) -> int:
        nrows, ncols = self.shape
        if nrows == 0 or ncols == 0:
            return 0
        _, integral = self.matrix.clear_denoms_rowwise(convert=True)
        return len(integral.rref_den()[2])

    def kernel_dim(self) -> int:
        return len(self.source) - self.rank()

    def kernel_basis(self) -> List[List['QQ.dtype']]:
        """核的基向量（按 source 单项式排列）"""
        nrows, ncols = self.shape
        if ncols == 0:
            return []
        if nrows == 0:
            return [[QQ(int(i == j)) for j in range(ncols)] for i in range(ncols)]
        return self.matrix.nullspace().to_list()

    def kernel_polynomials(self) -> List[str]:
        """核向量写成 x₀..x_n 的多项式字符串"""
        result = []
        for vector in self.kernel_basis():
            terms = []
            for coeff, mono in zip(vector, self.source):
                if not coeff:
                    continue
                factors = '*'.join(f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(mono) if e)
                terms.append(f"{coeff}*{factors}" if factors else f"{coeff}")
            result.append(' + '.join(terms))
        return result

    def to_dict(self) -> Dict[str, Any]:
        entries = self.matrix.to_Matrix().tolist()
        return {
            'n': self.n,
            'twist': [self.p, self.q],
            'components': [c.to_dict() for c in self.components],
            'shape': list(self.shape),
            'rank': self.rank(),
            'kernel_dim': self.kernel_dim(),
            'source': [list(m) for m in self.source],
            'rows': [[label, list(m)] for label, m in self.rows],
            'entries': [[str(v) for v in row] for row in entries],
        }


def _restrict_monomial(model: ComponentModel, mono: Exponent, p: int):
    """单项式在分量上的像；例外型只保留 x₀^p 系数形式"""
    R = model.ring
    if model.spec.in_exceptional:
        if mono[0] != p:
            return R.zero
        exps = mono[1:]
    else:
        exps = mono
    image = R.one
    for form, e in zip(model.linear_forms, exps):
        if e:
            image *= form ** e
            if image == R.zero:
                return image
    if model.quadric is not None:
        image = image.rem(model.quadric)
    return image


def restrict_matrix(components: Sequence[SubvarietySpec], p: int, q: int) -> RestrictionMatrix:
    """
    组装联合求值矩阵（不假设各分量秩可加）

    Args:
        components: 两两不交的子簇
        p, q: 扭

    Returns:
        RestrictionMatrix
    """
    validate_components(components)
    components = tuple(components)
    n = components[0].n
    source = SectionBasis(n, p, q).monomials()

    rows: List[Tuple[str, Exponent]] = []
    entries: Dict[int, Dict[int, Any]] = {}
    for spec in components:
        model = component_model(spec)
        m = spec.restriction_degree(p, q)
        targets = model.target_monomials(m)
        index = {mono: len(rows) + k for k, mono in enumerate(targets)}
        rows.extend((spec.kind, mono) for mono in targets)
        if not targets:
            continue
        for col, mono in enumerate(source):
            image = _restrict_monomial(model, mono, p)
            for target, coeff in image.items():
                if coeff:
                    entries.setdefault(index[target], {})[col] = coeff

    matrix = DomainMatrix(entries, (len(rows), len(source)), QQ)
    logger.debug(f"限制矩阵 n={n} ({p},{q}) 形状 {len(rows)}x{len(source)}")
    return RestrictionMatrix(n, p, q, components, source, rows, matrix)


@lru_cache(maxsize=4096)
def _h0_ideal_cached(components: Tuple[SubvarietySpec, ...], p: int, q: int) -> int:
    if h_line(0, p, q, components[0].n) == 0:
        validate_components(components)
        return 0
    return restrict_matrix(components, p, q).kernel_dim()


def restriction_target_dim(components: Sequence[SubvarietySpec], p: int, q: int) -> int:
    return sum(c.cohomology(0, c.restriction_degree(p, q)) for c in components)


def h0_ideal(components: Sequence[SubvarietySpec], p: int, q: int) -> int:
    """h⁰(I_X(p,q)) = 截面维数 − 联合求值矩阵的秩"""
    return _h0_ideal_cached(tuple(components), p, q)
