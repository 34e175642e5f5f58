"""
射影丛上同调模块
O(p,q) 与拉回扭微分 Ω^l(p,q) 的上同调维数：推到 P^{n−1} 底空间后用 Bott 公式
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Any, Dict, List, Tuple

from .chow import ChowClass, chi_line, exp_class, twist_character
from ..utils.errors import PreconditionError
from ..utils.logger import logger


def binom(top: int, bottom: int) -> int:
    """二项式系数，上指标小于下指标或下指标为负时取 0"""
    if bottom < 0 or top < bottom:
        return 0
    return comb(top, bottom)


# ======================================================================
# Bott 公式
# ======================================================================

@lru_cache(maxsize=None)
def bott_h(dim: int, i: int, l: int, m: int) -> int:
    """h^i(P^dim, Ω^l(m))"""
    if l < 0 or l > dim or i < 0 or i > dim:
        return 0
    if i == 0 and m > l:
        return binom(m + dim - l, m) * binom(m - 1, l)
    if i == l and m == 0:
        return 1
    if i == dim and m < l - dim:
        return binom(-m + l, -m) * binom(-m - 1, dim - l)
    return 0


@dataclass
class BottTable:
    """底空间 P^dim 上 Ω^l(m) 的上同调，按需计算"""
    dim: int

    def h(self, i: int, l: int, m: int) -> int:
        return bott_h(self.dim, i, l, m)

    def rank(self, l: int) -> int:
        return binom(self.dim, l)


# ======================================================================
# 推出公式（唯一真值来源）
# ======================================================================

def _check_range(i: int, n: int):
    if not 0 <= i <= n:
        raise PreconditionError(f"上同调次数 i={i} 超出 [0,{n}]")


def h_omega(i: int, l: int, p: int, q: int, n: int) -> int:
    """
    h^i(P̃ⁿ, pr*Ω^l(p,q))

    p ≥ 0: Σ_{k=0}^{p} h^i(P^{n−1}, Ω^l(q+k))；p = −1: 0；
    p ≤ −2: Σ_{k=0}^{−2−p} h^{i−1}(P^{n−1}, Ω^l(q−k−1))
    """
    _check_range(i, n)
    if not 0 <= l <= n - 1:
        raise PreconditionError(f"Ω^l 要求 0 ≤ l ≤ {n - 1}，收到 l={l}")
    base = n - 1
    if p >= 0:
        return sum(bott_h(base, i, l, q + k) for k in range(p + 1))
    if p == -1 or i == 0:
        return 0
    return sum(bott_h(base, i - 1, l, q - k - 1) for k in range(-1 - p))


def h_line(i: int, p: int, q: int, n: int) -> int:
    """h^i(P̃ⁿ, O(p,q))"""
    return h_omega(i, 0, p, q, n)


def h_line_vector(p: int, q: int, n: int) -> List[int]:
    return [h_line(i, p, q, n) for i in range(n + 1)]


def serre_dual_line(i: int, p: int, q: int, n: int) -> Tuple[int, int, int]:
    """h^i(O(p,q)) = h^{n−i}(O(−2−p, 1−n−q))"""
    return n - i, -2 - p, 1 - n - q


def serre_dual_omega(i: int, l: int, p: int, q: int, n: int) -> Tuple[int, int, int, int]:
    """h^i(Ω^l(p,q)) = h^{n−i}(Ω^{n−1−l}(−2−p, 1−q))"""
    return n - i, n - 1 - l, -2 - p, 1 - q


# ======================================================================
# 印刷表格的转写（仅用于交叉校验）
# ======================================================================

def h_line_printed(i: int, p: int, q: int, n: int) -> int:
    """线丛上同调的四行闭式表"""
    if i == 0:
        return sum(binom(n + q + k - 1, n - 1) for k in range(p + 1))
    if i == 1:
        return sum(binom(n + q - k - 2, n - 1) for k in range(-1 - p))
    if i == n - 1:
        return sum(binom(-q - k - 1, n - 1) for k in range(p + 1))
    if i == n:
        return sum(binom(k - q, n - 1) for k in range(-1 - p))
    return 0


def h_omega_printed(i: int, l: int, p: int, q: int, n: int) -> int:
    """扭微分上同调的闭式表（含孤立的 "1, l = i, k+q = 0" 行，每个 k 各加一次）"""
    total = 0
    if i == 0:
        total += sum(binom(q + k + n - l - 1, n - 1 - l) * binom(q + k - 1, l) for k in range(p + 1))
    if i == 1:
        total += sum(binom(q - k + n - l - 2, n - 1 - l) * binom(q - k - 2, l) for k in range(-1 - p))
    if i == l:
        total += sum(1 for k in range(p + 1) if k + q == 0)
    if i == n - 1:
        total += sum(binom(-q - k + l, l) * binom(-q - k - 1, n - 1 - l) for k in range(p + 1))
    if i == n:
        total += sum(binom(k - q + l + 1, l) * binom(k - q, n - 1 - l) for k in range(-1 - p))
    return total


def printed_omega_covers(i: int, l: int, p: int, q: int) -> bool:
    """p ≤ −2 时 i = l+1 且某个 q−k−1 = 0 的贡献不在印刷表中"""
    if p > -2 or i != l + 1:
        return True
    return not any(q - k - 1 == 0 for k in range(-1 - p))


# ======================================================================
# 陈特征
# ======================================================================

def ch_omega(l: int, p: int, q: int, n: int) -> ChowClass:
    """
    ch(pr*Ω^l_{P^{n−1}} ⊗ O(p,q))

    Koszul：Σ_{j=0}^{l} (−1)^j C(n, l−j) e^{−(l−j)α}
    """
    total = ChowClass.zero(n)
    alpha = ChowClass.alpha(n)
    for j in range(l + 1):
        total = total + exp_class(alpha * (-(l - j))) * ((-1) ** j * binom(n, l - j))
    return total * twist_character(p, q, n)


# ======================================================================
# 例外序列
# ======================================================================

@dataclass
class ExceptionalCollection:
    n: int
    twists: List[Tuple[int, int]]
    report: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'twists': [list(t) for t in self.twists], 'report': self.report}


def exceptional_twists(n: int) -> List[Tuple[int, int]]:
    """O(−1,2−n),…,O(−1,1), O(0,1−n),…,O(0,0)"""
    return [(-1, m) for m in range(2 - n, 2)] + [(0, m) for m in range(1 - n, 1)]


def exceptional_collection(n: int) -> ExceptionalCollection:
    """
    例外线丛序列及其校验报告

    Args:
        n: 环境维数（≥ 3）

    Returns:
        ExceptionalCollection，report 中含逐项上同调与正交性检查
    """
    if n < 3:
        raise PreconditionError(f"例外序列要求 n ≥ 3，收到 n={n}")
    twists = exceptional_twists(n)

    acyclic = []
    for p, q in twists:
        vector = h_line_vector(p, q, n)
        expected = [1] + [0] * n if (p, q) == (0, 0) else [0] * (n + 1)
        acyclic.append({'twist': [p, q], 'h': vector, 'ok': vector == expected})

    orthogonality = []
    for k, (pk, qk) in enumerate(twists):
        for j in range(k + 1, len(twists)):
            pj, qj = twists[j]
            vector = h_line_vector(pk - pj, qk - qj, n)
            orthogonality.append({'pair': [k, j], 'h': vector, 'ok': not any(vector)})

    ok = all(item['ok'] for item in acyclic) and all(item['ok'] for item in orthogonality)
    if not ok:
        logger.warning(f"n={n} 的例外序列校验失败")
    report = {
        'acyclic': acyclic,
        'orthogonality_failures': [item for item in orthogonality if not item['ok']],
        'orthogonality_pairs': len(orthogonality),
        'structure_sheaf_h0': h_line(0, 0, 0, n),
        'ok': ok,
    }
    return ExceptionalCollection(n, twists, report)


def alternating_sum(values: List[int]) -> int:
    return sum((-1) ** i * v for i, v in enumerate(values))


def chi_omega(l: int, p: int, q: int, n: int) -> int:
    return alternating_sum([h_omega(i, l, p, q, n) for i in range(n + 1)])


def line_chi_matches(p: int, q: int, n: int) -> bool:
    """Σ(−1)^i h^i(O(p,q)) 与 χ 公式一致"""
    return alternating_sum(h_line_vector(p, q, n)) == chi_line(p, q, n)


def omega_rank(l: int, n: int) -> int:
    return binom(n - 1, l)


def omega_to_line(l: int, p: int, q: int, n: int):
    """Ω⁰ = O；Ω^{n−1}(p,q) = O(p, q−n)；其余返回 None"""
    if l == 0:
        return p, q
    if l == n - 1:
        return p, q - n
    return None


