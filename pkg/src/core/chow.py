"""
Chow 环模块
P̃ⁿ 的 Chow 环精确算术、示性类、Euler 示性数、度数、斜率与荷
"""

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Iterator, Tuple, Union

import sympy
from sympy import QQ

from ..utils.errors import DimensionMismatchError, HypothesisError, PreconditionError, ToolkitError


_XI = sympy.Symbol('xi')
_ALPHA = sympy.Symbol('alpha')


def to_qq(value) -> 'QQ.dtype':
    """把 int / Fraction / sympy 有理数统一转换为 QQ 元素"""
    if QQ.of_type(value):
        return value
    if isinstance(value, int):
        return QQ(value)
    if hasattr(value, 'numerator') and hasattr(value, 'denominator'):
        return QQ(int(value.numerator), int(value.denominator))
    return QQ.from_sympy(sympy.nsimplify(value))


def to_plain(value) -> Union[int, str]:
    """有理数的报告形式：整数原样输出，否则输出 'a/b'"""
    value = to_qq(value)
    if value.denominator == 1:
        return int(value.numerator)
    return f"{int(value.numerator)}/{int(value.denominator)}"


class ChowClass:
    """
    A*(P̃ⁿ) 的元素，基为 {1, ξ^k (k=1..n), α^l (l=1..n−1)}

    乘法规则：ξ^a·ξ^b = ξ^{a+b}，ξ^k·α^l = ξ^{k+l}（k+l ≤ n, k ≤ n−1），
    α^a·α^b = α^{a+b}（a+b ≤ n−1），其余为零。
    """

    __slots__ = ('n', 'r0', 'r', 's')

    def __init__(self, n: int, r0=0, r=None, s=None):
        if n < 2:
            raise PreconditionError(f"环境维数必须 ≥ 2，收到 n={n}")
        self.n = n
        self.r0 = to_qq(r0)
        r = list(r or [])
        s = list(s or [])
        if len(r) > n or len(s) > n - 1:
            raise DimensionMismatchError(f"系数个数超出 n={n} 的基")
        self.r = tuple(to_qq(c) for c in r + [0] * (n - len(r)))
        self.s = tuple(to_qq(c) for c in s + [0] * (n - 1 - len(s)))

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> 'ChowClass':
        return cls(n)

    @classmethod
    def one(cls, n: int) -> 'ChowClass':
        return cls(n, r0=1)

    @classmethod
    def xi(cls, n: int, k: int = 1) -> 'ChowClass':
        r = [0] * n
        if 1 <= k <= n:
            r[k - 1] = 1
        elif k == 0:
            return cls.one(n)
        return cls(n, r=r)

    @classmethod
    def alpha(cls, n: int, l: int = 1) -> 'ChowClass':
        if l == 0:
            return cls.one(n)
        s = [0] * (n - 1)
        if 1 <= l <= n - 1:
            s[l - 1] = 1
        return cls(n, s=s)

    @classmethod
    def from_twist(cls, p: int, q: int, n: int) -> 'ChowClass':
        """c₁(O(p,q)) = pξ + qα"""
        return cls.xi(n) * p + cls.alpha(n) * q

    @classmethod
    def parse(cls, text: str, n: int) -> 'ChowClass':
        """解析 'xi + alpha'、'(xi+alpha)**4' 之类的多项式表达式"""
        try:
            expr = sympy.expand(sympy.sympify(text, locals={'xi': _XI, 'alpha': _ALPHA}))
            poly = sympy.Poly(expr, _XI, _ALPHA, domain=QQ)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as e:
            raise PreconditionError(f"无法解析 Chow 表达式 '{text}': {e}") from e
        result = cls.zero(n)
        xi, alpha = cls.xi(n), cls.alpha(n)
        for (a, b), coeff in poly.terms():
            result = result + (xi ** a) * (alpha ** b) * coeff
        return result

    # ------------------------------------------------------------------
    # 环运算
    # ------------------------------------------------------------------
    def _terms(self) -> Iterator[Tuple[str, int, 'QQ.dtype']]:
        if self.r0:
            yield ('1', 0, self.r0)
        for k, c in enumerate(self.r, 1):
            if c:
                yield ('x', k, c)
        for l, c in enumerate(self.s, 1):
            if c:
                yield ('a', l, c)

    def _check(self, other: 'ChowClass'):
        if self.n != other.n:
            raise DimensionMismatchError(f"维数不一致: {self.n} 与 {other.n}")

    def __add__(self, other):
        if not isinstance(other, ChowClass):
            other = ChowClass(self.n, r0=other)
        self._check(other)
        return ChowClass(self.n, self.r0 + other.r0,
                         [a + b for a, b in zip(self.r, other.r)],
                         [a + b for a, b in zip(self.s, other.s)])

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other if isinstance(other, ChowClass) else -to_qq(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ChowClass):
            c = to_qq(other)
            return ChowClass(self.n, self.r0 * c, [a * c for a in self.r], [a * c for a in self.s])
        self._check(other)
        n = self.n
        r0 = QQ(0)
        r = [QQ(0)] * n
        s = [QQ(0)] * (n - 1)
        for kind_a, ea, ca in self._terms():
            for kind_b, eb, cb in other._terms():
                c = ca * cb
                if kind_a == '1' and kind_b == '1':
                    r0 += c
                elif kind_a == '1' or kind_b == '1':
                    kind, e = (kind_b, eb) if kind_a == '1' else (kind_a, ea)
                    if kind == 'x':
                        r[e - 1] += c
                    else:
                        s[e - 1] += c
                elif kind_a == 'a' and kind_b == 'a':
                    # α^n = 0
                    if ea + eb <= n - 1:
                        s[ea + eb - 1] += c
                elif ea + eb <= n:
                    r[ea + eb - 1] += c
        return ChowClass(n, r0, r, s)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PreconditionError("Chow 类不支持负幂")
        result = ChowClass.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, ChowClass):
            return (self.n, self.r0, self.r, self.s) == (other.n, other.r0, other.r, other.s)
        if isinstance(other, int) or QQ.of_type(other):
            return self == ChowClass(self.n, r0=other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.r0, self.r, self.s))

    def is_zero(self) -> bool:
        return not self.r0 and not any(self.r) and not any(self.s)

    # ------------------------------------------------------------------
    # 分次与读数
    # ------------------------------------------------------------------
    def part(self, k: int) -> 'ChowClass':
        """k 次齐次部分"""
        if k == 0:
            return ChowClass(self.n, r0=self.r0)
        xi_c, alpha_c = self.coefficients(k)
        return ChowClass.xi(self.n, k) * xi_c + ChowClass.alpha(self.n, k) * alpha_c

    def coefficients(self, k: int) -> Tuple['QQ.dtype', 'QQ.dtype']:
        """k 次部分的 (ξ^k 系数, α^k 系数)"""
        if k == 0:
            return self.r0, QQ(0)
        xi_c = self.r[k - 1] if 1 <= k <= self.n else QQ(0)
        alpha_c = self.s[k - 1] if 1 <= k <= self.n - 1 else QQ(0)
        return xi_c, alpha_c

    def twist_pair(self) -> Tuple[int, int]:
        """1 次部分 aξ + bα 对应的线丛 O(a,b)"""
        a, b = self.coefficients(1)
        if a.denominator != 1 or b.denominator != 1:
            raise PreconditionError(f"c₁ = {self} 不是整系数")
        return int(a.numerator), int(b.numerator)

    def __repr__(self):
        return f"ChowClass({self})"

    def __str__(self):
        pieces = []

        def fmt(c, mono):
            text = to_plain(c)
            if mono == '1':
                return str(text)
            if text == 1:
                return mono
            if text == -1:
                return f"-{mono}"
            return f"{text}*{mono}"

        if self.r0:
            pieces.append(fmt(self.r0, '1'))
        for k in range(1, self.n + 1):
            xi_c, alpha_c = self.coefficients(k)
            if xi_c:
                pieces.append(fmt(xi_c, 'xi' if k == 1 else f"xi^{k}"))
            if alpha_c:
                pieces.append(fmt(alpha_c, 'alpha' if k == 1 else f"alpha^{k}"))
        if not pieces:
            return '0'
        return ' + '.join(pieces).replace('+ -', '- ')

    def to_dict(self):
        return {
            'n': self.n,
            'text': str(self),
            'r0': to_plain(self.r0),
            'xi': [to_plain(c) for c in self.r],
            'alpha': [to_plain(c) for c in self.s],
        }


# ======================================================================
# 幂级数与示性类
# ======================================================================

def power_series(c: ChowClass, coeffs) -> ChowClass:
    """Σ coeffs[k]·c^k，c 的常数项必须为零（幂零）"""
    if c.r0:
        raise PreconditionError("幂级数代入要求常数项为零")
    result = ChowClass.zero(c.n)
    power = ChowClass.one(c.n)
    for k in range(c.n + 1):
        if k < len(coeffs) and coeffs[k]:
            result = result + power * coeffs[k]
        power = power * c
    return result


def exp_class(c: ChowClass) -> ChowClass:
    """截断指数 Σ c^k / k!"""
    return power_series(c, [QQ(1, factorial(k)) for k in range(c.n + 1)])


def twist_character(p: int, q: int, n: int) -> ChowClass:
    """ch(O(p,q)) = exp(pξ + qα)"""
    return exp_class(ChowClass.from_twist(p, q, n))


@lru_cache(maxsize=None)
def todd_series_coefficients(order: int) -> Tuple['QQ.dtype', ...]:
    """x/(1−e^{−x}) 的 Taylor 系数 a_0..a_order"""
    x = sympy.Symbol('x')
    expansion = sympy.series(x / (1 - sympy.exp(-x)), x, 0, order + 1).removeO()
    poly = sympy.Poly(expansion, x)
    return tuple(QQ.from_sympy(poly.coeff_monomial(x ** k)) for k in range(order + 1))


@lru_cache(maxsize=None)
def chern_tangent(n: int) -> ChowClass:
    """c(T P̃ⁿ) = (1+α)ⁿ(1+2ξ−α)"""
    one = ChowClass.one(n)
    alpha, xi = ChowClass.alpha(n), ChowClass.xi(n)
    return (one + alpha) ** n * (one + xi * 2 - alpha)


@lru_cache(maxsize=None)
def todd_tangent(n: int) -> ChowClass:
    """Td(T P̃ⁿ) = (α/(1−e^{−α}))ⁿ · ξ/(1−e^{−ξ}) · (ξ−α)/(1−e^{−(ξ−α)})"""
    coeffs = todd_series_coefficients(n)
    alpha, xi = ChowClass.alpha(n), ChowClass.xi(n)
    td_alpha = power_series(alpha, coeffs)
    return td_alpha ** n * power_series(xi, coeffs) * power_series(xi - alpha, coeffs)


def degree(c: ChowClass) -> 'QQ.dtype':
    """对点类 ξⁿ 积分"""
    return c.r[c.n - 1]


def hrr_chi(ch: ChowClass, n: int) -> 'QQ.dtype':
    """Hirzebruch–Riemann–Roch：χ = ∫ ch·Td"""
    if ch.n != n:
        raise DimensionMismatchError(f"陈特征在 n={ch.n} 上，要求 n={n}")
    return degree(ch * todd_tangent(n))


def chi_line(p: int, q: int, n: int) -> int:
    """χ(O(p,q)) = [(p+q+1)···(p+q+n) − q(q+1)···(q+n−1)] / n!"""
    upper = 1
    lower = 1
    for j in range(1, n + 1):
        upper *= p + q + j
    for j in range(n):
        lower *= q + j
    numerator = upper - lower
    if numerator % factorial(n):
        raise ToolkitError(f"χ(O({p},{q})) 在 n={n} 上不是整数: {numerator}/{factorial(n)}")
    return numerator // factorial(n)


# ======================================================================
# 陈类 <-> 陈特征（Newton 恒等式）
# ======================================================================

def chern_character(rank: int, total: ChowClass) -> ChowClass:
    """由秩与全陈类求陈特征"""
    n = total.n
    e = [total.part(k) for k in range(n + 1)]
    p = [ChowClass.zero(n)] * (n + 1)
    ch = ChowClass(n, r0=rank)
    for k in range(1, n + 1):
        acc = e[k] * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            acc = acc + e[i] * p[k - i] * ((-1) ** (i - 1))
        p[k] = acc
        ch = ch + acc * QQ(1, factorial(k))
    return ch


def total_chern(ch: ChowClass) -> ChowClass:
    """由陈特征求全陈类"""
    n = ch.n
    p = [ChowClass.zero(n)] + [ch.part(k) * factorial(k) for k in range(1, n + 1)]
    e = [ChowClass.one(n)]
    for k in range(1, n + 1):
        acc = ChowClass.zero(n)
        for i in range(1, k + 1):
            acc = acc + e[k - i] * p[i] * ((-1) ** (i - 1))
        e.append(acc * QQ(1, k))
    total = ChowClass.zero(n)
    for piece in e:
        total = total + piece
    return total


def rank_of(ch: ChowClass) -> int:
    r = ch.r0
    if r.denominator != 1:
        raise ToolkitError(f"陈特征的秩不是整数: {ch}")
    return int(r.numerator)


# ======================================================================
# 极化与典范丛
# ======================================================================

@dataclass(frozen=True)
class Polarization:
    """极化 L = O(a, b)"""
    n: int
    a: int
    b: int
    explicit: bool = False

    @classmethod
    def default(cls, n: int) -> 'Polarization':
        """奇数 n 的 L = O(1, N_n)，N_3 = 1，否则 N_n = (n−3)/2"""
        if n % 2 == 0:
            raise HypothesisError(f"n={n} 为偶数，必须显式给出极化 (a,b)", failed=['polarization'])
        if n < 3:
            raise HypothesisError(f"n={n} 过小，极化只对奇数 n ≥ 3 定义", failed=['polarization'])
        big_n = 1 if n == 3 else (n - 3) // 2
        return cls(n, 1, big_n)

    @classmethod
    def explicit_twist(cls, n: int, a: int, b: int) -> 'Polarization':
        return cls(n, a, b, explicit=True)

    @property
    def twist(self) -> Tuple[int, int]:
        return self.a, self.b

    def c1(self) -> ChowClass:
        return ChowClass.from_twist(self.a, self.b, self.n)

    def to_dict(self):
        return {'n': self.n, 'twist': [self.a, self.b], 'explicit': self.explicit}


@dataclass(frozen=True)
class CanonicalData:
    """ω_{P̃ⁿ} = O(−2, 1−n)"""
    n: int

    @property
    def omega(self) -> Tuple[int, int]:
        return -2, 1 - self.n

    def det_target(self, L: Polarization) -> Tuple[int, int]:
        """L⊗² ⊗ ω 的扭对"""
        wp, wq = self.omega
        return 2 * L.a + wp, 2 * L.b + wq


def delta(theta: Tuple[int, int], L: Polarization) -> int:
    """δ_L(θ) = c₁(θ)·c₁(L)^{n−1}"""
    value = degree(ChowClass.from_twist(theta[0], theta[1], L.n) * L.c1() ** (L.n - 1))
    return int(value.numerator)


def slope(c1: ChowClass, rank: int, L: Polarization) -> 'QQ.dtype':
    if rank <= 0:
        raise PreconditionError("斜率要求秩为正")
    return degree(c1 * L.c1() ** (L.n - 1)) / QQ(rank)


def charge(c2: ChowClass, L: Polarization) -> 'QQ.dtype':
    return degree(c2 * L.c1() ** (L.n - 2))
