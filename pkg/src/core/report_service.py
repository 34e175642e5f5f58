"""
报告服务模块
把命令行的每个动词分派到核心模块，统一计时、错误捕获与配置嵌入
"""

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import beilinson, instanton, stability
from .chow import (ChowClass, Polarization, chern_character, chi_line, degree, hrr_chi, to_plain,
                   todd_tangent, twist_character, slope)
from .projcoh import exceptional_twists, h_line_vector, h_omega
from .sections import h0_ideal, restrict_matrix
from ..config.config import config
from ..utils.errors import PreconditionError, ToolkitError
from ..utils.logger import logger

PROTOTYPE = 'prototype'
EVEN_EXAMPLE = 'even-example'
ELEMENTARY = 'elementary'
SHEAVES = (PROTOTYPE, EVEN_EXAMPLE, ELEMENTARY)

# 视为通过的判定
ACCEPTED_VERDICTS = (instanton.PASS, instanton.INSTANTON, stability.SEMISTABLE_CERTIFIED, 'EXACT')

AGREES = 'AGREES'
KNOWN_DISCREPANCY = 'KNOWN-DISCREPANCY'
UNEXPECTED = 'UNEXPECTED'

# 计算值与显示值不同、且已核对计算值的量
KNOWN_DISCREPANCIES = {
    'delta01(I_X^2(2,0))': '计算值 −2，显示值 −4',
    'h1(E⊗E^∨)': '下界 5 与显示值一致，上界未收缩到 6',
    'h0(E⊗K(0,2)) bound': '两项之和为 6，显示值 ≤ 1',
    'h^5(F(-5,-5))': '计算值 106，显示值 54',
    'printed tables p=-1 s=5': 's = n 行公式无贡献，印刷表列出两项',
}


class ReportService:
    """
    报告服务类
    负责构造缓存、动词分派与结果包装
    """

    def __init__(self, run_config: Optional[Dict[str, Any]] = None, axioms: Optional[Dict[str, Any]] = None):
        self.run_config = dict(run_config or {})
        self.axioms = axioms
        self._constructions: Dict[Tuple[str, int], instanton.Construction] = {}
        self._cache_config()
        self._handlers: Dict[Tuple[str, str], Callable[..., Dict[str, Any]]] = {
            ('chow', 'mul'): self.chow_mul,
            ('chow', 'degree'): self.chow_degree,
            ('chow', 'chern'): self.chow_chern,
            ('chow', 'todd'): self.chow_todd,
            ('chow', 'chi'): self.chow_chi,
            ('coh', 'line'): self.coh_line,
            ('coh', 'omega'): self.coh_omega,
            ('coh', 'table'): self.coh_table,
            ('sections', 'h0-ideal'): self.sections_h0_ideal,
            ('stability', 'region'): self.stability_region,
            ('stability', 'certify'): self.stability_certify,
            ('monad', 'terms'): self.monad_terms,
            ('monad', 'assemble'): self.monad_assemble,
            ('monad', 'tables'): self.monad_tables,
            ('instanton', 'build'): self.instanton_build,
            ('instanton', 'check'): self.instanton_check,
            ('instanton', 'restrict'): self.instanton_restrict,
            ('instanton', 'moduli'): self.instanton_moduli,
            ('instanton', 'ulrich'): self.instanton_ulrich,
            ('instanton', 'elementary'): self.instanton_elementary,
            ('paper', 'reproduce-all'): self.reproduce_all,
        }

    def _cache_config(self):
        """缓存常用配置，命令行参数优先"""
        self.n = int(self.run_config.get('n') or config.get('toolkit.n', 5))
        self.polarization = self.run_config.get('polarization') or config.get('toolkit.polarization')
        coordinates = self.run_config.get('coordinates') or config.get('toolkit.coordinates', 'fixed')
        seed = self.run_config.get('seed')
        if seed is None and coordinates == 'generic':
            seed = config.get('toolkit.seed', 20240601)
        self.seed = seed
        self.workers = int(config.get('report.workers', 2))

    @property
    def actions(self) -> List[Tuple[str, str]]:
        return list(self._handlers)

    # ------------------------------------------------------------------
    # 分派
    # ------------------------------------------------------------------
    def run(self, verb: str, action: str, **kwargs) -> Dict[str, Any]:
        """
        执行一个动词

        Returns:
            dict: success, duration, verb, action, config, result；失败时带 error 与 error_type
        """
        result = {
            'success': False,
            'verb': verb,
            'action': action,
            'config': self.embedded_config(),
            'result': None,
            'duration': 0,
        }
        start_time = time.time()
        try:
            handler = self._handlers.get((verb, action))
            if handler is None:
                raise PreconditionError(f"未知命令 {verb} {action}")
            result['result'] = handler(**kwargs)
            result['success'] = True
        except ToolkitError as e:
            logger.error(f"{verb} {action} 出错: {e}", exc_info=True)
            result.update(e.to_dict())
        result['duration'] = round(time.time() - start_time, 3)
        return result

    def embedded_config(self) -> Dict[str, Any]:
        embedded = config.as_dict()
        embedded['run'] = dict(self.run_config, n=self.n, seed=self.seed)
        return embedded

    @staticmethod
    def passed(result: Dict[str, Any]) -> bool:
        """成功且所有判定都可接受"""
        if not result.get('success'):
            return False
        body = result.get('result') or {}
        verdicts = body.get('verdicts') or ([body['verdict']] if 'verdict' in body else [])
        return all(v in ACCEPTED_VERDICTS for v in verdicts)

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------
    def _polarization(self, n: int) -> Optional[Polarization]:
        if not self.polarization:
            return None
        a, b = self.polarization
        return Polarization.explicit_twist(n, int(a), int(b))

    def construction(self, sheaf: str = PROTOTYPE, n: Optional[int] = None) -> instanton.Construction:
        """按名称构造并缓存；even-example 固定 n=4"""
        n = 4 if sheaf == EVEN_EXAMPLE else (n or self.n)
        key = (sheaf, n)
        if key in self._constructions:
            return self._constructions[key]
        if sheaf == PROTOTYPE:
            built = instanton.build_odd(n, self.seed)
        elif sheaf == EVEN_EXAMPLE:
            built = instanton.build_even4(self.seed)
        elif sheaf == ELEMENTARY:
            built = instanton.build_elementary(self.construction(PROTOTYPE, n))
        else:
            raise PreconditionError(f"未知层 {sheaf}，可选 {', '.join(SHEAVES)}")
        L = self._polarization(n)
        if L is not None:
            built.L = L
        if self.axioms is not None and built.parent is None:
            built.registry.merge_axioms(self.axioms)
        self._constructions[key] = built
        return built

    def _expr(self, construction: instanton.Construction, expr: Optional[str]):
        return construction.registry.parse(expr) if expr else construction.E

    @staticmethod
    def _twists(value: Any, n: int) -> List[Tuple[int, int]]:
        """'exceptional'、'a,b;c,d' 或 [(a,b), ...]"""
        if value is None or value == 'exceptional':
            return exceptional_twists(n)
        if value == 'beilinson':
            return beilinson.required_twists(n)
        if isinstance(value, str):
            try:
                return [tuple(int(x) for x in item.split(',')) for item in value.split(';') if item.strip()]
            except ValueError as e:
                raise PreconditionError(f"无法解析扭列表 '{value}'") from e
        return [tuple(t) for t in value]

    # ------------------------------------------------------------------
    # chow
    # ------------------------------------------------------------------
    def chow_mul(self, exprs: Sequence[str] = ('xi', 'alpha'), n: Optional[int] = None, **_) -> Dict[str, Any]:
        n = n or self.n
        product = ChowClass.one(n)
        for text in exprs:
            product = product * ChowClass.parse(text, n)
        return {'n': n, 'factors': list(exprs), 'product': str(product), 'class': product.to_dict(),
                'degree': to_plain(degree(product))}

    def chow_degree(self, expr: str = 'xi**5', n: Optional[int] = None, **_) -> Dict[str, Any]:
        n = n or self.n
        value = ChowClass.parse(expr, n)
        return {'n': n, 'expr': expr, 'degree': to_plain(degree(value))}

    def chow_chern(self, expr: str = '1', rank: int = 2, n: Optional[int] = None, **_) -> Dict[str, Any]:
        """总陈类 → 陈特征"""
        n = n or self.n
        total = ChowClass.parse(expr, n)
        ch = chern_character(int(rank), total)
        return {'n': n, 'rank': int(rank), 'total_chern': str(total), 'chern_character': str(ch),
                'chi': to_plain(hrr_chi(ch, n))}

    def chow_todd(self, n: Optional[int] = None, **_) -> Dict[str, Any]:
        n = n or self.n
        td = todd_tangent(n)
        return {'n': n, 'todd': str(td), 'class': td.to_dict(), 'degree': to_plain(degree(td))}

    def chow_chi(self, p: int = 0, q: int = 0, n: Optional[int] = None, **_) -> Dict[str, Any]:
        n = n or self.n
        hrr = hrr_chi(twist_character(p, q, n), n)
        closed = chi_line(p, q, n)
        return {'n': n, 'twist': [p, q], 'hrr': to_plain(hrr), 'closed_form': closed,
                'verdict': 'EXACT' if hrr == closed else instanton.FAIL}

    # ------------------------------------------------------------------
    # coh / sections
    # ------------------------------------------------------------------
    def coh_line(self, p: int = 0, q: int = 0, n: Optional[int] = None, **_) -> Dict[str, Any]:
        n = n or self.n
        return {'n': n, 'sheaf': f"O({p},{q})", 'h': h_line_vector(p, q, n)}

    def coh_omega(self, l: int = 1, p: int = 0, q: int = 0, n: Optional[int] = None, **_) -> Dict[str, Any]:
        n = n or self.n
        return {'n': n, 'sheaf': f"Ω^{l}({p},{q})", 'h': [h_omega(i, l, p, q, n) for i in range(n + 1)]}

    def coh_table(self, sheaf: str = PROTOTYPE, expr: Optional[str] = None, twists: Any = None,
                  **_) -> Dict[str, Any]:
        c = self.construction(sheaf)
        table = c.solver().table(self._expr(c, expr), self._twists(twists, c.n))
        body = table.to_dict()
        body['verdict'] = 'EXACT' if table.exact else instanton.INCONCLUSIVE
        return body

    def sections_h0_ideal(self, sheaf: str = PROTOTYPE, p: int = 2, q: int = 0, matrix: bool = False,
                          **_) -> Dict[str, Any]:
        c = self.construction(sheaf)
        body = {'X': [Y.label for Y in c.X], 'twist': [p, q], 'h0': h0_ideal(c.X, p, q)}
        if matrix:
            body['matrix'] = restrict_matrix(c.X, p, q).to_dict()
        return body

    # ------------------------------------------------------------------
    # stability
    # ------------------------------------------------------------------
    def stability_region(self, sheaf: str = PROTOTYPE, **_) -> Dict[str, Any]:
        c = self.construction(sheaf)
        mu = slope(c.registry.chern_character(c.E).part(1), 2, c.L)
        semistable = stability.region(c.L, mu)
        body = {'region': semistable.to_dict(), 'stable_region': stability.region(c.L, mu, strict=False).to_dict()}
        try:
            coefficients = stability.displayed_region_coefficients(c.n)
            body['displayed'] = {k: to_plain(v) for k, v in coefficients.items()}
            body['displayed_agrees'] = stability.region_matches_displayed(c.n)
        except ToolkitError as e:
            body['displayed'] = None
            body['displayed_error'] = str(e)
        if c.n % 2 == 1 and c.n >= 5:
            body['window_bound'] = to_plain(stability.window_bound(c.n))
            body['window_limit'] = stability.window_limit()
        return body

    def stability_certify(self, sheaf: str = PROTOTYPE, coverage: bool = True, **_) -> Dict[str, Any]:
        c = self.construction(sheaf)
        checker = instanton.InstantonChecker(c)
        certificate = checker.stability()
        body = certificate.to_dict()
        if coverage:
            body['coverage'] = certificate.check_coverage(seed=self.seed)
        return body

    # ------------------------------------------------------------------
    # monad
    # ------------------------------------------------------------------
    def monad_terms(self, n: Optional[int] = None, **_) -> Dict[str, Any]:
        n = n or self.n
        return {
            'n': n,
            'contributions': {str(p): {str(s): [list(t) for t in rows]
                                       for s, rows in beilinson.contribution_tables(p, n).items()}
                              for p in (-1, 0, 1)},
            'obstructions': [{'s': s, 'twist': list(t)} for s, t in beilinson.obstruction_list(n)],
        }

    def monad_tables(self, n: Optional[int] = None, **_) -> Dict[str, Any]:
        rows = beilinson.compare_printed_tables(n or self.n)
        return {'rows': rows, 'disagreements': [row for row in rows if not row['agrees']]}

    def monad_assemble(self, sheaf: str = PROTOTYPE, **_) -> Dict[str, Any]:
        c = self.construction(sheaf)
        solver = c.solver()
        monad = beilinson.monad_for(solver, c.E)
        body = monad.to_dict()
        checks = monad.checks
        ok = checks.get('rank_ok') and checks.get('chern_character_ok') and checks.get('chi_ok')
        body['verdict'] = instanton.PASS if ok else instanton.FAIL
        return body

    # ------------------------------------------------------------------
    # instanton
    # ------------------------------------------------------------------
    def instanton_build(self, sheaf: str = PROTOTYPE, **_) -> Dict[str, Any]:
        c = self.construction(sheaf)
        body = c.to_dict()
        body['whitney_audit'] = c.registry.whitney_audit()
        if sheaf == EVEN_EXAMPLE:
            body['witness'] = instanton.even_witness(c)
        return body

    def instanton_check(self, sheaf: str = PROTOTYPE, monad: Optional[bool] = None, grid: Optional[int] = None,
                        n: Optional[int] = None, **_) -> Dict[str, Any]:
        c = self.construction(sheaf, n)
        with_monad = config.get('instanton.with_monad', True) if monad is None else monad
        return instanton.check(c, with_monad, grid).to_dict()

    def instanton_restrict(self, sheaf: str = PROTOTYPE, divisors: Sequence[str] = (instanton.DIVISOR_H, instanton.DIVISOR_E),
                           **_) -> Dict[str, Any]:
        c = self.construction(sheaf)
        results = {D: instanton.restrict_to_divisor(c, D) for D in divisors}
        ok = all(r['ok'] and r['h2_vanishing'] for r in results.values())
        return {'divisors': results, 'verdict': instanton.PASS if ok else instanton.FAIL}

    def instanton_moduli(self, sheaf: str = PROTOTYPE, **_) -> Dict[str, Any]:
        return instanton.moduli_dimension(self.construction(sheaf))

    def instanton_ulrich(self, sheaf: str = PROTOTYPE, **_) -> Dict[str, Any]:
        return instanton.ulrich_check(self.construction(sheaf))

    def instanton_elementary(self, grid: Optional[int] = None, **_) -> Dict[str, Any]:
        return self.instanton_check(ELEMENTARY, monad=False, grid=grid)

    # ------------------------------------------------------------------
    # 全部复现
    # ------------------------------------------------------------------
    def _reproductions(self) -> List[Tuple[str, str, str, Dict[str, Any]]]:
        """(名称, 动词, 动作, 参数)"""
        return [
            ('prototype-table', 'coh', 'table', {'sheaf': PROTOTYPE, 'twists': 'exceptional'}),
            ('prototype-monad', 'monad', 'assemble', {'sheaf': PROTOTYPE}),
            ('monad-tables', 'monad', 'tables', {'n': 5}),
            ('prototype-check', 'instanton', 'check', {'sheaf': PROTOTYPE, 'monad': False}),
            ('prototype-stability', 'stability', 'certify', {'sheaf': PROTOTYPE, 'coverage': True}),
            ('prototype7-check', 'instanton', 'check', {'sheaf': PROTOTYPE, 'n': 7}),
            ('elementary-check', 'instanton', 'elementary', {}),
            ('even-build', 'instanton', 'build', {'sheaf': EVEN_EXAMPLE}),
            ('even-check', 'instanton', 'check', {'sheaf': EVEN_EXAMPLE, 'monad': False}),
            ('divisor-restriction', 'instanton', 'restrict', {'sheaf': PROTOTYPE}),
            ('moduli-dimension', 'instanton', 'moduli', {'sheaf': PROTOTYPE}),
            ('ulrich', 'instanton', 'ulrich', {'sheaf': PROTOTYPE}),
            ('region', 'stability', 'region', {'sheaf': PROTOTYPE}),
        ]

    def _reproduce_one(self, item: Tuple[str, str, str, Dict[str, Any]]) -> Tuple[str, Dict[str, Any]]:
        name, verb, action, kwargs = item
        # 每个目标独立的服务与注册表
        service = ReportService(dict(self.run_config, n=5), self.axioms)
        result = service.run(verb, action, **kwargs)
        return name, {'success': result['success'], 'result': result['result'], 'error': result.get('error')}

    def reproduce_all(self, **_) -> Dict[str, Any]:
        """P̃⁵ 原型、P̃⁴ 例子与初等变换的全部复现，以及一般奇数 n 的荷与区域"""
        items = self._reproductions()
        with ThreadPoolExecutor(max_workers=max(1, self.workers)) as executor:
            results = dict(executor.map(self._reproduce_one, items))

        general = []
        for n in (5, 7, 9):
            c = instanton.build_odd(n, self.seed)
            general.append({'n': n, 'charge': to_plain(c.charge()),
                            'expected': ((n - 1) // 2) ** (n - 2),
                            'region_agrees': stability.region_matches_displayed(n)})

        comparisons = []
        for name in ('moduli-dimension', 'ulrich'):
            body = results[name]['result'] or {}
            if 'comparisons' in body:
                comparisons.extend(body['comparisons'])
            elif 'comparison' in body:
                comparisons.append(body['comparison'])
        comparisons.extend({'quantity': f"printed tables p={row['p']} s={row['s']}", 'engine': row['formula'],
                            'claimed': row['printed'], 'agrees': row['agrees']}
                           for row in (results['monad-tables']['result'] or {}).get('rows', []))

        expected = {
            'prototype-check': instanton.INSTANTON,
            'prototype7-check': instanton.INSTANTON,
            'even-check': instanton.NOT_INSTANTON,
        }
        checks = {}
        for name, r in results.items():
            body = r['result'] or {}
            if not r['success']:
                ok = False
            elif name in expected:
                ok = body.get('verdict') == expected[name]
            elif name == 'elementary-check':
                ok = body.get('cohomological_verdict') == instanton.PASS
            elif name == 'prototype-stability':
                coverage = body.get('coverage') or {}
                ok = body.get('verdict') == stability.SEMISTABLE_CERTIFIED and coverage.get('ok', False)
            else:
                ok = self.passed(r)
            checks[name] = instanton.PASS if ok else instanton.FAIL
        for g in general:
            ok = g['charge'] == g['expected'] and g['region_agrees']
            checks[f"general-n{g['n']}"] = instanton.PASS if ok else instanton.FAIL
        for c in comparisons:
            classify_comparison(c)
            checks[f"comparison {c['quantity']}"] = instanton.FAIL if c['status'] == UNEXPECTED else instanton.PASS

        return {'reproductions': results, 'general_n': general, 'comparisons': comparisons, 'checks': checks,
                'known_discrepancies': [c['quantity'] for c in comparisons if c['status'] == KNOWN_DISCREPANCY],
                'verdicts': list(checks.values())}


def classify_comparison(comparison: Dict[str, Any]) -> Dict[str, Any]:
    """一致、已知差异或意外差异；已知差异附说明"""
    if comparison['agrees']:
        comparison['status'] = AGREES
    elif comparison['quantity'] in KNOWN_DISCREPANCIES:
        comparison['status'] = KNOWN_DISCREPANCY
        comparison['note'] = KNOWN_DISCREPANCIES[comparison['quantity']]
    else:
        comparison['status'] = UNEXPECTED
    return comparison
