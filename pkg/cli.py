"""
BlowupInstanton - 命令行入口
P̃ⁿ 上瞬子层的精确计算：Chow 环、上同调、稳定性证书、单子与复现报告
"""

import argparse
import sys
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

from src.config.config import config
from src.core.report_service import ReportService, SHEAVES, PROTOTYPE
from src.utils.errors import ToolkitError
from src.utils.logger import logger, set_level
from src.utils.report_writer import load_registry, render, save_registry, write_report

VERBS = {
    'chow': ('mul', 'degree', 'chern', 'todd', 'chi'),
    'coh': ('line', 'omega', 'table'),
    'sections': ('h0-ideal',),
    'stability': ('region', 'certify'),
    'monad': ('terms', 'assemble', 'tables'),
    'instanton': ('build', 'check', 'restrict', 'moduli', 'ulrich', 'elementary'),
    'paper': ('reproduce-all',),
}


@dataclass
class RunConfig:
    """一次运行的参数，嵌入每个报告"""
    n: int
    polarization: Optional[Tuple[int, int]] = None
    axioms: Optional[str] = None
    format: str = 'json'
    seed: Optional[int] = None
    coordinates: str = 'fixed'
    strict: bool = False
    verbosity: str = 'INFO'

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        polarization = None
        if args.polarization:
            try:
                a, b = (int(x) for x in args.polarization.split(','))
            except ValueError:
                raise SystemExit(f"--polarization 应为 a,b，收到 {args.polarization}")
            polarization = (a, b)
        elif config.get('toolkit.polarization'):
            polarization = tuple(config.get('toolkit.polarization'))
        verbosity = 'DEBUG' if args.verbose else ('WARNING' if args.quiet else config.get('logging.level', 'INFO'))
        return cls(
            n=args.n or config.get('toolkit.n', 5),
            polarization=polarization,
            axioms=args.axioms,
            format=args.format or config.get('report.format', 'json'),
            seed=args.seed,
            coordinates='generic' if args.seed is not None else config.get('toolkit.coordinates', 'fixed'),
            strict=args.strict,
            verbosity=verbosity,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='cli.py', description='P̃ⁿ 上瞬子层的精确计算工具')
    parser.add_argument('--config', help='配置文件路径（默认 config/config.yaml）')
    sub = parser.add_subparsers(dest='verb', required=True)
    for verb, actions in VERBS.items():
        verb_parser = sub.add_parser(verb)
        verb_parser.add_argument('action', choices=actions)
        verb_parser.add_argument('--n', type=int, help='维数 n')
        verb_parser.add_argument('--sheaf', default=PROTOTYPE, choices=SHEAVES, help='构造名称')
        verb_parser.add_argument('--expr', help="层表达式，如 'E(0,-4)'、'I_X(2,0)'；chow 动词为 Chow 多项式")
        verb_parser.add_argument('--exprs', nargs='+', help='chow mul 的因子')
        verb_parser.add_argument('--twists', help="'exceptional'、'beilinson' 或 'a,b;c,d'")
        verb_parser.add_argument('--p', type=int, default=0)
        verb_parser.add_argument('--q', type=int, default=0)
        verb_parser.add_argument('--l', type=int, default=1)
        verb_parser.add_argument('--rank', type=int, default=2)
        verb_parser.add_argument('--grid', type=int, help='中间消失的抽样网格半径')
        verb_parser.add_argument('--polarization', help='极化 a,b')
        verb_parser.add_argument('--seed', type=int, help='随机系数种子（启用 generic 坐标）')
        verb_parser.add_argument('--axioms', help='公理注入文件（注册表 JSON）')
        verb_parser.add_argument('--format', choices=('json', 'markdown'))
        verb_parser.add_argument('--output', help='同时写入文件')
        verb_parser.add_argument('--save-registry', help='保存构造的注册表 JSON')
        verb_parser.add_argument('--strict', action='store_true', help='任一判定非 PASS 时以非零状态退出')
        verb_parser.add_argument('--verbose', action='store_true')
        verb_parser.add_argument('--quiet', action='store_true')
    return parser


def action_kwargs(args: argparse.Namespace) -> Dict[str, Any]:
    """命令行参数到服务参数"""
    kwargs: Dict[str, Any] = {'sheaf': args.sheaf, 'p': args.p, 'q': args.q, 'l': args.l, 'rank': args.rank}
    if args.verb == 'chow':
        kwargs.pop('sheaf')
        if args.expr:
            kwargs['expr'] = args.expr
        if args.exprs:
            kwargs['exprs'] = args.exprs
    elif args.expr:
        kwargs['expr'] = args.expr
    if args.twists:
        kwargs['twists'] = args.twists
    if args.grid is not None:
        kwargs['grid'] = args.grid
    return kwargs


def main(argv: Optional[Sequence[str]] = None) -> int:
    """解析参数、执行动词、把文档写到 stdout，返回退出状态"""
    args = build_parser().parse_args(argv)
    if args.config:
        config.reload(args.config)
    run = RunConfig.from_args(args)
    set_level(run.verbosity)

    try:
        axioms = load_registry(run.axioms)
    except ToolkitError as e:
        logger.error(f"读取公理文件失败: {e}")
        sys.stdout.write(render({'success': False, 'verb': args.verb, 'action': args.action,
                                 'error': str(e), 'error_type': type(e).__name__}, 'json'))
        sys.stdout.write('\n')
        return 2

    service = ReportService(asdict(run), axioms)
    document = service.run(args.verb, args.action, **action_kwargs(args))
    indent = config.get('report.indent', 2)
    if not config.get('report.timings', False):
        document.pop('duration', None)
    fmt = run.format if document['success'] else 'json'
    sys.stdout.write(render(document, fmt, indent))
    sys.stdout.write('\n')

    if args.output:
        write_report(document, args.output, fmt, indent)
    if args.save_registry and document['success'] and args.verb not in ('chow', 'paper'):
        save_registry(service.construction(args.sheaf).registry, args.save_registry)

    if not document['success']:
        return 1
    if run.strict and not ReportService.passed(document):
        logger.warning(f"{args.verb} {args.action}: 判定未全部通过（--strict）")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
