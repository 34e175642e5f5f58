"""
报告写出模块
JSON 与 markdown 文档、注册表公理文件的读写
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from .errors import PreconditionError
from .logger import logger


def to_json(document: Dict[str, Any], indent: int = 2) -> str:
    """字节确定的 JSON：键排序，不转义非 ASCII"""
    return json.dumps(document, indent=indent, ensure_ascii=False, sort_keys=True, default=str)


def _cell(value: Any) -> str:
    if isinstance(value, list) and len(value) == 2 and all(v is None or isinstance(v, int) for v in value):
        lo, hi = value
        if lo == hi:
            return str(lo)
        return f"[{lo},{'∞' if hi is None else hi}]"
    return str(value)


def render_table(table: Dict[str, Any]) -> List[str]:
    """上同调表：行为 h^i，列为扭"""
    lines = ['| i | ' + ' | '.join(table['columns']) + ' |',
             '|---|' + '---|' * len(table['columns'])]
    for i, row in enumerate(table['rows']):
        lines.append(f"| {i} | " + ' | '.join(_cell(cell) for cell in row) + ' |')
    return lines


def render_certificate(certificate: Dict[str, Any]) -> List[str]:
    lines = [f"**{certificate['sheaf']}**: {certificate['verdict']}",
             f"区域: {certificate['region']['inequality']}", '',
             '| p | q | 机制 | h⁰ | 界 |', '|---|---|---|---|---|']
    for case in certificate['cases']:
        lines.append(f"| {case['p']} | {case['q']} | {case['mechanism']} | {_cell(case['h0'])} | {case['bound']} |")
    if certificate.get('witness'):
        w = certificate['witness']
        lines += ['', f"反例: θ = O{tuple(w['twist'])}，h⁰ = {_cell(w['h0'])}"]
    return lines


def render_comparisons(comparisons: List[Dict[str, Any]]) -> List[str]:
    """已知差异在说明列给出原因"""
    lines = ['| 量 | 计算值 | 显示值 | 一致 | 状态 | 说明 |', '|---|---|---|---|---|---|']
    for c in comparisons:
        lines.append(f"| {c['quantity']} | {_cell(c['engine'])} | {c['claimed']} | {'是' if c['agrees'] else '否'} "
                     f"| {c.get('status', '')} | {c.get('note', '')} |")
    return lines


def _render_body(body: Any, depth: int = 3) -> List[str]:
    if not isinstance(body, dict):
        return ['```', json.dumps(body, indent=2, ensure_ascii=False, default=str), '```']
    if 'rows' in body and 'columns' in body:
        return render_table(body)
    if 'cases' in body and 'region' in body:
        return render_certificate(body)
    lines = []
    scalars = {k: v for k, v in body.items() if not isinstance(v, (dict, list)) or k in ('interval', 'h')}
    for key in sorted(scalars):
        lines.append(f"- **{key}**: {_cell(scalars[key])}")
    for key in sorted(k for k in body if k not in scalars and k != 'trace'):
        value = body[key]
        lines += ['', '#' * depth + f" {key}", '']
        if key == 'comparisons':
            lines += render_comparisons(value)
        elif isinstance(value, dict):
            lines += _render_body(value, min(depth + 1, 6))
        else:
            lines += ['```', json.dumps(value, indent=2, ensure_ascii=False, sort_keys=True, default=str), '```']
    return lines


def to_markdown(document: Dict[str, Any]) -> str:
    """命令结果的 markdown 渲染；轨迹只在 JSON 中保留"""
    title = f"# {document.get('verb')} {document.get('action')}"
    lines = [title, '', f"- success: {document.get('success')}"]
    if document.get('duration') is not None:
        lines.append(f"- duration: {document['duration']}s")
    if document.get('error'):
        lines += [f"- error_type: {document.get('error_type')}", f"- error: {document['error']}"]
    if document.get('result') is not None:
        lines += ['', '## result', ''] + _render_body(document['result'])
    return '\n'.join(lines) + '\n'


def render(document: Dict[str, Any], fmt: str = 'json', indent: int = 2) -> str:
    if fmt == 'json':
        return to_json(document, indent)
    if fmt == 'markdown':
        return to_markdown(document)
    raise PreconditionError(f"未知输出格式 {fmt}，可选 json 或 markdown")


def write_report(document: Dict[str, Any], path: str, fmt: str = 'json', indent: int = 2) -> bool:
    """写出报告文件，失败时只记录警告"""
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8') as f:
            f.write(render(document, fmt, indent))
        logger.info(f"报告已保存: {target}")
        return True
    except OSError as e:
        logger.warning(f"保存报告失败 {path}: {e}")
        return False


def load_registry(path: Optional[str]) -> Optional[Dict[str, Any]]:
    """读取公理注入文件（注册表 JSON）"""
    if not path:
        return None
    source = Path(path)
    if not source.exists():
        raise PreconditionError(f"公理文件不存在: {source}")
    try:
        with open(source, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise PreconditionError(f"公理文件 {source} 不是合法 JSON: {e}") from e


def save_registry(registry, path: str) -> bool:
    try:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8') as f:
            f.write(to_json(registry.to_dict()))
        return True
    except OSError as e:
        logger.warning(f"保存注册表失败 {path}: {e}")
        return False
