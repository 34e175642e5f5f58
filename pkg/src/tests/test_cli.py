"""
命令行与报告输出测试
"""

import json

from cli import build_parser, main
from src.core.report_service import (AGREES, EVEN_EXAMPLE, KNOWN_DISCREPANCY, UNEXPECTED, ReportService,
                                     classify_comparison)
from src.utils.report_writer import render, to_json, to_markdown


def run_cli(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr().out
    return status, out


def test_parser_accepts_every_action():
    parser = build_parser()
    args = parser.parse_args(['instanton', 'restrict', '--n', '5', '--format', 'markdown'])
    assert (args.verb, args.action, args.n, args.format) == ('instanton', 'restrict', 5, 'markdown')


def test_chow_degree(capsys):
    status, out = run_cli(capsys, 'chow', 'degree', '--n', '5', '--expr', 'xi**5')
    document = json.loads(out)
    assert status == 0
    assert document['success']
    assert document['result']['degree'] == 1
    assert 'duration' not in document
    assert document['config']['run']['n'] == 5


def test_chow_degree_output_is_deterministic(capsys):
    _, first = run_cli(capsys, 'chow', 'degree', '--n', '5', '--expr', 'xi*alpha**4')
    _, second = run_cli(capsys, 'chow', 'degree', '--n', '5', '--expr', 'xi*alpha**4')
    assert first == second


def test_invalid_expression_fails(capsys):
    status, out = run_cli(capsys, 'chow', 'degree', '--n', '5', '--expr', '1/xi')
    document = json.loads(out)
    assert status == 1
    assert not document['success']
    assert document['error_type'] == 'PreconditionError'


def test_missing_axioms_file(capsys, tmp_path):
    status, out = run_cli(capsys, 'coh', 'line', '--axioms', str(tmp_path / 'missing.json'))
    assert status == 2
    assert json.loads(out)['error_type'] == 'PreconditionError'


def test_strict_even_example_exits_nonzero(capsys):
    status, out = run_cli(capsys, 'stability', 'certify', '--sheaf', EVEN_EXAMPLE, '--strict')
    document = json.loads(out)
    assert document['success']
    assert document['result']['verdict'] == 'VIOLATION'
    assert status == 1


def test_markdown_table(capsys):
    status, out = run_cli(capsys, 'coh', 'line', '--n', '5', '--p', '1', '--format', 'markdown')
    assert status == 0
    assert out.startswith('# coh line')
    assert '- **h**:' in out


def test_service_passed():
    assert ReportService.passed({'success': True, 'result': {'verdict': 'PASS'}})
    assert not ReportService.passed({'success': True, 'result': {'verdicts': ['PASS', 'FAIL']}})
    assert not ReportService.passed({'success': False, 'result': None})
    assert ReportService.passed({'success': True, 'result': {'n': 5}})


def test_unknown_command_reports_error():
    document = ReportService({'n': 5}).run('coh', 'nothing')
    assert not document['success']
    assert document['error_type'] == 'PreconditionError'


def test_render_formats():
    document = {
        'verb': 'coh', 'action': 'table', 'success': True,
        'result': {'n': 1, 'columns': ['E(0,0)', 'E(0,-1)'], 'rows': [[[0, 0], [1, 1]], [[0, None], [2, 2]]]},
    }
    assert to_json(document) == render(document, 'json')
    assert json.loads(to_json(document)) == document
    markdown = to_markdown(document)
    assert '| i | E(0,0) | E(0,-1) |' in markdown
    assert '| 0 | 0 | 1 |' in markdown
    assert '| 1 | [0,∞] | 2 |' in markdown
    assert 'duration' not in markdown


def test_twist_list_parsing():
    assert ReportService._twists('0,0;1,-1', 5) == [(0, 0), (1, -1)]
    assert len(ReportService._twists('exceptional', 5)) == 10
    assert ReportService._twists('beilinson', 3)[-1] == (-1, -1)


def test_constructions_are_cached():
    service = ReportService({'n': 5})
    assert service.construction('prototype') is service.construction('prototype', 5)
    assert service.construction(EVEN_EXAMPLE).n == 4


def test_parser_accepts_reproduction_verb():
    args = build_parser().parse_args(['paper', 'reproduce-all', '--n', '5'])
    assert (args.verb, args.action) == ('paper', 'reproduce-all')


def test_reproductions_cover_seven_dimensions_and_coverage():
    names = [item[0] for item in ReportService({'n': 5})._reproductions()]
    assert 'prototype7-check' in names
    assert 'prototype-stability' in names


def test_comparison_status():
    agreeing = classify_comparison({'quantity': 'h0(normal term)', 'engine': [12, 12], 'claimed': 12, 'agrees': True})
    assert agreeing['status'] == AGREES
    assert 'note' not in agreeing
    known = classify_comparison({'quantity': 'h^5(F(-5,-5))', 'engine': [106, 106], 'claimed': 54, 'agrees': False})
    assert known['status'] == KNOWN_DISCREPANCY
    assert '106' in known['note']
    other = classify_comparison({'quantity': 'h0(other)', 'engine': [1, 1], 'claimed': 2, 'agrees': False})
    assert other['status'] == UNEXPECTED


def test_markdown_comparisons_show_status():
    comparison = classify_comparison({'quantity': 'h^5(F(-5,-5))', 'engine': [106, 106], 'claimed': 54,
                                      'agrees': False})
    document = {'verb': 'ulrich', 'action': 'check', 'success': True, 'result': {'comparisons': [comparison]}}
    markdown = to_markdown(document)
    assert '| 量 | 计算值 | 显示值 | 一致 | 状态 | 说明 |' in markdown
    assert f"| h^5(F(-5,-5)) | 106 | 54 | 否 | {KNOWN_DISCREPANCY} |" in markdown
