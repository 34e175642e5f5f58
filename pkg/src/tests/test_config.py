"""
配置管理测试
"""

import logging

import pytest

from src.config.config import Config, config
from src.utils.logger import get_logger, logger, set_level


@pytest.fixture
def restore_config():
    original_file = config._config_file
    original = config.as_dict()
    yield config
    config._config_file = original_file
    config._config = original


def test_singleton():
    assert Config() is config


def test_defaults_present():
    defaults = Config._default_config()
    assert defaults['toolkit']['n'] == 5
    assert defaults['solver']['max_depth'] == 6
    assert defaults['report']['timings'] is False
    assert config.get('solver.max_iterations') is not None
    assert config.get('no.such.key', 'fallback') == 'fallback'


def test_set_and_get(restore_config):
    restore_config.set('stability.sample_size', 17)
    restore_config.set('extra.nested.value', 'x')
    assert restore_config.get('stability.sample_size') == 17
    assert restore_config.get('extra.nested.value') == 'x'


def test_reload_merges_file(restore_config, tmp_path):
    path = tmp_path / 'config.yaml'
    path.write_text('toolkit:\n  n: 7\nsolver:\n  max_depth: 3\n', encoding='utf-8')
    restore_config.reload(str(path))
    assert restore_config.get('toolkit.n') == 7
    assert restore_config.get('solver.max_depth') == 3
    assert restore_config.get('solver.max_nodes') == 1500
    assert restore_config.get('toolkit.coordinates') == 'fixed'


def test_save_round_trip(restore_config, tmp_path):
    path = tmp_path / 'saved.yaml'
    restore_config.set('report.indent', 4)
    assert restore_config.save(str(path))
    restore_config.reload(str(path))
    assert restore_config.get('report.indent') == 4


def test_as_dict_is_a_copy(restore_config):
    snapshot = restore_config.as_dict()
    snapshot['toolkit']['n'] = 99
    assert restore_config.get('toolkit.n') != 99


def test_component_loggers_share_root_handlers():
    solver_logger = get_logger('solver')
    assert solver_logger.name == 'BlowupInstanton.solver'
    assert solver_logger.parent is logger
    assert any(handler.get_name() == 'console' for handler in logger.handlers)


def test_set_level_only_touches_console():
    console = next(handler for handler in logger.handlers if handler.get_name() == 'console')
    before = console.level
    files = [(handler, handler.level) for handler in logger.handlers if handler.get_name() == 'file']
    try:
        set_level('ERROR')
        assert console.level == logging.ERROR
        assert all(handler.level == level for handler, level in files)
    finally:
        console.setLevel(before)
