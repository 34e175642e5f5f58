"""
共享构造
构造只依赖固定坐标，按会话缓存；会修改注册表的测试自行构造
"""

import json
from pathlib import Path

import pytest

from src.core.instanton import build_even4, build_odd

GOLDEN_DIR = Path(__file__).parent / 'golden'


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: 七维构造等耗时检验，可用 -m "not slow" 跳过')


@pytest.fixture(scope='session')
def prototype():
    return build_odd(5)


@pytest.fixture(scope='session')
def prototype_solver(prototype):
    return prototype.solver()


@pytest.fixture(scope='session')
def even_example():
    return build_even4()


@pytest.fixture(scope='session')
def golden():
    def load(name):
        with open(GOLDEN_DIR / name, 'r', encoding='utf-8') as f:
            return json.load(f)
    return load
