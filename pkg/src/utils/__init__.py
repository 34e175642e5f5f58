"""工具模块"""
from .logger import get_logger, logger, setup_logger, set_level
from .errors import ToolkitError

__all__ = [
    'get_logger', 'logger', 'setup_logger', 'set_level',
    'ToolkitError'
]
