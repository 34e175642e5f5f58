"""
日志模块
控制台只输出进度与警告（stderr），文件记录求解器的逐层展开、截断与预言机调用
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional
from ..config.config import config

ROOT = 'BlowupInstanton'


def _level(value: Optional[str], default: int = logging.INFO) -> int:
    return getattr(logging, str(value).upper(), default) if value else default


def setup_logger(name: str = ROOT, level: Optional[str] = None) -> logging.Logger:
    """
    设置日志记录器

    stdout 留给 JSON/markdown 报告文档，控制台处理器写 stderr。
    文件处理器的级别取 logging.file_level（默认 DEBUG），约束网络的展开细节只进文件。

    Args:
        name: 日志记录器名称
        level: 控制台日志级别，如果为None则从配置读取

    Returns:
        配置好的日志记录器
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    console_level = _level(level or config.get('logging.level', 'INFO'))
    file_level = _level(config.get('logging.file_level', 'DEBUG'), logging.DEBUG)

    formatter = logging.Formatter(config.get('logging.format',
                                             '%(asctime)s - %(name)s - %(levelname)s - %(message)s'))

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(console_level)
    console_handler.setFormatter(formatter)
    console_handler.set_name('console')
    logger.addHandler(console_handler)

    log_file = config.get('logging.file')
    if log_file:
        try:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=config.get('logging.max_bytes', 10485760),
                backupCount=config.get('logging.backup_count', 5),
                encoding='utf-8'
            )
            file_handler.setLevel(file_level)
            file_handler.setFormatter(formatter)
            file_handler.set_name('file')
            logger.addHandler(file_handler)
        except OSError as e:
            logger.warning(f"无法创建日志文件 {log_file}: {e}")
            file_level = console_level

    logger.setLevel(min(console_level, file_level))
    logger.propagate = False
    return logger


def get_logger(component: str) -> logging.Logger:
    """子模块记录器，如 get_logger('solver') → BlowupInstanton.solver，共用根记录器的处理器"""
    return logging.getLogger(f"{ROOT}.{component}")


def set_level(level: str):
    """运行时调整控制台级别（命令行 --verbose / --quiet），文件级别不变"""
    console_level = _level(level)
    for handler in logger.handlers:
        if handler.get_name() == 'console':
            handler.setLevel(console_level)
    if console_level < logger.level:
        logger.setLevel(console_level)


# 默认日志记录器
logger = setup_logger()
