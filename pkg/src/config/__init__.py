"""配置模块"""
from .config import config, Config

__all__ = ['config', 'Config']
