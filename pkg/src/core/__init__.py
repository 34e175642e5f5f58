"""
核心计算模块
"""
