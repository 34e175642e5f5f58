"""
异常模块
工具包内所有可预期错误的层次结构
"""

from typing import Any, Dict, List, Optional


class ToolkitError(ValueError):
    """工具包错误基类"""

    def to_dict(self) -> Dict[str, Any]:
        return {'error_type': type(self).__name__, 'error': str(self)}


class DimensionMismatchError(ToolkitError):
    """Chow 类的 n 不一致"""


class PreconditionError(ToolkitError):
    """操作前置条件不满足"""


class HypothesisError(ToolkitError):
    """构造假设（Hartshorne–Serre、极化选择）不满足"""

    def __init__(self, message: str, failed: Optional[List[str]] = None):
        super().__init__(message)
        self.failed = failed or []

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['failed'] = list(self.failed)
        return data


class OverlappingComponentsError(ToolkitError):
    """子簇分量相交"""


class UnresolvableSheafError(ToolkitError):
    """层表达式无法归约到基本情形"""


class InfeasibleConstraintsError(ToolkitError):
    """约束传播得到空区间，公理集不一致"""

    def __init__(self, message: str, trace: Optional[List[Any]] = None):
        super().__init__(message)
        self.trace = trace or []

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['trace'] = [step.to_dict() if hasattr(step, 'to_dict') else step for step in self.trace]
        return data


class SolverLimitError(ToolkitError):
    """传播迭代超过上限"""


class NondegenerateIntervalError(ToolkitError):
    """需要精确值的位置只有区间"""


class MonadObstructionError(ToolkitError):
    """C^p 在 |p| >= 2 处非零"""

    def __init__(self, message: str, obstructions: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message)
        self.obstructions = obstructions or []

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data['obstructions'] = list(self.obstructions)
        return data
