"""
异常定义 - Exception Hierarchy

实验室所有模块共享的异常基类与子类。
库函数只负责抛出，是否降级处理由实验运行器和命令行决定。
"""

from typing import Optional


class RigidityLabError(Exception):
    """实验室异常基类"""
    pass


class DimensionMismatchError(RigidityLabError):
    """点或映射的复维数 n 不一致"""
    pass


class InvalidParameterError(RigidityLabError):
    """参数超出允许范围（半径、缩放因子、阶数等）"""
    pass


class NonUnitaryRotationError(RigidityLabError):
    """等距变换的旋转部分不是酉矩阵"""
    pass


class StencilError(RigidityLabError):
    """差分模板超出映射定义域"""
    pass


class OrientationError(RigidityLabError):
    """KR定向不满足要求（λ ≤ 0）"""
    pass


class QuadratureError(RigidityLabError):
    """求积失败或被积函数出现非有限值"""
    pass


class PreconditionError(RigidityLabError):
    """调用前提不成立（例如 n = 1 时调用投影 P）"""
    pass


class SingularMomentError(RigidityLabError):
    """矩矩阵 A(u) 奇异，无法做酉修正"""
    pass


class DomainError(RigidityLabError):
    """区域构造错误（空集、不连通、曲线越界）"""
    pass


class ChainConstructionError(RigidityLabError):
    """球链构造或认证失败"""
    pass


class CoverageError(RigidityLabError):
    """Whitney族未能覆盖全部网格点"""
    pass


class ConfigError(RigidityLabError):
    """配置文件错误，携带文件路径与行号"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(self.format())

    def format(self) -> str:
        """格式化为 path:line: message"""
        location = self.path or '<config>'
        if self.line is not None:
            location = f"{location}:{self.line}"
        return f"{location}: {self.message}"
