"""
Configuration Management Package - 配置管理包

库设置（rigidity_lab.yml + RIGIDITY_LAB_* 环境变量）的加载、验证与运行前检查。

包含：
- ConfigManager / LabSettings: 设置加载与分组数据类
- QuickValidator: 运行前验证
"""

from .config_manager import (
    ConfigManager,
    ConfigValidationResult,
    LabSettings,
    NumericsSettings,
    SamplingSettings,
    FittingSettings,
    DomainSettings,
    LoggingSettings,
)
from .validator import (
    QuickValidator,
    ValidationIssue,
    validate_before_rigidity_run,
    log_validation_issues,
)

__all__ = [
    'ConfigManager',
    'ConfigValidationResult',
    'LabSettings',
    'NumericsSettings',
    'SamplingSettings',
    'FittingSettings',
    'DomainSettings',
    'LoggingSettings',
    'QuickValidator',
    'ValidationIssue',
    'validate_before_rigidity_run',
    'log_validation_issues',
]
