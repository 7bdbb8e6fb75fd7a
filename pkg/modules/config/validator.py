"""
运行前验证 - Pre-run Validation

在开始耗时的计算之前检查库设置与实验配置的组合。
错误阻止运行，警告只记录日志。

功能：
- 库设置的范围检查（来自 ConfigManager）
- 实验规模估计（维数、样本数、求积节点数）
- 球链构造的输入检查
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .config_manager import ConfigManager

MAX_DEFAULT_N = 4
LARGE_SAMPLES = 1_000_000
MAX_QUAD_NODES = 4_000_000


@dataclass
class ValidationIssue:
    """验证问题"""
    level: str  # 'error', 'warning', 'info'
    category: str  # 'settings', 'experiment', 'domain'
    message: str
    recommendation: str


class QuickValidator:
    """快速配置验证器"""

    def __init__(self, config_manager: Optional[ConfigManager] = None):
        self.config_manager = config_manager or ConfigManager()
        self.logger = logging.getLogger(__name__)

    def _check_settings(self) -> List[ValidationIssue]:
        issues = []
        result = self.config_manager.validate_config()
        for error in result.errors:
            issues.append(ValidationIssue('error', 'settings', error, '检查 rigidity_lab.yml 或 RIGIDITY_LAB_* 环境变量'))
        for warning in result.warnings:
            issues.append(ValidationIssue('warning', 'settings', warning, '必要时调低相应设置'))
        return issues

    def validate_for_rigidity_run(self, config) -> Tuple[bool, List[ValidationIssue]]:
        """
        Args:
            config: ExperimentConfig

        Returns:
            (能否继续, 问题列表)
        """
        issues = self._check_settings()

        if config.n > MAX_DEFAULT_N:
            issues.append(ValidationIssue(
                'warning', 'experiment',
                f"n = {config.n} 超出常规规模 (n ≤ {MAX_DEFAULT_N})",
                '高维扫描耗时很长，建议先用小 n 验证'))

        nodes = config.quad_order ** (2 * config.n + 1)
        if nodes > MAX_QUAD_NODES:
            issues.append(ValidationIssue(
                'error', 'experiment',
                f"quad_order = {config.quad_order} 在 n = {config.n} 时需要 {nodes} 个求积节点",
                f'降低 quad_order，使节点数不超过 {MAX_QUAD_NODES}'))

        if config.fitter in ('coercive', 'both') and config.n == 1:
            issues.append(ValidationIssue(
                'warning', 'experiment',
                'n = 1 时 coercive 拟合没有酉修正步骤，将回退到 oracle',
                '考虑直接使用 fitter = "oracle"'))

        if config.samples > LARGE_SAMPLES:
            issues.append(ValidationIssue(
                'warning', 'experiment',
                f"samples = {config.samples} 很大，sup 估计会很慢",
                f'默认值 100000 已足够，超过 {LARGE_SAMPLES} 收益有限'))

        if len([e for e in config.epsilons if e <= 1e-2]) < 2:
            issues.append(ValidationIssue(
                'info', 'experiment',
                'ε ≤ 1e-2 的点少于 2 个，不会给出收敛阶',
                '在 [1e-4, 1e-2] 内多取几个 ε'))

        can_proceed = not any(i.level == 'error' for i in issues)
        return can_proceed, issues

    def validate_for_chain_build(self, n: int, x, domain_kind: str = 'ball') -> Tuple[bool, List[ValidationIssue]]:
        """检查 chain 子命令的输入"""
        issues = self._check_settings()
        if len(x) != 2 * n + 1:
            issues.append(ValidationIssue(
                'error', 'domain',
                f"点的坐标个数 {len(x)} 与 n = {n} 不符（应为 {2 * n + 1}）",
                '坐标顺序为 x_1..x_n, x_{n+1}..x_{2n}, t'))
        if domain_kind not in ('ball', 'box', 'dumbbell'):
            issues.append(ValidationIssue(
                'error', 'domain', f"未知区域类型: {domain_kind}", '可选 ball / box / dumbbell'))
        can_proceed = not any(i.level == 'error' for i in issues)
        return can_proceed, issues

    @staticmethod
    def format_issues_for_logging(issues: List[ValidationIssue]) -> str:
        """格式化问题用于日志输出"""
        if not issues:
            return "✅ 配置验证通过"

        lines = ["📋 配置验证问题:"]
        for issue in issues:
            icon = {"error": "❌", "warning": "⚠️", "info": "ℹ️"}.get(issue.level, "•")
            lines.append(f"  {icon} {issue.message}")
            lines.append(f"    💡 {issue.recommendation}")

        return "\n".join(lines)


def validate_before_rigidity_run(config, config_manager: Optional[ConfigManager] = None
                                 ) -> Tuple[bool, List[ValidationIssue]]:
    """刚性实验前的验证"""
    return QuickValidator(config_manager).validate_for_rigidity_run(config)


def log_validation_issues(issues: List[ValidationIssue], logger: logging.Logger) -> None:
    """记录验证问题到日志，级别取最严重的问题"""
    message = QuickValidator.format_issues_for_logging(issues)
    if any(issue.level == 'error' for issue in issues):
        logger.error(message)
    elif any(issue.level == 'warning' for issue in issues):
        logger.warning(message)
    else:
        logger.info(message)
