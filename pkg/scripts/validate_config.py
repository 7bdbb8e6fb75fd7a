#!/usr/bin/env python3
"""
配置验证脚本 - Configuration Validation Script

独立的配置验证工具：检查 rigidity_lab.yml（含 RIGIDITY_LAB_* 覆盖）和
config/experiments/ 下的全部实验配置，在长时间实验之前发现问题。

功能：
- 库设置的范围校验
- 每个实验配置的解析（带行号的错误）与规模检查
- 汇总状态与修复建议
"""

import os
import sys
import json
import logging
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import List, Optional

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from modules.config import ConfigManager, QuickValidator
from modules.hgroup import ConfigError
from modules.rigidity_lab import load_experiment_config
from modules.utils import safe_print, status_icon

EXPERIMENTS_DIR = Path(__file__).parent.parent / 'config' / 'experiments'


@dataclass
class ExperimentCheck:
    """单个实验配置的检查结果"""
    path: str
    parsed: bool
    can_proceed: bool
    messages: List[str] = field(default_factory=list)


@dataclass
class ConfigValidationReport:
    """完整的配置验证报告"""
    overall_status: str  # 'valid', 'partial', 'invalid'
    settings_file: str
    settings_errors: List[str]
    settings_warnings: List[str]
    experiments: List[ExperimentCheck]


class ConfigValidator:
    """配置验证器"""

    def __init__(self, settings_file: Optional[str] = None, experiments_dir: Path = EXPERIMENTS_DIR):
        self.config_manager = ConfigManager(settings_file)
        self.validator = QuickValidator(self.config_manager)
        self.experiments_dir = Path(experiments_dir)
        self.logger = logging.getLogger(__name__)

    def validate_all(self) -> ConfigValidationReport:
        """执行完整的配置验证"""
        result = self.config_manager.validate_config()
        experiments = [self._check_experiment(p) for p in sorted(self.experiments_dir.glob('*.json'))]
        self.logger.info(f"已检查 {len(experiments)} 个实验配置")

        if not result.is_valid or any(not e.parsed for e in experiments):
            status = 'invalid'
        elif result.warnings or any(not e.can_proceed or e.messages for e in experiments):
            status = 'partial'
        else:
            status = 'valid'
        return ConfigValidationReport(status, str(self.config_manager.config_file), result.errors,
                                      result.warnings, experiments)

    def _check_experiment(self, path: Path) -> ExperimentCheck:
        try:
            config = load_experiment_config(path)
        except ConfigError as e:
            return ExperimentCheck(str(path), False, False, [e.format()])
        can_proceed, issues = self.validator.validate_for_rigidity_run(config)
        # 库设置的问题已在报告顶层给出
        messages = [f"[{i.level}] {i.message}" for i in issues if i.category != 'settings']
        return ExperimentCheck(str(path), True, can_proceed, messages)


def print_validation_summary(report: ConfigValidationReport) -> None:
    """打印验证摘要"""
    safe_print(f"\n🔍 配置验证结果: {report.overall_status.upper()}")
    safe_print(f"📄 设置文件: {report.settings_file}")
    for error in report.settings_errors:
        safe_print(f"  ❌ {error}")
    for warning in report.settings_warnings:
        safe_print(f"  ⚠️ {warning}")

    safe_print(f"\n🧪 实验配置 ({len(report.experiments)}):")
    for check in report.experiments:
        safe_print(f"  {status_icon(check.parsed and check.can_proceed)} {check.path}")
        for message in check.messages:
            safe_print(f"     - {message}")


# 命令行接口
if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description='配置验证工具')
    parser.add_argument('--settings', default=None, help='rigidity_lab.yml 路径')
    parser.add_argument('--experiments', default=str(EXPERIMENTS_DIR), help='实验配置目录')
    parser.add_argument('--quiet', '-q', action='store_true', help='静默模式，只给退出码')
    parser.add_argument('--json', action='store_true', help='输出JSON格式结果')
    args = parser.parse_args()

    report = ConfigValidator(args.settings, Path(args.experiments)).validate_all()
    if args.json:
        safe_print(json.dumps(asdict(report), ensure_ascii=False, indent=2))
    elif not args.quiet:
        print_validation_summary(report)

    sys.exit({'valid': 0, 'partial': 1}.get(report.overall_status, 2))
