#!/usr/bin/env python3
"""
统一配置管理器 - Unified Configuration Manager

实验室的库级设置：数值参数、采样、拟合、区域与日志。
设置文件为 YAML（rigidity_lab.yml），环境变量可以覆盖其中的关键项。

特性：
- 环境变量优先级管理（RIGIDITY_LAB_*）
- YAML配置文件解析
- 变量引用语法 ${VARIABLE_NAME}
- 文件缺失或损坏时退回内置默认值
- 解析为 LabSettings 数据类并做范围校验
"""

import copy
import os
import re
import logging
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, Any, Optional, List

import yaml

SETTINGS_FILE_NAME = 'rigidity_lab.yml'
ENV_PREFIX = 'RIGIDITY_LAB_'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


@dataclass
class ConfigValidationResult:
    """配置验证结果"""
    is_valid: bool
    missing_variables: List[str]
    invalid_values: List[str]
    errors: List[str]
    warnings: List[str]


@dataclass
class NumericsSettings:
    """求积阶数：拟合用 quad_order，Sobolev 偏差用 sobolev_quad_order"""
    quad_order: int = 12
    sobolev_quad_order: int = 10


@dataclass
class SamplingSettings:
    sup_samples: int = 100_000
    exp_samples: int = 20_000
    seed: int = 0


@dataclass
class FittingSettings:
    """等距拟合参数"""
    oracle_samples: int = 512
    restarts: int = 4
    allow_fallback: bool = True
    agreement_factor: float = 2.0


@dataclass
class DomainSettings:
    calibration_samples: int = 64
    whitney_resolution: int = 8
    mc_samples: int = 1_000_000


@dataclass
class LoggingSettings:
    level: str = 'INFO'
    format: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass
class LabSettings:
    """全部库级设置"""
    numerics: NumericsSettings = field(default_factory=NumericsSettings)
    sampling: SamplingSettings = field(default_factory=SamplingSettings)
    fitting: FittingSettings = field(default_factory=FittingSettings)
    domains: DomainSettings = field(default_factory=DomainSettings)
    logging: LoggingSettings = field(default_factory=LoggingSettings)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LabSettings':
        sections = {
            'numerics': NumericsSettings,
            'sampling': SamplingSettings,
            'fitting': FittingSettings,
            'domains': DomainSettings,
            'logging': LoggingSettings,
        }
        kwargs = {}
        for name, section_cls in sections.items():
            raw = data.get(name) or {}
            known = {k: v for k, v in raw.items() if k in section_cls.__dataclass_fields__}
            kwargs[name] = section_cls(**known)
        return cls(**kwargs)


class ConfigManager:
    """统一配置管理器"""

    def __init__(self, config_file: Optional[str] = None):
        """
        初始化配置管理器

        Args:
            config_file: 设置文件路径，默认为项目根目录的 rigidity_lab.yml
        """
        if config_file is None:
            self.config_file = self._get_default_config_path()
        else:
            self.config_file = Path(config_file)

        self._raw_config: Dict[str, Any] = {}
        self._processed_config: Dict[str, Any] = {}
        self._env_prefix = ENV_PREFIX
        self.logger = logging.getLogger(__name__)

        self.load_config()
        self.logger = self._setup_logging()

    def _setup_logging(self) -> logging.Logger:
        """设置日志系统（级别取自 logging.level）"""
        level = str(self.get('logging.level', 'INFO')).upper()
        logging.basicConfig(
            level=getattr(logging, level, logging.INFO),
            format=self.get('logging.format', LoggingSettings.format)
        )
        return logging.getLogger(__name__)

    def _get_default_config_path(self) -> Path:
        """向上查找 rigidity_lab.yml，找不到时指向项目根目录"""
        current_path = Path(__file__).parent
        while current_path.parent != current_path:
            candidate = current_path / SETTINGS_FILE_NAME
            if candidate.exists():
                return candidate
            current_path = current_path.parent

        project_root = Path(__file__).parent.parent.parent
        return project_root / SETTINGS_FILE_NAME

    def load_config(self) -> None:
        """加载设置文件和环境变量"""
        try:
            if self.config_file.exists():
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    self._raw_config = yaml.safe_load(f) or {}
                self.logger.info(f"设置文件已加载: {self.config_file}")
            else:
                self.logger.warning(f"设置文件不存在: {self.config_file}，使用内置默认值")
                self._raw_config = {}

            merged = self._get_fallback_config()
            self._merge(merged, self._process_variables(self._raw_config))
            self._processed_config = merged
            self._load_env_overrides()
            self.logger.debug("设置加载完成")

        except Exception as e:
            self.logger.error(f"设置加载失败: {e}")
            self._processed_config = self._get_fallback_config()
            self._load_env_overrides()

    def _merge(self, base: Dict[str, Any], update: Dict[str, Any]) -> None:
        for key, value in update.items():
            if isinstance(value, dict) and isinstance(base.get(key), dict):
                self._merge(base[key], value)
            else:
                base[key] = value

    def _process_variables(self, config: Any) -> Any:
        """处理配置中的变量引用"""
        if isinstance(config, dict):
            return {key: self._process_variables(value) for key, value in config.items()}
        elif isinstance(config, list):
            return [self._process_variables(item) for item in config]
        elif isinstance(config, str):
            return self._substitute_variables(config)
        else:
            return config

    def _substitute_variables(self, value: str) -> Any:
        """替换 ${VAR}；整个值就是一个引用时按 YAML 标量重新解析（数字仍是数字）"""
        pattern = r'\$\{([^}]+)\}'

        def replace_var(match):
            env_value = os.getenv(match.group(1))
            if env_value is not None:
                return env_value
            self.logger.warning(f"环境变量未找到: {match.group(1)}")
            return match.group(0)

        substituted = re.sub(pattern, replace_var, value)
        if substituted != value and re.fullmatch(pattern, value):
            return yaml.safe_load(substituted)
        return substituted

    def _load_env_overrides(self) -> None:
        """RIGIDITY_LAB_* 环境变量覆盖对应设置项"""
        env_mapping = {
            f'{self._env_prefix}QUAD_ORDER': (['numerics', 'quad_order'], int),
            f'{self._env_prefix}MC_SAMPLES': (['domains', 'mc_samples'], int),
            f'{self._env_prefix}SUP_SAMPLES': (['sampling', 'sup_samples'], int),
            f'{self._env_prefix}SEED': (['sampling', 'seed'], int),
            f'{self._env_prefix}LOG_LEVEL': (['logging', 'level'], str),
        }

        for env_var, (config_path, cast) in env_mapping.items():
            value = os.getenv(env_var)
            if value:
                try:
                    self._set_nested_config(self._processed_config, config_path, cast(value))
                except ValueError:
                    self.logger.warning(f"环境变量 {env_var} 的值无法解析: {value!r}")

    def _set_nested_config(self, config: Dict, path: List[str], value: Any) -> None:
        """设置嵌套配置项"""
        current = config
        for key in path[:-1]:
            if key not in current or not isinstance(current[key], dict):
                current[key] = {}
            current = current[key]
        current[path[-1]] = value

    def _get_fallback_config(self) -> Dict[str, Any]:
        """内置默认值"""
        return LabSettings().to_dict()

    def get(self, key: str, default: Any = None) -> Any:
        """
        获取配置项值

        Args:
            key: 点号分隔的嵌套键，如 'numerics.quad_order'
            default: 默认值
        """
        current = self._processed_config
        try:
            for k in key.split('.'):
                current = current[k]
            return current
        except (KeyError, TypeError):
            return default

    @property
    def settings(self) -> LabSettings:
        return LabSettings.from_dict(self._processed_config)

    def validate_config(self) -> ConfigValidationResult:
        """范围校验"""
        missing_vars: List[str] = []
        invalid_values: List[str] = []
        errors: List[str] = []
        warnings: List[str] = []

        def check_int(key: str, lo: int, hi: int):
            value = self.get(key)
            if value is None:
                missing_vars.append(key)
            elif not isinstance(value, int) or isinstance(value, bool) or not lo <= value <= hi:
                invalid_values.append(f'{key} (应该是{lo}-{hi}之间的整数)')

        def check_float(key: str, lo: float, hi: float):
            value = self.get(key)
            if value is None:
                missing_vars.append(key)
            elif not isinstance(value, (int, float)) or isinstance(value, bool) or not lo < value < hi:
                invalid_values.append(f'{key} (应该是({lo}, {hi})之间的数字)')

        check_int('numerics.quad_order', 4, 40)
        check_int('numerics.sobolev_quad_order', 2, 40)
        check_int('sampling.sup_samples', 1, 10 ** 8)
        check_int('sampling.exp_samples', 1, 10 ** 8)
        check_int('sampling.seed', 0, 2 ** 32 - 1)
        check_int('fitting.oracle_samples', 8, 10 ** 6)
        check_int('fitting.restarts', 1, 100)
        check_float('fitting.agreement_factor', 1.0, 100.0)
        check_int('domains.calibration_samples', 1, 10 ** 5)
        check_int('domains.whitney_resolution', 2, 64)
        check_int('domains.mc_samples', 2, 10 ** 8)

        if str(self.get('logging.level', '')).upper() not in LOG_LEVELS:
            invalid_values.append(f"logging.level (应该是 {'/'.join(LOG_LEVELS)} 之一)")

        quad_order = self.get('numerics.quad_order')
        if isinstance(quad_order, int) and quad_order > 20:
            warnings.append(f"numerics.quad_order = {quad_order} 时 n = 3 的张量网格节点数很大")

        is_valid = not missing_vars and not invalid_values
        if missing_vars:
            errors.append(f"缺少必需配置项: {', '.join(missing_vars)}")
        if invalid_values:
            errors.append(f"无效配置值: {', '.join(invalid_values)}")

        return ConfigValidationResult(
            is_valid=is_valid,
            missing_variables=missing_vars,
            invalid_values=invalid_values,
            errors=errors,
            warnings=warnings
        )

    def create_example_config(self, file_path: Optional[Path] = None) -> Path:
        """创建示例设置文件"""
        if file_path is None:
            file_path = self.config_file.parent / f'{SETTINGS_FILE_NAME}.example'
        file_path = Path(file_path)
        example = LabSettings().to_dict()
        example['logging']['level'] = '${RIGIDITY_LAB_LOG_LEVEL}'

        with open(file_path, 'w', encoding='utf-8') as f:
            yaml.dump(example, f, default_flow_style=False, allow_unicode=True, indent=2, sort_keys=False)

        self.logger.info(f"示例设置文件已创建: {file_path}")
        return file_path

    def get_config_summary(self) -> Dict[str, Any]:
        """设置摘要，附带被环境变量覆盖的键"""
        summary = copy.deepcopy(self._processed_config)
        summary['env_overrides'] = sorted(k for k in os.environ if k.startswith(self._env_prefix))
        summary['config_file'] = str(self.config_file)
        return summary


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description='实验室设置管理器')
    parser.add_argument('--create-example', action='store_true', help='创建示例设置文件')
    parser.add_argument('--validate', action='store_true', help='验证当前设置')
    parser.add_argument('--show-config', action='store_true', help='显示当前设置摘要')

    args = parser.parse_args()
    config = ConfigManager()

    if args.create_example:
        print(f"示例设置文件: {config.create_example_config()}")

    elif args.validate:
        result = config.validate_config()
        print(f"设置有效: {result.is_valid}")
        for error in result.errors:
            print(f"  - {error}")
        for warning in result.warnings:
            print(f"  ! {warning}")

    elif args.show_config:
        print(yaml.dump(config.get_config_summary(), default_flow_style=False, allow_unicode=True))

    else:
        print("设置管理器已初始化，使用 --help 查看可用选项")
