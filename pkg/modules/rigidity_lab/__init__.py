"""
Rigidity Lab Package - 刚性实验包

拟等距映射族上的刚性测量、收敛阶回归、附录引理检查与命令行入口。

包含：
- make_family / FamilySpec: 映射族
- ExperimentConfig / load_experiment_config: JSON 实验配置
- run_rigidity / RigidityReport: 实验运行与报告
- isometry_growth_suite / embedding_suite: 附录引理
- SelfTest: 不变量自检
- cli_main: 命令行入口
"""

__version__ = "1.0.0"

from .families import FamilyKind, FamilySpec, make_family
from .experiment_config import ExperimentConfig, parse_experiment_config, load_experiment_config, config_template
from .experiment import (
    RigidityRecord,
    RigidityReport,
    RigidityExperiment,
    Exponents,
    run_rigidity,
    fit_exponents,
    pairwise_ratios,
)
from .appendix import (
    SuiteTable,
    isometry_growth_suite,
    embedding_suite,
    recentered_dilation,
    dilation_embedding_ratio,
)
from .selftest import SelfTest, SuiteResult, CheckResult, run_selftest
from .cli import cli_main

__all__ = [
    '__version__',
    'FamilyKind', 'FamilySpec', 'make_family',
    'ExperimentConfig', 'parse_experiment_config', 'load_experiment_config', 'config_template',
    'RigidityRecord', 'RigidityReport', 'RigidityExperiment', 'Exponents', 'run_rigidity', 'fit_exponents',
    'pairwise_ratios',
    'SuiteTable', 'isometry_growth_suite', 'embedding_suite', 'recentered_dilation', 'dilation_embedding_ratio',
    'SelfTest', 'SuiteResult', 'CheckResult', 'run_selftest',
    'cli_main',
]
