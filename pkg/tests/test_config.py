#!/usr/bin/env python3
"""
配置测试：rigidity_lab.yml 加载、环境变量覆盖、范围校验与运行前验证
"""

import json
import os
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path

import yaml

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.config import ConfigManager, QuickValidator, LabSettings, validate_before_rigidity_run
from modules.rigidity_lab import parse_experiment_config, config_template


@contextmanager
def env(**values):
    """临时设置环境变量"""
    saved = {k: os.environ.get(k) for k in values}
    os.environ.update({k: str(v) for k, v in values.items()})
    try:
        yield
    finally:
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


@contextmanager
def settings_file(data: dict):
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / 'rigidity_lab.yml'
        path.write_text(yaml.safe_dump(data), encoding='utf-8')
        yield path


def test_defaults_when_file_missing():
    manager = ConfigManager('/nonexistent/rigidity_lab.yml')
    assert manager.settings == LabSettings()
    assert manager.get('numerics.quad_order') == 12
    assert manager.get('numerics.missing', 'x') == 'x'
    assert manager.validate_config().is_valid


def test_project_settings_file_is_valid():
    manager = ConfigManager(str(project_root / 'rigidity_lab.yml'))
    result = manager.validate_config()
    assert result.is_valid, result.errors
    assert manager.settings.fitting.allow_fallback is True


def test_file_values_merge_with_defaults():
    with settings_file({'numerics': {'quad_order': 8}, 'sampling': {'seed': 5}}) as path:
        s = ConfigManager(str(path)).settings
        assert s.numerics.quad_order == 8
        assert s.numerics.sobolev_quad_order == 10
        assert s.sampling.seed == 5
        assert s.domains.whitney_resolution == 8


def test_env_overrides_take_precedence():
    with settings_file({'numerics': {'quad_order': 8}}) as path:
        with env(RIGIDITY_LAB_QUAD_ORDER='6', RIGIDITY_LAB_SEED='9', RIGIDITY_LAB_LOG_LEVEL='WARNING'):
            manager = ConfigManager(str(path))
            s = manager.settings
            assert s.numerics.quad_order == 6
            assert s.sampling.seed == 9
            assert s.logging.level == 'WARNING'
            assert 'RIGIDITY_LAB_SEED' in manager.get_config_summary()['env_overrides']
        with env(RIGIDITY_LAB_QUAD_ORDER='many'):
            assert ConfigManager(str(path)).settings.numerics.quad_order == 8


def test_variable_substitution_keeps_numbers():
    with settings_file({'sampling': {'sup_samples': '${LAB_TEST_SUP}'}}) as path:
        with env(LAB_TEST_SUP='1234'):
            assert ConfigManager(str(path)).settings.sampling.sup_samples == 1234


def test_range_validation():
    with settings_file({'numerics': {'quad_order': 2}, 'fitting': {'agreement_factor': 0.5},
                        'logging': {'level': 'LOUD'}}) as path:
        result = ConfigManager(str(path)).validate_config()
        assert not result.is_valid
        assert len(result.invalid_values) == 3
    with settings_file({'numerics': {'quad_order': 24}}) as path:
        result = ConfigManager(str(path)).validate_config()
        assert result.is_valid and result.warnings


def test_example_config_roundtrip():
    with tempfile.TemporaryDirectory() as tmp:
        manager = ConfigManager('/nonexistent/rigidity_lab.yml')
        path = manager.create_example_config(Path(tmp) / 'example.yml')
        data = yaml.safe_load(path.read_text(encoding='utf-8'))
        assert data['logging']['level'] == '${RIGIDITY_LAB_LOG_LEVEL}'
        assert data['numerics']['quad_order'] == 12


def test_rigidity_run_validation():
    manager = ConfigManager('/nonexistent/rigidity_lab.yml')
    template = config_template(3)
    template['quad_order'] = 12
    config = parse_experiment_config(json.dumps(template))
    can_proceed, issues = validate_before_rigidity_run(config, manager)
    assert not can_proceed
    assert any(i.level == 'error' and i.category == 'experiment' for i in issues)

    template = config_template(1)
    template['quad_order'] = 6
    config = parse_experiment_config(json.dumps(template))
    can_proceed, issues = QuickValidator(manager).validate_for_rigidity_run(config)
    assert can_proceed
    assert any('oracle' in i.message for i in issues)


def test_chain_input_validation():
    validator = QuickValidator(ConfigManager('/nonexistent/rigidity_lab.yml'))
    assert validator.validate_for_chain_build(1, [0.1, 0.2, 0.3])[0]
    ok, issues = validator.validate_for_chain_build(2, [0.1, 0.2, 0.3], 'torus')
    assert not ok and len([i for i in issues if i.level == 'error']) == 2
    assert '❌' in QuickValidator.format_issues_for_logging(issues)
    assert QuickValidator.format_issues_for_logging([]).startswith('✅')


if __name__ == "__main__":
    from harness import run_module_tests
    sys.exit(run_module_tests(globals(), '配置测试'))
