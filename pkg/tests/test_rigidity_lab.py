#!/usr/bin/env python3
"""
rigidity_lab 测试：映射族、实验配置、收敛阶回归、报告、附录检查、自检与命令行
"""

import json
import math
import sys
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from harness import load_test_config
from modules.hgroup import ConfigError, InvalidParameterError, PreconditionError, group_dilate
from modules.kerq import IsometryFitter
from modules.rigidity_lab import (
    FamilyKind, FamilySpec, make_family,
    parse_experiment_config, load_experiment_config, config_template,
    RigidityRecord, RigidityExperiment, run_rigidity, fit_exponents, pairwise_ratios,
    isometry_growth_suite, embedding_suite, dilation_embedding_ratio,
    SelfTest, cli_main,
)

SMALL_CONFIG = """{
  "n": 1,
  "family": "dilation",
  "epsilons": [0.01, 0.001],
  "ball": {"center": [0.0, 0.0, 0.0], "radius": 1.0},
  "samples": 2000,
  "quad_order": 4,
  "fitter": "oracle"
}
"""


def _small_experiment(text: str = SMALL_CONFIG) -> RigidityExperiment:
    config = parse_experiment_config(text)
    fitter = IsometryFitter(mean_order=6, oracle_samples=64, restarts=1, residual_samples=512)
    return RigidityExperiment(config, fitter, exp_samples=512, sobolev_order=4)


def _config_error(text: str) -> ConfigError:
    try:
        parse_experiment_config(text, 'exp.json')
    except ConfigError as e:
        return e
    raise AssertionError("应当抛出 ConfigError")


def test_family_spec_parsing():
    assert FamilySpec.parse('dilation').kind is FamilyKind.DILATION
    spec = FamilySpec.parse('conjugated_dilation(7)')
    assert spec.seed == 7 and str(spec) == 'conjugated_dilation(7)'
    assert FamilySpec.parse({'name': 'pure_isometry'}, default_seed=3).seed == 3
    assert FamilySpec.parse('reflected_dilation').seed is None
    for bad in ('stretch', 'dilation(', 42):
        try:
            FamilySpec.parse(bad)
            assert False, f"{bad!r} 应当被拒绝"
        except ConfigError:
            pass


def test_families_evaluate():
    X = np.random.default_rng(0).standard_normal((8, 5))
    f = make_family('dilation', 2)(0.1)
    assert np.allclose(f.evaluate(X), group_dilate(1.1, X))
    iso = make_family('pure_isometry(2)', 2)
    assert np.array_equal(iso(0.1).evaluate(X), iso(0.001).evaluate(X))
    conj = make_family('conjugated_dilation(4)', 2)
    assert np.allclose(conj(0.0).evaluate(X), make_family('conjugated_dilation(4)', 2)(0.0).evaluate(X))
    try:
        make_family('dilation', 2)(-0.1)
        assert False, "负的 ε 应当被拒绝"
    except InvalidParameterError:
        pass


def test_config_defaults_and_template():
    config = parse_experiment_config(SMALL_CONFIG)
    assert config.n == 1 and config.fitter == 'oracle'
    assert config.sup_region_scale == 0.5 and config.p == 2.0 and config.seed == 0
    assert config.sup_region.radius == 0.5
    assert config.csv_path.suffix == '.csv' and config.json_path.suffix == '.json'
    template = parse_experiment_config(json.dumps(config_template(2)))
    assert template.n == 2 and template.quad_order == 12
    assert parse_experiment_config(json.dumps(config_template(3))).quad_order == 8
    implicit = json.loads(SMALL_CONFIG)
    del implicit['quad_order']
    implicit.update(n=3, ball={'center': [0.0] * 7, 'radius': 1.0})
    assert parse_experiment_config(json.dumps(implicit)).quad_order == 8


def test_config_errors_carry_line_numbers():
    text = SMALL_CONFIG.replace('"fitter": "oracle"', '"fitter": "oracle",\n  "bogus": 3')
    e = _config_error(text)
    assert e.line == 9 and 'bogus' in e.message
    assert e.format().startswith('exp.json:9:')

    e = _config_error(SMALL_CONFIG.replace('[0.01, 0.001]', '[0.001, 0.01]'))
    assert e.line == 4
    e = _config_error(SMALL_CONFIG.replace('[0.0, 0.0, 0.0]', '[0.0, 0.0]'))
    assert e.line == 5
    e = _config_error(SMALL_CONFIG.replace('"oracle"', '"magic"'))
    assert e.line == 8
    e = _config_error(SMALL_CONFIG.replace('"quad_order": 4', '"quad_order": 2'))
    assert e.line == 7
    e = _config_error(SMALL_CONFIG.replace('"samples": 2000,', '"samples": 2000'))
    assert e.line is not None and 'JSON' in e.message
    e = _config_error('{"n": 1}')
    assert e.line == 1


def test_load_missing_config_file():
    try:
        load_experiment_config('/nonexistent/experiment.json')
        assert False, "不存在的文件应当报错"
    except ConfigError as e:
        assert e.path == '/nonexistent/experiment.json'


def test_fit_exponents_recovers_slope():
    eps = [1e-1, 1e-2, 1e-3, 1e-4]
    records = [RigidityRecord(e, sup_dev=2.0 * math.sqrt(e), sobolev_dev=3.0 * e) for e in eps]
    ex = fit_exponents(records)
    assert ex.points == 4
    assert fit_exponents(records, max_eps=1e-2).points == 3
    assert abs(ex.sup_slope - 0.5) < 1e-12
    assert abs(ex.sobolev_slope - 1.0) < 1e-12
    assert abs(ex.sup_intercept - math.log(2.0)) < 1e-10
    assert abs(ex.r2 - 1.0) < 1e-12

    zeros = [RigidityRecord(e, sup_dev=0.0, sobolev_dev=0.0) for e in eps]
    ex = fit_exponents(zeros)
    assert ex.sup_slope is None and ex.r2 is None
    failed = [RigidityRecord(1e-3, error='boom'), RigidityRecord(1e-4, sup_dev=1.0, sobolev_dev=1.0)]
    assert fit_exponents(failed).points == 1


def test_experiment_report_is_deterministic():
    report = _small_experiment().run()
    assert [r.epsilon for r in report.records] == [0.01, 0.001]
    for record in report.records:
        assert record.ok and record.fitter_used == 'oracle'
        assert 0.0 < record.sup_dev < 0.5
        assert math.isfinite(record.sobolev_dev) and record.exp_int_ln16 >= 1.0
        assert record.sup_metric == 'rho_sup'
    assert len(pairwise_ratios(report, 'sup_dev')) == 1
    assert list(report.to_frame().columns) == ['epsilon', 'sup_dev', 'sobolev_dev', 'exp_int_ln16', 'fitter',
                                               'fallback']

    with tempfile.TemporaryDirectory() as tmp:
        first = report.write(str(Path(tmp) / 'a' / 'report'))
        second = _small_experiment().run().write(str(Path(tmp) / 'b' / 'report'))
        for kind in ('csv', 'json'):
            assert first[kind].read_bytes() == second[kind].read_bytes()
        data = json.loads(first['json'].read_text(encoding='utf-8'))
        assert data['environment']['n'] == 1
        assert set(data) == {'config', 'records', 'exponents', 'environment'}


def test_run_rigidity_writes_to_config_output():
    with tempfile.TemporaryDirectory() as tmp:
        data = json.loads(SMALL_CONFIG)
        data['output'] = str(Path(tmp) / 'runs' / 'small')
        config = parse_experiment_config(json.dumps(data))
        unwritten = run_rigidity(config, write=False)
        assert len(unwritten.records) == 2 and not config.csv_path.exists()
        report = run_rigidity(config)
        assert config.csv_path.exists() and config.json_path.exists()
        assert [r.epsilon for r in report.records] == [0.01, 0.001]
        assert all(r.ok for r in report.records)
        frame = pd.read_csv(config.csv_path)
        assert list(frame['epsilon']) == [0.01, 0.001]
        assert json.loads(config.json_path.read_text(encoding='utf-8'))['config']['output'] == data['output']

def _dilation_report(epsilons):
    settings = load_test_config()
    sizes, n = settings['sizes'], settings['rigidity']['n']
    config = parse_experiment_config(json.dumps({
        'n': n,
        'family': 'dilation',
        'epsilons': epsilons,
        'ball': {'center': [0.0] * (2 * n + 1), 'radius': 1.0},
        'samples': sizes['sup_samples'],
        'quad_order': sizes['quad_order'],
    }))
    fitter = IsometryFitter(quad_order=sizes['quad_order'], mean_order=6, residual_samples=512)
    report = RigidityExperiment(config, fitter, exp_samples=sizes['exp_samples'], sobolev_order=6).run()
    assert all(r.ok and not r.fit_fallback for r in report.records)
    return report


def test_dilation_family_convergence_orders():
    expected = load_test_config()['rigidity']
    assert len(expected['epsilons']) == 8
    report = _dilation_report(expected['epsilons'])
    ex = report.exponents
    assert ex.points == 8
    lo, hi = expected['sup_slope']
    assert lo <= ex.sup_slope <= hi, f"sup 收敛阶 {ex.sup_slope:.4f}"
    lo, hi = expected['sobolev_slope']
    assert lo <= ex.sobolev_slope <= hi, f"Sobolev 收敛阶 {ex.sobolev_slope:.4f}"
    assert ex.r2 >= expected['r2_min'], f"r² = {ex.r2:.6f}"


def test_dilation_halving_ratios():
    expected = load_test_config()['rigidity']
    report = _dilation_report(expected['halving_epsilons'])
    sup, sobolev = pairwise_ratios(report, 'sup_dev'), pairwise_ratios(report, 'sobolev_dev')
    assert len(sup) == len(sobolev) == 2
    for ratio in sup:
        assert abs(ratio * math.sqrt(2.0) - 1.0) <= expected['sup_ratio_tol'], f"sup 比 {ratio:.5f}"
    for ratio in sobolev:
        assert abs(2.0 * ratio - 1.0) <= expected['sobolev_ratio_tol'], f"Sobolev 比 {ratio:.5f}"


def test_coercive_request_falls_back_for_n1():
    experiment = _small_experiment(SMALL_CONFIG.replace('"oracle"', '"coercive"'))
    record = experiment.measure(0.01)
    assert record.fit_fallback
    assert record.fitter_used == 'oracle'


def test_embedding_suite_bounded_for_dilations():
    suite = embedding_suite(seed=1, trials=2, n=1, samples=512)
    assert suite.passed
    assert (suite.table['ratio_max'] <= suite.table['analytic'] + 1e-9).all()
    assert abs(dilation_embedding_ratio(0.0)) == 0.0
    try:
        embedding_suite(n=1, p=4.0)
        assert False, "p ≤ ν 应当被拒绝"
    except PreconditionError:
        pass


def test_isometry_growth_table_shape():
    suite = isometry_growth_suite(seed=0, trials=1, n=1, samples=512)
    assert len(suite.table) == 9
    identity = suite.table[suite.table['kind'] == 'identity']
    assert (identity['worst_ratio'] == 0.0).all()
    try:
        isometry_growth_suite(trials=0)
        assert False, "trials 必须为正"
    except InvalidParameterError:
        pass


def test_selftest_suites():
    tester = SelfTest(quick=True, seed=0)
    results = tester.run(['algebra', 'metric'])
    assert [r.name for r in results] == ['algebra', 'metric']
    assert all(r.passed for r in results), [c for r in results for c in r.checks if not c.passed]
    try:
        tester.run(['nope'])
        assert False, "未知套件应当抛出 KeyError"
    except KeyError:
        pass


def test_correction_suite_flags_stated_constant():
    suite, = SelfTest(quick=True, seed=0).run(['correction'])
    assert suite.passed, [c for c in suite.checks if not c.passed]
    stated = [c for c in suite.checks if c.flagged]
    assert len(stated) == 1
    # 一般扰动上原始常数不成立，报告为偏差而不是通过
    assert stated[0].value > 1.0 and not stated[0].passed
    assert suite.deviations == stated
    assert not any('Hermitian moment' in c.name for c in suite.checks)


def test_cli_exit_codes():
    assert cli_main(['no_such_command']) == 2
    assert cli_main(['fit', '--map', 'nonsense', '--n', '1']) == 2
    assert cli_main(['fit', '--map', 'dilation:abc', '--n', '1']) == 2
    assert cli_main(['rigidity', '--config', '/nonexistent/experiment.json']) == 2
    assert cli_main(['chain', '--n', '1', '--x', '0.1,0.2']) == 2
    assert cli_main(['selftest', '--suite', 'nope']) == 2
    assert cli_main(['selftest', '--quick', '--suite', 'algebra']) == 0


def test_cli_chain_writes_json():
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / 'chain.json'
        code = cli_main(['chain', '--n', '1', '--x', '0.3,0.1,0.2', '--output', str(out)])
        assert code == 0
        data = json.loads(out.read_text(encoding='utf-8'))
        assert data['certified'] is True
        assert data['domain']['kind'] == 'ball'
        assert data['x'] == [0.3, 0.1, 0.2]


def test_cli_rigidity_writes_reports():
    with tempfile.TemporaryDirectory() as tmp:
        config_path = Path(tmp) / 'exp.json'
        config_path.write_text(SMALL_CONFIG, encoding='utf-8')
        code = cli_main(['rigidity', '--config', str(config_path), '--output', str(Path(tmp) / 'out')])
        assert code == 0
        assert (Path(tmp) / 'out.csv').exists() and (Path(tmp) / 'out.json').exists()


if __name__ == "__main__":
    from harness import run_module_tests
    sys.exit(run_module_tests(globals(), 'rigidity_lab 测试'))
