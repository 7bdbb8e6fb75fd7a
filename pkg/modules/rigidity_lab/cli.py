#!/usr/bin/env python3
"""
命令行入口 - rigidity_lab CLI

子命令：
  selftest   全部不变量套件（--quick 缩小规模）
  rigidity   按 JSON 配置运行刚性实验并写出 CSV/JSON 报告
  chain      在区域内构造并认证球链，输出 JSON
  cover      Whitney 型覆盖，输出 JSON
  fit        对同一映射运行两种拟合器并打印对比表
  growth     等距增长引理检查
  embedding  嵌入引理检查

退出码：0 全部检查通过；1 有检查失败；2 配置或参数解析错误。
"""

import argparse
import json
import logging
import math
import sys
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from modules.config import ConfigManager, validate_before_rigidity_run, log_validation_issues
from modules.config.validator import QuickValidator
from modules.hgroup import HPoint, Ball, RigidityLabError, ConfigError, Isometry
from modules.kerq import IsometryFitter, sup_deviation
from modules.domains import (
    make_ball_domain, make_box_domain, make_dumbbell, calibrate_domain, build_chain, whitney_cover, boundary_integral,
)
from modules.utils import safe_print, status_icon, format_summary_box, write_text_file
from .experiment import RigidityExperiment
from .experiment_config import load_experiment_config
from .families import FamilySpec, make_family
from .appendix import isometry_growth_suite, embedding_suite
from .selftest import SelfTest

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2
DOMAIN_KINDS = ('ball', 'box', 'dumbbell')


# ---------------------------------------------------------------------------
# 参数解析
# ---------------------------------------------------------------------------

def parse_coords(text: str, what: str = '坐标') -> List[float]:
    try:
        values = [float(v) for v in text.replace(' ', '').split(',') if v != '']
    except ValueError:
        raise ConfigError(f"无法解析{what}: {text!r}")
    if not values or not all(math.isfinite(v) for v in values):
        raise ConfigError(f"{what}必须是逗号分隔的有限实数: {text!r}")
    return values


def parse_ball(text: str, n: int) -> Ball:
    """"r" 表示 B(0, r)；"c_1,…,c_{2n+1};r" 给出中心"""
    if ';' in text:
        center_text, radius_text = text.split(';', 1)
        center = parse_coords(center_text, '球心')
        if len(center) != 2 * n + 1:
            raise ConfigError(f"球心坐标个数必须为 {2 * n + 1}: {len(center)}")
    else:
        center, radius_text = [0.0] * (2 * n + 1), text
    radius = parse_coords(radius_text, '半径')
    if len(radius) != 1 or not radius[0] > 0:
        raise ConfigError(f"半径必须是一个正数: {radius_text!r}")
    return Ball(HPoint.from_coords(center), radius[0])


def parse_map(text: str, n: int):
    """"family:ε"，例如 dilation:0.01 或 conjugated_dilation(3):1e-3"""
    if ':' not in text:
        raise ConfigError(f"映射说明应为 family:ε: {text!r}")
    family_text, eps_text = text.rsplit(':', 1)
    eps = parse_coords(eps_text, 'ε')
    if len(eps) != 1 or eps[0] < 0:
        raise ConfigError(f"ε 必须是一个非负数: {eps_text!r}")
    spec = FamilySpec.parse(family_text)
    return make_family(spec, n)(eps[0]), eps[0]


def make_domain(args, calibration_samples: int):
    """按命令行参数构造区域，并用设置中的样本数标定 John/Hölder 常数"""
    n = args.n
    origin = np.zeros(2 * n + 1)
    if args.domain == 'ball':
        U = make_ball_domain(origin, args.radius, calibrate=False)
    elif args.domain == 'box':
        U = make_box_domain(origin, args.radius, calibrate=False)
    else:
        shift = np.zeros(2 * n + 1)
        shift[0] = args.separation / 2.0
        U = make_dumbbell(-shift, shift, args.radius, args.radius, args.neck, calibrate=False)
    return calibrate_domain(U, samples=calibration_samples, seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='rigidity_lab', description='海森堡群几何刚性数值实验')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], default=None,
                        help='覆盖设置文件中的日志级别')
    parser.add_argument('--settings', default=None, help='rigidity_lab.yml 路径')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('selftest', help='运行全部不变量套件')
    p.add_argument('--quick', action='store_true', help='缩小样本量与试验次数')
    p.add_argument('--suite', action='append', default=None, help='只运行指定套件（可重复）')
    p.add_argument('--seed', type=int, default=None)

    p = sub.add_parser('rigidity', help='按 JSON 配置运行刚性实验')
    p.add_argument('--config', required=True, help='实验配置文件')
    p.add_argument('--output', default=None, help='覆盖配置中的 output')

    for name, help_text in (('chain', '构造并认证球链'), ('cover', 'Whitney 型覆盖')):
        p = sub.add_parser(name, help=help_text)
        p.add_argument('--domain', choices=DOMAIN_KINDS, default='ball')
        p.add_argument('--n', type=int, default=2)
        p.add_argument('--radius', type=float, default=1.0)
        p.add_argument('--neck', type=float, default=0.3, help='哑铃颈部半径')
        p.add_argument('--separation', type=float, default=3.0, help='哑铃两球心距离')
        p.add_argument('--seed', type=int, default=0)
        p.add_argument('--output', default=None, help='JSON 输出路径（缺省打印到标准输出）')
        if name == 'chain':
            p.add_argument('--x', required=True, help='逗号分隔的 2n+1 个实坐标')
        else:
            p.add_argument('--resolution', type=int, default=None, help='网格分辨率')
            p.add_argument('--tau', type=float, default=None, help='同时估计 ∫ρ_U^(-τ)，τ ∈ (0, 1)')

    p = sub.add_parser('fit', help='比较 coercive 与 oracle 拟合')
    p.add_argument('--map', required=True, help='family:ε，例如 dilation:0.01')
    p.add_argument('--ball', default='1', help='"r" 或 "c_1,…,c_{2n+1};r"')
    p.add_argument('--n', type=int, default=2)
    p.add_argument('--samples', type=int, default=None, help='sup 偏差的样本数')

    p = sub.add_parser('growth', help='等距增长引理检查')
    p.add_argument('--trials', type=int, default=100)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--n', type=int, default=2)

    p = sub.add_parser('embedding', help='嵌入引理检查')
    p.add_argument('--trials', type=int, default=10)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--n', type=int, default=2)
    p.add_argument('--p', type=float, default=None, help='Sobolev 指数，须大于 ν = 2n+2')
    return parser


# ---------------------------------------------------------------------------
# 子命令
# ---------------------------------------------------------------------------

def _emit_json(data: dict, output: Optional[str]) -> None:
    text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + '\n'
    if output:
        path = write_text_file(output, text)
        safe_print(f"📄 已写出 {path}")
    else:
        safe_print(text, end='')


def cmd_selftest(args, manager: ConfigManager) -> int:
    seed = manager.settings.sampling.seed if args.seed is None else args.seed
    tester = SelfTest(args.quick, seed)
    unknown = [name for name in args.suite or [] if name not in tester.suites]
    if unknown:
        safe_print(f"❌ 未知自检套件: {', '.join(unknown)}（可选: {', '.join(tester.suites)}）")
        return EXIT_CONFIG
    results = tester.run(args.suite)
    for suite in results:
        safe_print(f"\n{status_icon(suite.passed)} {suite.name} ({suite.elapsed:.1f}s)")
        if suite.error:
            safe_print(f"   ❌ {suite.error}")
        for check in suite.checks:
            value = '' if check.value is None else f" = {check.value:.3e}"
            detail = f" [{check.detail}]" if check.detail else ''
            icon = '⚠️' if check.flagged and not check.passed else status_icon(check.passed)
            safe_print(f"   {icon} {check.name}{value}{detail}")
    safe_print()
    safe_print(format_summary_box('rigidity_lab 自检', [(s.name, s.passed) for s in results],
                                  '(quick)' if args.quick else ''))
    return EXIT_OK if all(s.passed for s in results) else EXIT_FAILED


def cmd_rigidity(args, manager: ConfigManager) -> int:
    config = load_experiment_config(args.config)
    if args.output:
        config.output = args.output
    can_proceed, issues = validate_before_rigidity_run(config, manager)
    if issues:
        log_validation_issues(issues, logger)
    if not can_proceed:
        safe_print(QuickValidator.format_issues_for_logging(issues))
        return EXIT_CONFIG

    settings = manager.settings
    fitter = IsometryFitter(quad_order=config.quad_order, oracle_samples=settings.fitting.oracle_samples,
                            restarts=settings.fitting.restarts, seed=config.seed,
                            allow_fallback=settings.fitting.allow_fallback)
    experiment = RigidityExperiment(config, fitter, exp_samples=settings.sampling.exp_samples,
                                    agreement_factor=settings.fitting.agreement_factor,
                                    sobolev_order=settings.numerics.sobolev_quad_order)
    report = experiment.run()
    paths = report.write()

    with pd.option_context('display.float_format', '{:.4e}'.format, 'display.width', 120):
        safe_print(report.to_frame().to_string(index=False))
    ex = report.exponents
    fmt = lambda v, spec: '未定义' if v is None else format(v, spec)
    safe_print(f"\nsup_slope = {fmt(ex.sup_slope, '.4f')}, sobolev_slope = {fmt(ex.sobolev_slope, '.4f')}, "
               f"r² = {fmt(ex.r2, '.5f')}")
    safe_print(f"📄 {paths['csv']}\n📄 {paths['json']}")

    ok = all(r.ok for r in report.records) and all(r.fitters_agree is not False for r in report.records)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_chain(args, manager: ConfigManager) -> int:
    x = parse_coords(args.x)
    can_proceed, issues = QuickValidator(manager).validate_for_chain_build(args.n, x, args.domain)
    if not can_proceed:
        safe_print(QuickValidator.format_issues_for_logging(issues))
        return EXIT_CONFIG
    U = make_domain(args, manager.settings.domains.calibration_samples)
    chain = build_chain(U, np.asarray(x))
    data = chain.to_dict()
    data['domain'] = U.to_dict()
    data['x'] = x
    _emit_json(data, args.output)
    return EXIT_OK if chain.certified else EXIT_FAILED


def cmd_cover(args, manager: ConfigManager) -> int:
    settings = manager.settings
    resolution = args.resolution or settings.domains.whitney_resolution
    U = make_domain(args, settings.domains.calibration_samples)
    family = whitney_cover(U, resolution)
    data = family.to_dict()
    data['domain'] = U.to_dict()
    ok = all(family.checks.values())
    if args.tau is not None:
        integral = boundary_integral(U, args.tau, settings.domains.mc_samples, args.seed)
        data['boundary_integral'] = integral.to_dict()
        ok = ok and integral.within_bound is not False
    _emit_json(data, args.output)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_fit(args, manager: ConfigManager) -> int:
    settings = manager.settings
    f, eps = parse_map(args.map, args.n)
    ball = parse_ball(args.ball, args.n)
    samples = args.samples or settings.sampling.sup_samples
    fitter = IsometryFitter(quad_order=settings.numerics.quad_order, oracle_samples=settings.fitting.oracle_samples,
                            restarts=settings.fitting.restarts, seed=settings.sampling.seed,
                            allow_fallback=settings.fitting.allow_fallback)
    region = ball.scaled(0.5)
    rows = []
    fits = [fitter.fit_oracle(f, ball)]
    if args.n >= 2:
        fits.insert(0, fitter.fit_coercive(f, ball))
    for fit in fits:
        rows.append({
            'fitter': fit.method,
            'fallback': fit.fallback,
            'sup_residual': fit.sup_residual,
            'sup_dev_half_ball': sup_deviation(f, fit.isometry, region, samples, settings.sampling.seed),
            'reflect': fit.isometry.reflect,
        })
    rows.append({'fitter': 'identity', 'fallback': False, 'sup_residual': math.nan,
                 'sup_dev_half_ball': sup_deviation(f, Isometry.identity(args.n), region, samples,
                                                    settings.sampling.seed),
                 'reflect': False})
    table = pd.DataFrame(rows)
    with pd.option_context('display.float_format', '{:.4e}'.format, 'display.width', 120):
        safe_print(f"{f.label}, ε = {eps:g}, B = B(c, {ball.radius:g})")
        safe_print(table.to_string(index=False))

    devs = [r['sup_dev_half_ball'] for r in rows[:len(fits)]]
    hi, lo = max(devs), min(devs)
    agree = hi <= 1e-12 or hi <= settings.fitting.agreement_factor * lo
    safe_print(f"{status_icon(agree)} 拟合器一致性 (因子 {settings.fitting.agreement_factor:g})")
    return EXIT_OK if agree else EXIT_FAILED


def _print_suite(suite) -> None:
    with pd.option_context('display.float_format', '{:.4f}'.format, 'display.width', 120):
        safe_print(suite.table.to_string(index=False))
    safe_print(f"{status_icon(suite.passed)} {suite.name}")


def cmd_growth(args, manager: ConfigManager) -> int:
    suite = isometry_growth_suite(args.seed, args.trials, args.n)
    _print_suite(suite)
    return EXIT_OK if suite.passed else EXIT_FAILED


def cmd_embedding(args, manager: ConfigManager) -> int:
    suite = embedding_suite(args.seed, args.trials, args.n, args.p)
    _print_suite(suite)
    safe_print(f"经验常数 C = {suite.details['constant']:.4f}")
    return EXIT_OK if suite.passed else EXIT_FAILED


COMMANDS = {
    'selftest': cmd_selftest,
    'rigidity': cmd_rigidity,
    'chain': cmd_chain,
    'cover': cmd_cover,
    'fit': cmd_fit,
    'growth': cmd_growth,
    'embedding': cmd_embedding,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Args:
        argv: 参数列表，缺省取 sys.argv[1:]

    Returns:
        退出码 0 / 1 / 2
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    manager = ConfigManager(args.settings)
    if args.log_level:
        logging.getLogger().setLevel(args.log_level)

    try:
        return COMMANDS[args.command](args, manager)
    except ConfigError as e:
        safe_print(f"❌ {e.format()}")
        return EXIT_CONFIG
    except RigidityLabError as e:
        logger.error(f"{args.command} 失败: {e}")
        safe_print(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(cli_main(sys.argv[1:]))
