#!/usr/bin/env python3
"""
实验配置生成脚本 - Experiment Config Generator

用 config_template 生成一份带默认值的实验配置，ε 在 [eps_min, eps_max] 上对数等距、降序排列。
写出前会用同一解析器回读一遍，保证生成的文件可以直接运行。
"""

import os
import sys
import json
import argparse

import numpy as np

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from modules.hgroup import ConfigError
from modules.rigidity_lab import config_template, parse_experiment_config
from modules.utils import safe_print, write_text_file


def build_config(n: int, family: str, eps_max: float, eps_min: float, points: int, **overrides) -> dict:
    config = config_template(n)
    config['family'] = family
    config['epsilons'] = [float(e) for e in np.logspace(np.log10(eps_max), np.log10(eps_min), points)]
    config.update({k: v for k, v in overrides.items() if v is not None})
    return config


def main() -> int:
    parser = argparse.ArgumentParser(description='生成刚性实验配置')
    parser.add_argument('--n', type=int, default=2)
    parser.add_argument('--family', default='dilation')
    parser.add_argument('--eps-max', type=float, default=1e-1)
    parser.add_argument('--eps-min', type=float, default=1e-4)
    parser.add_argument('--points', type=int, default=8)
    parser.add_argument('--fitter', default=None)
    parser.add_argument('--seed', type=int, default=None)
    parser.add_argument('--report', default=None, help='实验报告的输出前缀')
    parser.add_argument('--output', default=None, help='配置文件路径（缺省打印到标准输出）')
    args = parser.parse_args()

    if args.points < 1 or not 0 < args.eps_min <= args.eps_max:
        safe_print("❌ 需要 points ≥ 1 且 0 < eps_min ≤ eps_max")
        return 2

    config = build_config(args.n, args.family, args.eps_max, args.eps_min, args.points,
                          fitter=args.fitter, seed=args.seed, output=args.report)
    text = json.dumps(config, indent=2) + '\n'
    try:
        parse_experiment_config(text, args.output or '<stdout>')
    except ConfigError as e:
        safe_print(f"❌ {e.format()}")
        return 2

    if args.output:
        path = write_text_file(args.output, text)
        safe_print(f"✅ 已写出 {path}")
    else:
        safe_print(text, end='')
    return 0


if __name__ == "__main__":
    sys.exit(main())
