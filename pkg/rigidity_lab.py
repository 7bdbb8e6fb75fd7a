#!/usr/bin/env python3
"""
rigidity_lab 命令行入口

用法:
  python rigidity_lab.py selftest --quick
  python rigidity_lab.py rigidity --config config/experiments/dilation_n2.json
  python rigidity_lab.py chain --domain ball --x 0.9,0,0,0,0
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from modules.rigidity_lab.cli import cli_main

if __name__ == '__main__':
    raise SystemExit(cli_main(sys.argv[1:]))
