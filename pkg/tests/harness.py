#!/usr/bin/env python3
"""
测试辅助 - 直接运行测试文件时使用

每个测试文件都是普通的 def test_*() 函数（pytest 可以直接收集），
在 __main__ 中调用 run_module_tests(globals(), 标题) 即可逐个运行并打印摘要。
"""

import sys
import time
import traceback
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import yaml

project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from modules.utils import safe_print, format_summary_box

TEST_CONFIG = Path(__file__).parent / 'config' / 'test_config.yml'


def load_test_config() -> Dict[str, Any]:
    """读取 tests/config/test_config.yml"""
    with open(TEST_CONFIG, 'r', encoding='utf-8') as f:
        return yaml.safe_load(f) or {}


@dataclass
class CaseResult:
    """单个测试函数的结果"""
    name: str
    success: bool
    execution_time: float
    error: Optional[str] = None


class SuiteReporter:
    """测试报告生成器"""

    def __init__(self, title: str):
        self.title = title
        self.results: List[CaseResult] = []
        self.start_time = time.time()

    def add_result(self, result: CaseResult) -> None:
        self.results.append(result)
        icon = '✅' if result.success else '❌'
        safe_print(f"  {icon} {result.name} ({result.execution_time:.2f}s)")
        if result.error:
            safe_print(f"     {result.error}")

    @property
    def passed(self) -> bool:
        return all(r.success for r in self.results)

    def generate_summary(self) -> str:
        footer = f"总耗时 {time.time() - self.start_time:.1f}s"
        return format_summary_box(self.title, [(r.name, r.success) for r in self.results], footer)


def run_case(func: Callable[[], None]) -> CaseResult:
    start = time.time()
    try:
        func()
        return CaseResult(func.__name__, True, time.time() - start)
    except Exception as e:
        tb = traceback.extract_tb(e.__traceback__)[-1]
        message = f"{type(e).__name__}: {e} (line {tb.lineno})"
        return CaseResult(func.__name__, False, time.time() - start, message)


def run_module_tests(namespace: Dict[str, Any], title: str) -> int:
    """运行 namespace 中全部 test_* 函数，返回退出码"""
    reporter = SuiteReporter(title)
    tests = [v for k, v in namespace.items() if k.startswith('test_') and callable(v)]
    safe_print(f"\n🧪 {title}: {len(tests)} 个测试\n")
    for func in tests:
        reporter.add_result(run_case(func))
    safe_print()
    safe_print(reporter.generate_summary())
    return 0 if reporter.passed else 1
