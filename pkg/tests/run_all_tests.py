#!/usr/bin/env python3
"""
一键运行 rigidity_lab 的全部测试
按模块自底向上：hgroup → hcalc → kerq → domains → rigidity_lab → 配置
"""

import os
import sys
import subprocess
import time
from pathlib import Path

# 添加项目根目录到Python路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.utils import safe_print, format_summary_box
from harness import load_test_config

TESTS = [
    {
        'name': 'hgroup 测试',
        'script': 'tests/test_hgroup.py',
        'description': '群律、Korányi 度量、标架、体积、等距变换与采样'
    },
    {
        'name': 'hcalc 测试',
        'script': 'tests/test_hcalc.py',
        'description': '水平微分（解析与流差分）、算子 Q、主估计与探针'
    },
    {
        'name': 'kerq 测试',
        'script': 'tests/test_kerq.py',
        'description': '核元素、求积、矩与投影 P、酉修正、偏差度量、等距拟合'
    },
    {
        'name': 'domains 测试',
        'script': 'tests/test_domains.py',
        'description': '区域、水平曲线、球链、Whitney 覆盖与边界积分'
    },
    {
        'name': 'rigidity_lab 测试',
        'script': 'tests/test_rigidity_lab.py',
        'description': '映射族、实验配置、收敛阶、报告、附录检查与命令行'
    },
    {
        'name': '配置测试',
        'script': 'tests/test_config.py',
        'description': '设置文件、环境变量覆盖与运行前验证'
    },
]


class TestRunner:
    """测试运行器：每个测试文件在独立子进程中运行"""

    def __init__(self, timeout: int, results_dir: Path):
        self.timeout = timeout
        self.results_dir = results_dir
        self.test_results = {}
        self.start_time = time.time()

    def run_test(self, test_name: str, test_script: str, description: str) -> bool:
        """运行单个测试"""
        safe_print(f"\n🔄 运行 {test_name}...")
        safe_print(f"   📄 {description}")

        if not os.path.exists(test_script):
            safe_print(f"   ❌ 测试脚本不存在: {test_script}")
            return False

        try:
            start_time = time.time()
            result = subprocess.run([sys.executable, test_script],
                                    capture_output=True, text=True, timeout=self.timeout)
            execution_time = time.time() - start_time
            success = result.returncode == 0
            log_path = self.results_dir / f"{Path(test_script).stem}.log"
            log_path.write_text(result.stdout + result.stderr, encoding='utf-8')

            self.test_results[test_name] = {
                'success': success,
                'execution_time': execution_time,
                'stdout': result.stdout,
                'stderr': result.stderr
            }

            if success:
                safe_print(f"   ✅ {test_name} 通过 (耗时: {execution_time:.1f}s)")
            else:
                safe_print(f"   ❌ {test_name} 失败 (耗时: {execution_time:.1f}s)")
                # 失败用例的行由 harness 打印在 stdout 中
                failed = [line for line in result.stdout.splitlines() if '❌' in line]
                for line in failed[:10]:
                    safe_print(f"   {line.strip()}")
                if result.stderr:
                    safe_print(f"   错误信息: {result.stderr[-300:]}")

            return success

        except subprocess.TimeoutExpired:
            self.test_results[test_name] = {'success': False, 'execution_time': float(self.timeout)}
            safe_print(f"   ⏱️  {test_name} 超时 (>{self.timeout}s)")
            return False

    def run_all_tests(self, selected=None) -> bool:
        """运行所有测试（或名称中包含 selected 的测试）"""
        tests = [t for t in TESTS if not selected or any(s in t['script'] for s in selected)]

        safe_print("📋 测试计划:")
        for i, test in enumerate(tests, 1):
            safe_print(f"   {i}. {test['name']}")
            safe_print(f"      {test['description']}")
        safe_print("\n" + "=" * 60)

        overall_success = True
        for test in tests:
            if not self.run_test(test['name'], test['script'], test['description']):
                overall_success = False

        self.generate_summary_report(overall_success)
        return overall_success

    def generate_summary_report(self, overall_success: bool):
        """生成总结报告"""
        total_time = time.time() - self.start_time
        passed_tests = sum(1 for result in self.test_results.values() if result['success'])
        total_tests = len(self.test_results)

        safe_print("\n" + "=" * 60)
        safe_print(format_summary_box(
            'rigidity_lab 测试套件',
            [(name, result['success']) for name, result in self.test_results.items()],
            f"{passed_tests}/{total_tests} 通过, 总耗时 {total_time:.1f}s"))

        if not overall_success:
            safe_print("\n💡 故障排除建议:")
            safe_print("  1. 单独运行失败的测试文件查看完整回溯")
            safe_print("  2. 查看 tests/config/test_config.yml 中的容差与规模")
            safe_print("  3. 运行 python rigidity_lab.py selftest --quick 定位出问题的不变量")


def main():
    """主函数"""
    safe_print("🚀 启动 rigidity_lab 测试套件...\n")
    os.chdir(project_root)
    settings = load_test_config()
    results_dir = Path(settings['test_environment']['results_dir'])
    results_dir.mkdir(parents=True, exist_ok=True)

    runner = TestRunner(int(settings['test_environment']['timeout']), results_dir)
    success = runner.run_all_tests(sys.argv[1:])

    if success:
        safe_print("\n🎉 所有测试通过。")
        sys.exit(0)
    else:
        safe_print("\n❌ 部分测试失败，请检查上述故障排除建议。")
        sys.exit(1)


if __name__ == "__main__":
    main()
