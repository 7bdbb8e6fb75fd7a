"""
自检套件 - Invariant Self-test Suites

每个套件返回一组 CheckResult；cli 的 selftest 子命令按顺序运行全部套件，
任一检查失败则退出码为 1。--quick 把样本量和试验次数降到秒级。
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from modules.hgroup import (
    HPoint, Ball, Box, Isometry, check_commutators, check_left_invariance,
    group_dist, group_dilate, group_norm, random_isometry, random_unitary,
    box_volume, box_second_moment,
)
from modules.hcalc import (
    identity_map, dilation_map, perturbed_map, vector_map, horizontal_part, horizontal_matrices, q_norms,
)
from modules.kerq import (
    KernelMode, random_kernel_element, integrate_box, moments, rotate_vector_map,
    lemma4_correction, stated_bound, exp_integrability, john_nirenberg_functional,
)
from modules.domains import make_ball_domain, build_chain, whitney_cover, boundary_integral, radial_beta_oracle
from .appendix import isometry_growth_suite, embedding_suite

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    """
    一项检查

    flagged 的检查是已知偏差：结果照常报告，但不影响套件是否通过。
    """
    name: str
    passed: bool
    value: Optional[float] = None
    detail: str = ''
    flagged: bool = False


@dataclass
class SuiteResult:
    name: str
    checks: List[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks if not c.flagged)

    @property
    def deviations(self) -> List[CheckResult]:
        """未通过的 flagged 检查"""
        return [c for c in self.checks if c.flagged and not c.passed]

    def add(self, name: str, passed: bool, value: Optional[float] = None, detail: str = '') -> None:
        self.checks.append(CheckResult(name, bool(passed), None if value is None else float(value), detail))

    def flag(self, name: str, passed: bool, value: Optional[float] = None, detail: str = '') -> None:
        self.checks.append(CheckResult(name, bool(passed), None if value is None else float(value), detail,
                                       flagged=True))


def _random_points(n: int, count: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = scale * rng.standard_normal((count, 2 * n + 1))
    X[:, -1] *= scale
    return X


class SelfTest:
    """按名称组织的自检套件"""

    def __init__(self, quick: bool = False, seed: int = 0):
        self.quick = quick
        self.seed = seed
        self.logger = logging.getLogger(__name__)
        self.suites: Dict[str, Callable[[SuiteResult], None]] = {
            'algebra': self.suite_algebra,
            'metric': self.suite_metric,
            'moments': self.suite_moments,
            'kernel': self.suite_kernel,
            'correction': self.suite_correction,
            'exponential': self.suite_exponential,
            'chain': self.suite_chain,
            'whitney': self.suite_whitney,
            'appendix': self.suite_appendix,
        }

    def size(self, full: int, quick: int) -> int:
        return quick if self.quick else full

    # ------------------------------------------------------------------

    def suite_algebra(self, out: SuiteResult) -> None:
        rng = np.random.default_rng(self.seed)
        for n in (1, 2, 3):
            failures = check_commutators(n)
            out.add(f'commutators n={n}', not failures, len(failures))
        worst = max(check_left_invariance(_random_points(n, 100, rng)) for n in (1, 2, 3))
        out.add('left invariance', worst <= 1e-12, worst, 'tol 1e-12')

    def suite_metric(self, out: SuiteResult) -> None:
        rng = np.random.default_rng(self.seed)
        n = 2
        count = self.size(10_000, 1_000)
        X, Y, Z = (_random_points(n, count, rng) for _ in range(3))
        excess = group_dist(X, Z) - group_dist(X, Y) - group_dist(Y, Z)
        violations = int(np.count_nonzero(excess > 1e-12))
        out.add('triangle inequality', violations == 0, violations, f'{count} 组')

        s = rng.uniform(0.1, 10.0, count)
        scaled = np.stack([group_dilate(si, x) for si, x in zip(s[:200], X[:200])])
        homog = float(np.max(np.abs(group_norm(scaled) - s[:200] * group_norm(X[:200])) / group_norm(X[:200])))
        out.add('homogeneity', homog <= 1e-12, homog)

        worst = 0.0
        for _ in range(10):
            theta = random_isometry(n, rng, reflect=bool(rng.integers(2)))
            d0 = group_dist(X[:500], Y[:500])
            d1 = group_dist(theta.apply_coords(X[:500]), theta.apply_coords(Y[:500]))
            worst = max(worst, float(np.max(np.abs(d1 - d0) / np.maximum(1.0, d0))))
        out.add('isometry invariance', worst <= 1e-12, worst)

    def suite_moments(self, out: SuiteResult) -> None:
        rng = np.random.default_rng(self.seed)
        n = 2
        order = self.size(12, 8)
        const = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c_real = np.concatenate([const.real, const.imag])
        u_const = vector_map(n, lambda X: np.broadcast_to(c_real, np.shape(X)[:-1] + (2 * n,)).copy(),
                             lambda X: np.zeros(np.shape(X)[:-1] + (2 * n, 2 * n + 1)), label='constant')
        md = moments(u_const, order, refine=False)
        out.add('a(const) = const', np.max(np.abs(md.a_vec - const)) <= 1e-10, float(np.max(np.abs(md.a_vec - const))))

        md = moments(identity_map(n), order, refine=False)
        out.add('A(z) = I', np.max(np.abs(md.A - np.eye(n))) <= 1e-10, float(np.max(np.abs(md.A - np.eye(n)))))

        B = random_unitary(n, rng)
        md = moments(rotate_vector_map(B, identity_map(n)), order, refine=False)
        out.add('A(Bz) = B', np.max(np.abs(md.A - B)) <= 1e-10, float(np.max(np.abs(md.A - B))))

        unit = Box(HPoint.identity(n), 1.0)
        vol = float(integrate_box(lambda X: np.ones(X.shape[0]), unit, order))
        out.add('|Box(0,1)| = 32', abs(vol - 32.0) <= 1e-10 and abs(box_volume(1.0, n) - 32.0) <= 1e-12, vol)
        m2 = float(integrate_box(lambda X: X[:, 0] ** 2 + X[:, n] ** 2, unit, order))
        out.add('∫|z_1|² = 64/3', abs(m2 - 64.0 / 3.0) <= 1e-10 and abs(box_second_moment(1.0, n) - 64.0 / 3.0) <= 1e-12,
                m2)

    def suite_kernel(self, out: SuiteResult) -> None:
        rng = np.random.default_rng(self.seed)
        elements = self.size(100, 10)
        points = self.size(100, 20)
        cases = [(2, KernelMode.GENERAL_N), (3, KernelMode.GENERAL_N), (1, KernelMode.SPECIAL_N1)]
        for n, mode in cases:
            worst = 0.0
            for _ in range(elements):
                k = random_kernel_element(n, rng, mode=mode)
                M, _ = horizontal_matrices(k.as_map(), _random_points(n, points, rng))
                worst = max(worst, float(np.max(q_norms(M))))
            out.add(f'|Qu| on ker Q, n={n}', worst <= 1e-8, worst)

        smallest = math.inf
        for trial in range(self.size(20, 5)):
            f = horizontal_part(perturbed_map(2, 0.1, seed=self.seed + trial))
            M, _ = horizontal_matrices(f, _random_points(2, 1, rng))
            smallest = min(smallest, float(q_norms(M)[0]))
        out.add('|Qu| detects non-kernel maps', smallest > 1e-3, smallest)

    def suite_correction(self, out: SuiteResult) -> None:
        n, eps = 2, 0.01
        order = self.size(12, 8)
        trials = self.size(50, 5)
        # sup|u − z| ≤ ε
        eta = eps / math.sqrt(2 * n)
        worst = {'unitary': 0.0, 'hermitian': 0.0, 'kernel': 0.0, 'stated_ratio': 0.0}
        certified = True
        for trial in range(trials):
            u = horizontal_part(perturbed_map(n, eta, seed=self.seed + trial))
            corr = lemma4_correction(u, eps, order)
            worst['unitary'] = max(worst['unitary'], corr.unitarity_defect)
            worst['hermitian'] = max(worst['hermitian'], corr.hermitian_defect)
            K = moments(rotate_vector_map(corr.V, u), order, refine=False).K
            worst['kernel'] = max(worst['kernel'], float(np.max(np.abs(K))))
            worst['stated_ratio'] = max(worst['stated_ratio'], corr.deviation / corr.deviation_bound)
            certified = certified and corr.certified
        out.add('V unitary', worst['unitary'] <= 1e-10, worst['unitary'])
        out.add('VA Hermitian', worst['hermitian'] <= 1e-9, worst['hermitian'])
        out.add('K(Vu) = 0', worst['kernel'] <= 1e-9, worst['kernel'])
        out.add('|V−I| ≤ derived bound', certified)
        ratio = worst['stated_ratio']
        out.flag('|V−I| < nϰ^{n+1}2^{−n}ε', ratio < 1.0, ratio,
                 f'最坏 |V−I| / {stated_bound(n, eps):.3e}，{trials} 个一般扰动')

    def suite_exponential(self, out: SuiteResult) -> None:
        n = 2
        ball = Ball(HPoint.identity(n), 1.0)
        samples = self.size(20_000, 4_096)
        worst = 0.0
        for eps in (1e-1, 1e-2, 1e-3):
            value = exp_integrability(dilation_map(n, 1.0 + eps), Isometry.identity(n), ball, math.log(16.0), eps,
                                      samples, self.seed)
            worst = max(worst, abs(value / 16.0 - 1.0))
        out.add('exp functional at ln 16 = 16', worst <= 0.01, worst)
        jn = john_nirenberg_functional(perturbed_map(n, 0.05, seed=self.seed), ball, samples=samples, seed=self.seed)
        out.add('John–Nirenberg functional ≤ 16', jn <= 16.0, jn)

    def suite_chain(self, out: SuiteResult) -> None:
        n = 2
        U = make_ball_domain(np.zeros(2 * n + 1), 1.0, seed=self.seed)
        X = U.sample_points(self.size(200, 10), seed=self.seed + 1)
        failed = 0
        for x in X:
            if not build_chain(U, x).certified:
                failed += 1
        out.add('chains certified', failed == 0, failed, f'{X.shape[0]} 点')

    def suite_whitney(self, out: SuiteResult) -> None:
        n = 2
        U = make_ball_domain(np.zeros(2 * n + 1), 1.0, seed=self.seed)
        family = whitney_cover(U, self.size(8, 5))
        for name, ok in family.checks.items():
            out.add(name, ok)
        tau = 0.1
        oracle = radial_beta_oracle(n, tau)
        out.add('Beta oracle ≈ 1.2877', abs(oracle - 1.2877) <= 5e-4, oracle)
        result = boundary_integral(U, tau, self.size(1_000_000, 200_000), self.seed)
        rel = abs(result.value / (U.volume * oracle) - 1.0)
        out.add('boundary integral vs oracle', rel <= self.size(2, 4) * 1e-2, rel)
        out.add('∫ρ_U^-τ ≤ 2|U|/α^τ', bool(result.within_bound), result.value, f'bound {result.bound:.4f}')

    def suite_appendix(self, out: SuiteResult) -> None:
        growth = isometry_growth_suite(self.seed, self.size(100, 3))
        for row in growth.table.itertuples(index=False):
            out.add(f'{row.kind} growth s={row.s:g}', row.passed, row.worst_ratio, f'bound {row.bound:g}')
        emb = embedding_suite(self.seed, self.size(10, 2))
        out.add('embedding ratio bounded', emb.passed, emb.details['constant'])

    # ------------------------------------------------------------------

    def run(self, names: Optional[Sequence[str]] = None) -> List[SuiteResult]:
        results = []
        for name in names or list(self.suites):
            if name not in self.suites:
                raise KeyError(f"未知自检套件: {name}")
            out = SuiteResult(name)
            start = time.time()
            try:
                self.suites[name](out)
            except Exception as e:
                self.logger.error(f"套件 {name} 异常: {e}")
                out.error = f"{type(e).__name__}: {e}"
            out.elapsed = time.time() - start
            level = logging.INFO if out.passed else logging.WARNING
            self.logger.log(level, f"套件 {name}: {'通过' if out.passed else '失败'} ({out.elapsed:.1f}s)")
            results.append(out)
        return results


def run_selftest(quick: bool = False, seed: int = 0, names: Optional[Sequence[str]] = None) -> List[SuiteResult]:
    return SelfTest(quick, seed).run(names)
