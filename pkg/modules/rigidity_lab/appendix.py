"""
附录引理检查 - Appendix Lemma Suites

isometry_growth_suite:
    在 B(a, r) 上把随机等距校准到 ε = sup ρ(θx, x) < r/2，
    再检查 B(a, sr) 上 sup ρ(θx, x) ≤ 5sε（一般等距）与 ≤ 3sε（纯左平移），s ∈ {1, 2, 5}

embedding_suite:
    f(a) = a 的伸缩族（绕 a 重新定心），在 B(a, sr) 上测 sup ρ(f(x), x) / (r(√ε + ε))，
    要求该比值在 ε 扫描中有界
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg, optimize

from modules.hgroup import (
    HPoint, Ball, Isometry, GroupDim, PreconditionError, InvalidParameterError,
    group_dist, inv, nearest_unitary, random_skew_hermitian, sample_ball,
)
from modules.hcalc import SmoothMap, identity_map, dilation_map, left_translation_map, compose_all
from modules.kerq import sup_deviation

logger = logging.getLogger(__name__)

GROWTH_SCALES = (1.0, 2.0, 5.0)
GROWTH_BOUNDS = {'isometry': 5.0, 'translation': 3.0, 'identity': 5.0}
TARGET_RANGE = (0.05, 0.45)
EMBEDDING_EPSILONS = (1e-2, 1e-3, 1e-4)
EMBEDDING_SCALE = 0.5
BOUNDED_SPREAD = 2.0
FIXED_POINT_TOL = 1e-10
DEFAULT_SAMPLES = 4096

MapFactory = Callable[[float, HPoint], SmoothMap]


@dataclass
class SuiteTable:
    """附录检查结果：pandas 表 + 总体通过标志"""
    name: str
    table: pd.DataFrame
    passed: bool
    details: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'passed': self.passed,
            'rows': self.table.to_dict(orient='records'),
            'details': self.details,
        }


# ---------------------------------------------------------------------------
# 等距增长
# ---------------------------------------------------------------------------

def _isometry_path(n: int, rng: np.random.Generator, kind: str) -> Callable[[float], Isometry]:
    """τ ↦ θ_τ，τ = 0 时为恒等"""
    w = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2 * n)
    t0 = float(rng.standard_normal())
    if kind == 'translation':
        return lambda tau: Isometry.translation_only(HPoint(tau * w, tau * tau * t0))
    K = random_skew_hermitian(n, rng)
    # 旋转为主：平移部分缩小一个量级
    return lambda tau: Isometry(nearest_unitary(linalg.expm(tau * K)), HPoint(0.1 * tau * w, 0.01 * tau * tau * t0))


def _sampled_sup(theta: Isometry, X: np.ndarray) -> float:
    return float(np.max(group_dist(X, theta.apply_coords(X))))


def calibrate_isometry(path: Callable[[float], Isometry], ball: Ball, target: float,
                       samples: int = DEFAULT_SAMPLES, seed: int = 0) -> Isometry:
    """找 τ 使 B 上的采样 sup ρ(θ_τ x, x) 等于 target"""
    X = sample_ball(ball, samples, seed)
    gap = lambda tau: _sampled_sup(path(tau), X) - target
    hi = 0.1
    for _ in range(60):
        if gap(hi) > 0:
            break
        hi *= 2.0
    else:
        raise InvalidParameterError(f"无法把等距校准到 ε = {target}")
    tau = optimize.brentq(gap, 0.0, hi, xtol=1e-12, rtol=1e-10)
    return path(tau)


def isometry_growth_suite(seed: int = 0, trials: int = 100, n: int = 2,
                          scales: Sequence[float] = GROWTH_SCALES,
                          samples: int = DEFAULT_SAMPLES) -> SuiteTable:
    """
    Args:
        seed: 随机种子
        trials: 每类等距的试验次数
        n: 复维数
        scales: 放大倍数 s
        samples: 每次 sup 估计的 Sobol 点数

    Returns:
        SuiteTable，每行对应 (kind, s)
    """
    if trials < 1:
        raise InvalidParameterError(f"trials 必须 ≥ 1: {trials}")
    rng = np.random.default_rng(seed)
    f = identity_map(n)
    worst: Dict[tuple, float] = {}
    failures: Dict[tuple, int] = {}

    # 恒等：ε = 0，任何 s 都平凡成立
    for s in scales:
        worst[('identity', s)] = 0.0
        failures[('identity', s)] = 0

    for kind in ('isometry', 'translation'):
        bound = GROWTH_BOUNDS[kind]
        for trial in range(trials):
            center = HPoint(0.5 * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2 * n),
                            0.25 * rng.standard_normal())
            r = float(rng.uniform(0.5, 2.0))
            ball = Ball(center, r)
            target = float(rng.uniform(*TARGET_RANGE)) * r
            theta = calibrate_isometry(_isometry_path(n, rng, kind), ball, target, samples, seed + trial)
            eps = sup_deviation(f, theta, ball, samples, seed + trial)
            if eps >= r / 2:
                logger.warning(f"{kind} 第 {trial} 次: 校准后 ε = {eps:.4f} ≥ r/2 = {r / 2:.4f}")
            for s in scales:
                grown = sup_deviation(f, theta, ball.scaled(s), samples, seed + trial)
                ratio = grown / (s * eps) if eps > 0 else 0.0
                key = (kind, s)
                worst[key] = max(worst.get(key, 0.0), ratio)
                if ratio > bound:
                    failures[key] = failures.get(key, 0) + 1
                    logger.warning(f"{kind} 第 {trial} 次, s = {s:g}: 增长比 {ratio:.4f} > {bound:g}")
                else:
                    failures.setdefault(key, 0)

    rows = []
    for (kind, s), ratio in worst.items():
        count = 1 if kind == 'identity' else trials
        rows.append({
            'kind': kind,
            's': s,
            'trials': count,
            'failures': failures[(kind, s)],
            'worst_ratio': ratio,
            'bound': GROWTH_BOUNDS[kind],
            'passed': failures[(kind, s)] == 0,
        })
    table = pd.DataFrame(rows, columns=['kind', 's', 'trials', 'failures', 'worst_ratio', 'bound', 'passed'])
    passed = bool(table['passed'].all())
    logger.info(f"等距增长检查: {'通过' if passed else '失败'} ({trials} 次/类, s = {list(scales)})")
    return SuiteTable('isometry_growth', table, passed, {'seed': seed, 'n': n})


# ---------------------------------------------------------------------------
# 嵌入引理
# ---------------------------------------------------------------------------

def recentered_dilation(n: int) -> MapFactory:
    """(ε, a) ↦ π_a ∘ δ_{1+ε} ∘ π_a⁻¹，以 a 为不动点"""
    def factory(eps: float, a: HPoint) -> SmoothMap:
        return compose_all(left_translation_map(a), dilation_map(n, 1.0 + eps), left_translation_map(inv(a)))
    return factory


def dilation_embedding_ratio(eps: float, s: float = EMBEDDING_SCALE) -> float:
    """重新定心伸缩族的解析比值 s·√(2ε+ε²)/(√ε+ε)"""
    if eps == 0:
        return 0.0
    return s * math.sqrt(2.0 * eps + eps * eps) / (math.sqrt(eps) + eps)


def embedding_suite(seed: int = 0, trials: int = 10, n: int = 2, p: Optional[float] = None,
                    family: Optional[MapFactory] = None,
                    epsilons: Sequence[float] = EMBEDDING_EPSILONS, s: float = EMBEDDING_SCALE,
                    samples: int = DEFAULT_SAMPLES) -> SuiteTable:
    """
    测 sup_{B(a, sr)} ρ(f(x), x) / (r(√ε + ε)) 在 ε 扫描中的经验常数

    Raises:
        PreconditionError: p ≤ ν，或 f(a) ≠ a
    """
    nu = GroupDim(n).nu
    p = float(nu + 1) if p is None else float(p)
    if not p > nu:
        raise PreconditionError(f"嵌入引理要求 p > ν = {nu}: p = {p}")
    if trials < 1:
        raise InvalidParameterError(f"trials 必须 ≥ 1: {trials}")
    family = family or recentered_dilation(n)
    rng = np.random.default_rng(seed)
    centers = [HPoint(0.5 * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2 * n),
                      0.25 * rng.standard_normal()) for _ in range(trials)]
    radii = rng.uniform(0.5, 2.0, size=trials)
    theta = Isometry.identity(n)

    rows = []
    for eps in epsilons:
        ratios: List[float] = []
        for k, (a, r) in enumerate(zip(centers, radii)):
            f = family(eps, a)
            moved = float(group_dist(a.coords, f.evaluate(a.coords[None, :]))[0])
            if moved > FIXED_POINT_TOL * max(1.0, float(group_dist(np.zeros(2 * n + 1), a.coords))):
                raise PreconditionError(f"映射不以 a 为不动点: ρ(f(a), a) = {moved:.3e}")
            if eps == 0:
                ratios.append(0.0)
                continue
            sup = sup_deviation(f, theta, Ball(a, s * float(r)), samples, seed + k)
            ratios.append(sup / (float(r) * (math.sqrt(eps) + eps)))
        rows.append({
            'epsilon': eps,
            'ratio_max': max(ratios),
            'ratio_min': min(ratios),
            'analytic': dilation_embedding_ratio(eps, s),
        })
    table = pd.DataFrame(rows, columns=['epsilon', 'ratio_max', 'ratio_min', 'analytic'])

    values = table['ratio_max'].to_numpy()
    finite = bool(np.all(np.isfinite(values)))
    positive = values[values > 0]
    spread = float(positive.max() / positive.min()) if positive.size else 1.0
    passed = finite and spread <= BOUNDED_SPREAD
    constant = float(values.max()) if finite else math.inf
    logger.info(f"嵌入引理检查: 经验常数 C = {constant:.4f}, 跨度 {spread:.3f} "
                f"({'通过' if passed else '失败'})")
    return SuiteTable('embedding', table, passed, {'constant': constant, 'spread': spread, 'p': p, 's': s,
                                                    'seed': seed, 'n': n})
