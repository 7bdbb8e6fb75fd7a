"""
偏差度量 - Deviation Measures Between a Map and an Isometry

- sup_deviation:        sup_x ρ(f(x), θ(x))，Sobol 样本 + Nelder–Mead 局部加细
- sobolev_deviation:    ((1/|B|)∫_B |D_hf − D_hθ|^p)^{1/p}，Gauss–Legendre 求积
- exp_integrability:    (1/|U|)∫_U exp(w·N|D_hf − D_hθ|/ε)，对数空间计算
- mean_oscillation / john_nirenberg_functional:  D_hf 的 BMO 型量
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from modules.hgroup import Ball, Box, Isometry, group_dist, sample_region, InvalidParameterError
from modules.hcalc import SmoothMap, horizontal_matrices
from .quadrature import ball_rule

logger = logging.getLogger(__name__)

DEFAULT_SUP_SAMPLES = 100_000
DEFAULT_SOBOLEV_ORDER = 10
POLISH_STARTS = 4


def region_points(region, count: int, seed: int = 0) -> np.ndarray:
    """Ball/Box 用 Sobol 采样；其他区域对象需提供 sample_points(count, seed)"""
    if isinstance(region, (Ball, Box)):
        return sample_region(region, count, seed)
    return region.sample_points(count, seed)


def _theta_coords(theta: Union[Isometry, SmoothMap], X: np.ndarray) -> np.ndarray:
    if isinstance(theta, Isometry):
        return theta.apply_coords(X)
    return theta.evaluate(X)


def pointwise_distance(f: SmoothMap, theta, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return group_dist(_theta_coords(theta, X), f.evaluate(X))


def sup_deviation(f: SmoothMap, theta, region, samples: int = DEFAULT_SUP_SAMPLES, seed: int = 0,
                  polish: bool = True) -> float:
    """区域上 ρ(f(x), θ(x)) 的上确界估计"""
    if samples < 1:
        raise InvalidParameterError(f"样本数必须为正: {samples}")
    X = region_points(region, samples, seed)
    values = pointwise_distance(f, theta, X)
    best = float(np.max(values))
    if not polish or best == 0.0:
        return best

    def negative(x):
        x = x[None, :]
        if not bool(region.contains(x)[0]):
            return 0.0
        return -float(pointwise_distance(f, theta, x)[0])

    for k in np.argsort(-values)[:POLISH_STARTS]:
        res = optimize.minimize(negative, X[k], method='Nelder-Mead',
                                options={'xatol': 1e-10, 'fatol': 1e-14, 'maxiter': 400 * X.shape[1]})
        best = max(best, -float(res.fun))
    return best


def _dh_gap(f: SmoothMap, theta, X: np.ndarray) -> np.ndarray:
    """|D_hf(x) − D_hθ(x)|（算子范数）"""
    Mf, _ = horizontal_matrices(f, X)
    if isinstance(theta, Isometry):
        Mt = theta.dh()
    else:
        Mt, _ = horizontal_matrices(theta, X)
    return np.linalg.norm(Mf - Mt, ord=2, axis=(-2, -1))


def sobolev_deviation(f: SmoothMap, theta, B: Ball, p: float = 2.0,
                      quad_order: int = DEFAULT_SOBOLEV_ORDER) -> float:
    """((1/|B|)∫_B |D_hf − D_hθ|^p dx)^{1/p}"""
    if p < 1:
        raise InvalidParameterError(f"指数 p 必须 ≥ 1: {p}")
    nodes, w = ball_rule(B, quad_order)
    gap = _dh_gap(f, theta, nodes)
    return float(np.dot(w, gap ** p) ** (1.0 / p))


def _log_mean_exp(values: np.ndarray) -> float:
    return float(logsumexp(values) - math.log(values.size))


def log_exp_integrability(f: SmoothMap, theta, U, N: float, eps: float, samples: int = 20_000,
                          seed: int = 0, weight: float = 1.0) -> float:
    if not eps > 0:
        raise InvalidParameterError(f"ε 必须为正: {eps}")
    if not N > 0:
        raise InvalidParameterError(f"N 必须为正: {N}")
    X = region_points(U, samples, seed)
    return _log_mean_exp(weight * N * _dh_gap(f, theta, X) / eps)


def exp_integrability(f: SmoothMap, theta, U, N: float, eps: float, samples: int = 20_000,
                      seed: int = 0, weight: float = 1.0) -> float:
    """
    (1/|U|)∫_U exp(weight·N|D_hf − D_hθ|/ε) dx

    weight 为 (β/α)^{2n+3} 时即带权形式；溢出时返回 inf。
    """
    log_value = log_exp_integrability(f, theta, U, N, eps, samples, seed, weight)
    if log_value > 700:
        logger.warning(f"指数可积泛函溢出: log = {log_value:.3e}")
        return math.inf
    return math.exp(log_value)


def largest_exponent_below(f: SmoothMap, theta, U, eps: float, level: float = 16.0,
                           samples: int = 20_000, seed: int = 0, weight: float = 1.0) -> float:
    """泛函 ≤ level 的最大 N；被积项恒为零时返回 inf"""
    if level <= 1:
        raise InvalidParameterError(f"level 必须 > 1: {level}")
    X = region_points(U, samples, seed)
    g = weight * _dh_gap(f, theta, X) / eps
    if float(np.max(g)) == 0.0:
        return math.inf
    target = math.log(level)
    lo = target / float(np.max(g))
    mean_g = float(np.mean(g))
    hi = target / mean_g if mean_g > 0 else 2.0 * lo
    while _log_mean_exp(hi * g) < target:
        hi *= 2.0
    if _log_mean_exp(lo * g) >= target:
        return lo
    return float(optimize.brentq(lambda N: _log_mean_exp(N * g) - target, lo, hi, xtol=1e-12, rtol=1e-12))


def _horizontal_field(f: SmoothMap, X: np.ndarray) -> np.ndarray:
    M, _ = horizontal_matrices(f, X)
    return M


def mean_oscillation(f: SmoothMap, ball: Ball, samples: int = 20_000, seed: int = 0) -> float:
    """(1/|B|)∫_B |D_hf − (D_hf)_B|"""
    F = _horizontal_field(f, sample_region(ball, samples, seed))
    return float(np.mean(np.linalg.norm(F - F.mean(axis=0), ord=2, axis=(-2, -1))))


def john_nirenberg_functional(f: SmoothMap, ball: Ball, sigma: Optional[float] = None,
                              c1: float = 1.0 / 12.0, samples: int = 20_000, seed: int = 0) -> float:
    """
    (1/|B'|)∫_{B'} exp(c₁σ⁻¹|F − F_{B'}|)，B' = ½B，F = D_hf

    sigma 缺省时取 B 上的平均振荡；结果应不超过 16。
    """
    if sigma is None:
        sigma = mean_oscillation(f, ball, samples, seed)
    if sigma < 1e-12:
        return 1.0
    F = _horizontal_field(f, sample_region(ball.scaled(0.5), samples, seed))
    gap = np.linalg.norm(F - F.mean(axis=0), ord=2, axis=(-2, -1))
    return math.exp(_log_mean_exp(c1 * gap / sigma))
