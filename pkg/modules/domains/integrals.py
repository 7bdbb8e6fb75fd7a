"""
区域积分 - Quasihyperbolic Length and Boundary Integrals

- quasihyperbolic_length: 折线上 ∫ ds/ρ_U 的复合梯形公式
- holder_check:           (∫_γ ds/ρ_U, H ln(H/ρ_U(x)))
- boundary_integral:      ∫_U ρ_U^{−τ} 的蒙特卡罗估计（带标准误差）
- lemma6_tau_scan:        在若干 τ 上检查 ∫_U ρ_U^{−τ} ≤ 2|U|/α^τ
"""

import logging
import math
from dataclasses import dataclass, asdict
from typing import List, Optional, Sequence

import numpy as np
from scipy import integrate

from modules.hgroup import Box, BoxSampler, DomainError, InvalidParameterError

logger = logging.getLogger(__name__)

MC_CHUNK = 2 ** 17


def quasihyperbolic_length(U, path) -> float:
    """
    ∫_γ ds/ρ_U(γ(s))

    Args:
        path: Polyline 或带 polyline 属性的曲线

    Raises:
        DomainError: 路径碰到边界
    """
    pl = getattr(path, 'polyline', path)
    if pl.points.shape[0] < 2:
        return 0.0
    depth = np.asarray(U.boundary_distance(pl.points), dtype=float)
    if np.any(depth <= 0):
        bad = int(np.argmin(depth))
        raise DomainError(f"路径在弧长 s = {pl.arc[bad]:.6f} 处碰到边界，被积函数发散")
    g = 1.0 / depth
    return float(np.sum(0.5 * (g[:-1] + g[1:]) * np.diff(pl.arc)))


def holder_check(U, x):
    """
    Returns:
        (lhs, rhs)：沿 curve_to_base(x) 的积分与 H ln(H/ρ_U(x))
    """
    if U.holder_param is None:
        raise InvalidParameterError("区域没有 Hölder 常数，请先 calibrate_domain")
    H = U.holder_param
    lhs = quasihyperbolic_length(U, U.curve_to_base(x))
    rhs = H * math.log(H / U.depth(x))
    if lhs > rhs:
        logger.warning(f"Hölder 条件在该点不成立: {lhs:.4f} > {rhs:.4f}")
    return lhs, rhs


@dataclass
class BoundaryIntegral:
    """∫_U ρ_U^{−τ} 的估计"""
    tau: float
    value: float
    std_error: float
    samples: int
    volume: float
    bound: Optional[float] = None

    @property
    def within_bound(self) -> Optional[bool]:
        if self.bound is None:
            return None
        return self.value <= self.bound

    def to_dict(self) -> dict:
        out = asdict(self)
        out['within_bound'] = self.within_bound
        return out


def lemma6_bound(U, tau: float, alpha: Optional[float] = None) -> Optional[float]:
    """2|U|/α^τ；没有 α 时返回 None"""
    if alpha is None:
        if U.john_params is None:
            return None
        alpha = U.john_params[0]
    return 2.0 * U.volume / alpha ** tau


def boundary_integral(U, tau: float, mc_samples: int = 1_000_000, seed: int = 0,
                      alpha: Optional[float] = None) -> BoundaryIntegral:
    """
    外接盒中均匀伪随机采样，积分 = |Box|·mean(χ_U ρ_U^{−τ})

    Raises:
        InvalidParameterError: τ ∉ (0, 1)
    """
    if not 0 < tau < 1:
        raise InvalidParameterError(f"τ 必须在 (0, 1) 内: {tau}")
    if mc_samples < 2:
        raise InvalidParameterError(f"样本数必须 ≥ 2: {mc_samples}")
    box: Box = U.bounding_box()
    sampler = BoxSampler(U.n, seed, method='random')
    total, total_sq, done = 0.0, 0.0, 0
    while done < mc_samples:
        m = min(MC_CHUNK, mc_samples - done)
        X = sampler.box_points(box, m)
        depth = np.asarray(U.boundary_distance(X), dtype=float)
        inside = depth > 0
        values = np.zeros(m)
        values[inside] = depth[inside] ** (-tau)
        total += float(np.sum(values))
        total_sq += float(np.sum(values * values))
        done += m
    mean = total / done
    var = max(total_sq / done - mean * mean, 0.0)
    vol = box.volume()
    result = BoundaryIntegral(tau, vol * mean, vol * math.sqrt(var / done), done, U.volume,
                              lemma6_bound(U, tau, alpha))
    logger.debug(f"∫ρ_U^(-{tau}) = {result.value:.6f} ± {result.std_error:.2e}")
    return result


def radial_beta_oracle(n: int, tau: float) -> float:
    """单位球上 (1/|U|)∫ (1 − ρ)^{−τ} = ν∫₀¹ r^{ν−1}(1−r)^{−τ} dr"""
    nu = 2 * n + 2
    value, _ = integrate.quad(lambda r: nu * r ** (nu - 1) * (1.0 - r) ** (-tau), 0.0, 1.0,
                              epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


def lemma6_tau_scan(U, taus: Sequence[float], mc_samples: int = 200_000, seed: int = 0,
                    alpha: Optional[float] = None) -> dict:
    """
    Returns:
        {'results': [...], 'largest_tau': 最大的满足不等式的 τ（没有则为 None）}
    """
    results: List[BoundaryIntegral] = []
    largest = None
    for tau in sorted(taus):
        r = boundary_integral(U, tau, mc_samples, seed, alpha)
        results.append(r)
        if r.within_bound:
            largest = tau
    logger.info(f"τ 扫描完成: {len(results)} 个 τ, 最大满足界的 τ = {largest}")
    return {'results': [r.to_dict() for r in results], 'largest_tau': largest}
