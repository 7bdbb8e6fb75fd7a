"""
球链构造 - Chains of Balls from the Base Point

沿曲线 γ（γ(0) = x，γ(l) = x*）从 x* 出发构造 B_0, ..., B_k：
- r_i = ρ_U(x_i)/4
- 停止规则: 存在见证点 w（ρ(w, x) < ρ_U(x)/8）落在 ½B_i 内，则 x_{i+1} = x，G_i 以 w 为中心
- 推进规则: s_{i+1} = inf{s : γ|(s, s_i] ⊂ B(x_i, r_i/2)}，先在折线顶点上定位再二分到 1e−6·r_i
- 连接球 G_i 以 x_{i+1}（或见证点）为中心，半径 ½min(r_i, r_{i+1})

返回前逐项认证，任何一项不成立都抛出 ChainConstructionError。
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from modules.hgroup import HPoint, Ball, as_coords, group_dist, ChainConstructionError, DomainError
from .curves import Curve, john_constants
from .integrals import quasihyperbolic_length
from .metric_domain import MetricDomain, holder_constant, HOLDER_SAFETY

logger = logging.getLogger(__name__)

BISECTION_TOL = 1e-6
MAX_STEPS = 100_000
REL_TOL = 1e-9
REQUIRED_CHECKS = ('endpoints', 'radius_law', 'radius_ratio', 'connector_radius', 'connector_inclusion',
                   'interior', 'k_bound', 'john_inclusion')


@dataclass
class BallChain:
    """球链 B_0..B_k 与连接球 G_0..G_{k−1}"""
    balls: List[Ball]
    connectors: List[Ball]
    k: int
    alpha: float = math.nan
    beta: float = math.nan
    curve_length: float = 0.0
    john_bound: float = math.inf
    holder_bound: Optional[float] = None
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return all(self.checks.get(name, False) for name in REQUIRED_CHECKS)

    @property
    def centers(self) -> np.ndarray:
        return np.stack([b.center.coords for b in self.balls])

    @property
    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls])

    def to_dict(self) -> dict:
        return {
            'balls': [b.to_dict() for b in self.balls],
            'connectors': [g.to_dict() for g in self.connectors],
            'k': self.k,
            'certified': self.certified,
            'checks': dict(self.checks),
            'alpha': self.alpha,
            'beta': self.beta,
            'curve_length': self.curve_length,
            'john_bound': self.john_bound,
            'holder_bound': self.holder_bound,
        }

    def export_json(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)
        return path


def effective_john_params(U: MetricDomain, curve: Curve):
    """曲线自身常数与区域常数取更保守者：α = min，β = max"""
    a_g, b_g = john_constants(curve, U.boundary_distance)
    if U.john_params is not None:
        alpha, beta = min(U.john_params[0], a_g), max(U.john_params[1], b_g)
    else:
        alpha, beta = a_g, b_g
    if not math.isfinite(alpha):
        alpha = U.depth(U.base_point)
    return alpha, max(beta, alpha)


def john_k_bound(alpha: float, beta: float, r_k: float) -> float:
    """9(β/α) ln(8β/r_k)"""
    return 9.0 * beta / alpha * math.log(8.0 * beta / r_k)


def holder_k_bound(H: float, r_k: float) -> float:
    """9H ln(H/(4r_k))"""
    return 9.0 * H * math.log(H / (4.0 * r_k))


class ChainBuilder:
    """沿一条曲线构造并认证球链"""

    def __init__(self, U: MetricDomain, bisection_tol: float = BISECTION_TOL):
        self.U = U
        self.bisection_tol = bisection_tol
        self.logger = logging.getLogger(__name__)

    def build(self, x, curve: Optional[Curve] = None) -> BallChain:
        U = self.U
        x = as_coords(x)
        depth_x = U.depth(x)
        if depth_x <= 0:
            raise DomainError("x 不在区域内")
        base = U.base_point.coords
        r_base = U.depth(base) / 4.0

        if float(group_dist(x, base)) == 0.0:
            chain = BallChain([Ball(U.base_point, r_base)], [], 0, alpha=math.nan, beta=math.nan)
            chain.checks = {name: True for name in REQUIRED_CHECKS}
            return chain

        curve = curve if curve is not None else U.curve_to_base(x)
        pl = curve.polyline
        P, S = pl.points, pl.arc
        if float(group_dist(P[-1], base)) > 1e-9 or float(group_dist(P[0], x)) > 1e-9:
            raise DomainError("曲线端点与 (x, x*) 不一致")
        if np.any(U.boundary_distance(P) <= 0):
            raise ChainConstructionError("曲线离开区域（区域配置错误）")

        W = P[group_dist(x, P) < depth_x / 8.0]
        spacing = pl.max_spacing

        centers = [base]
        radii = [r_base]
        arcs = [float(S[-1])]
        connectors: List[Ball] = []
        for _ in range(MAX_STEPS):
            c, r, s_i = centers[-1], radii[-1], arcs[-1]
            if spacing > r / 8.0:
                raise ChainConstructionError(
                    f"x 离边界太近：折线间距 {spacing:.3e} 超过 r_i/8 = {r / 8.0:.3e}，"
                    f"需要至少 {int(math.ceil(pl.length / (r / 8.0)))} 个顶点")
            dw = group_dist(c, W)
            j = int(np.argmin(dw))
            if dw[j] < r / 2.0:
                r_k = depth_x / 4.0
                connectors.append(Ball(HPoint.from_coords(W[j]), 0.5 * min(r, r_k)))
                centers.append(x)
                radii.append(r_k)
                arcs.append(0.0)
                break
            x_next, s_next = self._advance(curve, c, r, s_i)
            r_next = U.depth(x_next) / 4.0
            if r_next <= 0:
                raise ChainConstructionError("曲线离开区域（区域配置错误）")
            connectors.append(Ball(HPoint.from_coords(x_next), 0.5 * min(r, r_next)))
            centers.append(x_next)
            radii.append(r_next)
            arcs.append(s_next)
        else:
            raise ChainConstructionError(f"超过 {MAX_STEPS} 步仍未到达 x")

        balls = [Ball(HPoint.from_coords(c), r) for c, r in zip(centers, radii)]
        alpha, beta = effective_john_params(U, curve)
        k = len(balls) - 1
        chain = BallChain(balls, connectors, k, alpha, beta, pl.length, john_k_bound(alpha, beta, radii[-1]))
        if U.holder_param is not None:
            q = quasihyperbolic_length(U, pl)
            H = max(U.holder_param, HOLDER_SAFETY * holder_constant(q, depth_x))
            chain.holder_bound = holder_k_bound(H, radii[-1])
        chain.checks = certify_chain(U, chain, x)
        if not chain.certified:
            failed = [name for name in REQUIRED_CHECKS if not chain.checks.get(name, False)]
            raise ChainConstructionError(f"球链认证失败: {', '.join(failed)}")
        if chain.checks.get('holder_k_bound') is False:
            self.logger.warning(f"Hölder 型 k 界不成立: k = {k}, 界 = {chain.holder_bound:.3f}")
        self.logger.debug(f"球链构造完成: k = {k}, 界 {chain.john_bound:.2f}")
        return chain

    def _advance(self, curve: Curve, c: np.ndarray, r: float, s_i: float):
        """从 s_i 向 x 方向找曲线第一次离开 B(c, r/2) 的位置"""
        pl = curve.polyline
        S = pl.arc
        i_hi = int(np.searchsorted(S, s_i, side='left')) - 1
        if i_hi < 0:
            raise ChainConstructionError("曲线参数已到达起点但停止规则未触发")
        d = group_dist(c, pl.points[:i_hi + 1])
        outside = np.nonzero(d >= r / 2.0)[0]
        if outside.size == 0:
            raise ChainConstructionError("剩余曲线全部位于 ½B_i 内但停止规则未触发")
        j = int(outside[-1])
        lo = float(S[j])
        hi = float(S[j + 1]) if j + 1 <= i_hi else s_i
        hi = min(hi, s_i)
        tol = self.bisection_tol * r
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if float(group_dist(c, curve.point_at(mid))) >= r / 2.0:
                lo = mid
            else:
                hi = mid
        return curve.point_at(hi), hi


def certify_chain(U: MetricDomain, chain: BallChain, x) -> Dict[str, bool]:
    """逐项检查链的全部性质"""
    x = as_coords(x)
    C = chain.centers
    r = chain.radii
    k = chain.k
    checks: Dict[str, bool] = {}
    checks['endpoints'] = (float(group_dist(C[0], U.base_point.coords)) <= 1e-12
                           and float(group_dist(C[-1], x)) <= 1e-12)
    depth = np.atleast_1d(U.boundary_distance(C))
    checks['radius_law'] = bool(np.allclose(4.0 * r, depth, rtol=1e-12, atol=0.0))
    checks['interior'] = bool(np.all(4.0 * r <= depth * (1 + REL_TOL)) and np.all(depth > 0))
    if k == 0:
        checks.update(radius_ratio=True, connector_radius=True, connector_inclusion=True,
                      k_bound=True, john_inclusion=True)
        return checks

    ratio = r[:-1] / r[1:]
    checks['radius_ratio'] = bool(np.all(ratio >= 7.0 / 9.0 * (1 - REL_TOL)) and np.all(ratio <= 9.0 / 7.0 * (1 + REL_TOL)))
    G = np.stack([g.center.coords for g in chain.connectors])
    rg = np.array([g.radius for g in chain.connectors])
    checks['connector_radius'] = bool(len(chain.connectors) == k
                                      and np.allclose(rg, 0.5 * np.minimum(r[:-1], r[1:]), rtol=1e-15, atol=0.0))
    in_left = group_dist(C[:-1], G) + rg <= r[:-1] * (1 + REL_TOL)
    in_right = group_dist(C[1:], G) + rg <= r[1:] * (1 + REL_TOL)
    checks['connector_inclusion'] = bool(np.all(in_left) and np.all(in_right))
    checks['k_bound'] = k < chain.john_bound

    ratio_ba = chain.beta / chain.alpha
    to_last = group_dist(C, C[-1]) + r[-1]
    to_last_g = group_dist(G, C[-1]) + r[-1]
    checks['john_inclusion'] = bool(np.all(to_last <= (1 + 5 * ratio_ba) * r * (1 + REL_TOL))
                                    and np.all(to_last_g <= (3 + 10 * ratio_ba) * rg * (1 + REL_TOL)))
    if chain.holder_bound is not None:
        checks['holder_k_bound'] = k < chain.holder_bound
    return checks


def build_chain(U: MetricDomain, x, curve: Optional[Curve] = None) -> BallChain:
    return ChainBuilder(U).build(x, curve)
