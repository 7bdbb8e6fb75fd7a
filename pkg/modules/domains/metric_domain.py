"""
度量区域 - Metric Domains in the Korányi Metric

包含：
- MetricDomain: contains / boundary_distance (ρ_U) / base_point (x*) / curve_to_base / volume
- BallDomain:     ρ_U = r − ρ(c, x)
- BoxDomain:      到 2n+2 个支撑超平面的精确 ρ 距离
- DumbbellDomain: 两个球瓣 + 沿水平脊线的颈部小球，ρ_U = max_m (r_m − ρ(c_m, x))⁺
- SampledDomain:  边界点集上取最小值的兜底实现
- calibrate_domain: 在固定样本上估计 John 常数 (α, β) 与 Hölder 常数 H

区域对象构造后不可变；calibrate_domain 返回带参数的新对象。
"""

import copy
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from modules.hgroup import (
    HPoint, Ball, Box, BoxSampler, as_coords, group_mul, group_inv, group_dist,
    ball_volume, box_volume, DomainError, InvalidParameterError,
)
from .curves import (
    Curve, spiral_curve, box_curve, horizontal_path, concatenate, john_constants, check_inside,
)
from .integrals import quasihyperbolic_length

logger = logging.getLogger(__name__)

CALIBRATION_SAMPLES = 64
HOLDER_SAFETY = 1.25
VOLUME_SAMPLES = 2 ** 18
DISTANCE_CHUNK = 4096


class MetricDomain:
    """ℍⁿ 中有界区域的抽象接口"""

    kind = 'abstract'

    def __init__(self, n: int, base_point: HPoint, volume: float = math.nan,
                 john_params: Optional[Tuple[float, float]] = None, holder_param: Optional[float] = None):
        self.n = n
        self.base_point = base_point
        self.volume = volume
        self.john_params = john_params
        self.holder_param = holder_param
        self.sampled_john_params: Optional[Tuple[float, float]] = None
        self.logger = logging.getLogger(__name__)
        if john_params is not None and john_params[0] > john_params[1]:
            raise DomainError(f"John 常数要求 α ≤ β: {john_params}")

    def analytic_john_params(self) -> Optional[Tuple[float, float]]:
        """解析已知的 John 常数；没有时为 None，标定结果即作为区域参数"""
        return None

    # 子类实现 ------------------------------------------------------------

    def contains(self, X) -> np.ndarray:
        raise NotImplementedError

    def boundary_distance(self, X) -> np.ndarray:
        raise NotImplementedError

    def curve_to_base(self, x) -> Curve:
        raise NotImplementedError

    def bounding_box(self) -> Box:
        raise NotImplementedError

    # 通用部分 ------------------------------------------------------------

    def depth(self, x) -> float:
        """单点的 ρ_U(x)"""
        return float(np.atleast_1d(self.boundary_distance(np.atleast_2d(as_coords(x))))[0])

    def sample_points(self, count: int, seed: int = 0, method: str = 'sobol') -> np.ndarray:
        """区域内 count 个点：外接盒采样后过滤"""
        if count < 1:
            raise InvalidParameterError(f"样本数必须为正: {count}")
        box = self.bounding_box()
        sampler = BoxSampler(self.n, seed, method)
        chunks, total = [], 0
        for _ in range(64):
            X = sampler.box_points(box, max(2 * (count - total), 256))
            X = X[self.contains(X)]
            chunks.append(X)
            total += X.shape[0]
            if total >= count:
                return np.concatenate(chunks, axis=0)[:count]
        raise DomainError(f"{self.kind}: 外接盒采样几乎全部落在区域外，区域可能为空")

    def with_params(self, john_params: Optional[Tuple[float, float]] = None,
                    holder_param: Optional[float] = None) -> 'MetricDomain':
        clone = copy.copy(self)
        if john_params is not None:
            if john_params[0] > john_params[1]:
                raise DomainError(f"John 常数要求 α ≤ β: {john_params}")
            clone.john_params = (float(john_params[0]), float(john_params[1]))
        if holder_param is not None:
            clone.holder_param = float(holder_param)
        return clone

    def _monte_carlo_volume(self, samples: int = VOLUME_SAMPLES, seed: int = 0) -> float:
        box = self.bounding_box()
        X = BoxSampler(self.n, seed).box_points(box, samples)
        return box.volume() * float(np.mean(self.contains(X)))

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'n': self.n,
            'base_point': [float(v) for v in self.base_point.coords],
            'volume': self.volume,
            'john_params': list(self.john_params) if self.john_params else None,
            'sampled_john_params': list(self.sampled_john_params) if self.sampled_john_params else None,
            'holder_param': self.holder_param,
        }


class BallDomain(MetricDomain):
    """ρ 球区域，x* = c

    John 常数取解析值 (r, r)，由到球心的径向路径实现；标定只补充 H 与采样估计。
    """

    kind = 'ball'

    def __init__(self, center: HPoint, radius: float):
        if not radius > 0:
            raise DomainError(f"球半径必须为正: {radius}")
        super().__init__(center.n, center, ball_volume(radius, center.n), john_params=(float(radius), float(radius)))
        self.ball = Ball(center, radius)

    def analytic_john_params(self) -> Optional[Tuple[float, float]]:
        return (float(self.ball.radius), float(self.ball.radius))

    def contains(self, X) -> np.ndarray:
        return self.ball.contains(X)

    def boundary_distance(self, X) -> np.ndarray:
        d = self.ball.radius - group_dist(self.ball.center.coords, as_coords(X))
        return np.maximum(d, 0.0)

    def curve_to_base(self, x) -> Curve:
        d = self.depth(x)
        if d <= 0:
            raise DomainError("点不在区域内")
        return spiral_curve(self.ball.center.coords, as_coords(x), margin=0.5 * d)

    def bounding_box(self) -> Box:
        return Box(self.ball.center, self.ball.radius)


def box_boundary_distance(box: Box, X) -> np.ndarray:
    """
    盒内点到补集的精确 ρ 距离

    水平面: r − |y_i|
    竖直面: D = r² ∓ y_t，a 为 a³ + 2|y_z|²a − |y_z|D = 0 的正根，
            距离 (a⁴ + (D − 2|y_z|a)²)^{1/4}
    """
    Y = box.local_coords(X)
    r = box.radius
    horizontal = r - np.max(np.abs(Y[..., :-1]), axis=-1)
    zn = np.sqrt(np.sum(Y[..., :-1] ** 2, axis=-1))
    out = horizontal
    for D in (r * r - Y[..., -1], r * r + Y[..., -1]):
        Dp = np.maximum(D, 0.0)
        p = 2.0 * zn * zn
        q = -zn * Dp
        disc = np.sqrt(q * q / 4.0 + p ** 3 / 27.0)
        a = np.cbrt(-q / 2.0 + disc) + np.cbrt(-q / 2.0 - disc)
        slope = 3.0 * a * a + p
        a = a - np.where(slope > 0, (a ** 3 + p * a + q) / np.where(slope > 0, slope, 1.0), 0.0)
        a = np.clip(a, 0.0, None)
        vertical = (a ** 4 + (Dp - 2.0 * zn * a) ** 2) ** 0.25
        out = np.minimum(out, vertical)
    return np.where(box.contains(X), np.maximum(out, 0.0), 0.0)


class BoxDomain(MetricDomain):
    """盒区域，x* = 盒中心"""

    kind = 'box'

    def __init__(self, center: HPoint, radius: float):
        if not radius > 0:
            raise DomainError(f"盒半径必须为正: {radius}")
        super().__init__(center.n, center, box_volume(radius, center.n))
        self.box = Box(center, radius)

    def contains(self, X) -> np.ndarray:
        return self.box.contains(X)

    def boundary_distance(self, X) -> np.ndarray:
        return box_boundary_distance(self.box, X)

    def curve_to_base(self, x) -> Curve:
        if self.depth(x) <= 0:
            raise DomainError("点不在区域内")
        return box_curve(self.box.center.coords, as_coords(x))

    def bounding_box(self) -> Box:
        return self.box


class DumbbellDomain(MetricDomain):
    """
    哑铃：两个球瓣由一串颈部小球连接

    颈部小球的中心沿 c₂ → c₁ 的水平脊线按弧长等距放置，间距 ≤ neck/2，
    脊线上每点到某个中心的距离 ≤ neck/4。x* = c₁。
    """

    kind = 'dumbbell'

    def __init__(self, c1: HPoint, c2: HPoint, r1: float, r2: float, neck: float):
        for name, value in (('r1', r1), ('r2', r2), ('neck', neck)):
            if not value > 0:
                raise DomainError(f"{name} 必须为正: {value}")
        if c1.n != c2.n:
            raise DomainError(f"两个中心维数不一致: n={c1.n} vs n={c2.n}")
        super().__init__(c1.n, c1)
        self.spine = horizontal_path(c2.coords, c1.coords)
        L = self.spine.length
        count = max(int(math.ceil(L / (0.5 * neck))), 1)
        arcs = [j * L / count for j in range(1, count)]
        self.members: List[Ball] = [Ball(c2, r2)]
        self.member_params: List[float] = [0.0]
        for s in arcs:
            tau = self.spine.param_at_arc(s)
            self.members.append(Ball(HPoint.from_coords(self.spine.at_param(tau)), neck))
            self.member_params.append(tau)
        self.members.append(Ball(c1, r1))
        self.member_params.append(float(len(self.spine.segments)))
        self._centers = np.stack([b.center.coords for b in self.members])
        self._radii = np.array([b.radius for b in self.members])
        self.neck = neck
        self.volume = self._monte_carlo_volume()
        self.logger.info(f"哑铃区域: 脊线长度 {L:.4f}, {len(self.members) - 2} 个颈部小球, 体积 ≈ {self.volume:.4f}")

    def _member_depths(self, X) -> np.ndarray:
        X = np.atleast_2d(as_coords(X))
        out = np.empty((X.shape[0], len(self.members)))
        for start in range(0, X.shape[0], DISTANCE_CHUNK):
            block = X[start:start + DISTANCE_CHUNK]
            D = group_dist(self._centers[None, :, :], block[:, None, :])
            out[start:start + DISTANCE_CHUNK] = self._radii[None, :] - D
        return out

    def contains(self, X) -> np.ndarray:
        X = as_coords(X)
        single = X.ndim == 1
        out = np.any(self._member_depths(X) > 0, axis=-1)
        return out[0] if single else out

    def boundary_distance(self, X) -> np.ndarray:
        X = as_coords(X)
        single = X.ndim == 1
        out = np.maximum(np.max(self._member_depths(X), axis=-1), 0.0)
        return out[0] if single else out

    def curve_to_base(self, x) -> Curve:
        x = as_coords(x)
        depths = self._member_depths(x)[0]
        m = int(np.argmax(depths))
        if depths[m] <= 0:
            raise DomainError("点不在区域内")
        ball = self.members[m]
        head = spiral_curve(ball.center.coords, x, margin=0.5 * depths[m])
        parts = list(head.segments)
        if m < len(self.members) - 1:
            parts.extend(self.spine.tail(self.member_params[m]))
        curve = concatenate(parts, self.n, label='dumbbell')
        check_inside(curve, self.contains)
        return curve

    def bounding_box(self) -> Box:
        c1 = self.base_point.coords
        R = 0.0
        for c, r in zip(self._centers, self._radii):
            d = group_mul(group_inv(c1), c)
            dz = float(np.linalg.norm(d[:-1]))
            R = max(R, float(np.max(np.abs(d[:-1]))) + r, math.sqrt(abs(d[-1]) + r * r + 2.0 * dz * r))
        return Box(self.base_point, 1.0001 * R)

    def to_dict(self) -> dict:
        out = super().to_dict()
        out['members'] = [b.to_dict() for b in self.members]
        return out


class SampledDomain(MetricDomain):
    """
    任意区域的兜底实现：ρ_U(x) = min_b ρ(x, b)，b 取边界样本点

    边界样本越密，ρ_U 越接近真实距离；它总是某个集合的距离函数，因此 1-Lipschitz。
    """

    kind = 'sampled'

    def __init__(self, contains: Callable[[np.ndarray], np.ndarray], boundary_points, base_point: HPoint,
                 bounding_box: Box, volume: Optional[float] = None):
        super().__init__(base_point.n, base_point)
        self._contains = contains
        self.boundary_points = np.atleast_2d(np.asarray(boundary_points, dtype=float))
        if self.boundary_points.shape[-1] != 2 * self.n + 1:
            raise DomainError(f"边界点维数不一致: {self.boundary_points.shape[-1]}")
        self._box = bounding_box
        if not bool(np.atleast_1d(contains(base_point.coords[None, :]))[0]):
            raise DomainError("基点不在区域内")
        self.volume = self._monte_carlo_volume() if volume is None else volume
        if self.volume <= 0:
            raise DomainError("区域为空")

    def contains(self, X) -> np.ndarray:
        X = as_coords(X)
        single = X.ndim == 1
        out = np.asarray(self._contains(np.atleast_2d(X)), dtype=bool)
        return out[0] if single else out

    def boundary_distance(self, X) -> np.ndarray:
        X = as_coords(X)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], DISTANCE_CHUNK):
            block = X[start:start + DISTANCE_CHUNK]
            D = group_dist(block[:, None, :], self.boundary_points[None, :, :])
            out[start:start + DISTANCE_CHUNK] = np.min(D, axis=1)
        out = np.where(self.contains(X), out, 0.0)
        return out[0] if single else out

    def curve_to_base(self, x) -> Curve:
        d = self.depth(x)
        if d <= 0:
            raise DomainError("点不在区域内")
        curve = spiral_curve(self.base_point.coords, as_coords(x), margin=0.5 * d)
        check_inside(curve, self.contains)
        return curve

    def bounding_box(self) -> Box:
        return self._box


# ---------------------------------------------------------------------------
# 构造函数
# ---------------------------------------------------------------------------

def _point(c) -> HPoint:
    return c if isinstance(c, HPoint) else HPoint.from_coords(c)


def make_ball_domain(c, r: float, calibrate: bool = True, seed: int = 0) -> MetricDomain:
    U = BallDomain(_point(c), r)
    return calibrate_domain(U, seed=seed) if calibrate else U


def make_box_domain(c, r: float, calibrate: bool = True, seed: int = 0) -> MetricDomain:
    U = BoxDomain(_point(c), r)
    return calibrate_domain(U, seed=seed) if calibrate else U


def make_dumbbell(c1, c2, r1: float, r2: float, neck: float, calibrate: bool = True,
                  seed: int = 0) -> MetricDomain:
    U = DumbbellDomain(_point(c1), _point(c2), r1, r2, neck)
    return calibrate_domain(U, seed=seed) if calibrate else U


def make_sampled_domain(contains: Callable[[np.ndarray], np.ndarray], boundary_points, base_point,
                        bounding_box: Box, calibrate: bool = False, seed: int = 0) -> MetricDomain:
    U = SampledDomain(contains, boundary_points, _point(base_point), bounding_box)
    return calibrate_domain(U, seed=seed) if calibrate else U


# ---------------------------------------------------------------------------
# 标定
# ---------------------------------------------------------------------------

def holder_constant(q: float, depth: float) -> float:
    """H ln(H/d) = q 在 H ≥ d 上的根"""
    if not depth > 0:
        raise DomainError(f"边界距离必须为正: {depth}")
    if q <= 0:
        return depth
    f = lambda H: H * math.log(H / depth) - q
    hi = max(2.0 * depth, q)
    while f(hi) < 0:
        hi *= 2.0
    return float(optimize.brentq(f, depth, hi, xtol=1e-14, rtol=1e-12))


def calibrate_domain(U: MetricDomain, samples: int = CALIBRATION_SAMPLES, seed: int = 0,
                     extra_points: Optional[Sequence] = None) -> MetricDomain:
    """
    在固定样本上估计 (α, β) 与 H

    α = min α_γ，β = max(β_γ, α)，H = 1.25·max H_x，其中 H_x 满足 H_x ln(H_x/ρ_U(x)) = q(x)。
    采样得到的 (α, β) 总是记在 sampled_john_params 上；区域有解析 John 常数时（球）
    john_params 保持解析值，否则取采样值。
    """
    X = U.sample_points(samples, seed)
    if extra_points is not None:
        X = np.concatenate([X, np.atleast_2d(np.asarray(extra_points, dtype=float))], axis=0)
    alpha, beta, H = math.inf, 0.0, 0.0
    for x in X:
        curve = U.curve_to_base(x)
        a, b = john_constants(curve, U.boundary_distance)
        alpha, beta = min(alpha, a), max(beta, b)
        q = quasihyperbolic_length(U, curve.polyline)
        H = max(H, holder_constant(q, U.depth(x)))
    base_depth = U.depth(U.base_point)
    if not math.isfinite(alpha):
        alpha = base_depth
    beta = max(beta, alpha)
    H = HOLDER_SAFETY * max(H, base_depth)
    logger.info(f"{U.kind} 区域标定完成 ({X.shape[0]} 点): α = {alpha:.4f}, β = {beta:.4f}, H = {H:.4f}")
    analytic = U.analytic_john_params()
    calibrated = U.with_params(analytic if analytic is not None else (alpha, beta), H)
    calibrated.sampled_john_params = (float(alpha), float(beta))
    return calibrated
