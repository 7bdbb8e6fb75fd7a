"""
到基点的水平曲线 - Horizontal Curves to the Base Point

曲线 γ: [0, l] → U，γ(0) = x，γ(l) = x*，按 ρ 弧长参数化。
曲线由若干段精确求值的参数曲线组成，同时离散成折线：
- 折线顶点上累计 ρ 弦长给出弧长
- 折线之间的位置用精确曲线求值（二分时使用）

曲线族（局部坐标 y = c⁻¹x，最后左平移回去）：
- 对数螺线  σ ↦ δ_σ(e^{iψ(σ)} z, t)，ψ = −(t/|z|²) ln σ，等速，长度 ρ²/|z|
- 近轴前缀  x·(s v, 0)，v = i·sign(t)·ẑ，把 |z|² 抬到 η|t| 以上
- 径向段    ((1−s) z, t)，保持 t
- 水平圆环  在 z₁ 平面绕一圈，包围面积抵消 t
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from modules.hgroup import HPoint, as_coords, group_mul, group_inv, group_dist, group_norm, DomainError

logger = logging.getLogger(__name__)

SegmentEvaluator = Callable[[np.ndarray], np.ndarray]

DEFAULT_VERTICES = 1500
NEAR_AXIS_ETA = 0.25


@dataclass(frozen=True, eq=False)
class Polyline:
    """
    折线

    Attributes:
        points: 顶点坐标 (N, 2n+1)
        arc: 累计 ρ 弦长，arc[0] = 0
        params: 顶点对应的全局曲线参数
    """
    points: np.ndarray
    arc: np.ndarray
    params: np.ndarray

    @property
    def length(self) -> float:
        return float(self.arc[-1])

    @property
    def vertices(self) -> List[HPoint]:
        return [HPoint.from_coords(p) for p in self.points]

    @property
    def max_spacing(self) -> float:
        return float(np.max(np.diff(self.arc))) if self.arc.size > 1 else 0.0

    @classmethod
    def from_points(cls, points) -> 'Polyline':
        P = np.atleast_2d(np.asarray(points, dtype=float))
        keep = np.ones(P.shape[0], dtype=bool)
        if P.shape[0] > 1:
            keep[1:] = group_dist(P[:-1], P[1:]) > 0
        P = P[keep]
        steps = group_dist(P[:-1], P[1:]) if P.shape[0] > 1 else np.zeros(0)
        arc = np.concatenate([[0.0], np.cumsum(steps)])
        return cls(P, arc, np.linspace(0.0, 1.0, P.shape[0]) if P.shape[0] > 1 else np.zeros(1))


class Curve:
    """由精确参数段组成的曲线，自带折线离散"""

    def __init__(self, segments: Sequence[SegmentEvaluator], n: int, vertices_per_segment: int = DEFAULT_VERTICES,
                 label: str = 'curve'):
        self.segments = list(segments)
        self.n = n
        self.label = label
        self.logger = logging.getLogger(__name__)
        self.polyline = self._discretize(vertices_per_segment)

    def _discretize(self, m: int) -> Polyline:
        if not self.segments:
            raise DomainError("曲线至少需要一段")
        pts, params = [], []
        for k, seg in enumerate(self.segments):
            u = np.linspace(0.0, 1.0, m + 1)
            if k > 0:
                u = u[1:]
            pts.append(np.atleast_2d(seg(u)))
            params.append(k + u)
        P = np.concatenate(pts, axis=0)
        tau = np.concatenate(params)
        keep = np.ones(P.shape[0], dtype=bool)
        keep[1:] = group_dist(P[:-1], P[1:]) > 0
        P, tau = P[keep], tau[keep]
        steps = group_dist(P[:-1], P[1:]) if P.shape[0] > 1 else np.zeros(0)
        return Polyline(P, np.concatenate([[0.0], np.cumsum(steps)]), tau)

    @property
    def length(self) -> float:
        return self.polyline.length

    @property
    def start(self) -> np.ndarray:
        return self.polyline.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.polyline.points[-1]

    def at_param(self, tau: float) -> np.ndarray:
        k = min(int(math.floor(tau)), len(self.segments) - 1)
        u = min(max(tau - k, 0.0), 1.0)
        return np.atleast_2d(self.segments[k](np.array([u])))[0]

    def param_at_arc(self, s: float) -> float:
        """弧长 s 对应的全局参数（顶点之间线性插值）"""
        return float(np.interp(s, self.polyline.arc, self.polyline.params))

    def point_at(self, s: float) -> np.ndarray:
        return self.at_param(self.param_at_arc(s))

    def tail(self, tau0: float) -> List[SegmentEvaluator]:
        """参数 ≥ tau0 的部分，作为新的段列表"""
        k0 = min(int(math.floor(tau0)), len(self.segments) - 1)
        u0 = tau0 - k0
        first = self.segments[k0]
        out = [lambda u, f=first, a=u0: f(a + np.asarray(u) * (1.0 - a))]
        out.extend(self.segments[k0 + 1:])
        return out


# ---------------------------------------------------------------------------
# 局部坐标中的曲线段（终点为原点）
# ---------------------------------------------------------------------------

def _translate(center: np.ndarray, seg: SegmentEvaluator) -> SegmentEvaluator:
    return lambda u: group_mul(center, seg(u))


def spiral_segment(y: np.ndarray) -> SegmentEvaluator:
    """
    y 到原点的对数螺线 σ ↦ δ_σ(e^{iψ(σ)} z, t)，σ = 1 − u

    要求 z ≠ 0；ρ(γ(σ)) = σ·ρ(y)。
    """
    y = np.asarray(y, dtype=float)
    n = (y.size - 1) // 2
    z = y[:n] + 1j * y[n:2 * n]
    t = y[-1]
    zz = float(np.vdot(z, z).real)
    if zz == 0.0:
        raise DomainError("螺线要求 z ≠ 0")
    rate = -t / zz

    def seg(u):
        sigma = 1.0 - np.asarray(u, dtype=float)
        safe = np.where(sigma > 0, sigma, 1.0)
        phase = np.exp(1j * rate * np.log(safe))
        Z = (sigma * phase)[:, None] * z[None, :]
        out = np.empty((sigma.size, 2 * n + 1))
        out[:, :n] = Z.real
        out[:, n:2 * n] = Z.imag
        out[:, -1] = sigma * sigma * t
        out[sigma <= 0] = 0.0
        return out

    return seg


def horizontal_line_segment(y: np.ndarray, v: np.ndarray, a: float) -> SegmentEvaluator:
    """s ↦ y·(s v, 0)，s ∈ [0, a]，v 为单位复向量"""
    y = np.asarray(y, dtype=float)
    n = (y.size - 1) // 2
    step = np.concatenate([v.real, v.imag, [0.0]])

    def seg(u):
        s = a * np.asarray(u, dtype=float)
        return group_mul(y, s[:, None] * step[None, :])

    return seg


def near_axis_prefix(y: np.ndarray, margin: float, eta: float = NEAR_AXIS_ETA):
    """
    |z|² < η|t| 时的水平前缀

    Args:
        margin: 允许 ρ 增加的上限

    Returns:
        (segment, endpoint)；不需要前缀时 segment 为 None
    """
    y = np.asarray(y, dtype=float)
    n = (y.size - 1) // 2
    z = y[:n] + 1j * y[n:2 * n]
    t = y[-1]
    zn = float(np.linalg.norm(z))
    if zn * zn >= eta * abs(t) and zn > 0:
        return None, y
    if zn > 0:
        v = 1j * math.copysign(1.0, t) * z / zn
    else:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
    a = math.sqrt(eta * abs(t))
    rho0 = float(group_norm(y))
    for _ in range(60):
        end = horizontal_line_segment(y, v, a)(np.array([1.0]))[0]
        if float(group_norm(end)) <= rho0 + margin:
            break
        a *= 0.5
    end = horizontal_line_segment(y, v, a)(np.array([1.0]))[0]
    return horizontal_line_segment(y, v, a), end


def radial_segment(y: np.ndarray) -> SegmentEvaluator:
    """((1−u) z, t)：保持 t 的水平径向段"""
    y = np.asarray(y, dtype=float)

    def seg(u):
        u = np.asarray(u, dtype=float)
        out = np.repeat(y[None, :], u.size, axis=0)
        out[:, :-1] *= (1.0 - u)[:, None]
        return out

    return seg


def loop_segment(t: float, n: int) -> SegmentEvaluator:
    """
    (0, t) 到原点的水平圆环：z₁(φ) = R₀(e^{iσφ} − 1)，σ = sign(t)，R₀² = |t|/(4π)

    沿环 t(φ) = t − 2σR₀²(φ − sin φ)，φ = 2π 时回到 0。
    """
    sgn = 1.0 if t >= 0 else -1.0
    R2 = abs(t) / (4.0 * math.pi)
    R0 = math.sqrt(R2)

    def seg(u):
        phi = 2.0 * math.pi * np.asarray(u, dtype=float)
        out = np.zeros((phi.size, 2 * n + 1))
        z1 = R0 * (np.exp(1j * sgn * phi) - 1.0)
        out[:, 0] = z1.real
        out[:, n] = z1.imag
        out[:, -1] = t - 2.0 * sgn * R2 * (phi - np.sin(phi))
        return out

    return seg


def _constant_segment(p: np.ndarray) -> SegmentEvaluator:
    return lambda u: np.repeat(np.asarray(p, dtype=float)[None, :], np.size(u), axis=0)


# ---------------------------------------------------------------------------
# 曲线构造
# ---------------------------------------------------------------------------

def spiral_curve(center: np.ndarray, x: np.ndarray, margin: float,
                 vertices: int = DEFAULT_VERTICES) -> Curve:
    """
    x 到 center 的水平曲线（近轴前缀 + 对数螺线）

    Args:
        margin: 近轴前缀允许 ρ(center, ·) 增加的量
    """
    center = as_coords(center)
    x = as_coords(x)
    n = (x.size - 1) // 2
    y = group_mul(group_inv(center), x)
    if float(group_norm(y)) == 0.0:
        return Curve([_constant_segment(center)], n, 1, label='trivial')
    segments = []
    prefix, y1 = near_axis_prefix(y, margin)
    if prefix is not None:
        segments.append(_translate(center, prefix))
    segments.append(_translate(center, spiral_segment(y1)))
    return Curve(segments, n, vertices, label='spiral')


def box_curve_segments(y: np.ndarray) -> List[SegmentEvaluator]:
    """局部坐标 y 到原点：径向段 + 水平圆环（为零的部分省略）"""
    y = np.asarray(y, dtype=float)
    n = (y.size - 1) // 2
    segments = []
    if np.any(y[:-1] != 0.0):
        segments.append(radial_segment(y))
    if y[-1] != 0.0:
        segments.append(loop_segment(float(y[-1]), n))
    return segments


def box_curve(center: np.ndarray, x: np.ndarray, vertices: int = DEFAULT_VERTICES) -> Curve:
    center = as_coords(center)
    x = as_coords(x)
    n = (x.size - 1) // 2
    segments = box_curve_segments(group_mul(group_inv(center), x))
    if not segments:
        return Curve([_constant_segment(center)], n, 1, label='trivial')
    return Curve([_translate(center, s) for s in segments], n, vertices, label='box')


def reversed_segments(segments: Sequence[SegmentEvaluator]) -> List[SegmentEvaluator]:
    return [(lambda u, f=f: f(1.0 - np.asarray(u, dtype=float))) for f in reversed(segments)]


def horizontal_path(a: np.ndarray, b: np.ndarray, vertices: int = DEFAULT_VERTICES) -> Curve:
    """a 到 b 的水平路径：盒曲线 (a⁻¹b → 0) 反向后左平移 a"""
    a = as_coords(a)
    b = as_coords(b)
    n = (a.size - 1) // 2
    segments = box_curve_segments(group_mul(group_inv(a), b))
    if not segments:
        return Curve([_constant_segment(a)], n, 1, label='trivial')
    return Curve([_translate(a, s) for s in reversed_segments(segments)], n, vertices, label='path')


def dilation_path(center: np.ndarray, x: np.ndarray, vertices: int = DEFAULT_VERTICES) -> Curve:
    """τ ↦ c·δ_{1−τ}(c⁻¹x)：非水平的诊断路径，不用于球链"""
    center = as_coords(center)
    x = as_coords(x)
    n = (x.size - 1) // 2
    y = group_mul(group_inv(center), x)

    def seg(u):
        s = 1.0 - np.asarray(u, dtype=float)
        out = np.repeat(y[None, :], s.size, axis=0)
        out[:, :-1] *= s[:, None]
        out[:, -1] *= s * s
        return group_mul(center, out)

    return Curve([seg], n, vertices, label='dilation')


def concatenate(curves_or_segments: Sequence, n: int, vertices: int = DEFAULT_VERTICES,
                label: str = 'curve') -> Curve:
    segments: List[SegmentEvaluator] = []
    for item in curves_or_segments:
        if isinstance(item, Curve):
            segments.extend(item.segments)
        else:
            segments.append(item)
    return Curve(segments, n, vertices, label)


def john_constants(curve: Curve, rho_u: Callable[[np.ndarray], np.ndarray]):
    """
    曲线自身的 John 常数

    α_γ = min(l, min_{s>0} ρ_U(γ(s))·l/s)，β_γ = l
    """
    pl = curve.polyline
    l = pl.length
    if l == 0.0:
        return math.inf, 0.0
    depth = rho_u(pl.points[1:])
    alpha = min(l, float(np.min(depth * l / pl.arc[1:])))
    return alpha, l


def check_inside(curve: Curve, contains: Callable[[np.ndarray], np.ndarray], label: Optional[str] = None) -> None:
    inside = contains(curve.polyline.points)
    if not np.all(inside):
        raise DomainError(f"{label or curve.label}: 曲线离开区域（{int(np.size(inside) - np.count_nonzero(inside))} 个顶点）")
