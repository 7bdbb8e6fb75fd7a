"""
水平微分 - Horizontal Differential

对映射 f 在点 x 处计算 X_i f_j（i = 1..2n+1）。

两种格式：
- analytic: X_i f_j = ∂f_j/∂x_i + c_i(x)·∂f_j/∂t，c_i 为标架的竖直系数
- flow_fd:  沿群流的中心差分 X_i f(x) ≈ [f(x·(h e_i)) − f(x·(−h e_i))] / (2h)

竖直乘子 λ(x, f) 取 Df(∂_t) 在 f(x) 处标架中的 ∂_t 分量，
不通过 (det M)^{1/n} 开方得到，偶数 n 时没有符号歧义。
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from modules.hgroup import (
    HPoint, as_coords, group_mul, group_inv, frame_matrix, vertical_coefficients,
    StencilError, InvalidParameterError,
)
from .smooth_map import SmoothMap

logger = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-5
SCHEMES = ('analytic', 'flow_fd')


@dataclass(frozen=True, eq=False)
class HorizontalDifferential:
    """
    点 x 处的水平微分

    Attributes:
        M: 2n×2n 实矩阵，M[j, i] = X_i f_j
        lam: 竖直乘子 λ(x, f)；向量值映射时为 nan
        at: 计算点
        scheme: 实际使用的差分格式
        scheme_gap: 两种格式的最大差（仅在交叉检查时给出）
    """
    M: np.ndarray
    lam: float
    at: HPoint
    scheme: str = 'analytic'
    scheme_gap: Optional[float] = None

    @property
    def n(self) -> int:
        return self.M.shape[0] // 2

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.M))

    @property
    def jacobian(self) -> float:
        """J(x, f) = λ^{n+1}"""
        return self.lam ** (self.n + 1)

    def lambda_consistency(self) -> float:
        """|λⁿ − det M|，接触映射上应为零"""
        return abs(self.lam ** self.n - self.det)

    def symplectic_defect(self) -> float:
        """|Mᵀ J M − λ J|"""
        J = symplectic_matrix(self.n)
        return float(np.max(np.abs(self.M.T @ J @ self.M - self.lam * J)))


def symplectic_matrix(n: int) -> np.ndarray:
    """J = [[0, I], [−I, 0]]"""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def _resolve_scheme(f: SmoothMap, scheme: Optional[str]) -> str:
    if scheme is None:
        return 'analytic' if f.partials is not None else 'flow_fd'
    if scheme not in SCHEMES:
        raise InvalidParameterError(f"未知差分格式: {scheme}")
    if scheme == 'analytic' and f.partials is None:
        raise InvalidParameterError(f"{f.label}: analytic 格式需要解析偏导数")
    return scheme


def default_step(f: SmoothMap) -> float:
    """h = 1e−5·max(1, 定义域尺度)"""
    scale = getattr(f.domain, 'radius', 1.0) if f.domain is not None else 1.0
    return DEFAULT_FD_STEP * max(1.0, float(scale))


def _check_inside(f: SmoothMap, X: np.ndarray, what: str) -> None:
    if f.domain is None:
        return
    inside = f.contains(X)
    if not np.all(inside):
        raise StencilError(f"{f.label}: {what}超出定义域（{int(np.size(inside) - np.count_nonzero(inside))} 个点）")


def _flow_derivatives(f: SmoothMap, X: np.ndarray, h: float) -> np.ndarray:
    d = X.shape[-1]
    cols = []
    for i in range(d):
        E = np.zeros(d)
        E[i] = h
        plus, minus = group_mul(X, E), group_mul(X, -E)
        _check_inside(f, plus, "差分模板")
        _check_inside(f, minus, "差分模板")
        cols.append((f.evaluate(plus) - f.evaluate(minus)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def frame_derivatives(f: SmoothMap, X, scheme: Optional[str] = None, h: Optional[float] = None,
                      richardson: bool = False) -> np.ndarray:
    """
    全部标架导数 D[..., j, i] = X_i f_j，i 取遍 X_1..X_{2n}, X_{2n+1} = ∂_t

    Args:
        X: 坐标数组 (..., 2n+1)
        richardson: flow_fd 时使用 (4D(h/2) − D(h)) / 3
    """
    X = as_coords(X)
    scheme = _resolve_scheme(f, scheme)
    _check_inside(f, X, "计算点")
    if scheme == 'analytic':
        return f.jacobian(X) @ frame_matrix(X)
    if h is None:
        h = default_step(f)
    if not h > 0:
        raise InvalidParameterError(f"差分步长必须为正: {h}")
    D = _flow_derivatives(f, X, h)
    if richardson:
        D = (4.0 * _flow_derivatives(f, X, h / 2.0) - D) / 3.0
    return D


def vertical_multiplier(fx: np.ndarray, v: np.ndarray) -> np.ndarray:
    """
    λ = v_t − Σ_i c_i(f(x)) v_i，v = X_{2n+1} f = ∂f/∂t

    即 Df(∂_t) 在 f(x) 处标架中的 ∂_t 分量。
    """
    c = vertical_coefficients(fx)
    return v[..., -1] - np.sum(c * v[..., :-1], axis=-1)


def vertical_multiplier_fd(f: SmoothMap, X, tau: float) -> np.ndarray:
    """λ 的差分版本：(f(x)⁻¹·f(x·(0,±τ)))_t 的中心差商"""
    X = as_coords(X)
    E = np.zeros(X.shape[-1])
    E[-1] = tau
    base_inv = group_inv(f.evaluate(X))
    up = group_mul(base_inv, f.evaluate(group_mul(X, E)))[..., -1]
    down = group_mul(base_inv, f.evaluate(group_mul(X, -E)))[..., -1]
    return (up - down) / (2.0 * tau)


def horizontal_matrices(f: SmoothMap, X, scheme: Optional[str] = None, h: Optional[float] = None,
                        richardson: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    批量水平微分

    Returns:
        (M, lam)：M 形如 (..., 2n, 2n)，lam 形如 (...)，向量值映射时 lam 为 nan
    """
    X = as_coords(X)
    m = 2 * f.n
    D = frame_derivatives(f, X, scheme, h, richardson)
    M = D[..., :m, :m]
    if f.vector_valued:
        return M, np.full(X.shape[:-1], np.nan)
    return M, vertical_multiplier(f.evaluate(X), D[..., :, -1])


def horiz_diff(f: SmoothMap, x: HPoint, scheme: Optional[str] = None, h: Optional[float] = None,
               cross_check: bool = False, richardson: bool = False) -> HorizontalDifferential:
    """
    点 x 处的水平微分

    cross_check=True 且有解析偏导数时同时计算两种格式，
    差距超过 10·h² 只记录警告，不抛异常。
    """
    scheme = _resolve_scheme(f, scheme)
    M, lam = horizontal_matrices(f, x.coords, scheme, h, richardson)
    gap = None
    if cross_check and f.partials is not None:
        step = h if h is not None else default_step(f)
        other = 'flow_fd' if scheme == 'analytic' else 'analytic'
        M2, _ = horizontal_matrices(f, x.coords, other, step)
        gap = float(np.max(np.abs(M - M2)))
        if gap > 10.0 * step * step:
            logger.warning(f"{f.label}: 两种差分格式不一致 gap={gap:.3e} > 10h²={10 * step * step:.3e}")
    if not f.vector_valued:
        det = float(np.linalg.det(M))
        if f.contact and abs(float(lam) ** f.n - det) > 1e-6 * max(1.0, abs(det)):
            logger.debug(f"{f.label}: λⁿ 与 det M 不一致 λ={float(lam):.6g}, det={det:.6g}")
    return HorizontalDifferential(np.array(M), float(lam), x, scheme, gap)


def fd_convergence_slope(f: SmoothMap, x: HPoint,
                         steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3, 1.25e-3)) -> float:
    """flow_fd 相对解析值误差的对数-对数斜率（二阶格式应接近 2）"""
    if f.partials is None:
        raise InvalidParameterError(f"{f.label}: 收敛阶检查需要解析偏导数")
    exact = frame_derivatives(f, x.coords, 'analytic')
    errors = [float(np.max(np.abs(frame_derivatives(f, x.coords, 'flow_fd', h) - exact))) for h in steps]
    slope, _ = np.polyfit(np.log(steps), np.log(errors), 1)
    logger.debug(f"{f.label}: 差分误差 {errors}, 斜率 {slope:.3f}")
    return float(slope)
