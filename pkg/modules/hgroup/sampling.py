"""
采样器 - Deterministic Samplers in Box Coordinates

在盒坐标 y ∈ (−r, r)^{2n} × (−r², r²) 中生成点，再左平移到盒中心。
球采样先在外接盒 Box(c, r) ⊃ B(c, r) 中采样再过滤。

method:
- 'sobol'  加扰 Sobol 低差异序列（默认，确定性）
- 'random' numpy Generator 伪随机（蒙特卡罗标准误差有意义时使用）
"""

import logging
import math
from typing import Union

import numpy as np
from scipy.stats import qmc

from .errors import InvalidParameterError
from .group import group_mul
from .volumes import Ball, Box, unit_ball_volume, box_volume

logger = logging.getLogger(__name__)

Region = Union[Ball, Box]


class BoxSampler:
    """盒坐标采样器，持有自己的 Sobol 引擎或随机数发生器"""

    def __init__(self, n: int, seed: int = 0, method: str = 'sobol'):
        if method not in ('sobol', 'random'):
            raise InvalidParameterError(f"未知采样方法: {method}")
        self.n = n
        self.method = method
        self.dim = 2 * n + 1
        if method == 'sobol':
            self._engine = qmc.Sobol(d=self.dim, scramble=True, seed=seed)
        else:
            self._rng = np.random.default_rng(seed)
        self.logger = logging.getLogger(__name__)

    def unit_cube(self, count: int) -> np.ndarray:
        """[0,1)^{2n+1} 中 count 个点；Sobol 时按 2 的幂整块取点"""
        if self.method == 'random':
            return self._rng.random((count, self.dim))
        m = max(1, math.ceil(math.log2(max(count, 2))))
        return self._engine.random(2 ** m)[:count]

    def box_points(self, box: Box, count: int) -> np.ndarray:
        U = self.unit_cube(count)
        r = box.radius
        Y = np.empty_like(U)
        Y[:, :-1] = (2.0 * U[:, :-1] - 1.0) * r
        Y[:, -1] = (2.0 * U[:, -1] - 1.0) * r * r
        return group_mul(box.center.coords, Y)

    def ball_points(self, ball: Ball, count: int) -> np.ndarray:
        box = Box(ball.center, ball.radius)
        ratio = unit_ball_volume(self.n) / box_volume(1.0, self.n)
        chunks, total = [], 0
        while total < count:
            want = int(math.ceil(1.25 * (count - total) / ratio)) + 16
            X = self.box_points(box, want)
            X = X[ball.contains(X)]
            chunks.append(X)
            total += X.shape[0]
        points = np.concatenate(chunks, axis=0)[:count]
        self.logger.debug(f"球采样 {count} 点, 接受率约 {ratio:.3f}")
        return points


def sample_box(box: Box, count: int, seed: int = 0, method: str = 'sobol') -> np.ndarray:
    """Box(c, r) 中 count 个点的坐标数组"""
    if count < 1:
        raise InvalidParameterError(f"样本数必须为正: {count}")
    return BoxSampler(box.n, seed, method).box_points(box, count)


def sample_ball(ball: Ball, count: int, seed: int = 0, method: str = 'sobol') -> np.ndarray:
    """B(c, r) 中 count 个点的坐标数组"""
    if count < 1:
        raise InvalidParameterError(f"样本数必须为正: {count}")
    return BoxSampler(ball.n, seed, method).ball_points(ball, count)


def sample_region(region: Region, count: int, seed: int = 0, method: str = 'sobol') -> np.ndarray:
    if isinstance(region, Ball):
        return sample_ball(region, count, seed, method)
    return sample_box(region, count, seed, method)


def sample_sphere(ball: Ball, count: int, seed: int = 0) -> np.ndarray:
    """
    球面 ∂B(c, r) 上的点：把 Box 样本沿伸缩径向投影到 ρ = r

    用于包含关系与边界距离的抽样检查，不是均匀分布。
    """
    box = Box(ball.center, ball.radius)
    Y = group_mul(-box.center.coords, sample_box(box, count, seed))
    zz = np.sum(Y[:, :-1] ** 2, axis=-1)
    rho = (zz * zz + Y[:, -1] ** 2) ** 0.25
    keep = rho > 1e-12
    Y, rho = Y[keep], rho[keep]
    s = ball.radius / rho
    Y[:, :-1] *= s[:, None]
    Y[:, -1] *= s * s
    return group_mul(ball.center.coords, Y)
