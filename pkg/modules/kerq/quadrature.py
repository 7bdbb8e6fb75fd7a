"""
张量积 Gauss–Legendre 求积 - Tensor-Product Gauss–Legendre Quadrature

盒 Box(c, r) = c·Box(0, r) 在欧氏坐标下是坐标乘积集，
Lebesgue 测度是 Haar 测度，因此

    ∫_{Box(c,r)} F dx = Σ_k w_k F(c·y_k)

球上的平均值用盒节点加球掩码，再除以掩码内的权重和。
"""

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from modules.hgroup import Ball, Box, group_mul, QuadratureError, InvalidParameterError

logger = logging.getLogger(__name__)

MAX_NODES = 4_000_000


def node_count(n: int, order: int) -> int:
    return order ** (2 * n + 1)


@lru_cache(maxsize=16)
def _reference_rule(n: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """[-1,1]^{2n+1} 上的节点与权重"""
    x, w = np.polynomial.legendre.leggauss(order)
    d = 2 * n + 1
    grids = np.meshgrid(*([x] * d), indexing='ij')
    nodes = np.stack([g.reshape(-1) for g in grids], axis=-1)
    wgrids = np.meshgrid(*([w] * d), indexing='ij')
    weights = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=-1), axis=-1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def box_rule(box: Box, order: int, max_nodes: int = MAX_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """
    Box(c, r) 上的求积节点与权重

    Returns:
        (nodes, weights)，nodes 形如 (N, 2n+1)，权重和等于 |Box(c, r)|
    """
    n = box.n
    if order < 1:
        raise InvalidParameterError(f"求积阶数必须为正: {order}")
    if node_count(n, order) > max_nodes:
        raise QuadratureError(f"求积节点过多: {order}^{2 * n + 1} > {max_nodes}")
    ref, w = _reference_rule(n, order)
    r = box.radius
    scale = np.array([r] * (2 * n) + [r * r])
    Y = ref * scale
    jac = r ** (2 * n) * r * r
    return group_mul(box.center.coords, Y), w * jac


def integrate_box(fun: Callable[[np.ndarray], np.ndarray], box: Box, order: int,
                  max_nodes: int = MAX_NODES) -> np.ndarray:
    """∫_{Box} fun；fun 返回形如 (N, ...) 的数组，结果保留尾部形状"""
    nodes, weights = box_rule(box, order, max_nodes)
    values = np.asarray(fun(nodes))
    if not np.all(np.isfinite(values)):
        raise QuadratureError("被积函数在求积节点上出现非有限值")
    return np.tensordot(weights, values, axes=(0, 0))


def ball_rule(ball: Ball, order: int, max_nodes: int = MAX_NODES) -> Tuple[np.ndarray, np.ndarray]:
    """
    球上的平均求积：外接盒节点中落在球内的部分，权重归一化为和 1
    """
    nodes, weights = box_rule(Box(ball.center, ball.radius), order, max_nodes)
    inside = ball.contains(nodes)
    if not np.any(inside):
        raise QuadratureError("球内没有求积节点")
    w = weights[inside]
    return nodes[inside], w / np.sum(w)


def ball_mean(fun: Callable[[np.ndarray], np.ndarray], ball: Ball, order: int,
              max_nodes: int = MAX_NODES) -> np.ndarray:
    """(1/|B|)∫_B fun"""
    nodes, w = ball_rule(ball, order, max_nodes)
    values = np.asarray(fun(nodes))
    if not np.all(np.isfinite(values)):
        raise QuadratureError("被积函数在求积节点上出现非有限值")
    return np.tensordot(w, values, axes=(0, 0))
