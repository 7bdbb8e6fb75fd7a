"""
矩与投影 P - Box Moments and the Projection P

在 Box(0, ϰ/4) 上：
    [A(u)]_{ij} = (2^{ν+4}·3/ϰ^{ν+2}) ∫ u_i z̄_j dx
    [a(u)]_i    = (2^{ν+1}/ϰ^ν) ∫ u_i dx

归一化常数使得 a(const) = const、A(z) = I、A(Bz) = B。
Pu = K(u)z + a(u)，K(u) = (A(u) − A(u)*)/2。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from modules.hgroup import (
    GroupDim, HPoint, Box, real_form, PreconditionError, InvalidParameterError, QuadratureError,
)
from modules.hcalc import SmoothMap, horizontal_part, vector_map
from .kernel import KernelElement, KernelMode
from .quadrature import box_rule, node_count, MAX_NODES

logger = logging.getLogger(__name__)

MIN_ORDER = 4
DEFAULT_ORDER = 12


def default_order(n: int, max_nodes: int = MAX_NODES) -> int:
    """
    n 维的缺省求积阶数

    n ≤ 2 时为 DEFAULT_ORDER；更高维时取节点数 order^{2n+1} 不超过 max_nodes 的最大阶数
    （n = 3 时为 8）。
    """
    order = DEFAULT_ORDER
    while order > MIN_ORDER and node_count(n, order) > max_nodes:
        order -= 1
    return order


def moment_constants(n: int):
    """(C_A, C_a, r)，r = ϰ/4"""
    g = GroupDim(n)
    C_A = 2.0 ** (g.nu + 4) * 3.0 / g.kappa ** (g.nu + 2)
    C_a = 2.0 ** (g.nu + 1) / g.kappa ** g.nu
    return C_A, C_a, g.kappa / 4.0


def moment_box(n: int) -> Box:
    return Box(HPoint.identity(n), GroupDim(n).kappa / 4.0)


@dataclass(frozen=True, eq=False)
class MomentData:
    """A(u)、a(u) 及求积信息"""
    A: np.ndarray
    a_vec: np.ndarray
    quad_order: int
    quad_error_estimate: float

    @property
    def K(self) -> np.ndarray:
        """K(u) = (A − A*)/2"""
        return 0.5 * (self.A - self.A.conj().T)


def _raw_moments(u: SmoothMap, order: int, max_nodes: int):
    n = u.n
    C_A, C_a, _ = moment_constants(n)
    nodes, weights = box_rule(moment_box(n), order, max_nodes)
    U = u.evaluate(nodes)
    if not np.all(np.isfinite(U)):
        raise QuadratureError(f"{u.label}: 求积节点上出现非有限值")
    Uc = U[:, :n] + 1j * U[:, n:2 * n]
    Z = nodes[:, :n] + 1j * nodes[:, n:2 * n]
    A = C_A * ((weights[:, None] * Uc).T @ Z.conj())
    a = C_a * (weights @ Uc)
    return A, a


def moments(u: SmoothMap, quad_order: Optional[int] = None, refine: bool = True,
            max_nodes: int = MAX_NODES) -> MomentData:
    """
    计算 A(u)、a(u)

    refine=True 时用 order+4 重算一次作为误差估计；
    节点预算不够时改用 order−2 做比较；quad_order 缺省时取 default_order(n)。
    """
    if quad_order is None:
        quad_order = default_order(u.n, max_nodes)
    if quad_order < MIN_ORDER:
        raise InvalidParameterError(f"求积阶数必须 ≥ {MIN_ORDER}: {quad_order}")
    u = horizontal_part(u)
    A, a = _raw_moments(u, quad_order, max_nodes)
    err = 0.0
    if refine:
        other = quad_order + 4
        if node_count(u.n, other) > max_nodes:
            other = quad_order - 2
            logger.debug(f"节点预算不足，误差估计改用 {other} 阶")
        A2, a2 = _raw_moments(u, max(other, 2), max_nodes)
        diff = max(float(np.max(np.abs(A - A2))), float(np.max(np.abs(a - a2))))
        scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(a))))
        err = 2.0 * diff + 1e-13 * scale
    return MomentData(A, a, quad_order, err)


def project_P(u: SmoothMap, quad_order: Optional[int] = None) -> KernelElement:
    """Pu = K(u)z + a(u)，仅对 n > 1 定义"""
    if u.n < 2:
        raise PreconditionError("投影 P 只对 n > 1 定义")
    md = moments(u, quad_order, refine=False)
    return KernelElement(KernelMode.GENERAL_N, md.a_vec, K=md.K)


def rotate_vector_map(V: np.ndarray, u: SmoothMap) -> SmoothMap:
    """(Vu)(x) = V·u(x)，u 取值于 ℂⁿ"""
    u = horizontal_part(u)
    V = np.asarray(V, dtype=complex)
    n = u.n

    def evaluator(X):
        U = u.evaluator(X)
        W = (U[..., :n] + 1j * U[..., n:]) @ V.T
        return np.concatenate([W.real, W.imag], axis=-1)

    partials = None
    if u.partials is not None:
        R = real_form(V)

        def partials(X):
            return R @ u.partials(X)

    return vector_map(n, evaluator, partials, label=f'V·{u.label}')
