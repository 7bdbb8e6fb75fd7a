"""
酉修正 - Unitary Correction of the Moment Matrix

给定 u ≈ z，求酉矩阵 V 使 VA(u) 为厄米矩阵，从而 K(Vu) = 0、P(Vu) ≡ const：

1. A = A(u)，H = A*A
2. 循环复 Jacobi 迭代求 H = Σ μ_i w_i w_i*
3. λ_i = √μ_i，v_i = A w_i / λ_i，V = Σ w_i v_i*

误差界：
- 原始常数  n ϰ^{n+1} 2^{−n} ε（只报告，within_stated_bound）
- 推导界    δ = |A − I| ≤ C_A ε (|Box|·m₂)^{1/2}，
            |V − I| ≤ ((2δ+δ²)/(2−δ) + δ)/(1−δ)
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from modules.hgroup import (
    GroupDim, box_volume, box_second_moment, PreconditionError, SingularMomentError,
)
from modules.hcalc import SmoothMap
from .moments import moments, moment_constants, MomentData

logger = logging.getLogger(__name__)

JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True, eq=False)
class EigenData:
    """H = A*A 的谱分解与对应的基"""
    mu: np.ndarray
    lambdas: np.ndarray
    W: np.ndarray
    Vbasis: np.ndarray
    sweeps: int


@dataclass(frozen=True, eq=False)
class UnitaryCorrection:
    """酉修正结果"""
    V: np.ndarray
    deviation_bound: float
    eigen_data: EigenData
    A: np.ndarray
    deviation: float
    derived_bound: float
    delta: float
    hermitian_defect: float
    unitarity_defect: float

    @property
    def within_stated_bound(self) -> bool:
        return self.deviation < self.deviation_bound

    @property
    def certified(self) -> bool:
        return self.deviation <= self.derived_bound


def jacobi_eigh(H: np.ndarray, tol: float = 1e-14, max_sweeps: int = JACOBI_MAX_SWEEPS
                ) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    厄米矩阵的循环 Jacobi 特征分解

    每个 (p, q) 先用相位把 H_pq 转成实数，再做实 Jacobi 旋转消去。
    扫描顺序固定，结果可复现。

    Returns:
        (mu, W, sweeps)，H = W diag(mu) W*，mu 降序
    """
    H = np.array(H, dtype=complex)
    m = H.shape[0]
    W = np.eye(m, dtype=complex)
    scale = max(float(np.linalg.norm(H)), 1e-300)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = math.sqrt(2.0) * float(np.linalg.norm(np.triu(H, 1)))
        if off <= tol * scale:
            sweeps -= 1
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                hpq = H[p, q]
                mag = abs(hpq)
                if mag <= tol * scale * 1e-3:
                    continue
                G = np.eye(m, dtype=complex)
                G[q, q] = np.conj(hpq / mag)
                theta = (H[q, q].real - H[p, p].real) / (2.0 * mag)
                sgn = 1.0 if theta >= 0 else -1.0
                t = sgn / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                R = np.eye(m, dtype=complex)
                R[p, p] = c
                R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                G = G @ R
                H = G.conj().T @ H @ G
                H = 0.5 * (H + H.conj().T)
                W = W @ G
        logger.debug(f"Jacobi 第 {sweeps} 轮, 非对角范数 {off:.3e}")
    mu = np.diag(H).real.copy()
    order = np.argsort(-mu)
    return mu[order], W[:, order], sweeps


def stated_bound(n: int, eps: float) -> float:
    """n ϰ^{n+1} 2^{−n} ε"""
    g = GroupDim(n)
    return n * g.kappa ** (n + 1) * 2.0 ** (-n) * eps


def eps_precondition(n: int) -> float:
    """ε < √(2/n)·(2/ϰ)^{n+1}"""
    g = GroupDim(n)
    return math.sqrt(2.0 / n) * (2.0 / g.kappa) ** (n + 1)


def moment_delta_bound(n: int, eps: float) -> float:
    """|A(u) − I| 的先验上界 C_A ε (|Box|·m₂)^{1/2}"""
    C_A, _, r = moment_constants(n)
    return C_A * eps * math.sqrt(box_volume(r, n) * box_second_moment(r, n))


def correction_bound(delta: float) -> float:
    """由 |A − I| ≤ δ 推出的 |V − I| 上界；δ ≥ 1 时无界"""
    if delta >= 1.0:
        return math.inf
    return ((2 * delta + delta * delta) / (2 - delta) + delta) / (1 - delta)


def correction_from_moments(A: np.ndarray, eps: float) -> UnitaryCorrection:
    """由已知的矩矩阵 A 构造修正"""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    mu, W, sweeps = jacobi_eigh(A.conj().T @ A)
    if np.any(mu <= 0) or mu[-1] <= 1e-14 * max(mu[0], 1e-300):
        raise SingularMomentError(f"A*A 的特征值不全为正: min μ = {mu[-1]:.3e}")
    lambdas = np.sqrt(mu)
    Vbasis = (A @ W) / lambdas
    V = W @ Vbasis.conj().T
    VA = V @ A
    I = np.eye(n)
    deviation = float(np.linalg.norm(V - I, 2))
    delta = moment_delta_bound(n, eps)
    result = UnitaryCorrection(
        V=V,
        deviation_bound=stated_bound(n, eps),
        eigen_data=EigenData(mu, lambdas, W, Vbasis, sweeps),
        A=A,
        deviation=deviation,
        derived_bound=correction_bound(delta),
        delta=float(np.linalg.norm(A - I, 2)),
        hermitian_defect=float(np.max(np.abs(VA - VA.conj().T))),
        unitarity_defect=float(np.linalg.norm(V.conj().T @ V - I, 2)),
    )
    if result.unitarity_defect > 1e-10:
        logger.warning(f"修正矩阵 V 的酉性偏差 {result.unitarity_defect:.3e}")
    if not result.within_stated_bound:
        logger.warning(f"|V−I| = {deviation:.3e} 超过原始常数界 {result.deviation_bound:.3e}")
    if not result.certified:
        logger.warning(f"|V−I| = {deviation:.3e} 超过推导界 {result.derived_bound:.3e}")
    return result


def lemma4_correction(u: SmoothMap, eps: float, quad_order: Optional[int] = None) -> UnitaryCorrection:
    """
    酉修正

    Args:
        u: 取值于 ℂⁿ 的映射，调用方保证在 B(0, 3/10) 上 sup|u − z| ≤ eps
        eps: 接近程度
        quad_order: 矩的求积阶数，缺省为 default_order(n)
    """
    n = u.n
    if n < 2:
        raise PreconditionError("酉修正只对 n > 1 定义")
    if not 0 <= eps < eps_precondition(n):
        raise PreconditionError(f"ε = {eps:.3e} 不满足 ε < {eps_precondition(n):.3e}")
    md: MomentData = moments(u, quad_order, refine=False)
    result = correction_from_moments(md.A, eps)
    logger.debug(f"酉修正完成: |V−I| = {result.deviation:.3e}, Jacobi 轮数 {result.eigen_data.sweeps}")
    return result
