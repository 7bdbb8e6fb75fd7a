"""
算子 Q - The Rigidity Operator

对 u: ℍⁿ → ℝ^{2n}（≅ ℂⁿ），记 M = D_h u。Q 由两个块组成：
- 对称部分      ½(M + Mᵀ)
- 反辛部分      ½(M + J M J)，J = [[0, I], [−I, 0]]

复形式下对应 ½(Zu + (Zu)*) 与 Z̄u，其中
Z_j = ½(X_j − iX_{j+n})，Z̄_j = ½(X_j + iX_{j+n})。

|Qu| 取两块算子范数的平方和开方；实复两种打包满足
complex ≤ real ≤ √3·complex。
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from modules.hgroup import HPoint, group_mul, group_inv, OrientationError
from .smooth_map import SmoothMap, horizontal_part
from .differential import horizontal_matrices, horiz_diff, symplectic_matrix

logger = logging.getLogger(__name__)


def _opnorm(A: np.ndarray) -> np.ndarray:
    return np.linalg.norm(A, ord=2, axis=(-2, -1))


@dataclass(frozen=True, eq=False)
class QValue:
    """Qu 在一点的四个分量"""
    sym_part: np.ndarray
    antisymplectic_part: np.ndarray
    complex_sym: np.ndarray
    complex_antiholo: np.ndarray

    @property
    def real_norm(self) -> float:
        return float(np.hypot(_opnorm(self.sym_part), _opnorm(self.antisymplectic_part)))

    @property
    def complex_norm(self) -> float:
        return float(np.hypot(_opnorm(self.complex_sym), _opnorm(self.complex_antiholo)))

    @property
    def norm(self) -> float:
        """|Qu|，实打包"""
        return self.real_norm

    def antiholo_gap(self) -> float:
        """||½(M+JMJ)| − |Z̄u||，应在舍入误差内为零"""
        return abs(float(_opnorm(self.antisymplectic_part)) - float(_opnorm(self.complex_antiholo)))

    def packings_consistent(self, tol: float = 1e-10) -> bool:
        c, r = self.complex_norm, self.real_norm
        return c <= r + tol and r <= np.sqrt(3.0) * c + tol


def z_derivatives(M: np.ndarray):
    """
    由实矩阵 M[j, i] = X_i u_j 得到 (Zu, Z̄u)，[Zu]_{kj} = Z_j u_k

    Returns:
        (Zu, Zbar_u)，形如 (..., n, n) 的复数组
    """
    n = M.shape[-1] // 2
    P = M[..., :n, :n]
    Qb = M[..., :n, n:]
    R = M[..., n:, :n]
    S = M[..., n:, n:]
    Zu = 0.5 * ((P + S) + 1j * (R - Qb))
    Zbar = 0.5 * ((P - S) + 1j * (R + Qb))
    return Zu, Zbar


def q_blocks(M: np.ndarray):
    """批量计算四个分量，M 形如 (..., 2n, 2n)"""
    n = M.shape[-1] // 2
    J = symplectic_matrix(n)
    Mt = np.swapaxes(M, -1, -2)
    sym = 0.5 * (M + Mt)
    anti = 0.5 * (M + J @ M @ J)
    Zu, Zbar = z_derivatives(M)
    csym = 0.5 * (Zu + np.conj(np.swapaxes(Zu, -1, -2)))
    return sym, anti, csym, Zbar


def q_norms(M: np.ndarray) -> np.ndarray:
    """批量 |Qu|（实打包）"""
    sym, anti, _, _ = q_blocks(M)
    return np.hypot(_opnorm(sym), _opnorm(anti))


def q_from_matrix(M: np.ndarray) -> QValue:
    sym, anti, csym, Zbar = q_blocks(np.asarray(M, dtype=float))
    return QValue(sym, anti, csym, Zbar)


def q_apply(u: SmoothMap, x: HPoint, scheme: Optional[str] = None, h: Optional[float] = None) -> QValue:
    """Qu(x)；群值映射取其前 2n 个坐标"""
    u = horizontal_part(u)
    M, _ = horizontal_matrices(u, x.coords, scheme, h)
    return q_from_matrix(M)


# ---------------------------------------------------------------------------
# 位移 x⁻¹·f(x) 与主估计
# ---------------------------------------------------------------------------

def displacement_coords(f: SmoothMap, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return group_mul(group_inv(X), f.evaluate(X))


def displacement(f: SmoothMap, x: HPoint) -> HPoint:
    """u(x) = x⁻¹·f(x)，前 2n 个坐标为 ψ，最后一个为 χ"""
    return HPoint.from_coords(displacement_coords(f, x.coords))


def vertical_displacement(x: np.ndarray, fx: np.ndarray) -> np.ndarray:
    """χ = f_t − t + 2Σ_j (x_j f_{j+n} − x_{j+n} f_j)"""
    x = np.asarray(x, dtype=float)
    fx = np.asarray(fx, dtype=float)
    n = (x.shape[-1] - 1) // 2
    cross = np.sum(x[..., :n] * fx[..., n:2 * n] - x[..., n:2 * n] * fx[..., :n], axis=-1)
    return fx[..., -1] - x[..., -1] + 2.0 * cross


def main_estimate_sides(M: np.ndarray, L: float):
    """
    返回 (lhs, rhs)，lhs = |Q(x⁻¹f(x))|，rhs = ((L²−1)/2)(|E|+2) + ½|E|²，E = D_hf − I

    x⁻¹f(x) 的水平部分为 f_h − x_h，其水平微分恰为 D_hf − I。
    """
    M = np.asarray(M, dtype=float)
    E = M - np.eye(M.shape[-1])
    e = _opnorm(E)
    lhs = q_norms(E)
    rhs = 0.5 * (L * L - 1.0) * (e + 2.0) + 0.5 * e * e
    return lhs, rhs


def main_estimate_residual(f: SmoothMap, x: HPoint, L: float, scheme: Optional[str] = None,
                           h: Optional[float] = None) -> float:
    """主估计的 RHS − LHS；λ ≤ 0 时不成立前提，抛 OrientationError"""
    hd = horiz_diff(f, x, scheme, h)
    if not hd.lam > 0:
        raise OrientationError(f"{f.label}: λ(x, f) = {hd.lam:.6g} ≤ 0，主估计不适用")
    lhs, rhs = main_estimate_sides(hd.M, L)
    return float(rhs - lhs)
