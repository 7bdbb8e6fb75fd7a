"""
左不变标架 - Left-Invariant Frame

X_i = ∂_i + 2x_{i+n}∂_t,  X_{i+n} = ∂_{i+n} − 2x_i∂_t,  X_{2n+1} = ∂_t

所有标架场都是仿射向量场 V(x) = b + Lx，因此李括号和左平移的推前
都能用整数矩阵精确计算，不需要数值微分。
"""

from typing import Dict, List, Tuple

import numpy as np

from .group import as_coords, dim_of, group_mul, PointLike

AffineField = Tuple[np.ndarray, np.ndarray]


def vertical_coefficients(X) -> np.ndarray:
    """
    水平场 X_1..X_{2n} 在 ∂_t 方向的系数

    Returns:
        形如 (..., 2n) 的数组：前 n 个为 2x_{i+n}，后 n 个为 −2x_i
    """
    X = np.asarray(X, dtype=float)
    n = dim_of(X)
    return np.concatenate([2.0 * X[..., n:2 * n], -2.0 * X[..., :n]], axis=-1)


def frame_matrix(X) -> np.ndarray:
    """标架矩阵，第 i 列为 X_i 的欧氏坐标表示，形如 (..., 2n+1, 2n+1)"""
    X = np.asarray(X, dtype=float)
    n = dim_of(X)
    d = 2 * n + 1
    F = np.broadcast_to(np.eye(d), X.shape[:-1] + (d, d)).copy()
    F[..., -1, :2 * n] = vertical_coefficients(X)
    return F


def frame_vectors(x: PointLike) -> List[np.ndarray]:
    """点 x 处 X_1..X_{2n+1} 的欧氏坐标表示"""
    F = frame_matrix(as_coords(x))
    return [F[:, i].copy() for i in range(F.shape[1])]


def frame_affine(n: int) -> List[AffineField]:
    """把每个 X_i 写成仿射场 (b, L)，整数系数"""
    d = 2 * n + 1
    fields = []
    for i in range(d):
        b = np.zeros(d, dtype=np.int64)
        b[i] = 1
        L = np.zeros((d, d), dtype=np.int64)
        if i < n:
            L[-1, i + n] = 2
        elif i < 2 * n:
            L[-1, i - n] = -2
        fields.append((b, L))
    return fields


def lie_bracket(V: AffineField, W: AffineField) -> AffineField:
    """仿射场的李括号 [V, W] = DW·V − DV·W"""
    bV, LV = V
    bW, LW = W
    return LW @ bV - LV @ bW, LW @ LV - LV @ LW


def check_commutators(n: int) -> Dict[Tuple[int, int], np.ndarray]:
    """
    验证 [X_j, X_{j+n}] = −4X_{2n+1}，其余括号为零

    Returns:
        不满足关系的 (i, k) → 实际括号常数部分；空字典表示全部通过
    """
    fields = frame_affine(n)
    d = 2 * n + 1
    failures = {}
    for i in range(d):
        for k in range(d):
            b, L = lie_bracket(fields[i], fields[k])
            expected = np.zeros(d, dtype=np.int64)
            if i < n and k == i + n:
                expected[-1] = -4
            elif k < n and i == k + n:
                expected[-1] = 4
            if np.any(L != 0) or np.any(b != expected):
                failures[(i, k)] = b
    return failures


def pushforward_at_identity(p: PointLike, i: int) -> np.ndarray:
    """
    左平移 L_p 把单位元处的 X_i 推到 p

    y ↦ p·y 关于 y 是仿射的，所以导数恰为 p·e_i − p·0。
    """
    P = as_coords(p)
    e = np.zeros_like(P)
    e[i] = 1.0
    return group_mul(P, e) - group_mul(P, np.zeros_like(P))


def check_left_invariance(points: np.ndarray) -> float:
    """所有样本点、所有标架场上推前与标架之差的最大范数"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    worst = 0.0
    for p in points:
        F = frame_matrix(p)
        for i in range(p.size):
            worst = max(worst, float(np.max(np.abs(pushforward_at_identity(p, i) - F[:, i]))))
    return worst
