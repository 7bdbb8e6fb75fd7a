#!/usr/bin/env python3
"""
海森堡群运算 - Heisenberg Group Arithmetic

ℍⁿ 上的精确群运算、伸缩与 Korányi 范数。

坐标约定：
- 点 x = (z, t)，z ∈ ℂⁿ，t ∈ ℝ
- 实坐标 x_j = Re z_j，x_{j+n} = Im z_j，x_{2n+1} = t
- 群律 (z,t)·(w,s) = (z+w, t+s+2·Im⟨z,w⟩)，⟨z,w⟩ = Σ z_j w̄_j

批量运算直接作用在形如 (..., 2n+1) 的实坐标数组上，
HPoint 只是单点的不可变包装。
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError


@dataclass(frozen=True)
class GroupDim:
    """群的维数信息：复维数 n、齐次维数 ν、常数 ϰ"""
    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidParameterError(f"复维数必须是正整数: {self.n}")

    @property
    def nu(self) -> int:
        return 2 * self.n + 2

    @property
    def kappa(self) -> float:
        return (4 * self.n ** 2 + 1) ** -0.25

    @property
    def coord_dim(self) -> int:
        return 2 * self.n + 1


@dataclass(frozen=True, eq=False)
class HPoint:
    """ℍⁿ 中的点 (z, t)"""
    z: np.ndarray
    t: float

    def __post_init__(self):
        z = np.array(self.z, dtype=complex).reshape(-1)
        z.setflags(write=False)
        object.__setattr__(self, 'z', z)
        object.__setattr__(self, 't', float(self.t))
        if z.size == 0:
            raise InvalidParameterError("HPoint 至少需要一个复坐标")
        if not (np.all(np.isfinite(z)) and math.isfinite(self.t)):
            raise InvalidParameterError(f"HPoint 坐标必须有限: z={z}, t={self.t}")

    @property
    def n(self) -> int:
        return self.z.size

    @property
    def coords(self) -> np.ndarray:
        """实坐标 (x_1..x_n, x_{n+1}..x_{2n}, t)"""
        return np.concatenate([self.z.real, self.z.imag, [self.t]])

    @classmethod
    def from_coords(cls, coords) -> 'HPoint':
        coords = np.asarray(coords, dtype=float).reshape(-1)
        if coords.size < 3 or coords.size % 2 == 0:
            raise DimensionMismatchError(f"实坐标长度必须为 2n+1: {coords.size}")
        n = (coords.size - 1) // 2
        return cls(coords[:n] + 1j * coords[n:2 * n], coords[-1])

    @classmethod
    def identity(cls, n: int) -> 'HPoint':
        return cls(np.zeros(n, dtype=complex), 0.0)

    def allclose(self, other: 'HPoint', atol: float = 1e-12) -> bool:
        return self.n == other.n and np.allclose(self.coords, other.coords, rtol=0.0, atol=atol)

    def __repr__(self) -> str:
        return f"HPoint(z={np.array2string(self.z, precision=6)}, t={self.t:.6g})"


PointLike = Union[HPoint, np.ndarray]


def dim_of(coords: np.ndarray) -> int:
    """由坐标数组最后一维推出 n"""
    d = np.shape(coords)[-1]
    if d < 3 or d % 2 == 0:
        raise DimensionMismatchError(f"坐标维数必须为 2n+1: {d}")
    return (d - 1) // 2


def as_coords(x: PointLike) -> np.ndarray:
    """HPoint 或坐标数组统一转成浮点数组"""
    if isinstance(x, HPoint):
        return x.coords
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------
# 批量运算（坐标数组）
# ---------------------------------------------------------------------------

def symplectic_form(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """ω(x, y) = Σ_j (x_{j+n} y_j − x_j y_{j+n}) = Im⟨z, w⟩"""
    n = dim_of(X)
    return (np.sum(X[..., n:2 * n] * Y[..., :n], axis=-1)
            - np.sum(X[..., :n] * Y[..., n:2 * n], axis=-1))


def group_mul(X, Y) -> np.ndarray:
    """坐标形式的群乘法，支持广播"""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape[-1] != Y.shape[-1]:
        raise DimensionMismatchError(f"维数不一致: {X.shape[-1]} vs {Y.shape[-1]}")
    out = X + Y
    out[..., -1] = out[..., -1] + 2.0 * symplectic_form(X, Y)
    return out


def group_inv(X) -> np.ndarray:
    """x⁻¹ = −x（指数坐标）"""
    return -np.asarray(X, dtype=float)


def group_dilate(s: float, X) -> np.ndarray:
    """δ_s(z, t) = (s z, s² t)"""
    if not s > 0:
        raise InvalidParameterError(f"伸缩因子必须为正: {s}")
    X = np.array(X, dtype=float)
    X[..., :-1] *= s
    X[..., -1] *= s * s
    return X


def group_norm(X) -> np.ndarray:
    """Korányi 范数 ρ(z,t) = (|z|⁴ + t²)^{1/4}"""
    X = np.asarray(X, dtype=float)
    zz = np.sum(X[..., :-1] ** 2, axis=-1)
    return (zz * zz + X[..., -1] ** 2) ** 0.25


def group_dist(X, Y) -> np.ndarray:
    """ρ(x, y) = ρ(x⁻¹·y)"""
    return group_norm(group_mul(group_inv(X), Y))


# ---------------------------------------------------------------------------
# 单点接口
# ---------------------------------------------------------------------------

def _check_same_dim(x: HPoint, y: HPoint) -> None:
    if x.n != y.n:
        raise DimensionMismatchError(f"点的维数不一致: n={x.n} vs n={y.n}")


def mul(x: HPoint, y: HPoint) -> HPoint:
    """群乘法 x·y"""
    _check_same_dim(x, y)
    return HPoint(x.z + y.z, x.t + y.t + 2.0 * np.vdot(y.z, x.z).imag)


def inv(x: HPoint) -> HPoint:
    """群逆元"""
    return HPoint(-x.z, -x.t)


def dilate(s: float, x: HPoint) -> HPoint:
    """伸缩 δ_s"""
    if not s > 0:
        raise InvalidParameterError(f"伸缩因子必须为正: {s}")
    return HPoint(s * x.z, s * s * x.t)


def knorm(x: HPoint) -> float:
    """Korányi 范数"""
    zz = float(np.vdot(x.z, x.z).real)
    return (zz * zz + x.t * x.t) ** 0.25


def kdist(x: HPoint, y: HPoint) -> float:
    """左不变度量 ρ(x⁻¹·y)"""
    _check_same_dim(x, y)
    return knorm(mul(inv(x), y))
