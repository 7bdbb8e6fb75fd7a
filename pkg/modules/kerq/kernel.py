"""
Q 的核 - Kernel Elements of Q

n > 1:  u(z, t) = a + Kz，K 反厄米
n = 1:  u(z, t) = a + ikz + tb + iz²b̄ + i|z|²b，a, b ∈ ℂ，k ∈ ℝ（五个实参数）

求值结果以实坐标 (Re u, Im u) 给出，与 hcalc 的向量值映射约定一致。
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from modules.hgroup import real_form, random_skew_hermitian, InvalidParameterError, PreconditionError
from modules.hcalc import SmoothMap, vector_map

SKEW_TOL = 1e-12


class KernelMode(Enum):
    """核元素的两种形式"""
    GENERAL_N = "general_n"
    SPECIAL_N1 = "special_n1"


def _complex_coords(X: np.ndarray, n: int):
    return X[..., :n] + 1j * X[..., n:2 * n], X[..., -1]


def _pack(U: np.ndarray) -> np.ndarray:
    return np.concatenate([U.real, U.imag], axis=-1)


@dataclass(frozen=True, eq=False)
class KernelElement:
    """ker Q 中的元素"""
    mode: KernelMode
    a: np.ndarray
    K: Optional[np.ndarray] = None
    b: complex = 0j
    k: float = 0.0

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=complex))
        object.__setattr__(self, 'a', a)
        if self.mode is KernelMode.GENERAL_N:
            if self.K is None:
                raise InvalidParameterError("general_n 形式需要矩阵 K")
            K = np.asarray(self.K, dtype=complex)
            if K.shape != (a.size, a.size):
                raise InvalidParameterError(f"K 的形状 {K.shape} 与 a 的长度 {a.size} 不一致")
            defect = float(np.max(np.abs(K + K.conj().T))) if K.size else 0.0
            if defect > SKEW_TOL:
                raise InvalidParameterError(f"K 不是反厄米矩阵: |K+K*| = {defect:.3e}")
            object.__setattr__(self, 'K', K)
        elif a.size != 1:
            raise PreconditionError("special_n1 形式只在 n = 1 时存在")

    @property
    def n(self) -> int:
        return self.a.size

    def evaluate(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        z, t = _complex_coords(X, self.n)
        if self.mode is KernelMode.GENERAL_N:
            U = self.a + z @ self.K.T
        else:
            z1 = z[..., 0]
            b = complex(self.b)
            U = (self.a[0] + 1j * self.k * z1 + t * b + 1j * z1 ** 2 * np.conj(b)
                 + 1j * np.abs(z1) ** 2 * b)[..., None]
        return _pack(U)

    def partials(self, X) -> np.ndarray:
        """欧氏雅可比矩阵，形如 (..., 2n, 2n+1)"""
        X = np.asarray(X, dtype=float)
        n = self.n
        if self.mode is KernelMode.GENERAL_N:
            J = np.zeros((2 * n, 2 * n + 1))
            J[:, :2 * n] = real_form(self.K)
            return np.broadcast_to(J, X.shape[:-1] + J.shape).copy()
        x, y = X[..., 0], X[..., 1]
        z = x + 1j * y
        b = complex(self.b)
        du_dx = 1j * self.k + 2j * z * np.conj(b) + 2j * x * b
        du_dy = -self.k - 2.0 * z * np.conj(b) + 2j * y * b
        du_dt = np.full(np.shape(x), b)
        cols = np.stack([du_dx, du_dy, du_dt], axis=-1)
        return np.stack([cols.real, cols.imag], axis=-2)

    def as_map(self) -> SmoothMap:
        return vector_map(self.n, self.evaluate, self.partials, label=f'kernel[{self.mode.value}]')

    def allclose(self, other: 'KernelElement', atol: float = 1e-9) -> bool:
        if self.mode is not other.mode or self.n != other.n:
            return False
        if not np.allclose(self.a, other.a, rtol=0.0, atol=atol):
            return False
        if self.mode is KernelMode.GENERAL_N:
            return bool(np.allclose(self.K, other.K, rtol=0.0, atol=atol))
        return abs(complex(self.b) - complex(other.b)) <= atol and abs(self.k - other.k) <= atol


def random_kernel_element(n: int, rng: np.random.Generator, scale: float = 1.0,
                          mode: Optional[KernelMode] = None) -> KernelElement:
    """随机核元素；n = 1 时默认取五参数族"""
    if mode is None:
        mode = KernelMode.SPECIAL_N1 if n == 1 else KernelMode.GENERAL_N
    a = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    if mode is KernelMode.GENERAL_N:
        return KernelElement(mode, a, K=scale * random_skew_hermitian(n, rng))
    b = scale * complex(rng.standard_normal(), rng.standard_normal())
    return KernelElement(mode, a, b=b, k=scale * float(rng.standard_normal()))
