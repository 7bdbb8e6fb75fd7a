"""
等距变换 - Isometries of the Heisenberg Group

θ = ι^r ∘ π_a ∘ φ_A，其中
- φ_A(z, t) = (Az, t)，A ∈ U(n)
- π_a(x) = a·x 左平移
- ι(z, t) = (z̄, −t) 反射

规范形把反射放在最后。复合与求逆通过恒等式
ι∘φ_A = φ_Ā∘ι、ι∘π_a = π_{ι(a)}∘ι 重新整理成规范形。
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from .errors import NonUnitaryRotationError, DimensionMismatchError, InvalidParameterError
from .group import HPoint, group_mul, group_dilate, dim_of, as_coords, PointLike

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-12


def real_form(A: np.ndarray) -> np.ndarray:
    """复矩阵 A 在实坐标 (Re z, Im z) 上的 2n×2n 表示"""
    A = np.asarray(A, dtype=complex)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def complex_form(R: np.ndarray) -> np.ndarray:
    """real_form 的逆：取左上与左下块"""
    R = np.asarray(R, dtype=float)
    n = R.shape[0] // 2
    return R[:n, :n] + 1j * R[n:, :n]


def reflect_coords(X) -> np.ndarray:
    """ι(z, t) = (z̄, −t)，作用在坐标数组上"""
    X = np.array(X, dtype=float)
    n = dim_of(X)
    X[..., n:] *= -1.0
    return X


def rotate_coords(A: np.ndarray, X) -> np.ndarray:
    """φ_A(z, t) = (Az, t)，作用在坐标数组上"""
    X = np.asarray(X, dtype=float)
    n = dim_of(X)
    Z = (X[..., :n] + 1j * X[..., n:2 * n]) @ np.asarray(A).T
    out = np.empty_like(X)
    out[..., :n] = Z.real
    out[..., n:2 * n] = Z.imag
    out[..., -1] = X[..., -1]
    return out


def unitarity_defect(A: np.ndarray) -> float:
    """|A*A − I|（算子范数）"""
    A = np.asarray(A, dtype=complex)
    return float(np.linalg.norm(A.conj().T @ A - np.eye(A.shape[0]), 2))


@dataclass(frozen=True, eq=False)
class Isometry:
    """
    规范形等距变换 ι^reflect ∘ π_translation ∘ φ_rotation

    Attributes:
        rotation: n×n 酉矩阵 A
        translation: 左平移量 a
        reflect: 是否在最后施加 ι
    """
    rotation: np.ndarray
    translation: HPoint
    reflect: bool = False

    def __post_init__(self):
        A = np.array(self.rotation, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionMismatchError(f"旋转矩阵必须是方阵: {A.shape}")
        if A.shape[0] != self.translation.n:
            raise DimensionMismatchError(
                f"旋转维数 {A.shape[0]} 与平移维数 {self.translation.n} 不一致")
        defect = unitarity_defect(A)
        if defect > UNITARY_TOL:
            raise NonUnitaryRotationError(f"旋转部分不是酉矩阵: |A*A−I| = {defect:.3e}")
        A.setflags(write=False)
        object.__setattr__(self, 'rotation', A)
        object.__setattr__(self, 'reflect', bool(self.reflect))

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> 'Isometry':
        return cls(np.eye(n, dtype=complex), HPoint.identity(n), False)

    @classmethod
    def translation_only(cls, a: HPoint) -> 'Isometry':
        return cls(np.eye(a.n, dtype=complex), a, False)

    @classmethod
    def rotation_only(cls, A: np.ndarray) -> 'Isometry':
        A = np.asarray(A, dtype=complex)
        return cls(A, HPoint.identity(A.shape[0]), False)

    @classmethod
    def reflection(cls, n: int) -> 'Isometry':
        return cls(np.eye(n, dtype=complex), HPoint.identity(n), True)

    # ------------------------------------------------------------------
    # 作用
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.translation.n

    @property
    def lam(self) -> float:
        """竖直乘子 λ = (−1)^reflect"""
        return -1.0 if self.reflect else 1.0

    def apply_coords(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != 2 * self.n + 1:
            raise DimensionMismatchError(f"点的维数与等距变换不一致: {X.shape[-1]}")
        Y = group_mul(self.translation.coords, rotate_coords(self.rotation, X))
        return reflect_coords(Y) if self.reflect else Y

    def apply(self, x: HPoint) -> HPoint:
        return HPoint.from_coords(self.apply_coords(x.coords))

    def __call__(self, x: PointLike):
        if isinstance(x, HPoint):
            return self.apply(x)
        return self.apply_coords(x)

    def compose(self, other: 'Isometry') -> 'Isometry':
        """self ∘ other（先作用 other）"""
        if other.n != self.n:
            raise DimensionMismatchError(f"等距变换维数不一致: {self.n} vs {other.n}")
        A1, a1 = self.rotation, self.translation.coords
        A2, a2 = other.rotation, other.translation.coords
        if other.reflect:
            A1 = A1.conj()
            a1 = reflect_coords(a1)
        translation = group_mul(a1, rotate_coords(A1, a2))
        return Isometry(A1 @ A2, HPoint.from_coords(translation), self.reflect != other.reflect)

    def inverse(self) -> 'Isometry':
        A_star = self.rotation.conj().T
        c = rotate_coords(A_star, -self.translation.coords)
        if not self.reflect:
            return Isometry(A_star, HPoint.from_coords(c), False)
        return Isometry(self.rotation.T, HPoint.from_coords(reflect_coords(c)), True)

    def dh(self) -> np.ndarray:
        """常值水平微分 diag(I, −I)^reflect · R(A)"""
        R = real_form(self.rotation)
        if self.reflect:
            R[self.n:, :] *= -1.0
        return R

    def conjugate_by_dilation(self, r: float) -> 'Isometry':
        """δ_r ∘ θ ∘ δ_{1/r} = ι^q π_{δ_r b} φ_A"""
        b = group_dilate(r, self.translation.coords)
        return Isometry(self.rotation, HPoint.from_coords(b), self.reflect)

    def allclose(self, other: 'Isometry', atol: float = 1e-10) -> bool:
        return (self.n == other.n and self.reflect == other.reflect
                and np.allclose(self.rotation, other.rotation, rtol=0.0, atol=atol)
                and self.translation.allclose(other.translation, atol=atol))

    def to_dict(self) -> dict:
        return {
            'rotation_real': self.rotation.real.tolist(),
            'rotation_imag': self.rotation.imag.tolist(),
            'translation': [float(v) for v in self.translation.coords],
            'reflect': self.reflect,
        }

    def __repr__(self) -> str:
        return (f"Isometry(n={self.n}, reflect={self.reflect}, "
                f"translation={self.translation!r})")


# ---------------------------------------------------------------------------
# 函数式接口
# ---------------------------------------------------------------------------

def isometry_apply(theta: Isometry, x: HPoint) -> HPoint:
    return theta.apply(x)


def isometry_compose(theta1: Isometry, theta2: Isometry) -> Isometry:
    return theta1.compose(theta2)


def isometry_invert(theta: Isometry) -> Isometry:
    return theta.inverse()


def isometry_dh(theta: Isometry) -> np.ndarray:
    return theta.dh()


# ---------------------------------------------------------------------------
# 随机生成与投影
# ---------------------------------------------------------------------------

def nearest_unitary(M: np.ndarray) -> np.ndarray:
    """极分解的酉因子（Frobenius意义下最近的酉矩阵）"""
    U, _ = linalg.polar(np.asarray(M, dtype=complex))
    return U


def random_skew_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    """算子范数为 1 的随机反厄米矩阵"""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    K = 0.5 * (G - G.conj().T)
    return K / np.linalg.norm(K, 2)


def random_unitary(n: int, rng: np.random.Generator, scale: Optional[float] = None) -> np.ndarray:
    """
    随机酉矩阵

    Args:
        scale: None 时按 Haar 测度采样；否则返回 expm(scale·K)，|K| = 1
    """
    if scale is None:
        A = unitary_group.rvs(n, random_state=rng)
        return np.atleast_2d(A)
    return nearest_unitary(linalg.expm(scale * random_skew_hermitian(n, rng)))


def random_isometry(n: int, rng: np.random.Generator, reflect: bool = False,
                    translation_scale: float = 1.0,
                    rotation_scale: Optional[float] = None) -> Isometry:
    """随机等距变换：平移的水平部分按 translation_scale，竖直部分按其平方缩放"""
    if translation_scale < 0:
        raise InvalidParameterError(f"平移尺度不能为负: {translation_scale}")
    z = translation_scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2 * n)
    t = translation_scale ** 2 * rng.standard_normal()
    return Isometry(random_unitary(n, rng, rotation_scale), HPoint(z, t), reflect)


def isometry_from_map(f: Callable[[np.ndarray], np.ndarray], n: int) -> Isometry:
    """
    从黑箱等距映射恢复规范形

    等距变换的 z 部分关于实坐标是仿射的，t 方向的增量为 ±1，
    所以 f(0)、f(e_i) 足以精确确定 (A, a, reflect)。
    """
    d = 2 * n + 1
    origin = np.asarray(f(np.zeros(d)), dtype=float)
    reflect = bool(np.asarray(f(np.eye(d)[-1]), dtype=float)[-1] - origin[-1] < 0)
    P = np.column_stack([np.asarray(f(np.eye(d)[i]), dtype=float)[:2 * n] - origin[:2 * n]
                         for i in range(2 * n)])
    if reflect:
        P[n:, :] *= -1.0
        origin = reflect_coords(origin)
    A = nearest_unitary(complex_form(P))
    logger.debug(f"恢复等距变换: reflect={reflect}, |A−I|={np.linalg.norm(A - np.eye(n), 2):.3e}")
    return Isometry(A, HPoint.from_coords(as_coords(origin)), reflect)
