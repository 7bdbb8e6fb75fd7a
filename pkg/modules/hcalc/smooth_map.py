"""
光滑映射与映射代数 - Smooth Maps and Map Algebra

SmoothMap 包装一个批量求值函数（坐标数组 → 坐标数组）和可选的
解析欧氏雅可比矩阵。复合映射用链式法则合成雅可比矩阵，
因此所有内置族都带有精确偏导数。

约定：
- evaluator:  (..., 2n+1) → (..., m)，m = 2n+1（群值）或 2n（向量值）
- partials:   (..., 2n+1) → (..., m, 2n+1)，partials[j, k] = ∂f_j/∂x_k
"""

from dataclasses import dataclass
from typing import Callable, Optional, Any

import numpy as np

from modules.hgroup import (
    HPoint, Isometry, as_coords, group_mul, group_dilate, reflect_coords, rotate_coords,
    real_form, InvalidParameterError, DimensionMismatchError,
)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SmoothMap:
    """
    闭式光滑映射

    Attributes:
        n: 定义域的复维数
        evaluator: 批量求值函数
        partials: 解析雅可比矩阵（可选）
        domain: 定义域（Ball 或 MetricDomain，None 表示全空间）
        label: 名称，用于日志和报告
        contact: 是否为接触映射（内置族在构造时标记）
        vector_valued: True 表示取值于 ℝ^{2n}（≅ ℂⁿ）而非 ℍⁿ
    """
    n: int
    evaluator: Evaluator
    partials: Optional[Evaluator] = None
    domain: Any = None
    label: str = 'map'
    contact: bool = True
    vector_valued: bool = False

    @property
    def out_dim(self) -> int:
        return 2 * self.n if self.vector_valued else 2 * self.n + 1

    def evaluate(self, X) -> np.ndarray:
        X = as_coords(X)
        if X.shape[-1] != 2 * self.n + 1:
            raise DimensionMismatchError(f"{self.label}: 输入维数 {X.shape[-1]} ≠ {2 * self.n + 1}")
        return np.asarray(self.evaluator(X), dtype=float)

    def jacobian(self, X) -> np.ndarray:
        if self.partials is None:
            raise InvalidParameterError(f"{self.label}: 没有解析偏导数")
        return np.asarray(self.partials(as_coords(X)), dtype=float)

    def contains(self, X) -> np.ndarray:
        X = as_coords(X)
        if self.domain is None:
            return np.ones(X.shape[:-1], dtype=bool)
        return np.asarray(self.domain.contains(X), dtype=bool)

    def __call__(self, x):
        if isinstance(x, HPoint):
            if self.vector_valued:
                return self.evaluate(x.coords)
            return HPoint.from_coords(self.evaluate(x.coords))
        return self.evaluate(x)

    def with_domain(self, domain) -> 'SmoothMap':
        return SmoothMap(self.n, self.evaluator, self.partials, domain, self.label,
                         self.contact, self.vector_valued)


def _constant_jacobian(J: np.ndarray) -> Evaluator:
    def partials(X):
        X = np.asarray(X, dtype=float)
        return np.broadcast_to(J, X.shape[:-1] + J.shape).copy()
    return partials


# ---------------------------------------------------------------------------
# 内置映射
# ---------------------------------------------------------------------------

def identity_map(n: int) -> SmoothMap:
    d = 2 * n + 1
    return SmoothMap(n, lambda X: np.array(X, dtype=float), _constant_jacobian(np.eye(d)),
                     label='identity')


def dilation_map(n: int, s: float) -> SmoothMap:
    """δ_s"""
    if not s > 0:
        raise InvalidParameterError(f"伸缩因子必须为正: {s}")
    J = np.diag([s] * (2 * n) + [s * s])
    return SmoothMap(n, lambda X: group_dilate(s, X), _constant_jacobian(J), label=f'dilation({s:g})')


def left_translation_map(a: HPoint) -> SmoothMap:
    """π_a(x) = a·x"""
    n = a.n
    ac = a.coords
    J = np.eye(2 * n + 1)
    J[-1, :n] = 2.0 * ac[n:2 * n]
    J[-1, n:2 * n] = -2.0 * ac[:n]
    return SmoothMap(n, lambda X: group_mul(ac, X), _constant_jacobian(J), label='left_translation')


def right_translation_map(b: HPoint) -> SmoothMap:
    """x ↦ x·b，水平部分非零时不是接触映射"""
    n = b.n
    bc = b.coords
    J = np.eye(2 * n + 1)
    J[-1, :n] = -2.0 * bc[n:2 * n]
    J[-1, n:2 * n] = 2.0 * bc[:n]
    contact = bool(np.allclose(bc[:2 * n], 0.0))
    return SmoothMap(n, lambda X: group_mul(X, bc), _constant_jacobian(J),
                     label='right_translation', contact=contact)


def rotation_map(A: np.ndarray) -> SmoothMap:
    """φ_A(z, t) = (Az, t)"""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    J = np.eye(2 * n + 1)
    J[:2 * n, :2 * n] = real_form(A)
    return SmoothMap(n, lambda X: rotate_coords(A, X), _constant_jacobian(J), label='rotation')


def reflection_map(n: int) -> SmoothMap:
    """ι(z, t) = (z̄, −t)"""
    J = np.diag([1.0] * n + [-1.0] * (n + 1))
    return SmoothMap(n, reflect_coords, _constant_jacobian(J), label='reflection')


def isometry_map(theta: Isometry) -> SmoothMap:
    """等距变换作为 SmoothMap，雅可比矩阵由三个因子链式合成"""
    f = compose(left_translation_map(theta.translation), rotation_map(theta.rotation))
    if theta.reflect:
        f = compose(reflection_map(theta.n), f)
    return SmoothMap(theta.n, theta.apply_coords, f.partials, label='isometry')


def perturbed_map(n: int, eta: float, seed: int = 0, frequency: float = 1.0) -> SmoothMap:
    """
    非接触的光滑测试映射 f_j = x_j + η a_j sin(w_j·x + φ_j)

    用于差分收敛阶与一般映射上的恒等式检查。
    """
    d = 2 * n + 1
    rng = np.random.default_rng(seed)
    amp = rng.uniform(-1.0, 1.0, d)
    W = frequency * rng.standard_normal((d, d))
    phase = rng.uniform(0.0, 2 * np.pi, d)

    def evaluator(X):
        X = np.asarray(X, dtype=float)
        return X + eta * amp * np.sin(X @ W.T + phase)

    def partials(X):
        X = np.asarray(X, dtype=float)
        c = eta * amp * np.cos(X @ W.T + phase)
        return np.eye(d) + c[..., :, None] * W

    return SmoothMap(n, evaluator, partials, label=f'perturbed({eta:g})', contact=False)


def vector_map(n: int, evaluator: Evaluator, partials: Optional[Evaluator] = None,
               label: str = 'vector_map') -> SmoothMap:
    """ℍⁿ → ℝ^{2n} 的映射（Q 的作用对象）"""
    return SmoothMap(n, evaluator, partials, label=label, contact=False, vector_valued=True)


def horizontal_part(f: SmoothMap) -> SmoothMap:
    """取群值映射的前 2n 个坐标，得到向量值映射"""
    if f.vector_valued:
        return f
    m = 2 * f.n
    partials = None if f.partials is None else (lambda X: f.partials(X)[..., :m, :])
    return vector_map(f.n, lambda X: f.evaluator(X)[..., :m], partials, label=f'h({f.label})')


def compose(f: SmoothMap, g: SmoothMap) -> SmoothMap:
    """f ∘ g，两者都有解析偏导数时按链式法则合成"""
    if g.vector_valued:
        raise DimensionMismatchError("内层映射必须是群值映射")
    if f.n != g.n:
        raise DimensionMismatchError(f"映射维数不一致: {f.n} vs {g.n}")

    def evaluator(X):
        return f.evaluator(g.evaluator(X))

    partials = None
    if f.partials is not None and g.partials is not None:
        def partials(X):
            return f.partials(g.evaluator(X)) @ g.partials(X)

    return SmoothMap(f.n, evaluator, partials, domain=g.domain, label=f'{f.label}∘{g.label}',
                     contact=f.contact and g.contact, vector_valued=f.vector_valued)


def compose_all(*maps: SmoothMap) -> SmoothMap:
    """compose_all(f, g, h) = f∘g∘h"""
    if not maps:
        raise InvalidParameterError("至少需要一个映射")
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = compose(m, out)
    return out
