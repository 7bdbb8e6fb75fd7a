"""
球与盒 - Balls, Boxes and Their Volumes

Ball(a, r) = {x : ρ(a, x) < r}
Box(a, r)  = {a·y : |y_i| < r (i ≤ 2n), |y_{2n+1}| < r²}

体积公式：
- |Box(a, r)| = 2^{2n+1} r^ν
- ∫_{Box(0,r)} |z_i|² dx = 2^ν r^{ν+2} / 3
- |B(x, r)| = r^ν |B(0,1)|，其中 |B(0,1)| 用自适应求积计算一次并按 n 缓存
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError, DimensionMismatchError
from .group import HPoint, GroupDim, group_dist, group_mul, group_inv, as_coords


def _check_radius(r: float) -> None:
    if not (r > 0 and math.isfinite(r)):
        raise InvalidParameterError(f"半径必须为正: {r}")


@lru_cache(maxsize=None)
def unit_ball_volume(n: int) -> float:
    """|B(0,1)|：对 t 积分 2n 维欧氏球体积 ω_{2n}(1−t²)^{n/2}"""
    GroupDim(n)
    omega = math.pi ** n / math.factorial(n)
    value, _ = integrate.quad(lambda t: omega * (1.0 - t * t) ** (n / 2.0), -1.0, 1.0,
                              epsabs=0.0, epsrel=1e-12, limit=200)
    return value


def ball_volume(r: float, n: int) -> float:
    _check_radius(r)
    return r ** GroupDim(n).nu * unit_ball_volume(n)


def box_volume(r: float, n: int) -> float:
    _check_radius(r)
    return 2.0 ** (2 * n + 1) * r ** GroupDim(n).nu


def box_second_moment(r: float, n: int, i: int = 1) -> float:
    """∫_{Box(0,r)} |z_i|² dx，与 i 无关"""
    _check_radius(r)
    if not 1 <= i <= n:
        raise InvalidParameterError(f"坐标下标 i 必须在 1..{n}: {i}")
    nu = GroupDim(n).nu
    return 2.0 ** nu * r ** (nu + 2) / 3.0


@dataclass(frozen=True)
class Ball:
    """Korányi 球 B(center, radius)"""
    center: HPoint
    radius: float

    def __post_init__(self):
        _check_radius(self.radius)

    @property
    def n(self) -> int:
        return self.center.n

    def contains(self, X) -> np.ndarray:
        return group_dist(self.center.coords, as_coords(X)) < self.radius

    def scaled(self, s: float) -> 'Ball':
        return Ball(self.center, s * self.radius)

    def volume(self) -> float:
        return ball_volume(self.radius, self.n)

    def to_dict(self) -> dict:
        return {'center': [float(v) for v in self.center.coords], 'radius': float(self.radius)}


@dataclass(frozen=True)
class Box:
    """盒 Box(center, radius)"""
    center: HPoint
    radius: float

    def __post_init__(self):
        _check_radius(self.radius)

    @property
    def n(self) -> int:
        return self.center.n

    def local_coords(self, X) -> np.ndarray:
        """y = a⁻¹·x"""
        X = as_coords(X)
        if X.shape[-1] != 2 * self.n + 1:
            raise DimensionMismatchError(f"坐标维数与盒不一致: {X.shape[-1]}")
        return group_mul(group_inv(self.center.coords), X)

    def contains(self, X) -> np.ndarray:
        Y = self.local_coords(X)
        r = self.radius
        return np.all(np.abs(Y[..., :-1]) < r, axis=-1) & (np.abs(Y[..., -1]) < r * r)

    def volume(self) -> float:
        return box_volume(self.radius, self.n)

    def to_dict(self) -> dict:
        return {'center': [float(v) for v in self.center.coords], 'radius': float(self.radius)}
