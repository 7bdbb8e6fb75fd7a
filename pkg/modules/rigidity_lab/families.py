"""
拟等距映射族 - Quasi-isometry Families

ε ↦ f_ε，每个 f_ε 都是 (1+ε)-拟等距的接触映射：
- dilation:             δ_{1+ε}
- conjugated_dilation:  θ₁∘δ_{1+ε}∘θ₂，θ₁、θ₂ 由种子确定
- reflected_dilation:   ι∘δ_{1+ε}（KR 定向为负）
- pure_isometry:        与 ε 无关的随机等距（对照组，偏差应为零）
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from modules.hgroup import InvalidParameterError, ConfigError, random_isometry
from modules.hcalc import SmoothMap, compose_all, dilation_map, isometry_map, reflection_map

logger = logging.getLogger(__name__)

Family = Callable[[float], SmoothMap]


class FamilyKind(Enum):
    """映射族名称"""
    DILATION = 'dilation'
    CONJUGATED_DILATION = 'conjugated_dilation'
    REFLECTED_DILATION = 'reflected_dilation'
    PURE_ISOMETRY = 'pure_isometry'


SEEDED = (FamilyKind.CONJUGATED_DILATION, FamilyKind.PURE_ISOMETRY)


@dataclass(frozen=True)
class FamilySpec:
    """映射族说明；seed 只对带随机等距的族有意义"""
    kind: FamilyKind
    seed: Optional[int] = None

    @classmethod
    def parse(cls, value: Union[str, dict, 'FamilySpec'], default_seed: int = 0) -> 'FamilySpec':
        """
        接受 "dilation"、"conjugated_dilation(7)" 或 {"name": ..., "seed": ...}
        """
        if isinstance(value, FamilySpec):
            return value
        if isinstance(value, dict):
            name, seed = value.get('name'), value.get('seed')
        elif isinstance(value, str):
            m = re.fullmatch(r'\s*([a-z_]+)\s*(?:\(\s*(-?\d+)\s*\))?\s*', value)
            if not m:
                raise ConfigError(f"无法解析映射族: {value!r}")
            name, seed = m.group(1), (int(m.group(2)) if m.group(2) is not None else None)
        else:
            raise ConfigError(f"映射族必须是字符串或对象: {value!r}")
        try:
            kind = FamilyKind(name)
        except ValueError:
            raise ConfigError(f"未知映射族: {name!r}（可选: {', '.join(k.value for k in FamilyKind)}）")
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
            raise ConfigError(f"映射族种子必须是非负整数: {seed!r}")
        if kind in SEEDED and seed is None:
            seed = default_seed
        return cls(kind, seed)

    def __str__(self) -> str:
        if self.kind in SEEDED:
            return f"{self.kind.value}({self.seed})"
        return self.kind.value

    def to_dict(self) -> dict:
        return {'name': self.kind.value, 'seed': self.seed}


def make_family(spec: Union[str, dict, FamilySpec], n: int) -> Family:
    """
    Args:
        spec: 映射族说明
        n: 复维数

    Returns:
        ε ↦ SmoothMap
    """
    if n < 1:
        raise InvalidParameterError(f"n 必须 ≥ 1: {n}")
    spec = FamilySpec.parse(spec)

    def check(eps: float) -> float:
        if not eps >= 0 or not eps < 1e6:
            raise InvalidParameterError(f"ε 必须为非负有限数: {eps}")
        return float(eps)

    if spec.kind is FamilyKind.DILATION:
        def family(eps):
            f = dilation_map(n, 1.0 + check(eps))
            return SmoothMap(n, f.evaluator, f.partials, label=f'dilation(ε={eps:g})')

    elif spec.kind is FamilyKind.CONJUGATED_DILATION:
        rng = np.random.default_rng(spec.seed)
        theta1 = isometry_map(random_isometry(n, rng, translation_scale=0.5))
        theta2 = isometry_map(random_isometry(n, rng, translation_scale=0.5))

        def family(eps):
            f = compose_all(theta1, dilation_map(n, 1.0 + check(eps)), theta2)
            return SmoothMap(n, f.evaluator, f.partials, label=f'conjugated_dilation(ε={eps:g})')

    elif spec.kind is FamilyKind.REFLECTED_DILATION:
        def family(eps):
            f = compose_all(reflection_map(n), dilation_map(n, 1.0 + check(eps)))
            return SmoothMap(n, f.evaluator, f.partials, label=f'reflected_dilation(ε={eps:g})')

    else:
        theta = random_isometry(n, np.random.default_rng(spec.seed), translation_scale=0.5)
        fixed = isometry_map(theta)

        def family(eps):
            check(eps)
            return SmoothMap(n, fixed.evaluator, fixed.partials, label='pure_isometry')

    logger.debug(f"映射族已构造: {spec}, n = {n}")
    return family
