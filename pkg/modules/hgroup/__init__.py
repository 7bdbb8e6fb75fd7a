"""
Heisenberg Group Package - 海森堡群包

ℍⁿ 上的精确群运算、Korányi 度量、左不变标架与等距变换群。

包含：
- HPoint / GroupDim: 点与维数常数
- mul / inv / dilate / knorm / kdist 及其批量形式
- frame_vectors, check_commutators, check_left_invariance
- Ball / Box 及体积公式
- Isometry 规范形与随机生成
- Sobol 采样器
- 全库共享的异常层次
"""

from .errors import (
    RigidityLabError,
    DimensionMismatchError,
    InvalidParameterError,
    NonUnitaryRotationError,
    StencilError,
    OrientationError,
    QuadratureError,
    PreconditionError,
    SingularMomentError,
    DomainError,
    ChainConstructionError,
    CoverageError,
    ConfigError,
)
from .group import (
    GroupDim,
    HPoint,
    as_coords,
    dim_of,
    mul,
    inv,
    dilate,
    knorm,
    kdist,
    symplectic_form,
    group_mul,
    group_inv,
    group_dilate,
    group_norm,
    group_dist,
)
from .frame import (
    vertical_coefficients,
    frame_matrix,
    frame_vectors,
    frame_affine,
    lie_bracket,
    check_commutators,
    check_left_invariance,
)
from .volumes import Ball, Box, ball_volume, box_volume, box_second_moment, unit_ball_volume
from .isometry import (
    Isometry,
    isometry_apply,
    isometry_compose,
    isometry_invert,
    isometry_dh,
    isometry_from_map,
    nearest_unitary,
    random_unitary,
    random_skew_hermitian,
    random_isometry,
    real_form,
    complex_form,
    reflect_coords,
    rotate_coords,
    unitarity_defect,
)
from .sampling import BoxSampler, sample_box, sample_ball, sample_region, sample_sphere

__version__ = "1.0.0"

__all__ = [
    'RigidityLabError', 'DimensionMismatchError', 'InvalidParameterError', 'NonUnitaryRotationError',
    'StencilError', 'OrientationError', 'QuadratureError', 'PreconditionError', 'SingularMomentError',
    'DomainError', 'ChainConstructionError', 'CoverageError', 'ConfigError',
    'GroupDim', 'HPoint', 'as_coords', 'dim_of', 'mul', 'inv', 'dilate', 'knorm', 'kdist',
    'symplectic_form', 'group_mul', 'group_inv', 'group_dilate', 'group_norm', 'group_dist',
    'vertical_coefficients', 'frame_matrix', 'frame_vectors', 'frame_affine', 'lie_bracket',
    'check_commutators', 'check_left_invariance',
    'Ball', 'Box', 'ball_volume', 'box_volume', 'box_second_moment', 'unit_ball_volume',
    'Isometry', 'isometry_apply', 'isometry_compose', 'isometry_invert', 'isometry_dh',
    'isometry_from_map', 'nearest_unitary', 'random_unitary', 'random_skew_hermitian',
    'random_isometry', 'real_form', 'complex_form', 'reflect_coords', 'rotate_coords',
    'unitarity_defect',
    'BoxSampler', 'sample_box', 'sample_ball', 'sample_region', 'sample_sphere',
]
