"""
Kernel of Q Package - Q 核与等距拟合包

包含：
- KernelElement: ker Q 的两种形式（n > 1 与 n = 1 五参数族）
- Gauss–Legendre 盒/球求积
- moments / project_P: 盒矩 A(u)、a(u) 与投影 P
- lemma4_correction: 循环 Jacobi + 酉修正
- IsometryFitter: coercive 与 oracle 两种拟合
- sup/sobolev/指数可积偏差与 BMO 型量
"""

from .kernel import KernelMode, KernelElement, random_kernel_element
from .quadrature import box_rule, ball_rule, integrate_box, ball_mean, node_count
from .moments import (
    MomentData,
    moments,
    moment_constants,
    moment_box,
    project_P,
    rotate_vector_map,
    DEFAULT_ORDER,
    default_order,
)
from .correction import (
    EigenData,
    UnitaryCorrection,
    jacobi_eigh,
    stated_bound,
    eps_precondition,
    moment_delta_bound,
    correction_bound,
    correction_from_moments,
    lemma4_correction,
)
from .deviation import (
    region_points,
    pointwise_distance,
    sup_deviation,
    sobolev_deviation,
    exp_integrability,
    log_exp_integrability,
    largest_exponent_below,
    mean_oscillation,
    john_nirenberg_functional,
)
from .fitting import (
    FitResult,
    IsometryFitter,
    skew_from_params,
    complex_linear_part,
    fit_isometry_coercive,
    fit_isometry_oracle,
)

__all__ = [
    'KernelMode', 'KernelElement', 'random_kernel_element',
    'box_rule', 'ball_rule', 'integrate_box', 'ball_mean', 'node_count',
    'MomentData', 'moments', 'moment_constants', 'moment_box', 'project_P', 'rotate_vector_map',
    'DEFAULT_ORDER', 'default_order',
    'EigenData', 'UnitaryCorrection', 'jacobi_eigh', 'stated_bound', 'eps_precondition',
    'moment_delta_bound', 'correction_bound', 'correction_from_moments', 'lemma4_correction',
    'region_points', 'pointwise_distance', 'sup_deviation', 'sobolev_deviation', 'exp_integrability',
    'log_exp_integrability', 'largest_exponent_below', 'mean_oscillation', 'john_nirenberg_functional',
    'FitResult', 'IsometryFitter', 'skew_from_params', 'complex_linear_part',
    'fit_isometry_coercive', 'fit_isometry_oracle',
]
