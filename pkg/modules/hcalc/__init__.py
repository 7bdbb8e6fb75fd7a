"""
Horizontal Calculus Package - 水平微积分包

映射上的水平微分、接触条件、KR定向与算子 Q。

包含：
- SmoothMap 与映射代数（复合、伸缩、平移、旋转、反射、扰动）
- horiz_diff: analytic / flow_fd 两种格式
- q_apply, displacement, main_estimate_residual
- contact_residual, qi_probe, bilipschitz_probe
"""

from .smooth_map import (
    SmoothMap,
    identity_map,
    dilation_map,
    left_translation_map,
    right_translation_map,
    rotation_map,
    reflection_map,
    isometry_map,
    perturbed_map,
    vector_map,
    horizontal_part,
    compose,
    compose_all,
)
from .differential import (
    HorizontalDifferential,
    DEFAULT_FD_STEP,
    symplectic_matrix,
    frame_derivatives,
    horizontal_matrices,
    horiz_diff,
    vertical_multiplier,
    vertical_multiplier_fd,
    fd_convergence_slope,
)
from .operator_q import (
    QValue,
    z_derivatives,
    q_blocks,
    q_norms,
    q_from_matrix,
    q_apply,
    displacement,
    displacement_coords,
    vertical_displacement,
    main_estimate_sides,
    main_estimate_residual,
)
from .probes import QIProbe, BiLipschitzProbe, contact_residual, contact_residuals, qi_probe, bilipschitz_probe

__all__ = [
    'SmoothMap', 'identity_map', 'dilation_map', 'left_translation_map', 'right_translation_map',
    'rotation_map', 'reflection_map', 'isometry_map', 'perturbed_map', 'vector_map', 'horizontal_part',
    'compose', 'compose_all',
    'HorizontalDifferential', 'DEFAULT_FD_STEP', 'symplectic_matrix', 'frame_derivatives',
    'horizontal_matrices', 'horiz_diff', 'vertical_multiplier', 'vertical_multiplier_fd',
    'fd_convergence_slope',
    'QValue', 'z_derivatives', 'q_blocks', 'q_norms', 'q_from_matrix', 'q_apply', 'displacement',
    'displacement_coords', 'vertical_displacement', 'main_estimate_sides', 'main_estimate_residual',
    'QIProbe', 'BiLipschitzProbe', 'contact_residual', 'contact_residuals', 'qi_probe', 'bilipschitz_probe',
]
