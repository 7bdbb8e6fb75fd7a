"""
Domains Package - John/Hölder 区域工具包

包含：
- MetricDomain 及 ball / box / dumbbell / sampled 四种实现
- 到基点的水平曲线（对数螺线、径向段 + 水平圆环）与折线离散
- build_chain: 认证过的球链
- whitney_cover: 贪心 Whitney 型覆盖
- quasihyperbolic_length / holder_check / boundary_integral / lemma6_tau_scan
"""

from .curves import (
    Polyline,
    Curve,
    spiral_curve,
    box_curve,
    horizontal_path,
    dilation_path,
    john_constants,
)
from .integrals import (
    BoundaryIntegral,
    quasihyperbolic_length,
    holder_check,
    boundary_integral,
    radial_beta_oracle,
    lemma6_bound,
    lemma6_tau_scan,
)
from .metric_domain import (
    MetricDomain,
    BallDomain,
    BoxDomain,
    DumbbellDomain,
    SampledDomain,
    box_boundary_distance,
    make_ball_domain,
    make_box_domain,
    make_dumbbell,
    make_sampled_domain,
    calibrate_domain,
    holder_constant,
)
from .chain import BallChain, ChainBuilder, build_chain, certify_chain, john_k_bound, holder_k_bound
from .whitney import WhitneyFamily, whitney_cover, grid_points

__all__ = [
    'Polyline', 'Curve', 'spiral_curve', 'box_curve', 'horizontal_path', 'dilation_path', 'john_constants',
    'BoundaryIntegral', 'quasihyperbolic_length', 'holder_check', 'boundary_integral', 'radial_beta_oracle',
    'lemma6_bound', 'lemma6_tau_scan',
    'MetricDomain', 'BallDomain', 'BoxDomain', 'DumbbellDomain', 'SampledDomain', 'box_boundary_distance',
    'make_ball_domain', 'make_box_domain', 'make_dumbbell', 'make_sampled_domain', 'calibrate_domain',
    'holder_constant',
    'BallChain', 'ChainBuilder', 'build_chain', 'certify_chain', 'john_k_bound', 'holder_k_bound',
    'WhitneyFamily', 'whitney_cover', 'grid_points',
]
