#!/usr/bin/env python3
"""
domains 测试：区域、边界距离、水平曲线、球链、Whitney 覆盖与区域积分
"""

import math
import sys
from pathlib import Path

import numpy as np

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.hgroup import (
    HPoint, Ball, Box, sample_sphere, unit_ball_volume,
    DomainError, InvalidParameterError,
)
from modules.domains import (
    make_ball_domain, make_box_domain, make_dumbbell, make_sampled_domain, calibrate_domain, box_boundary_distance,
    spiral_curve, box_curve, horizontal_path, dilation_path, john_constants,
    build_chain, john_k_bound, whitney_cover, grid_points,
    quasihyperbolic_length, holder_check, boundary_integral, radial_beta_oracle, lemma6_tau_scan,
)
from modules.domains.metric_domain import holder_constant

ORIGIN_2 = np.zeros(5)


def test_ball_domain_basics():
    U = make_ball_domain(ORIGIN_2, 1.0, calibrate=False)
    assert abs(U.depth(ORIGIN_2) - 1.0) < 1e-12
    assert abs(U.depth([0.5, 0.0, 0.0, 0.0, 0.0]) - 0.5) < 1e-12
    assert U.depth([2.0, 0.0, 0.0, 0.0, 0.0]) == 0.0
    assert abs(U.volume - unit_ball_volume(2)) < 1e-12
    assert U.to_dict()['kind'] == 'ball'
    assert U.john_params == (1.0, 1.0) and U.sampled_john_params is None
    X = U.sample_points(100, seed=1)
    assert X.shape == (100, 5) and np.all(U.contains(X))



def test_ball_domain_keeps_radius_as_john_params():
    c = HPoint.from_coords([0.3, -0.2, 0.1, 0.0, 0.4])
    U = make_ball_domain(c, 0.5)
    assert U.john_params == (0.5, 0.5)
    alpha, beta = U.sampled_john_params
    assert 0.0 < alpha <= beta and U.holder_param > 0.0
    assert make_ball_domain(c, 0.5, calibrate=False).john_params == (0.5, 0.5)


def test_sampled_domain_from_ball_boundary():
    ball = Ball(HPoint.identity(2), 1.0)
    boundary = sample_sphere(ball, 512, seed=0)
    U = make_sampled_domain(ball.contains, boundary, ORIGIN_2, Box(HPoint.identity(2), 1.0))
    assert U.to_dict()['kind'] == 'sampled' and U.john_params is None
    assert abs(U.volume / unit_ball_volume(2) - 1.0) < 2e-2
    assert abs(U.depth(ORIGIN_2) - 1.0) < 1e-12
    # 边界点的最小距离不小于真实边界距离
    X = U.sample_points(50, seed=3)
    exact = make_ball_domain(ORIGIN_2, 1.0, calibrate=False).boundary_distance(X)
    assert np.all(U.boundary_distance(X) >= exact - 1e-12)
    calibrated = calibrate_domain(U, samples=4, seed=0)
    assert calibrated.john_params == calibrated.sampled_john_params
    assert 0.0 < calibrated.john_params[0] <= calibrated.john_params[1]
    try:
        make_sampled_domain(ball.contains, boundary, [2.0, 0.0, 0.0, 0.0, 0.0], Box(HPoint.identity(2), 1.0))
        assert False, "基点在区域外应当拒绝"
    except DomainError:
        pass


def test_box_boundary_distance():
    box = Box(HPoint.identity(2), 1.0)
    assert abs(float(box_boundary_distance(box, ORIGIN_2)) - 1.0) < 1e-12
    assert abs(float(box_boundary_distance(box, [0.5, 0.0, 0.0, 0.0, 0.0])) - 0.5) < 1e-12
    assert float(box_boundary_distance(box, [0.0, 0.0, 0.0, 0.0, 1.5])) == 0.0


def test_box_distance_ball_stays_inside():
    U = make_box_domain(HPoint.from_coords([0.2, 0.0, -0.1, 0.0, 0.3]), 1.0, calibrate=False)
    X = U.sample_points(20, seed=3)
    for x in X:
        d = U.depth(x)
        assert d > 0
        S = sample_sphere(Ball(HPoint.from_coords(x), 0.999 * d), 512, seed=4)
        assert np.all(U.contains(S))


def test_spiral_curve_is_horizontal_and_ends_at_center():
    center = np.array([0.1, -0.2, 0.0, 0.3, 0.2])
    x = np.array([0.5, 0.1, -0.2, 0.0, 0.4])
    curve = spiral_curve(center, x, margin=0.05)
    assert np.allclose(curve.start, x, atol=1e-9)
    assert np.allclose(curve.end, center, atol=1e-9)
    assert curve.length > 0.0
    # 水平曲线相邻顶点的位移几乎没有竖直分量
    pl = curve.polyline.points
    step = pl[1:] - pl[:-1]
    n = 2
    omega = np.sum(pl[:-1, n:2 * n] * step[:, :n] - pl[:-1, :n] * step[:, n:2 * n], axis=-1)
    vertical = step[:, -1] - 2.0 * omega
    assert np.max(np.abs(vertical)) < 1e-4


def test_near_axis_point_gets_prefix():
    curve = spiral_curve(ORIGIN_2, np.array([0.0, 0.0, 0.0, 0.0, 0.8]), margin=0.05)
    assert len(curve.segments) == 2
    assert np.allclose(curve.end, ORIGIN_2, atol=1e-9)


def test_box_curve_and_horizontal_path():
    center = ORIGIN_2
    x = np.array([0.3, 0.0, 0.2, 0.0, 0.3])
    curve = box_curve(center, x)
    assert np.allclose(curve.start, x, atol=1e-9)
    assert np.allclose(curve.end, center, atol=1e-9)
    path = horizontal_path(center, x)
    assert np.allclose(path.start, center, atol=1e-9)
    assert np.allclose(path.end, x, atol=1e-9)


def test_john_constants_of_radial_path():
    U = make_ball_domain(ORIGIN_2, 1.0, calibrate=False)
    curve = dilation_path(ORIGIN_2, np.array([0.5, 0.0, 0.0, 0.0, 0.0]))
    alpha, beta = john_constants(curve, U.boundary_distance)
    assert abs(beta - 0.5) < 1e-9
    assert 0.0 < alpha <= beta
    assert abs(quasihyperbolic_length(U, curve) - math.log(2.0)) < 1e-6


def test_holder_constant_root():
    d = 0.3
    assert abs(holder_constant(math.e * d, d) - math.e * d) < 1e-10
    assert holder_constant(0.0, d) == d
    try:
        holder_constant(1.0, 0.0)
        assert False, "深度为零应当拒绝"
    except DomainError:
        pass


def test_calibration_and_holder_check():
    x = np.array([0.5, 0.0, 0.1, 0.0, 0.2])
    U = calibrate_domain(make_ball_domain(ORIGIN_2, 1.0, calibrate=False), samples=8, seed=2, extra_points=[x])
    assert U.john_params == (1.0, 1.0)
    alpha, beta = U.sampled_john_params
    assert 0.0 < alpha <= beta
    assert U.to_dict()['sampled_john_params'] == [alpha, beta]
    assert U.holder_param > 0.0
    lhs, rhs = holder_check(U, x)
    assert lhs <= rhs
    try:
        holder_check(make_ball_domain(ORIGIN_2, 1.0, calibrate=False), x)
        assert False, "未标定的区域没有 Hölder 常数"
    except InvalidParameterError:
        pass
    try:
        U.with_params(john_params=(2.0, 1.0))
        assert False, "α > β 应当拒绝"
    except DomainError:
        pass


def test_chains_in_ball_are_certified():
    U = calibrate_domain(make_ball_domain(ORIGIN_2, 1.0, calibrate=False), samples=8, seed=0)
    points = [
        [0.3, 0.1, -0.2, 0.0, 0.1],
        [0.95, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.8],
    ]
    for x in points:
        chain = build_chain(U, x)
        assert chain.certified, chain.checks
        assert chain.k >= 1
        assert len(chain.connectors) == chain.k
        assert chain.k < chain.john_bound
        assert np.allclose(chain.centers[-1], x, atol=1e-12)
        assert np.allclose(4.0 * chain.radii, U.boundary_distance(chain.centers), rtol=1e-12)
    assert chain.to_dict()['certified'] is True


def test_chain_at_base_point_is_trivial():
    U = make_ball_domain(ORIGIN_2, 1.0, calibrate=False)
    chain = build_chain(U, ORIGIN_2)
    assert chain.k == 0 and chain.certified
    assert abs(chain.radii[0] - 0.25) < 1e-12


def test_chain_rejects_points_outside():
    U = make_ball_domain(ORIGIN_2, 1.0, calibrate=False)
    try:
        build_chain(U, [1.2, 0.0, 0.0, 0.0, 0.0])
        assert False, "区域外的点应当拒绝"
    except DomainError:
        pass


def test_chain_in_box_domain():
    U = make_box_domain(ORIGIN_2, 1.0, calibrate=False)
    chain = build_chain(U, [0.3, 0.0, 0.2, 0.0, 0.3])
    assert chain.certified, chain.checks


def test_dumbbell_domain_and_chain():
    U = make_dumbbell([0.0, 0.0, 0.0], [2.0, 0.0, 0.0], 0.6, 0.6, 0.15, calibrate=False)
    assert bool(U.contains(np.array([0.0, 0.0, 0.0])))
    assert bool(U.contains(np.array([2.0, 0.0, 0.0])))
    assert bool(U.contains(np.array([1.0, 0.0, 0.0])))
    assert not bool(U.contains(np.array([1.0, 0.5, 0.0])))
    assert len(U.to_dict()['members']) > 2
    assert U.volume > 0.0
    chain = build_chain(U, [2.2, 0.0, 0.0])
    assert chain.certified, chain.checks
    assert chain.k > 5


def test_john_k_bound_formula():
    assert abs(john_k_bound(1.0, 1.0, 1.0) - 9.0 * math.log(8.0)) < 1e-12


def test_whitney_cover_ball():
    U = make_ball_domain(ORIGIN_2, 1.0, calibrate=False)
    family = whitney_cover(U, 5)
    assert family.checks == {'fifth_balls_disjoint': True, 'grid_covered': True, 'radius_law': True}
    assert family.multiplicity_bound >= 1
    assert family.grid_points == grid_points(U, 5).shape[0]
    assert np.allclose(4.0 * family.radii, U.boundary_distance(family.centers))
    try:
        grid_points(U, 0)
        assert False, "分辨率必须为正"
    except InvalidParameterError:
        pass


def test_radial_beta_oracle():
    assert abs(radial_beta_oracle(2, 0.1) - 1.2877) < 5e-4
    assert radial_beta_oracle(1, 0.5) > radial_beta_oracle(1, 0.1) > 1.0


def test_boundary_integral_on_ball():
    U = calibrate_domain(make_ball_domain(ORIGIN_2, 1.0, calibrate=False), samples=8, seed=0)
    result = boundary_integral(U, 0.1, mc_samples=200_000, seed=0)
    rel = abs(result.value / (U.volume * radial_beta_oracle(2, 0.1)) - 1.0)
    assert rel < 4e-2, f"相对误差 {rel:.3e}"
    assert result.std_error > 0.0
    assert result.within_bound is True
    scan = lemma6_tau_scan(U, [0.1, 0.3], mc_samples=50_000)
    assert len(scan['results']) == 2
    # 球上 2|U|/α^τ 在 τ = 0.1 成立，τ = 0.3 时积分约为 2.26|U|
    assert scan['largest_tau'] == 0.1
    assert scan['results'][1].within_bound is False
    try:
        boundary_integral(U, 1.0, mc_samples=100)
        assert False, "τ 必须在 (0, 1) 内"
    except InvalidParameterError:
        pass


def test_boundary_integral_without_john_params():
    U = make_box_domain(ORIGIN_2, 1.0, calibrate=False)
    result = boundary_integral(U, 0.2, mc_samples=10_000)
    assert result.bound is None and result.within_bound is None


if __name__ == "__main__":
    from harness import run_module_tests
    sys.exit(run_module_tests(globals(), 'domains 测试'))
