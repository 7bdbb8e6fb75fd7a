#!/usr/bin/env python3
"""
hcalc 测试：映射、水平微分、竖直乘子、算子 Q、主估计与经验探针
"""

import sys
from pathlib import Path

import numpy as np

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.hgroup import (
    HPoint, Ball, random_isometry, random_skew_hermitian, real_form, group_dilate,
    StencilError, InvalidParameterError, OrientationError,
)
from modules.hcalc import (
    identity_map, dilation_map, reflection_map, isometry_map, perturbed_map, horizontal_part,
    compose, compose_all, left_translation_map, right_translation_map,
    horiz_diff, horizontal_matrices, vertical_multiplier_fd, fd_convergence_slope,
    q_from_matrix, q_norms, displacement, main_estimate_sides, main_estimate_residual,
    contact_residual, qi_probe, bilipschitz_probe,
)

SEED = 11
TOL = 1e-10


def _point(n: int, rng: np.random.Generator, scale: float = 0.5) -> HPoint:
    return HPoint.from_coords(scale * rng.standard_normal(2 * n + 1))


def test_dilation_differential():
    rng = np.random.default_rng(SEED)
    s = 1.3
    f = dilation_map(2, s)
    for _ in range(5):
        hd = horiz_diff(f, _point(2, rng))
        assert np.allclose(hd.M, s * np.eye(4), atol=TOL)
        assert abs(hd.lam - s * s) < TOL
        assert abs(hd.jacobian - s ** 6) < 1e-9
        assert hd.lambda_consistency() < 1e-9
        assert hd.symplectic_defect() < 1e-9


def test_isometry_differential_matches_dh():
    rng = np.random.default_rng(SEED + 1)
    for reflect in (False, True):
        theta = random_isometry(2, rng, reflect=reflect)
        f = isometry_map(theta)
        hd = horiz_diff(f, _point(2, rng))
        assert np.allclose(hd.M, theta.dh(), atol=TOL)
        assert abs(hd.lam - theta.lam) < TOL
        assert hd.symplectic_defect() < TOL
        assert contact_residual(f, hd.at) < TOL


def test_reflection_vertical_multiplier():
    f = reflection_map(1)
    hd = horiz_diff(f, HPoint.from_coords([0.2, -0.1, 0.3]))
    assert np.allclose(hd.M, np.diag([1.0, -1.0]), atol=TOL)
    assert abs(hd.lam + 1.0) < TOL


def test_vertical_multiplier_difference_quotient():
    rng = np.random.default_rng(SEED + 2)
    X = 0.5 * rng.standard_normal((10, 5))
    theta = random_isometry(2, rng, reflect=True)
    assert np.allclose(vertical_multiplier_fd(isometry_map(theta), X, 1e-3), -1.0, atol=1e-8)
    assert np.allclose(vertical_multiplier_fd(dilation_map(2, 0.7), X, 1e-3), 0.49, atol=1e-8)


def test_batch_matrices_shape():
    rng = np.random.default_rng(SEED + 3)
    X = rng.standard_normal((10, 5))
    M, lam = horizontal_matrices(perturbed_map(2, 0.1, seed=1), X)
    assert M.shape == (10, 4, 4)
    assert lam.shape == (10,)
    u = horizontal_part(dilation_map(2, 2.0))
    assert u.vector_valued and u.out_dim == 4
    M, lam = horizontal_matrices(u, X)
    assert np.allclose(M, 2.0 * np.eye(4))
    assert np.all(np.isnan(lam))


def test_flow_difference_agrees_with_analytic():
    rng = np.random.default_rng(SEED + 4)
    f = perturbed_map(2, 0.2, seed=3)
    x = _point(2, rng)
    hd = horiz_diff(f, x, cross_check=True)
    assert hd.scheme_gap is not None and hd.scheme_gap < 1e-8
    fd = horiz_diff(f, x, scheme='flow_fd', h=1e-4)
    assert np.max(np.abs(fd.M - hd.M)) < 1e-6
    slope = fd_convergence_slope(f, x)
    assert 1.7 < slope < 2.3, f"差分收敛阶 {slope:.3f}"


def test_contact_residual_detects_non_contact_maps():
    rng = np.random.default_rng(SEED + 5)
    x = _point(2, rng)
    assert contact_residual(dilation_map(2, 1.7), x) < TOL
    assert contact_residual(left_translation_map(_point(2, rng)), x) < TOL
    assert contact_residual(perturbed_map(2, 0.3, seed=2), x) > 1e-6
    b = HPoint.from_coords([0.5, 0.0, 0.0, 0.0, 0.0])
    right = right_translation_map(b)
    assert not right.contact
    assert contact_residual(right, x) > 1e-3


def test_compose_chain_rule():
    f = compose(dilation_map(2, 2.0), dilation_map(2, 3.0))
    X = np.random.default_rng(SEED + 6).standard_normal((4, 5))
    assert np.allclose(f.evaluate(X), group_dilate(6.0, X))
    hd = horiz_diff(f, HPoint.from_coords(X[0]))
    assert np.allclose(hd.M, 6.0 * np.eye(4), atol=TOL)
    g = compose_all(identity_map(2), dilation_map(2, 2.0), identity_map(2))
    assert np.allclose(g.evaluate(X), group_dilate(2.0, X))
    try:
        compose_all()
        assert False, "空的复合应当被拒绝"
    except InvalidParameterError:
        pass


def test_stencil_outside_domain_raises():
    ball = Ball(HPoint.identity(2), 1.0)
    f = perturbed_map(2, 0.1, seed=4).with_domain(ball)
    x = HPoint.from_coords([0.95, 0.0, 0.0, 0.0, 0.0])
    try:
        horiz_diff(f, x, scheme='flow_fd', h=0.1)
        assert False, "越出定义域的差分模板应当被拒绝"
    except StencilError:
        pass
    try:
        horiz_diff(f, HPoint.from_coords([2.0, 0.0, 0.0, 0.0, 0.0]))
        assert False, "定义域外的计算点应当被拒绝"
    except StencilError:
        pass
    try:
        horiz_diff(f, HPoint.identity(2), scheme='central')
        assert False, "未知格式应当被拒绝"
    except InvalidParameterError:
        pass


def test_q_vanishes_on_skew_hermitian_linear_maps():
    rng = np.random.default_rng(SEED + 7)
    for n in (1, 2, 3):
        K = random_skew_hermitian(n, rng)
        assert float(q_norms(real_form(K))) < 1e-12
        assert q_from_matrix(np.eye(2 * n)).norm > 0.99


def test_q_packings_are_consistent():
    rng = np.random.default_rng(SEED + 8)
    for _ in range(50):
        M = rng.standard_normal((4, 4))
        q = q_from_matrix(M)
        assert q.packings_consistent()
        assert q.antiholo_gap() < 1e-12


def test_displacement_of_translation_is_constant_horizontally():
    a = HPoint.from_coords([0.3, -0.2, 0.1, 0.4, 0.5])
    f = left_translation_map(a)
    x = HPoint.from_coords([0.1, 0.2, -0.3, 0.0, 0.7])
    u = displacement(f, x)
    assert np.allclose(u.coords[:4], a.coords[:4])


def test_main_estimate_holds_for_dilation_and_isometry():
    rng = np.random.default_rng(SEED + 9)
    for eps in (1e-1, 1e-2, 1e-3):
        L = 1.0 + eps
        lhs, rhs = main_estimate_sides((1.0 + eps) * np.eye(4), L)
        assert abs(float(lhs) - eps) < 1e-12
        assert float(rhs) >= float(lhs)
        assert main_estimate_residual(dilation_map(2, L), _point(2, rng), L) >= 0.0
    theta = random_isometry(2, rng)
    assert main_estimate_residual(isometry_map(theta), _point(2, rng), 1.0) > -1e-12


def test_main_estimate_requires_positive_multiplier():
    try:
        main_estimate_residual(reflection_map(2), HPoint.identity(2), 1.0)
        assert False, "λ < 0 时应当拒绝"
    except OrientationError:
        pass


def test_qi_probe():
    ball = Ball(HPoint.identity(2), 1.0)
    probe = qi_probe(dilation_map(2, 1.1), ball, samples=64, seed=0)
    assert abs(probe.L_lower - 1.1) < TOL
    assert probe.sign_ok and probe.lam_sign == 1
    probe = qi_probe(reflection_map(2), ball, samples=64, seed=0)
    assert abs(probe.L_lower - 1.0) < TOL
    assert probe.sign_ok and probe.lam_sign == -1


def test_bilipschitz_probe():
    rng = np.random.default_rng(SEED + 10)
    ball = Ball(HPoint.identity(2), 1.0)
    probe = bilipschitz_probe(isometry_map(random_isometry(2, rng, reflect=True)), ball, pairs=200)
    assert abs(probe.ratio_max - 1.0) < 1e-9 and abs(probe.ratio_min - 1.0) < 1e-9
    probe = bilipschitz_probe(dilation_map(2, 0.5), ball, pairs=200)
    assert abs(probe.ratio_max - 0.5) < 1e-9 and abs(probe.ratio_min - 0.5) < 1e-9


if __name__ == "__main__":
    from harness import run_module_tests
    sys.exit(run_module_tests(globals(), 'hcalc 测试'))
