#!/usr/bin/env python3
"""
hgroup 测试：群律、Korányi 度量、标架、体积、等距变换与采样
"""

import math
import sys
from pathlib import Path

import numpy as np

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from modules.hgroup import (
    GroupDim, HPoint, Ball, Box, Isometry,
    mul, inv, dilate, knorm, kdist, group_mul, group_inv, group_dilate, group_norm, group_dist,
    check_commutators, check_left_invariance, frame_vectors,
    unit_ball_volume, ball_volume, box_volume, box_second_moment,
    random_isometry, random_unitary, isometry_from_map, nearest_unitary,
    sample_ball, sample_box, sample_sphere,
    DimensionMismatchError, InvalidParameterError, NonUnitaryRotationError,
)

SEED = 0
TOL = 1e-12


def _points(n: int, count: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal((count, 2 * n + 1))


def test_group_dim_constants():
    g = GroupDim(1)
    assert g.nu == 4 and g.coord_dim == 3
    assert abs(g.kappa - 5.0 ** -0.25) < TOL
    assert abs(GroupDim(2).kappa - 17.0 ** -0.25) < TOL
    try:
        GroupDim(0)
        assert False, "n = 0 应当被拒绝"
    except InvalidParameterError:
        pass


def test_group_law_associative_with_inverse():
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        X, Y, Z = (_points(n, 100, rng) for _ in range(3))
        left = group_mul(group_mul(X, Y), Z)
        right = group_mul(X, group_mul(Y, Z))
        assert np.max(np.abs(left - right)) < 1e-11
        assert np.max(np.abs(group_mul(X, group_inv(X)))) < TOL
        assert np.max(np.abs(group_mul(group_inv(X), X))) < TOL


def test_point_and_batch_forms_agree():
    rng = np.random.default_rng(SEED + 1)
    X, Y = _points(2, 20, rng), _points(2, 20, rng)
    batch = group_mul(X, Y)
    for x, y, xy in zip(X, Y, batch):
        p, q = HPoint.from_coords(x), HPoint.from_coords(y)
        assert mul(p, q).allclose(HPoint.from_coords(xy), atol=TOL)
        assert abs(knorm(p) - float(group_norm(x))) < TOL
        assert abs(kdist(p, q) - float(group_dist(x, y))) < TOL
        assert inv(p).allclose(HPoint.from_coords(group_inv(x)))


def test_commutator_relations():
    for n in (1, 2, 3):
        assert check_commutators(n) == {}


def test_frame_is_left_invariant():
    rng = np.random.default_rng(SEED + 2)
    for n in (1, 2, 3):
        assert check_left_invariance(_points(n, 50, rng)) <= TOL


def test_frame_vectors_at_point():
    x = HPoint.from_coords([1.0, 2.0, 0.5])
    X1, X2, T = frame_vectors(x)
    assert np.allclose(X1, [1.0, 0.0, 4.0])
    assert np.allclose(X2, [0.0, 1.0, -2.0])
    assert np.allclose(T, [0.0, 0.0, 1.0])


def test_dilation_homogeneity_and_automorphism():
    rng = np.random.default_rng(SEED + 3)
    X, Y = _points(2, 200, rng), _points(2, 200, rng)
    for s in (0.1, 0.5, 2.0, 7.0):
        assert np.max(np.abs(group_norm(group_dilate(s, X)) - s * group_norm(X))) < 1e-11
        lhs = group_dilate(s, group_mul(X, Y))
        rhs = group_mul(group_dilate(s, X), group_dilate(s, Y))
        assert np.max(np.abs(lhs - rhs)) < 1e-10
    try:
        dilate(0.0, HPoint.identity(1))
        assert False, "s = 0 应当被拒绝"
    except InvalidParameterError:
        pass


def test_koranyi_triangle_inequality_and_invariance():
    rng = np.random.default_rng(SEED + 4)
    X, Y, Z = (_points(2, 5000, rng) for _ in range(3))
    excess = group_dist(X, Z) - group_dist(X, Y) - group_dist(Y, Z)
    assert np.count_nonzero(excess > TOL) == 0
    A = _points(2, 5000, rng)
    shifted = group_dist(group_mul(A, X), group_mul(A, Y))
    assert np.max(np.abs(shifted - group_dist(X, Y)) / np.maximum(1.0, group_dist(X, Y))) < 1e-11


def test_volumes():
    assert abs(box_volume(1.0, 2) - 32.0) < TOL
    assert abs(box_second_moment(1.0, 2) - 64.0 / 3.0) < TOL
    assert abs(unit_ball_volume(1) - math.pi ** 2 / 2.0) < 1e-8
    assert abs(unit_ball_volume(2) - 2.0 * math.pi ** 2 / 3.0) < 1e-10
    assert abs(ball_volume(2.0, 1) - 16.0 * unit_ball_volume(1)) < 1e-9
    try:
        box_volume(-1.0, 2)
        assert False, "负半径应当被拒绝"
    except InvalidParameterError:
        pass


def test_ball_and_box_membership():
    ball = Ball(HPoint.identity(1), 1.0)
    assert bool(ball.contains(np.zeros(3)))
    assert not bool(ball.contains(np.array([0.0, 0.0, 1.0])))
    assert bool(ball.contains(np.array([0.0, 0.0, 0.99])))
    box = Box(HPoint.from_coords([1.0, 0.0, 0.0]), 0.5)
    assert bool(box.contains(np.array([1.0, 0.0, 0.0])))
    # 右乘后 t 分量变为 −0.6，但盒坐标仍是 (0, 0.4, 0.2)
    assert bool(box.contains(group_mul([1.0, 0.0, 0.0], [0.0, 0.4, 0.2])))
    assert not bool(box.contains(np.array([1.0, 0.0, 0.3])))


def test_isometry_compose_and_inverse():
    rng = np.random.default_rng(SEED + 5)
    X = _points(2, 50, rng)
    for r1, r2 in ((False, False), (False, True), (True, False), (True, True)):
        t1 = random_isometry(2, rng, reflect=r1)
        t2 = random_isometry(2, rng, reflect=r2)
        composed = t1.compose(t2).apply_coords(X)
        assert np.max(np.abs(composed - t1.apply_coords(t2.apply_coords(X)))) < 1e-10
        assert t1.compose(t1.inverse()).allclose(Isometry.identity(2))
        assert t1.inverse().compose(t1).allclose(Isometry.identity(2))


def test_isometry_preserves_distance():
    rng = np.random.default_rng(SEED + 6)
    X, Y = _points(3, 500, rng), _points(3, 500, rng)
    for reflect in (False, True):
        theta = random_isometry(3, rng, reflect=reflect)
        d0 = group_dist(X, Y)
        d1 = group_dist(theta.apply_coords(X), theta.apply_coords(Y))
        assert np.max(np.abs(d1 - d0) / np.maximum(1.0, d0)) < 1e-11


def test_isometry_dh_and_vertical_sign():
    rng = np.random.default_rng(SEED + 7)
    theta = random_isometry(2, rng, reflect=True)
    R = theta.dh()
    assert np.allclose(R.T @ R, np.eye(4), atol=TOL)
    assert theta.lam == -1.0
    assert Isometry.identity(2).lam == 1.0


def test_isometry_recovered_from_black_box():
    rng = np.random.default_rng(SEED + 8)
    for n in (1, 2):
        for reflect in (False, True):
            theta = random_isometry(n, rng, reflect=reflect)
            recovered = isometry_from_map(theta.apply_coords, n)
            assert recovered.allclose(theta, atol=1e-9)


def test_isometry_rejects_bad_input():
    try:
        Isometry(2.0 * np.eye(2), HPoint.identity(2))
        assert False, "非酉矩阵应当被拒绝"
    except NonUnitaryRotationError:
        pass
    try:
        Isometry(np.eye(2), HPoint.identity(3))
        assert False, "维数不一致应当被拒绝"
    except DimensionMismatchError:
        pass
    try:
        mul(HPoint.identity(1), HPoint.identity(2))
        assert False, "维数不一致应当被拒绝"
    except DimensionMismatchError:
        pass
    try:
        HPoint.from_coords([1.0, 2.0])
        assert False, "偶数长度坐标应当被拒绝"
    except DimensionMismatchError:
        pass


def test_nearest_unitary_is_unitary():
    rng = np.random.default_rng(SEED + 9)
    A = random_unitary(3, rng)
    assert np.allclose(nearest_unitary(A), A, atol=1e-12)
    M = A + 0.05 * rng.standard_normal((3, 3))
    V = nearest_unitary(M)
    assert np.allclose(V.conj().T @ V, np.eye(3), atol=1e-12)


def test_samplers_are_deterministic_and_inside():
    ball = Ball(HPoint.from_coords([0.3, -0.2, 0.1, 0.0, 0.4]), 0.7)
    A = sample_ball(ball, 500, seed=3)
    B = sample_ball(ball, 500, seed=3)
    assert A.shape == (500, 5)
    assert np.array_equal(A, B)
    assert np.all(ball.contains(A))
    box = Box(ball.center, 0.7)
    assert np.all(box.contains(sample_box(box, 300, seed=1)))
    S = sample_sphere(ball, 256, seed=2)
    assert np.max(np.abs(group_dist(ball.center.coords, S) - 0.7)) < 1e-10


if __name__ == "__main__":
    from harness import run_module_tests
    sys.exit(run_module_tests(globals(), 'hgroup 测试'))
