"""
Whitney 型覆盖 - Greedy Whitney-type Ball Families

候选中心取外接盒上的单元中心网格（落在 U 内的点），半径 r(D) = ρ_U(x(D))/4。
按 ρ_U 降序贪心：候选的 1/5 球与所有已接受的 1/5 球不相交时接受。
被拒绝的候选 c 满足 ρ(c, a) < (r_c + r_a)/5 ≤ 2r_a/5，因此落在 D_a 内，网格覆盖由构造保证，
最后仍逐点复核覆盖并统计重数 N = max Σχ_D。
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

import numpy as np

from modules.hgroup import HPoint, Ball, group_mul, group_dist, CoverageError, InvalidParameterError

logger = logging.getLogger(__name__)

COUNT_CHUNK = 2048


@dataclass
class WhitneyFamily:
    """Whitney 型球族"""
    balls: List[Ball]
    multiplicity_bound: int
    grid_resolution: int
    grid_points: int
    checks: dict = field(default_factory=dict)

    @property
    def centers(self) -> np.ndarray:
        return np.stack([b.center.coords for b in self.balls])

    @property
    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls])

    def to_dict(self) -> dict:
        return {
            'balls': [b.to_dict() for b in self.balls],
            'multiplicity_bound': self.multiplicity_bound,
            'grid_resolution': self.grid_resolution,
            'grid_points': self.grid_points,
            'checks': dict(self.checks),
        }

    def export_json(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)
        return path


def grid_points(U, resolution: int) -> np.ndarray:
    """外接盒的单元中心网格中落在 U 内的点"""
    if resolution < 1:
        raise InvalidParameterError(f"网格分辨率必须为正: {resolution}")
    box = U.bounding_box()
    d = 2 * U.n + 1
    r = box.radius
    u = (np.arange(resolution) + 0.5) / resolution * 2.0 - 1.0
    axes = [u * r] * (d - 1) + [u * r * r]
    Y = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, d)
    X = group_mul(box.center.coords, Y)
    return X[U.contains(X)]


def _coverage_counts(X: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    counts = np.empty(X.shape[0], dtype=int)
    for start in range(0, X.shape[0], COUNT_CHUNK):
        block = X[start:start + COUNT_CHUNK]
        D = group_dist(centers[None, :, :], block[:, None, :])
        counts[start:start + COUNT_CHUNK] = np.sum(D < radii[None, :], axis=1)
    return counts


def whitney_cover(U, grid_resolution: int) -> WhitneyFamily:
    """
    贪心 5r 选择

    Raises:
        CoverageError: 网格中没有候选点，或复核时仍有网格点未被覆盖
    """
    X = grid_points(U, grid_resolution)
    if X.shape[0] == 0:
        raise CoverageError(f"分辨率 {grid_resolution} 下区域内没有网格点，请加密网格")
    depth = np.asarray(U.boundary_distance(X), dtype=float)
    order = np.argsort(-depth, kind='stable')
    X, depth = X[order], depth[order]
    radius = depth / 4.0

    acc_centers = np.empty((0, X.shape[1]))
    acc_radii = np.empty(0)
    for i in range(X.shape[0]):
        if acc_radii.size:
            dist = group_dist(acc_centers, X[i])
            if np.any(dist < (radius[i] + acc_radii) / 5.0):
                continue
        acc_centers = np.vstack([acc_centers, X[i]])
        acc_radii = np.append(acc_radii, radius[i])

    counts = _coverage_counts(X, acc_centers, acc_radii)
    uncovered = int(np.count_nonzero(counts == 0))
    if uncovered:
        raise CoverageError(f"{uncovered} 个网格点未被覆盖（分辨率 {grid_resolution} 过粗）")

    disjoint = True
    for start in range(0, acc_radii.size, COUNT_CHUNK):
        rows = slice(start, start + COUNT_CHUNK)
        pairwise = group_dist(acc_centers[rows, None, :], acc_centers[None, :, :])
        limit = (acc_radii[rows, None] + acc_radii[None, :]) / 5.0
        idx = np.arange(start, min(start + COUNT_CHUNK, acc_radii.size))
        pairwise[idx - start, idx] = np.inf
        disjoint = disjoint and bool(np.all(pairwise >= limit))

    balls = [Ball(HPoint.from_coords(c), r) for c, r in zip(acc_centers, acc_radii)]
    family = WhitneyFamily(
        balls=balls,
        multiplicity_bound=int(np.max(counts)),
        grid_resolution=grid_resolution,
        grid_points=int(X.shape[0]),
        checks={
            'fifth_balls_disjoint': disjoint,
            'grid_covered': True,
            'radius_law': bool(np.allclose(4.0 * acc_radii, U.boundary_distance(acc_centers), rtol=1e-12, atol=0.0)),
        },
    )
    logger.info(f"Whitney 覆盖: {len(balls)} 个球, 网格点 {X.shape[0]}, 重数 N = {family.multiplicity_bound}")
    return family
