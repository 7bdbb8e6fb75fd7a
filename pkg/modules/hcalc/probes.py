"""
经验探针 - Empirical Probes

- contact_residual: 接触条件残差
- qi_probe: 类 I(L, U) 的下界 L 与 λ 符号检查
- bilipschitz_probe: ρ 度量下的距离比
"""

import logging
from typing import NamedTuple, Optional

import numpy as np

from modules.hgroup import HPoint, Ball, group_dist, sample_ball, InvalidParameterError
from .smooth_map import SmoothMap
from .differential import frame_derivatives, horizontal_matrices

logger = logging.getLogger(__name__)


class QIProbe(NamedTuple):
    L_lower: float
    sign_ok: bool
    lam_sign: int


class BiLipschitzProbe(NamedTuple):
    ratio_max: float
    ratio_min: float


def contact_residuals(f: SmoothMap, X, scheme: Optional[str] = None, h: Optional[float] = None) -> np.ndarray:
    """
    r_i = X_i f_t − 2Σ_j (f_{j+n} X_i f_j − f_j X_i f_{j+n})，i = 1..2n

    Returns:
        形如 (..., 2n) 的残差
    """
    X = np.asarray(X, dtype=float)
    n = f.n
    D = frame_derivatives(f, X, scheme, h)[..., :, :2 * n]
    p = f.evaluate(X)
    ph, pv = p[..., :n], p[..., n:2 * n]
    Dh, Dv = D[..., :n, :], D[..., n:2 * n, :]
    cross = np.sum(pv[..., :, None] * Dh - ph[..., :, None] * Dv, axis=-2)
    return D[..., -1, :] - 2.0 * cross


def contact_residual(f: SmoothMap, x: HPoint, scheme: Optional[str] = None, h: Optional[float] = None) -> float:
    """max_i |r_i|"""
    return float(np.max(np.abs(contact_residuals(f, x.coords, scheme, h))))


def qi_probe(f: SmoothMap, B: Ball, samples: int, seed: int = 0, scheme: Optional[str] = None) -> QIProbe:
    """
    L_lower = max_x max(σ_max(D_hf), 1/σ_min(D_hf))，sign_ok 表示 λ 在样本上符号不变
    """
    if samples < 1:
        raise InvalidParameterError(f"样本数必须 ≥ 1: {samples}")
    X = sample_ball(B, samples, seed)
    M, lam = horizontal_matrices(f, X, scheme)
    sv = np.linalg.svd(M, compute_uv=False)
    smax, smin = sv[:, 0], sv[:, -1]
    with np.errstate(divide='ignore'):
        inv_min = np.where(smin > 0, 1.0 / np.where(smin > 0, smin, 1.0), np.inf)
    L_lower = float(np.max(np.maximum(smax, inv_min)))
    signs = np.sign(lam)
    sign_ok = bool(np.all(signs == signs[0]) and signs[0] != 0)
    if not np.isfinite(L_lower):
        logger.warning(f"{f.label}: 水平微分奇异，L_lower = ∞")
    return QIProbe(L_lower, sign_ok, int(signs[0]) if sign_ok else 0)


def bilipschitz_probe(f: SmoothMap, V: Ball, pairs: int, seed: int = 0) -> BiLipschitzProbe:
    """随机点对上 ρ(f(x), f(y)) / ρ(x, y) 的最大值与最小值；重合点对重新采样"""
    if pairs < 1:
        raise InvalidParameterError(f"点对数必须 ≥ 1: {pairs}")
    rng = np.random.default_rng(seed)
    X = sample_ball(V, 2 * pairs, seed, method='random')
    P, Q = X[:pairs], X[pairs:]
    d = group_dist(P, Q)
    bad = d < 1e-14
    attempts = 0
    while np.any(bad):
        attempts += 1
        if attempts > 10:
            raise InvalidParameterError("重合点对无法通过重新采样消除")
        Q[bad] = sample_ball(V, int(np.count_nonzero(bad)), int(rng.integers(1 << 31)), method='random')
        d = group_dist(P, Q)
        bad = d < 1e-14
    ratios = group_dist(f.evaluate(P), f.evaluate(Q)) / d
    return BiLipschitzProbe(float(np.max(ratios)), float(np.min(ratios)))
