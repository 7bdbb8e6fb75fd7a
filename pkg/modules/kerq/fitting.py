"""
等距拟合器 - Isometry Fitting

两条独立的路线：

coercive（构造性）
    1. 归一化 g = δ_{1/r}∘π_{−a}∘f∘π_a∘δ_r，使问题落在 B(0, 1) 上
    2. λ(0, g) < 0 时先复合反射 ι
    3. 初始等距 φ = π_{g(0)}∘φ_{A₀}，A₀ 为 B(0,½) 上 D_h g 均值复线性部分的极分解酉因子
    4. u = φ⁻¹∘g 的 z 分量（= z + ψ）
    5. V = 酉修正，θ = φ∘φ_{V*}，再反归一化
    酉修正前提不成立或矩阵奇异时退回 oracle

oracle（优化）
    参数化 A = A₀·expm(K)，K 反厄米（n² 个实参数），平移 b ∈ ℍⁿ，两种反射都尝试；
    先对 θ(x)⁻¹·f(x) 的坐标做最小二乘，再用 Nelder–Mead 最小化 max ρ；多起点，种子确定。
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import linalg, optimize

from modules.hgroup import (
    HPoint, Ball, Isometry, group_mul, group_inv, group_norm, inv, reflect_coords,
    nearest_unitary, sample_ball, PreconditionError, SingularMomentError, InvalidParameterError,
)
from modules.hcalc import (
    SmoothMap, compose, compose_all, dilation_map, left_translation_map, reflection_map,
    isometry_map, horizontal_part, horizontal_matrices, horiz_diff, z_derivatives,
)
from .correction import UnitaryCorrection, lemma4_correction
from .deviation import sup_deviation
from .quadrature import ball_mean

logger = logging.getLogger(__name__)


@dataclass
class FitResult:
    """拟合结果与诊断信息"""
    isometry: Isometry
    method: str
    fallback: bool = False
    sup_residual: float = math.nan
    eps_measured: Optional[float] = None
    correction: Optional[UnitaryCorrection] = None
    converged: bool = True
    message: str = ''

    def to_dict(self) -> dict:
        out = {
            'method': self.method,
            'fallback': self.fallback,
            'sup_residual': self.sup_residual,
            'eps_measured': self.eps_measured,
            'converged': self.converged,
            'message': self.message,
            'isometry': self.isometry.to_dict(),
        }
        if self.correction is not None:
            out['correction'] = {
                'deviation': self.correction.deviation,
                'stated_bound': self.correction.deviation_bound,
                'derived_bound': self.correction.derived_bound,
                'within_stated_bound': self.correction.within_stated_bound,
            }
        return out


def skew_from_params(p: np.ndarray, n: int) -> np.ndarray:
    """n² 个实参数 → 反厄米矩阵：对角 i·p_k，上三角 re + i·im"""
    K = np.zeros((n, n), dtype=complex)
    K[np.diag_indices(n)] = 1j * p[:n]
    idx = n
    for j in range(n):
        for k in range(j + 1, n):
            K[j, k] = p[idx] + 1j * p[idx + 1]
            K[k, j] = -p[idx] + 1j * p[idx + 1]
            idx += 2
    return K


def complex_linear_part(M: np.ndarray) -> np.ndarray:
    """实 2n×2n 矩阵的复线性部分 Zu"""
    Zu, _ = z_derivatives(M)
    return Zu


class IsometryFitter:
    """等距拟合器，持有求积阶数、样本数与随机种子"""

    def __init__(self, quad_order: Optional[int] = None, mean_order: int = 8, oracle_samples: int = 512,
                 restarts: int = 4, seed: int = 0, residual_samples: int = 8192,
                 allow_fallback: bool = True):
        self.quad_order = quad_order
        self.mean_order = mean_order
        self.oracle_samples = oracle_samples
        self.restarts = restarts
        self.seed = seed
        self.residual_samples = residual_samples
        self.allow_fallback = allow_fallback
        self.logger = logging.getLogger(__name__)

    # ------------------------------------------------------------------
    # 归一化
    # ------------------------------------------------------------------

    @staticmethod
    def normalize(f: SmoothMap, ball: Ball) -> SmoothMap:
        """g = δ_{1/r}∘π_{−a}∘f∘π_a∘δ_r"""
        n, a, r = f.n, ball.center, ball.radius
        return compose_all(dilation_map(n, 1.0 / r), left_translation_map(inv(a)),
                           f.with_domain(None), left_translation_map(a), dilation_map(n, r))

    @staticmethod
    def denormalize(theta: Isometry, ball: Ball) -> Isometry:
        """π_a∘(δ_r θ δ_{1/r})∘π_{a⁻¹}"""
        a = ball.center
        return (Isometry.translation_only(a)
                .compose(theta.conjugate_by_dilation(ball.radius))
                .compose(Isometry.translation_only(inv(a))))

    def _mean_dh(self, g: SmoothMap) -> np.ndarray:
        half = Ball(HPoint.identity(g.n), 0.5)
        return ball_mean(lambda X: horizontal_matrices(g, X)[0], half, self.mean_order)

    def initial_isometry(self, g: SmoothMap) -> Tuple[Isometry, bool, SmoothMap]:
        """
        Returns:
            (φ, reflected, g')，reflected 时 g' = ι∘g
        """
        n = g.n
        origin = HPoint.identity(n)
        reflected = horiz_diff(g, origin).lam < 0
        if reflected:
            g = compose(reflection_map(n), g)
        A0 = nearest_unitary(complex_linear_part(self._mean_dh(g)))
        phi = Isometry(A0, HPoint.from_coords(g.evaluate(origin.coords)), False)
        return phi, reflected, g

    def _residual(self, f: SmoothMap, theta: Isometry, ball: Ball) -> float:
        return sup_deviation(f, theta, ball, self.residual_samples, self.seed, polish=False)

    # ------------------------------------------------------------------
    # coercive
    # ------------------------------------------------------------------

    def fit_coercive(self, f: SmoothMap, ball: Ball) -> FitResult:
        n = f.n
        if n < 2:
            raise PreconditionError("构造性拟合要求 n > 1")
        g = self.normalize(f, ball)
        phi, reflected, g = self.initial_isometry(g)
        u = horizontal_part(compose(isometry_map(phi.inverse()), g))

        inner = sample_ball(Ball(HPoint.identity(n), 0.3), 4096, self.seed)
        U = u.evaluate(inner)
        gap = (U[:, :n] - inner[:, :n]) ** 2 + (U[:, n:] - inner[:, n:2 * n]) ** 2
        eps_measured = float(np.sqrt(np.max(np.sum(gap, axis=1))))

        try:
            correction = lemma4_correction(u, eps_measured, self.quad_order)
        except (PreconditionError, SingularMomentError) as e:
            if not self.allow_fallback:
                raise
            self.logger.warning(f"{f.label}: 酉修正不可用 ({e})，sup|u−z| = {eps_measured:.3e}，改用 oracle 拟合")
            result = self.fit_oracle(f, ball)
            result.fallback = True
            result.eps_measured = eps_measured
            result.message = str(e)
            return result

        theta = phi.compose(Isometry.rotation_only(correction.V.conj().T))
        if reflected:
            theta = Isometry.reflection(n).compose(theta)
        theta = self.denormalize(theta, ball)
        residual = self._residual(f, theta, ball)
        self.logger.info(f"{f.label}: coercive 拟合完成, sup 残差 {residual:.3e}, sup|u−z| {eps_measured:.3e}")
        return FitResult(theta, 'coercive', False, residual, eps_measured, correction)

    # ------------------------------------------------------------------
    # oracle
    # ------------------------------------------------------------------

    def fit_oracle(self, f: SmoothMap, ball: Ball, samples: Optional[int] = None,
                   restarts: Optional[int] = None) -> FitResult:
        n = f.n
        samples = self.oracle_samples if samples is None else samples
        restarts = self.restarts if restarts is None else restarts
        if samples < 2 * n + 2:
            raise InvalidParameterError(f"样本数必须 ≥ 2n+2 = {2 * n + 2}: {samples}")
        if restarts < 1:
            raise InvalidParameterError(f"起点数必须 ≥ 1: {restarts}")

        g = self.normalize(f, ball)
        X = sample_ball(Ball(HPoint.identity(n), 1.0), samples, self.seed)
        GX = g.evaluate(X)
        mean_M = self._mean_dh(g)
        g0 = g.evaluate(np.zeros(2 * n + 1))
        rng = np.random.default_rng(self.seed)
        k_dim = n * n
        dim = k_dim + 2 * n + 1

        best = (math.inf, False, None, None, None)
        converged = False
        for reflect in (False, True):
            target = reflect_coords(GX) if reflect else GX
            M = mean_M.copy()
            if reflect:
                M[n:, :] *= -1.0
            A_init = nearest_unitary(complex_linear_part(M))
            b_init = reflect_coords(g0) if reflect else g0

            def build(p):
                A = nearest_unitary(A_init @ linalg.expm(skew_from_params(p[:k_dim], n)))
                return A, b_init + p[k_dim:]

            def displacement(p):
                A, b = build(p)
                Y = Isometry(A, HPoint.from_coords(b)).apply_coords(X)
                return group_mul(group_inv(Y), target)

            def residuals(p):
                D = displacement(p)
                return np.concatenate([D[:, :-1].ravel(), D[:, -1]])

            def objective(p):
                return float(np.max(group_norm(displacement(p))))

            for start in range(restarts):
                p0 = np.zeros(dim) if start == 0 else rng.normal(0.0, 0.3, dim)
                ls = optimize.least_squares(residuals, p0, method='lm', xtol=1e-15, ftol=1e-15,
                                            gtol=1e-15, max_nfev=200 * dim)
                p, value = ls.x, objective(ls.x)
                nm = optimize.minimize(objective, p, method='Nelder-Mead',
                                       options={'xatol': 1e-12, 'fatol': 1e-15,
                                                'maxiter': 600 * dim, 'adaptive': True})
                if nm.fun < value:
                    p, value = nm.x, float(nm.fun)
                converged = converged or bool(ls.success)
                self.logger.debug(f"oracle 起点 {start} reflect={reflect}: max ρ = {value:.3e}")
                if value < best[0]:
                    A, b = build(p)
                    best = (value, reflect, A, b, p)

        value, reflect, A, b, _ = best
        theta = self.denormalize(Isometry(A, HPoint.from_coords(b), reflect), ball)
        residual = self._residual(f, theta, ball)
        message = '' if converged else '最小二乘未报告收敛，返回最优结果'
        if not converged:
            self.logger.warning(f"{f.label}: oracle 拟合未收敛，最优 max ρ = {value:.3e}")
        self.logger.info(f"{f.label}: oracle 拟合完成, sup 残差 {residual:.3e}")
        return FitResult(theta, 'oracle', False, residual, converged=converged, message=message)


def fit_isometry_coercive(f: SmoothMap, B: Ball, quad_order: Optional[int] = None, seed: int = 0) -> Isometry:
    return IsometryFitter(quad_order=quad_order, seed=seed).fit_coercive(f, B).isometry


def fit_isometry_oracle(f: SmoothMap, B: Ball, samples: int = 512, restarts: int = 4, seed: int = 0) -> Isometry:
    fitter = IsometryFitter(oracle_samples=samples, restarts=restarts, seed=seed)
    return fitter.fit_oracle(f, B).isometry
