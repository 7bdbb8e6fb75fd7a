"""
刚性实验运行器 - Rigidity Experiment Runner

对每个 ε：
1. 按配置的拟合器求等距 θ（both 时两种都跑并交叉验证）
2. sup 偏差（在 q·B 上，以 ρ 度量，报告中标为 rho_sup）
3. Sobolev 偏差（指数 p）
4. 指数可积泛函，N = ln 16
然后对 ε ≤ 1e−2 的点在双对数坐标下回归收敛阶。

单个 ε 失败时记录错误并继续；报告不含时间戳，相同输入得到逐字节相同的文件。
"""

import json
import logging
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import scipy

from modules.hgroup import Isometry, RigidityLabError
from modules.hcalc import SmoothMap
from modules.kerq import (
    IsometryFitter, FitResult, sup_deviation, sobolev_deviation, exp_integrability, largest_exponent_below,
)
from .experiment_config import ExperimentConfig
from .families import make_family

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['epsilon', 'sup_dev', 'sobolev_dev', 'exp_int_ln16', 'fitter', 'fallback']
ZERO_DEVIATION = 1e-12
AGREEMENT_FACTOR = 2.0
EXP_SAMPLES = 20_000
DEFAULT_SOBOLEV_ORDER = 10


@dataclass
class RigidityRecord:
    """单个 ε 的测量结果"""
    epsilon: float
    sup_dev: float = math.nan
    sobolev_dev: float = math.nan
    exp_int_ln16: float = math.nan
    fitter_used: str = ''
    fit_fallback: bool = False
    isometry_params: Optional[dict] = None
    sup_metric: str = 'rho_sup'
    n1_surrogate: float = math.nan
    n2_surrogate: float = math.nan
    fitters_agree: Optional[bool] = None
    alternate_sup_dev: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class Exponents:
    """双对数回归得到的收敛阶；偏差为零或点数不足时为 None"""
    sup_slope: Optional[float] = None
    sup_intercept: Optional[float] = None
    sup_r2: Optional[float] = None
    sobolev_slope: Optional[float] = None
    sobolev_intercept: Optional[float] = None
    sobolev_r2: Optional[float] = None
    points: int = 0

    @property
    def r2(self) -> Optional[float]:
        values = [v for v in (self.sup_r2, self.sobolev_r2) if v is not None]
        return min(values) if values else None

    def to_dict(self) -> dict:
        out = asdict(self)
        out['r2'] = self.r2
        return out


@dataclass
class RigidityReport:
    config: ExperimentConfig
    records: List[RigidityRecord] = field(default_factory=list)
    exponents: Exponents = field(default_factory=Exponents)

    def to_frame(self) -> pd.DataFrame:
        rows = [{
            'epsilon': r.epsilon,
            'sup_dev': r.sup_dev,
            'sobolev_dev': r.sobolev_dev,
            'exp_int_ln16': r.exp_int_ln16,
            'fitter': r.fitter_used,
            'fallback': r.fit_fallback,
        } for r in self.records]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def environment(self) -> dict:
        from modules.rigidity_lab import __version__
        return {
            'n': self.config.n,
            'seed': self.config.seed,
            'version': __version__,
            'numpy': np.__version__,
            'scipy': scipy.__version__,
        }

    def to_dict(self) -> dict:
        return {
            'config': self.config.to_dict(),
            'records': [asdict(r) for r in self.records],
            'exponents': self.exponents.to_dict(),
            'environment': self.environment(),
        }

    def write(self, output: Optional[str] = None) -> Dict[str, Path]:
        """写出 CSV 与 JSON 报告"""
        base = Path(output or self.config.output)
        csv_path, json_path = base.with_suffix('.csv'), base.with_suffix('.json')
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(csv_path, index=False, float_format='%.12e', lineterminator='\n')
        with open(json_path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write('\n')
        logger.info(f"报告已写出: {csv_path}, {json_path}")
        return {'csv': csv_path, 'json': json_path}


def regress(eps: np.ndarray, dev: np.ndarray):
    """log dev = slope·log ε + intercept 的最小二乘，返回 (slope, intercept, r²)"""
    x, y = np.log(eps), np.log(dev)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(residual ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def fit_exponents(records: List[RigidityRecord], max_eps: Optional[float] = None) -> Exponents:
    """用全部成功记录（给定 max_eps 时只用 ε ≤ max_eps）；任一偏差不为正时对应收敛阶不定义"""
    usable = [r for r in records if r.ok and (max_eps is None or r.epsilon <= max_eps)]
    out = Exponents(points=len(usable))
    if len(usable) < 2:
        return out
    eps = np.array([r.epsilon for r in usable])
    for name in ('sup', 'sobolev'):
        dev = np.array([getattr(r, f'{name}_dev') for r in usable])
        if np.all(np.isfinite(dev)) and np.all(dev > ZERO_DEVIATION):
            slope, intercept, r2 = regress(eps, dev)
            setattr(out, f'{name}_slope', slope)
            setattr(out, f'{name}_intercept', intercept)
            setattr(out, f'{name}_r2', r2)
    return out


class RigidityExperiment:
    """按配置运行整组 ε"""

    def __init__(self, config: ExperimentConfig, fitter: Optional[IsometryFitter] = None,
                 exp_samples: int = EXP_SAMPLES, agreement_factor: float = AGREEMENT_FACTOR,
                 sobolev_order: int = DEFAULT_SOBOLEV_ORDER):
        self.config = config
        self.fitter = fitter or IsometryFitter(quad_order=config.quad_order, seed=config.seed)
        self.exp_samples = exp_samples
        self.agreement_factor = agreement_factor
        self.sobolev_order = sobolev_order
        self.family = make_family(config.family, config.n)
        self.logger = logging.getLogger(__name__)

    def _fit(self, f: SmoothMap) -> FitResult:
        method = self.config.fitter
        if method == 'oracle':
            return self.fitter.fit_oracle(f, self.config.ball)
        if f.n < 2:
            self.logger.warning(f"{f.label}: n = 1 没有酉修正，改用 oracle 拟合")
            result = self.fitter.fit_oracle(f, self.config.ball)
            result.fallback = True
            return result
        return self.fitter.fit_coercive(f, self.config.ball)

    def measure(self, eps: float) -> RigidityRecord:
        cfg = self.config
        f = self.family(eps)
        fit = self._fit(f)
        theta: Isometry = fit.isometry
        record = RigidityRecord(eps, fitter_used=fit.method, fit_fallback=fit.fallback,
                                isometry_params=theta.to_dict())
        record.sup_dev = sup_deviation(f, theta, cfg.sup_region, cfg.samples, cfg.seed)
        record.sobolev_dev = sobolev_deviation(f, theta, cfg.ball, cfg.p, self.sobolev_order)
        record.exp_int_ln16 = exp_integrability(f, theta, cfg.ball, math.log(16.0), eps,
                                                self.exp_samples, cfg.seed)
        record.n1_surrogate = largest_exponent_below(f, theta, cfg.ball, eps, 16.0, self.exp_samples, cfg.seed)
        record.n2_surrogate = record.sup_dev / (math.sqrt(eps) + eps)

        if cfg.fitter == 'both':
            other = self.fitter.fit_oracle(f, cfg.ball)
            alt = sup_deviation(f, other.isometry, cfg.sup_region, cfg.samples, cfg.seed)
            record.alternate_sup_dev = alt
            hi, lo = max(alt, record.sup_dev), min(alt, record.sup_dev)
            record.fitters_agree = bool(hi <= ZERO_DEVIATION or hi <= self.agreement_factor * lo)
            if not record.fitters_agree:
                self.logger.warning(f"ε = {eps:g}: coercive 与 oracle 的 sup 偏差相差超过 "
                                    f"{self.agreement_factor:g} 倍 ({record.sup_dev:.3e} vs {alt:.3e})")
        return record

    def run(self) -> RigidityReport:
        report = RigidityReport(self.config)
        for eps in self.config.epsilons:
            try:
                record = self.measure(eps)
                self.logger.info(f"ε = {eps:.3e}: sup = {record.sup_dev:.4e}, sobolev = {record.sobolev_dev:.4e}, "
                                 f"exp = {record.exp_int_ln16:.4f} ({record.fitter_used})")
            except (RigidityLabError, np.linalg.LinAlgError, FloatingPointError) as e:
                self.logger.error(f"ε = {eps:.3e}: 测量失败: {e}")
                record = RigidityRecord(eps, fitter_used=self.config.fitter, fit_fallback=True, error=str(e))
            report.records.append(record)
        report.exponents = fit_exponents(report.records)
        ex = report.exponents
        if ex.sup_slope is not None:
            self.logger.info(f"收敛阶: sup {ex.sup_slope:.4f}, sobolev {ex.sobolev_slope:.4f}, r² {ex.r2:.5f}")
        else:
            self.logger.info("偏差为零或点数不足，收敛阶未定义")
        return report


def run_rigidity(config: ExperimentConfig, write: bool = True) -> RigidityReport:
    report = RigidityExperiment(config).run()
    if write:
        report.write()
    return report


def pairwise_ratios(report: RigidityReport, name: str) -> List[float]:
    """相邻 ε 的偏差比，配合 ε 比检查阶数（与回归无关）"""
    recs = [r for r in report.records if r.ok]
    return [getattr(b, name) / getattr(a, name) for a, b in zip(recs, recs[1:])]
