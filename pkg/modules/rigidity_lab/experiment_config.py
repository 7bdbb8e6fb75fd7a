"""
实验配置 - Experiment Configuration (JSON)

字段名与 ExperimentConfig 完全一致，未知键一律拒绝。
所有错误都是带行号的 ConfigError：
- 语法错误取 JSON 解码器报告的位置
- 语义错误取出错键所在的行
"""

import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from modules.hgroup import HPoint, Ball, ConfigError
from modules.kerq import default_order
from .families import FamilySpec

logger = logging.getLogger(__name__)

FITTERS = ('coercive', 'oracle', 'both')
MIN_QUAD_ORDER = 4

DEFAULTS: Dict[str, Any] = {
    'sup_region_scale': 0.5,
    'p': 2.0,
    'samples': 100_000,
    'quad_order': 12,
    'seed': 0,
    'fitter': 'coercive',
    'output': 'reports/rigidity',
}
REQUIRED = ('n', 'family', 'epsilons', 'ball')


@dataclass
class ExperimentConfig:
    """一次刚性实验的全部参数"""
    n: int
    family: FamilySpec
    epsilons: List[float]
    ball: Ball
    sup_region_scale: float = 0.5
    p: float = 2.0
    samples: int = 100_000
    quad_order: int = 12
    seed: int = 0
    fitter: str = 'coercive'
    output: str = 'reports/rigidity'
    source: Optional[str] = field(default=None, compare=False)

    @property
    def sup_region(self) -> Ball:
        return self.ball.scaled(self.sup_region_scale)

    @property
    def csv_path(self) -> Path:
        return Path(self.output).with_suffix('.csv')

    @property
    def json_path(self) -> Path:
        return Path(self.output).with_suffix('.json')

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'family': str(self.family),
            'epsilons': list(self.epsilons),
            'ball': self.ball.to_dict(),
            'sup_region_scale': self.sup_region_scale,
            'p': self.p,
            'samples': self.samples,
            'quad_order': self.quad_order,
            'seed': self.seed,
            'fitter': self.fitter,
            'output': self.output,
        }


class _ConfigParser:
    """把 JSON 文本解析成 ExperimentConfig，记住每个键所在的行"""

    def __init__(self, text: str, path: Optional[str]):
        self.text = text
        self.path = path
        self.logger = logging.getLogger(__name__)

    def fail(self, message: str, key: Optional[str] = None, line: Optional[int] = None) -> ConfigError:
        if line is None and key is not None:
            line = self.line_of(key)
        return ConfigError(message, self.path, line)

    def line_of(self, key: str) -> Optional[int]:
        m = re.search(r'"' + re.escape(key) + r'"\s*:', self.text)
        if not m:
            return None
        return self.text.count('\n', 0, m.start()) + 1

    def parse(self) -> ExperimentConfig:
        try:
            data = json.loads(self.text)
        except json.JSONDecodeError as e:
            raise self.fail(f"JSON 语法错误: {e.msg}", line=e.lineno)
        if not isinstance(data, dict):
            raise self.fail("顶层必须是 JSON 对象", line=1)

        allowed = set(REQUIRED) | set(DEFAULTS)
        for key in data:
            if key not in allowed:
                raise self.fail(f"未知配置键: {key!r}", key)
        for key in REQUIRED:
            if key not in data:
                raise self.fail(f"缺少必需配置键: {key!r}", line=1)
        values = dict(DEFAULTS)
        values.update(data)

        n = self._int(values, 'n', 1)
        if 'quad_order' not in data:
            values['quad_order'] = default_order(n)
        family = self._family(values)
        epsilons = self._epsilons(values)
        ball = self._ball(values, n)
        q = self._real(values, 'sup_region_scale')
        if not 0 < q < 1:
            raise self.fail(f"sup_region_scale 必须在 (0, 1) 内: {q}", 'sup_region_scale')
        p = self._real(values, 'p')
        if p < 1:
            raise self.fail(f"p 必须 ≥ 1: {p}", 'p')
        samples = self._int(values, 'samples', 1)
        quad_order = self._int(values, 'quad_order', MIN_QUAD_ORDER)
        seed = self._int(values, 'seed', 0)
        fitter = values['fitter']
        if fitter not in FITTERS:
            raise self.fail(f"fitter 必须是 {'/'.join(FITTERS)} 之一: {fitter!r}", 'fitter')
        output = values['output']
        if not isinstance(output, str) or not output.strip():
            raise self.fail("output 必须是非空路径字符串", 'output')

        return ExperimentConfig(n, family, epsilons, ball, q, p, samples, quad_order, seed, fitter, output,
                                source=self.path)

    def _int(self, values: dict, key: str, minimum: int) -> int:
        v = values[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.fail(f"{key} 必须是整数: {v!r}", key)
        if v < minimum:
            raise self.fail(f"{key} 必须 ≥ {minimum}: {v}", key)
        return v

    def _real(self, values: dict, key: str) -> float:
        v = values[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise self.fail(f"{key} 必须是有限实数: {v!r}", key)
        return float(v)

    def _family(self, values: dict) -> FamilySpec:
        try:
            return FamilySpec.parse(values['family'], default_seed=values.get('seed', 0)
                                    if isinstance(values.get('seed', 0), int) else 0)
        except ConfigError as e:
            raise self.fail(e.message, 'family')

    def _epsilons(self, values: dict) -> List[float]:
        eps = values['epsilons']
        if not isinstance(eps, list) or not eps:
            raise self.fail("epsilons 必须是非空数组", 'epsilons')
        out = []
        for v in eps:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
                raise self.fail(f"epsilons 的元素必须是正实数: {v!r}", 'epsilons')
            out.append(float(v))
        if any(a <= b for a, b in zip(out, out[1:])):
            raise self.fail("epsilons 必须严格降序", 'epsilons')
        return out

    def _ball(self, values: dict, n: int) -> Ball:
        b = values['ball']
        if not isinstance(b, dict) or set(b) != {'center', 'radius'}:
            raise self.fail('ball 必须是 {"center": [...], "radius": r}', 'ball')
        center, radius = b['center'], b['radius']
        if (not isinstance(center, list) or len(center) != 2 * n + 1
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in center)):
            raise self.fail(f"ball.center 必须是长度 {2 * n + 1} 的数组", 'center')
        if isinstance(radius, bool) or not isinstance(radius, (int, float)) or not radius > 0:
            raise self.fail(f"ball.radius 必须为正: {radius!r}", 'radius')
        return Ball(HPoint.from_coords([float(c) for c in center]), float(radius))


def parse_experiment_config(text: str, path: Optional[str] = None) -> ExperimentConfig:
    return _ConfigParser(text, path).parse()


def load_experiment_config(path) -> ExperimentConfig:
    """
    读取实验配置文件

    Raises:
        ConfigError: 文件不存在、语法错误或语义错误（带行号）
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f"无法读取配置文件: {e.strerror or e}", str(path))
    config = parse_experiment_config(text, str(path))
    logger.info(f"实验配置已加载: {path} (n = {config.n}, 族 = {config.family}, {len(config.epsilons)} 个 ε)")
    return config


def config_template(n: int = 2) -> dict:
    """带默认值的配置骨架"""
    out = {
        'n': n,
        'family': 'dilation',
        'epsilons': [1e-1, 1e-2, 1e-3],
        'ball': {'center': [0.0] * (2 * n + 1), 'radius': 1.0},
    }
    out.update(DEFAULTS)
    out['quad_order'] = default_order(n)
    return out
