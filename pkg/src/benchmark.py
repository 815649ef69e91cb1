"""
模幂基准测试
对同一批 (b, e) 比较幂等元-CRT 分派与平方-乘的耗时，并统计结果不一致的次数
"""

import logging
import random
from collections import Counter
from math import ceil
from time import perf_counter_ns
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from .arithmetic import FactoredModulus, TotientKind, pow_mod
from .errors import BadParams
from .modexp import PerPrimeMode, Strategy, modexp_auto


logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10_000
DEFAULT_EXPONENT_BITS = 64
DEFAULT_SEED = 20240601


class TimingStats(BaseModel):
    """单组计时的分位数（纳秒）"""

    count: int = 0
    median_ns: Optional[int] = None
    p95_ns: Optional[int] = None


class BenchmarkReport(BaseModel):
    modulus: Dict[str, Any]
    samples: int
    exponent_bits: int
    seed: int
    totient_kind: str
    per_prime_mode: str
    strategy_histogram: Dict[str, int] = Field(default_factory=dict)
    auto: TimingStats = Field(default_factory=TimingStats)
    baseline: TimingStats = Field(default_factory=TimingStats)
    per_strategy: Dict[str, Dict[str, TimingStats]] = Field(default_factory=dict)
    mismatch_count: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def quantile(values: List[int], q: float) -> Optional[int]:
    """最近秩法分位数，空列表返回 None"""
    if not values:
        return None
    ordered = sorted(values)
    rank = max(1, ceil(q * len(ordered)))
    return ordered[rank - 1]


def timing_stats(values: List[int]) -> TimingStats:
    return TimingStats(
        count=len(values),
        median_ns=quantile(values, 0.5),
        p95_ns=quantile(values, 0.95),
    )


def draw_samples(
    modulus: FactoredModulus, sample_count: int, exponent_bits: int, seed: int
) -> List[Tuple[int, int]]:
    """由种子确定的 (b, e) 样本；e 在 [0, 2^bits) 内"""
    if sample_count < 1:
        raise BadParams(f"样本数必须为正: {sample_count}")
    if exponent_bits < 1:
        raise BadParams(f"指数位数必须为正: {exponent_bits}")
    rng = random.Random(seed)
    return [
        (rng.randrange(modulus.m), rng.getrandbits(exponent_bits))
        for _ in range(sample_count)
    ]


def bench_compare(
    modulus: FactoredModulus,
    sample_count: int = DEFAULT_SAMPLES,
    exponent_bits: int = DEFAULT_EXPONENT_BITS,
    seed: int = DEFAULT_SEED,
    totient_kind: TotientKind = TotientKind.EULER,
    per_prime_mode: PerPrimeMode = PerPrimeMode.MODULUS,
    console: Optional[Console] = None,
) -> BenchmarkReport:
    """
    对比 modexp_auto 与 pow_mod

    Args:
        modulus: 模数
        sample_count: 样本数
        exponent_bits: 指数位数
        seed: 随机种子
        totient_kind: 指数约化所用函数
        per_prime_mode: 分项计算方式
        console: 传入时显示进度条

    Returns:
        基准报告，mismatch_count 必须为 0
    """
    samples = draw_samples(modulus, sample_count, exponent_bits, seed)
    totient_kind = TotientKind(totient_kind)
    per_prime_mode = PerPrimeMode(per_prime_mode)

    histogram: Counter = Counter()
    auto_times: Dict[str, List[int]] = {s.name: [] for s in Strategy}
    baseline_times: Dict[str, List[int]] = {s.name: [] for s in Strategy}
    mismatches = 0

    progress = None
    if console is not None:
        progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            console=console,
            transient=True,
        )
        progress.start()
        task = progress.add_task(f"基准测试 m={modulus.m}", total=len(samples))

    try:
        for b, e in samples:
            start = perf_counter_ns()
            value, plan = modexp_auto(modulus, b, e, totient_kind, per_prime_mode)
            auto_ns = perf_counter_ns() - start

            start = perf_counter_ns()
            expected = pow_mod(b, e, modulus.m)
            baseline_ns = perf_counter_ns() - start

            name = plan.strategy.name
            histogram[name] += 1
            auto_times[name].append(auto_ns)
            baseline_times[name].append(baseline_ns)

            if value != expected:
                mismatches += 1
                logger.error(f"结果不一致: m={modulus.m} b={b} e={e} 得到 {value}，应为 {expected}")

            if progress is not None:
                progress.update(task, advance=1)
    finally:
        if progress is not None:
            progress.stop()

    all_auto = [t for times in auto_times.values() for t in times]
    all_baseline = [t for times in baseline_times.values() for t in times]

    report = BenchmarkReport(
        modulus=modulus.to_dict(),
        samples=len(samples),
        exponent_bits=exponent_bits,
        seed=seed,
        totient_kind=totient_kind.value,
        per_prime_mode=per_prime_mode.value,
        strategy_histogram={name: histogram[name] for name in sorted(histogram)},
        auto=timing_stats(all_auto),
        baseline=timing_stats(all_baseline),
        per_strategy={
            name: {
                "auto": timing_stats(auto_times[name]),
                "baseline": timing_stats(baseline_times[name]),
            }
            for name in sorted(histogram)
        },
        mismatch_count=mismatches,
    )

    logger.info(
        f"基准完成 m={modulus.m}: {len(samples)} 个样本，"
        f"中位数 auto={report.auto.median_ns}ns baseline={report.baseline.median_ns}ns"
    )
    return report


class ModExpBenchmark:
    """模幂基准工具 - 从配置读取默认样本数、位数与种子"""

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        bench_config = config.get("benchmark", {})
        modexp_config = config.get("modexp", {})

        self.samples = bench_config.get("samples", DEFAULT_SAMPLES)
        self.exponent_bits = bench_config.get("exponent_bits", DEFAULT_EXPONENT_BITS)
        self.seed = bench_config.get("seed", DEFAULT_SEED)
        self.totient_kind = TotientKind(modexp_config.get("totient_kind", "euler"))
        self.per_prime_mode = PerPrimeMode(modexp_config.get("per_prime_mode", "modulus"))

    def run(
        self,
        modulus: FactoredModulus,
        samples: Optional[int] = None,
        exponent_bits: Optional[int] = None,
        seed: Optional[int] = None,
        console: Optional[Console] = None,
    ) -> BenchmarkReport:
        return bench_compare(
            modulus,
            sample_count=samples if samples is not None else self.samples,
            exponent_bits=exponent_bits if exponent_bits is not None else self.exponent_bits,
            seed=seed if seed is not None else self.seed,
            totient_kind=self.totient_kind,
            per_prime_mode=self.per_prime_mode,
            console=console,
        )

    def __str__(self):
        return "模幂基准：幂等元-CRT 分派 vs 平方-乘"

    def __repr__(self):
        return f"ModExpBenchmark(samples={self.samples}, bits={self.exponent_bits}, seed={self.seed})"
