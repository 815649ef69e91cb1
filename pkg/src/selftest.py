"""
自检模块
对一段模数区间跑完整的不变量校验：幂等元结构、恒等式目录、格、幂图与模幂
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from math import gcd, lcm
from typing import Any, Callable, Dict, List, Optional

from pydantic import BaseModel, Field
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from .arithmetic import FactoredModulus, TotientKind, factorize, pow_mod
from .errors import InvariantViolation
from .idempotents import IndexSet, enumerate_idempotents, idempotent_from_set
from .identities import IdentityId, parameter_instances, verify_identity
from .lattice import (
    GeneralIdentityId,
    consistent_lattice,
    general_parameter_instances,
    join,
    leq,
    leq_by_divisibility,
    meet,
    verify_general_identity,
)
from .modexp import modexp_auto, modexp_cycle, modexp_general, modexp_unit
from .tools.power_graph import (
    component_elements,
    component_of,
    component_set,
    cycle_elements,
    graph_components,
    is_cycle_element,
    orbit,
    power_graph,
)


logger = logging.getLogger(__name__)

MAX_REPORTED_FAILURES = 50


class ModulusResult(BaseModel):
    """单个模数的校验结果"""

    m: int
    checks: Dict[str, int] = Field(default_factory=dict)
    failures: List[str] = Field(default_factory=list)


class SelfTestReport(BaseModel):
    low: int
    high: int
    moduli_checked: int = 0
    checks: Dict[str, int] = Field(default_factory=dict)
    failure_count: int = 0
    failures: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode="json")
        data["passed"] = self.passed
        return data


class _Recorder:
    def __init__(self, m: int):
        self.result = ModulusResult(m=m)
        self.counts: Counter = Counter()

    def check(self, area: str, ok: bool, detail: Callable[[], str]):
        self.counts[area] += 1
        if not ok:
            self.result.failures.append(f"[{area}] m={self.result.m}: {detail()}")

    def finish(self) -> ModulusResult:
        self.result.checks = dict(self.counts)
        return self.result


def _check_idempotents(modulus: FactoredModulus, rec: _Recorder):
    m = modulus.m
    brute = {x for x in range(m) if x * x % m == x}
    found = [d.value for d in enumerate_idempotents(modulus)]
    rec.check(
        "idempotents",
        set(found) == brute and len(found) == 2**modulus.r,
        lambda: f"枚举 {sorted(found)} vs 暴力 {sorted(brute)}",
    )
    for d in enumerate_idempotents(modulus):
        rec.check("idempotents", gcd(d.value, m) == d.g, lambda: f"gcd(d_I, m) != g_I, I={d.index_set!r}")


def _check_identities(modulus: FactoredModulus, rec: _Recorder):
    for identity in IdentityId:
        for params in parameter_instances(modulus, identity):
            report = verify_identity(modulus, identity, params)
            rec.check(
                "identities",
                report.all_hold,
                lambda: f"{identity.value} {report.parameters}",
            )


def _check_general_identities(modulus: FactoredModulus, rec: _Recorder):
    r = modulus.r
    for S in IndexSet.all_subsets(r):
        for T in S.subsets():
            lattice = consistent_lattice(modulus, S, T)
            for identity in GeneralIdentityId:
                for params in general_parameter_instances(lattice, identity):
                    report = verify_general_identity(lattice, identity, params)
                    rec.check(
                        "general_identities",
                        report.all_hold,
                        lambda: f"{identity.value} S={S!r} T={T!r} {report.parameters}",
                    )


def _check_lattice(modulus: FactoredModulus, rec: _Recorder):
    elements = enumerate_idempotents(modulus)
    for a in elements:
        for b in elements:
            rec.check(
                "lattice",
                leq(a, b) == leq_by_divisibility(a, b),
                lambda: f"序关系不一致 {a.index_set!r} {b.index_set!r}",
            )
            j, k = join(a, b), meet(a, b)
            rec.check(
                "lattice",
                j.index_set == a.index_set | b.index_set
                and k.index_set == a.index_set & b.index_set
                and j.g == lcm(a.g, b.g)
                and k.g == gcd(a.g, b.g),
                lambda: f"并/交错误 {a.index_set!r} {b.index_set!r}",
            )


def _check_cycle_group(modulus: FactoredModulus, s: IndexSet, rec: _Recorder) -> set:
    """
    d_I·U 是以 d_I 为单位元的群

    对每个 a，x -> a·x 在集合上是双射：像落在集合内即封闭，d_I 在像中即 a 有逆元
    """
    m = modulus.m
    d = idempotent_from_set(modulus, s).value
    cycle = cycle_elements(modulus, s)
    cycle_set = set(cycle)
    rec.check("power_graph", d in cycle_set, lambda: f"d_I 不在 d_I·U 中, I={s!r}")
    for a in cycle:
        image = {a * x % m for x in cycle}
        rec.check("power_graph", image <= cycle_set, lambda: f"d_I·U 对乘法不封闭: {a}, I={s!r}")
        rec.check("power_graph", d in image, lambda: f"{a} 在 d_I·U 中没有逆元, I={s!r}")
        rec.check("power_graph", d * a % m == a, lambda: f"d_I 不是 {a} 的单位元, I={s!r}")
    return cycle_set


def _check_power_graph(modulus: FactoredModulus, rec: _Recorder, graph_cap: int):
    m = modulus.m
    covered: List[int] = []
    cycles: Dict[int, set] = {}
    for s in IndexSet.all_subsets(modulus.r):
        members = component_elements(modulus, s)
        covered.extend(members)
        descriptor = component_of(modulus, members[0])
        rec.check(
            "power_graph",
            descriptor.index_set == s and descriptor.size == len(members),
            lambda: f"分量 {s!r} 的大小或下标集合错误",
        )

        cycles[s.mask] = _check_cycle_group(modulus, s, rec)

    rec.check("power_graph", sorted(covered) == list(range(m)), lambda: "分量未划分 [0, m)")

    for a in range(m):
        decomposition = orbit(modulus, a)
        rec.check(
            "power_graph",
            decomposition.idempotent(modulus) == component_of(modulus, a).idempotent.value,
            lambda: f"轨道 {a} 的幂等元与分量不符",
        )
        rec.check(
            "power_graph",
            (decomposition.tail_length == 0) == is_cycle_element(modulus, a),
            lambda: f"{a} 的尾部与循环元判定不符",
        )
        rec.check(
            "power_graph",
            is_cycle_element(modulus, a) == (a in cycles[component_set(modulus, a).mask]),
            lambda: f"{a} 的循环元判定与 d_I·U 成员关系不符",
        )

    if m <= graph_cap:
        components = graph_components(modulus, power_graph(modulus, graph_cap))
        rec.check(
            "power_graph",
            len(components) == 2**modulus.r,
            lambda: f"幂图分量数 {len(components)} != 2^r",
        )


def _check_modexp(modulus: FactoredModulus, rec: _Recorder, max_exponent: int):
    m = modulus.m
    for kind in TotientKind:
        for b in range(m):
            unit = gcd(b, m) == 1
            cycle = is_cycle_element(modulus, b)
            for e in range(max_exponent + 1):
                expected = pow_mod(b, e, m)
                value, plan = modexp_auto(modulus, b, e, kind)
                rec.check("modexp", value == expected, lambda: f"auto {b}^{e} -> {value}, 应为 {expected}")
                if unit:
                    got = modexp_unit(modulus, b, e, kind)
                    rec.check("modexp", got == expected, lambda: f"unit {b}^{e} -> {got}")
                if cycle and e >= 1:
                    got = modexp_cycle(modulus, b, e, kind)
                    rec.check("modexp", got == expected, lambda: f"cycle {b}^{e} -> {got}")
                if e >= modulus.max_exponent:
                    got = modexp_general(modulus, b, e, kind)
                    rec.check("modexp", got == expected, lambda: f"general {b}^{e} -> {got}")


def check_modulus(m: int, settings: Dict[str, Any]) -> ModulusResult:
    """对单个模数执行全部校验，供进程池调用"""
    trial_bound = settings.get("arithmetic", {}).get("trial_division_bound", 10**6)
    max_exponent = settings.get("selftest", {}).get("max_exponent", 40)
    graph_cap = settings.get("enumeration", {}).get("max_graph_modulus", 5000)
    areas = settings.get("selftest", {}).get("areas")

    modulus = factorize(m, trial_bound)
    rec = _Recorder(m)
    steps = {
        "idempotents": lambda: _check_idempotents(modulus, rec),
        "identities": lambda: _check_identities(modulus, rec),
        "general_identities": lambda: _check_general_identities(modulus, rec),
        "lattice": lambda: _check_lattice(modulus, rec),
        "power_graph": lambda: _check_power_graph(modulus, rec, graph_cap),
        "modexp": lambda: _check_modexp(modulus, rec, max_exponent),
    }
    for area, step in steps.items():
        if areas is None or area in areas:
            try:
                step()
            except InvariantViolation as e:
                rec.check(area, False, lambda: str(e))
    return rec.finish()


class SelfTestRunner:
    """自检运行器 - max_workers > 1 时按模数分发到进程池"""

    def __init__(self, config: Dict[str, Any]):
        """
        初始化自检运行器

        Args:
            config: 配置字典
        """
        self.config = config
        selftest_config = config.get("selftest", {})
        self.max_workers = selftest_config.get("max_workers", 1)
        self.max_exponent = selftest_config.get("max_exponent", 40)

    def run(
        self,
        low: int,
        high: int,
        areas: Optional[List[str]] = None,
        console: Optional[Console] = None,
    ) -> SelfTestReport:
        """
        校验 [low, high] 内全部模数

        Args:
            low: 下界，>= 2
            high: 上界
            areas: 只跑指定的校验项，None 表示全部
            console: 传入时显示进度条

        Returns:
            SelfTestReport
        """
        settings = dict(self.config)
        settings["selftest"] = {**self.config.get("selftest", {}), "areas": areas}
        moduli = list(range(low, high + 1))
        results: List[ModulusResult] = []

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
            task = progress.add_task(f"自检 m ∈ [{low}, {high}]", total=len(moduli))

        def advance():
            if progress is not None:
                progress.update(task, advance=1)

        try:
            if self.max_workers > 1 and len(moduli) > 1:
                with ProcessPoolExecutor(max_workers=self.max_workers) as executor:
                    futures = [executor.submit(check_modulus, m, settings) for m in moduli]
                    for future in as_completed(futures):
                        results.append(future.result())
                        advance()
            else:
                for m in moduli:
                    results.append(check_modulus(m, settings))
                    advance()
        finally:
            if progress is not None:
                progress.stop()

        return self._merge(low, high, results)

    @staticmethod
    def _merge(low: int, high: int, results: List[ModulusResult]) -> SelfTestReport:
        totals: Counter = Counter()
        failures: List[str] = []
        for result in sorted(results, key=lambda r: r.m):
            totals.update(result.checks)
            failures.extend(result.failures)

        report = SelfTestReport(
            low=low,
            high=high,
            moduli_checked=len(results),
            checks=dict(sorted(totals.items())),
            failure_count=len(failures),
            failures=failures[:MAX_REPORTED_FAILURES],
        )
        if report.passed:
            logger.info(f"自检通过: m ∈ [{low}, {high}]，共 {sum(totals.values())} 项")
        else:
            logger.warning(f"自检失败: {report.failure_count} 项不通过")
        return report

    def __str__(self):
        return "自检：不变量全量校验"

    def __repr__(self):
        return f"SelfTestRunner(max_workers={self.max_workers})"
