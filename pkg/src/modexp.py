"""
基于幂等元与 CRT 的模幂运算

b^e ≡ Σ_{i ∈ R\\T} d_i · b^{e mod φ(p_i^{e_i})} (mod m)，d_i = d_{R\\{i}}
约化后的指数为 0 时该项取 d_i 本身
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import gcd
from typing import Any, Dict, List, Tuple

from .arithmetic import FactoredModulus, TotientKind, pow_mod, totient_prime_power
from .errors import BadParams, ExponentTooSmall, NotAUnit, NotCycleElement
from .idempotents import IndexSet, idempotent_value, primitive_values
from .tools.power_graph import component_mask, is_cycle_element


logger = logging.getLogger(__name__)


class Strategy(str, Enum):
    UNIT = "unit"
    CYCLE = "cycle"
    GENERAL = "general"
    FALLBACK = "fallback"


class PerPrimeMode(str, Enum):
    """每个素数幂分项的计算方式"""

    # 直接在模 m 下做平方-乘
    MODULUS = "modulus"
    # 先约化到模 p_i^{e_i} 再用 d_i 提升
    CRT = "crt"


@dataclass(frozen=True)
class ExpPlan:
    """一次模幂的执行计划"""

    modulus: FactoredModulus
    strategy: Strategy
    active_indices: IndexSet
    reduced_exponents: Tuple[Tuple[int, int], ...]
    totient_kind: TotientKind
    base: int
    exponent: int

    @property
    def term_count(self) -> int:
        return len(self.reduced_exponents)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy.value.upper(),
            "active_indices": list(self.active_indices.members),
            "reduced_exponents": [[i, str(e)] for i, e in self.reduced_exponents],
            "totient_kind": self.totient_kind.value,
            "base": str(self.base),
            "exponent": str(self.exponent),
        }


def _normalize(modulus: FactoredModulus, b: int, e: int) -> int:
    if e < 0:
        raise BadParams(f"指数必须非负: {e}")
    return b % modulus.m


@lru_cache(maxsize=4096)
def _totients(modulus: FactoredModulus, kind: TotientKind) -> Tuple[int, ...]:
    """各 p_i^{e_i} 的 φ 或 λ，第 i-1 项对应下标 i"""
    return tuple(totient_prime_power(p, e, kind) for p, e in modulus.factors)


def _reduced_exponents(
    modulus: FactoredModulus, active: IndexSet, e: int, kind: TotientKind
) -> Tuple[Tuple[int, int], ...]:
    totients = _totients(modulus, TotientKind(kind))
    return tuple((i, e % totients[i - 1]) for i in active.members)


def _evaluate(
    modulus: FactoredModulus,
    b: int,
    reduced: Tuple[Tuple[int, int], ...],
    mode: PerPrimeMode = PerPrimeMode.MODULUS,
) -> int:
    """Σ d_i · b^{e_i'}，e_i' = 0 时该项为 d_i"""
    m = modulus.m
    primitives = primitive_values(modulus)
    per_prime = PerPrimeMode(mode) is PerPrimeMode.CRT
    total = 0
    for i, exponent in reduced:
        d_i = primitives[i - 1]
        if exponent == 0:
            total += d_i
        elif per_prime:
            q = modulus.prime_power(i)
            total += d_i * pow_mod(b % q, exponent, q)
        else:
            total += d_i * pow_mod(b, exponent, m)
    return total % m


def _plan(
    modulus: FactoredModulus,
    strategy: Strategy,
    active: IndexSet,
    b: int,
    e: int,
    kind: TotientKind,
) -> ExpPlan:
    kind = TotientKind(kind)
    return ExpPlan(
        modulus=modulus,
        strategy=strategy,
        active_indices=active,
        reduced_exponents=_reduced_exponents(modulus, active, e, kind),
        totient_kind=kind,
        base=b,
        exponent=e,
    )


def _run(modulus, strategy, active, b, e, kind, mode) -> Tuple[int, ExpPlan]:
    """前提已检查、b 已约化后按活动下标求和"""
    plan = _plan(modulus, strategy, active, b, e, kind)
    return _evaluate(modulus, b, plan.reduced_exponents, mode), plan


def _outside(modulus: FactoredModulus, mask: int) -> IndexSet:
    """R \\ I，I 为 b 所在分量"""
    return IndexSet(mask, modulus.r).complement()


def modexp_unit(
    modulus: FactoredModulus,
    u: int,
    e: int,
    totient_kind: TotientKind = TotientKind.EULER,
    mode: PerPrimeMode = PerPrimeMode.MODULUS,
) -> int:
    """u 为单位时对全部 r 个顶层幂等元求和"""
    return _modexp_unit(modulus, u, e, totient_kind, mode)[0]


def _modexp_unit(modulus, u, e, kind, mode) -> Tuple[int, ExpPlan]:
    u = _normalize(modulus, u, e)
    if gcd(u, modulus.m) != 1:
        raise NotAUnit(f"gcd({u}, {modulus.m}) != 1")
    return _run(modulus, Strategy.UNIT, IndexSet.full(modulus.r), u, e, kind, mode)


def modexp_cycle(
    modulus: FactoredModulus,
    b: int,
    e: int,
    totient_kind: TotientKind = TotientKind.EULER,
    mode: PerPrimeMode = PerPrimeMode.MODULUS,
) -> int:
    """b 为循环元 (d_I·b ≡ b) 时只对 i ∈ R\\I 求和，要求 e >= 1"""
    return _modexp_cycle(modulus, b, e, totient_kind, mode)[0]


def _modexp_cycle(modulus, b, e, kind, mode) -> Tuple[int, ExpPlan]:
    b = _normalize(modulus, b, e)
    if not is_cycle_element(modulus, b):
        raise NotCycleElement(f"{b} 不是模 {modulus.m} 的循环元")
    if e < 1:
        raise BadParams(f"循环元算法要求 e >= 1: e = {e}")
    active = _outside(modulus, component_mask(modulus, b))
    return _run(modulus, Strategy.CYCLE, active, b, e, kind, mode)


def modexp_general(
    modulus: FactoredModulus,
    b: int,
    e: int,
    totient_kind: TotientKind = TotientKind.EULER,
    mode: PerPrimeMode = PerPrimeMode.MODULUS,
) -> int:
    """任意 b，要求 e >= max(e_i)；对 i ∈ R\\T 求和，T 为 b 的分量"""
    return _modexp_general(modulus, b, e, totient_kind, mode)[0]


def _modexp_general(modulus, b, e, kind, mode) -> Tuple[int, ExpPlan]:
    b = _normalize(modulus, b, e)
    if e < modulus.max_exponent:
        raise ExponentTooSmall(f"e = {e} < max(e_i) = {modulus.max_exponent}")
    active = _outside(modulus, component_mask(modulus, b))
    return _run(modulus, Strategy.GENERAL, active, b, e, kind, mode)


def modexp_auto(
    modulus: FactoredModulus,
    b: int,
    e: int,
    totient_kind: TotientKind = TotientKind.EULER,
    mode: PerPrimeMode = PerPrimeMode.MODULUS,
) -> Tuple[int, ExpPlan]:
    """
    自动选择定理

    依次尝试 UNIT、CYCLE、GENERAL，都不适用时退回平方-乘；e = 0 一律返回 1

    Returns:
        (b^e mod m, ExpPlan)
    """
    b = _normalize(modulus, b, e)
    m = modulus.m

    if e == 0:
        plan = _plan(modulus, Strategy.FALLBACK, IndexSet.empty(modulus.r), b, e, totient_kind)
        return 1, plan

    if gcd(b, m) == 1:
        result = _run(modulus, Strategy.UNIT, IndexSet.full(modulus.r), b, e, totient_kind, mode)
    else:
        mask = component_mask(modulus, b)
        if idempotent_value(modulus, mask) * b % m == b:
            result = _run(modulus, Strategy.CYCLE, _outside(modulus, mask), b, e, totient_kind, mode)
        elif e >= modulus.max_exponent:
            result = _run(modulus, Strategy.GENERAL, _outside(modulus, mask), b, e, totient_kind, mode)
        else:
            logger.debug(f"{b} 非循环元且 e = {e} < max(e_i)，退回平方-乘")
            plan = _plan(modulus, Strategy.FALLBACK, IndexSet.empty(modulus.r), b, e, totient_kind)
            result = (pow_mod(b, e, m), plan)

    logger.debug(f"modexp m={m} b={b} e={e}: {result[1].strategy.value}")
    return result


def modexp_with_strategy(
    modulus: FactoredModulus,
    b: int,
    e: int,
    strategy: str = "auto",
    totient_kind: TotientKind = TotientKind.EULER,
    mode: PerPrimeMode = PerPrimeMode.MODULUS,
) -> Tuple[int, ExpPlan]:
    """按名称强制某个定理；baseline 直接平方-乘"""
    if strategy == "auto":
        return modexp_auto(modulus, b, e, totient_kind, mode)
    if strategy == "baseline":
        b = _normalize(modulus, b, e)
        plan = _plan(modulus, Strategy.FALLBACK, IndexSet.empty(modulus.r), b, e, totient_kind)
        return pow_mod(b, e, modulus.m), plan

    forced = {
        "unit": _modexp_unit,
        "cycle": _modexp_cycle,
        "general": _modexp_general,
    }
    if strategy not in forced:
        raise BadParams(f"未知的策略: {strategy}")
    return forced[strategy](modulus, b, e, totient_kind, mode)


def strategy_names() -> List[str]:
    return ["auto", "unit", "cycle", "general", "baseline"]
