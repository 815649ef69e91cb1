"""
带分解信息的模数
负责 m = p_1^{e_1} ... p_r^{e_r} 的构造、校验、分解与序列化
"""

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Any, Dict, Iterable, List, Tuple

from sympy import isprime

from ..errors import FactorizationLimitExceeded, InputTooSmall, ParseError


logger = logging.getLogger(__name__)

DEFAULT_TRIAL_BOUND = 10**6


@dataclass(frozen=True)
class FactoredModulus:
    """模数及其素数幂分解，下标 i 从 1 开始"""

    m: int
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.m < 2:
            raise InputTooSmall(f"模数必须 >= 2: {self.m}")
        if not self.factors:
            raise ParseError("分解不能为空")

        previous = 1
        for p, e in self.factors:
            if p < 2 or p <= previous:
                raise ParseError(f"素数必须严格递增且 >= 2: {self.factors}")
            if e < 1:
                raise ParseError(f"指数必须 >= 1: {self.factors}")
            previous = p

        if prod(p**e for p, e in self.factors) != self.m:
            raise ParseError(f"分解乘积不等于 {self.m}: {self.factors}")

    @classmethod
    def from_factors(cls, factors: Iterable[Tuple[int, int]]) -> "FactoredModulus":
        """由 (p, e) 列表构造，允许无序输入"""
        merged: Dict[int, int] = {}
        for p, e in factors:
            p, e = int(p), int(e)
            merged[p] = merged.get(p, 0) + e

        ordered = tuple(sorted(merged.items()))
        for p, _ in ordered:
            if p >= 2 and not isprime(p):
                raise ParseError(f"{p} 不是素数")

        m = prod(p**e for p, e in ordered) if ordered else 0
        return cls(m=m, factors=ordered)

    @property
    def r(self) -> int:
        return len(self.factors)

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(e for _, e in self.factors)

    @cached_property
    def prime_powers(self) -> Tuple[int, ...]:
        return tuple(p**e for p, e in self.factors)

    @property
    def max_exponent(self) -> int:
        return max(self.exponents)

    @property
    def indices(self) -> range:
        """R = {1, ..., r}"""
        return range(1, self.r + 1)

    @property
    def is_odd(self) -> bool:
        return self.m % 2 == 1

    def prime(self, i: int) -> int:
        return self.factors[i - 1][0]

    def prime_power(self, i: int) -> int:
        return self.prime_powers[i - 1]

    def to_text(self) -> str:
        """文本形式 p1^e1*p2^e2*..."""
        return "*".join(f"{p}^{e}" for p, e in self.factors)

    def to_dict(self) -> Dict[str, Any]:
        """JSON 形式，整数一律为十进制字符串"""
        return {
            "m": str(self.m),
            "factors": [[str(p), str(e)] for p, e in self.factors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __str__(self):
        return f"{self.m} = {self.to_text()}"


def factorize(n: int, bound: int = DEFAULT_TRIAL_BOUND) -> FactoredModulus:
    """
    试除分解

    Args:
        n: 待分解整数，>= 2
        bound: 试除上界

    Returns:
        FactoredModulus

    Raises:
        InputTooSmall: n < 2
        FactorizationLimitExceeded: 剩余因子超过上界且不是素数
    """
    if n < 2:
        raise InputTooSmall(f"模数必须 >= 2: {n}")

    factors: List[Tuple[int, int]] = []
    residual = n

    def strip(d: int):
        nonlocal residual
        e = 0
        while residual % d == 0:
            residual //= d
            e += 1
        if e:
            factors.append((d, e))

    strip(2)
    d = 3
    while d <= bound and d * d <= residual:
        strip(d)
        d += 2

    if residual > 1:
        # 试除已覆盖 sqrt(residual) 时剩余部分必为素数
        if d * d > residual or isprime(residual):
            factors.append((residual, 1))
        else:
            raise FactorizationLimitExceeded(
                f"{n} 在试除上界 {bound} 内无法完全分解，剩余合数因子 {residual}；"
                f"请以 p1^e1*p2^e2 形式直接提供分解"
            )

    logger.debug(f"分解 {n} -> {factors}")
    return FactoredModulus(m=n, factors=tuple(factors))
