"""
幂等元模块
负责 Z/mZ 中幂等元的构造、枚举与组合运算

每个幂等元 d_I 由下标集合 I ⊆ R 唯一确定：
d_I ≡ 0 (mod p_i^{e_i})，i ∈ I；d_I ≡ 1 (mod p_j^{e_j})，j ∉ I
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from itertools import combinations
from math import gcd, prod
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple

from .arithmetic import FactoredModulus, crt_combine
from .errors import CapExceeded, IndexOutOfRange, InvariantViolation, MixedModuli


logger = logging.getLogger(__name__)

DEFAULT_MAX_R = 24


@dataclass(frozen=True, order=True)
class IndexSet:
    """
    下标集合 I ⊆ {1..r}，以位掩码存储，第 i-1 位对应下标 i

    子集枚举顺序一律为掩码升序
    """

    mask: int
    width: int

    def __post_init__(self):
        if self.width < 0 or self.mask < 0 or self.mask >> self.width:
            raise IndexOutOfRange(f"掩码 {self.mask:b} 超出宽度 {self.width}")

    @classmethod
    def of(cls, indices: Iterable[int], width: int) -> "IndexSet":
        mask = 0
        for i in indices:
            if not 1 <= i <= width:
                raise IndexOutOfRange(f"下标 {i} 不在 1..{width} 内")
            mask |= 1 << (i - 1)
        return cls(mask, width)

    @classmethod
    def empty(cls, width: int) -> "IndexSet":
        return cls(0, width)

    @classmethod
    def full(cls, width: int) -> "IndexSet":
        return cls((1 << width) - 1, width)

    @classmethod
    def all_subsets(cls, width: int) -> Iterator["IndexSet"]:
        for mask in range(1 << width):
            yield cls(mask, width)

    @property
    def members(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in range(self.width) if self.mask >> i & 1)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, i: int) -> bool:
        return 1 <= i <= self.width and bool(self.mask >> (i - 1) & 1)

    def _check(self, other: "IndexSet"):
        if self.width != other.width:
            raise IndexOutOfRange(f"集合宽度不一致: {self.width} vs {other.width}")

    def __or__(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(self.mask | other.mask, self.width)

    def __and__(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(self.mask & other.mask, self.width)

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(self.mask & ~other.mask, self.width)

    def complement(self) -> "IndexSet":
        """R \\ I"""
        return IndexSet(~self.mask & ((1 << self.width) - 1), self.width)

    def issubset(self, other: "IndexSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "IndexSet") -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    def with_index(self, i: int) -> "IndexSet":
        return self | IndexSet.of([i], self.width)

    def without_index(self, i: int) -> "IndexSet":
        return self - IndexSet.of([i], self.width)

    def subsets(self) -> List["IndexSet"]:
        """I 的全部子集，掩码升序"""
        found = []
        sub = self.mask
        # (sub - 1) & mask 按数值降序遍历子掩码
        while True:
            found.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & self.mask
        return [IndexSet(s, self.width) for s in reversed(found)]

    def supersets_within(self, outer: "IndexSet") -> List["IndexSet"]:
        """满足 self ⊆ K ⊆ outer 的全部 K，掩码升序"""
        self._check(outer)
        if not self.issubset(outer):
            return []
        return [self | s for s in (outer - self).subsets()]

    def subsets_of_size(self, k: int) -> List["IndexSet"]:
        """I 中所有 k 元子集，掩码升序"""
        found = [IndexSet.of(c, self.width) for c in combinations(self.members, k)]
        return sorted(found)

    def __repr__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


@lru_cache(maxsize=65536)
def idempotent_value(modulus: FactoredModulus, mask: int) -> int:
    """d_I 的数值，I 以掩码给出"""
    residues = [
        (0 if mask >> (i - 1) & 1 else 1, modulus.prime_power(i))
        for i in modulus.indices
    ]
    return crt_combine(residues)


@dataclass(frozen=True)
class Idempotent:
    """幂等元 d_I 及其伴随量 g_I"""

    modulus: FactoredModulus
    index_set: IndexSet
    value: int
    g: int

    @property
    def cofactor(self) -> int:
        """a_I = d_I / g_I（取最小非负代表的 d_I），满足 gcd(a_I, m/g_I) = 1"""
        return self.value // self.g

    @property
    def level(self) -> int:
        return len(self.index_set)

    @property
    def is_top_level(self) -> bool:
        return self.level == self.modulus.r - 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "I": list(self.index_set.members),
            "d": str(self.value),
            "g": str(self.g),
        }

    def __repr__(self):
        return f"Idempotent(I={self.index_set!r}, d={self.value}, g={self.g})"


def index_set(modulus: FactoredModulus, indices: Iterable[int]) -> IndexSet:
    """按模数的 r 构造下标集合"""
    return IndexSet.of(indices, modulus.r)


def g_of(modulus: FactoredModulus, s: IndexSet) -> int:
    """g_I = ∏_{i∈I} p_i^{e_i}"""
    return prod(modulus.prime_power(i) for i in s.members)


def is_idempotent(modulus: FactoredModulus, x: int) -> bool:
    return x * x % modulus.m == x % modulus.m


def idempotent_from_set(modulus: FactoredModulus, s: IndexSet) -> Idempotent:
    """
    由下标集合构造幂等元

    Args:
        modulus: 模数
        s: 下标集合 I

    Returns:
        d_I，I = ∅ 时为 1，I = R 时为 0
    """
    if s.width != modulus.r:
        raise IndexOutOfRange(f"集合宽度 {s.width} 与 r = {modulus.r} 不一致")
    value = idempotent_value(modulus, s.mask)
    return Idempotent(modulus=modulus, index_set=s, value=value, g=g_of(modulus, s))


def idempotent_of(modulus: FactoredModulus, indices: Iterable[int]) -> Idempotent:
    """便捷形式：直接传下标"""
    return idempotent_from_set(modulus, index_set(modulus, indices))


def enumerate_idempotents(
    modulus: FactoredModulus, max_r: int = DEFAULT_MAX_R
) -> List[Idempotent]:
    """全部 2^r 个幂等元，掩码升序"""
    if modulus.r > max_r:
        raise CapExceeded(f"r = {modulus.r} 超过枚举上限 {max_r}")
    return [idempotent_from_set(modulus, s) for s in IndexSet.all_subsets(modulus.r)]


def primitive_idempotents(modulus: FactoredModulus) -> List[Idempotent]:
    """顶层幂等元 d_{R\\{i}}，按 i 升序"""
    full = IndexSet.full(modulus.r)
    return [idempotent_from_set(modulus, full.without_index(i)) for i in modulus.indices]


@lru_cache(maxsize=4096)
def primitive_values(modulus: FactoredModulus) -> Tuple[int, ...]:
    """顶层幂等元 d_{R\\{i}} 的数值，第 i-1 项对应下标 i"""
    full = (1 << modulus.r) - 1
    return tuple(idempotent_value(modulus, full & ~(1 << (i - 1))) for i in modulus.indices)


def _same_modulus(ds: Sequence[Idempotent]) -> FactoredModulus:
    modulus = ds[0].modulus
    for d in ds[1:]:
        if d.modulus != modulus:
            raise MixedModuli(f"模数不一致: {modulus.m} vs {d.modulus.m}")
    return modulus


def complement(d: Idempotent) -> Idempotent:
    """R\\I 对应的幂等元，数值为 (1 - d_I) mod m"""
    result = idempotent_from_set(d.modulus, d.index_set.complement())
    if result.value != (1 - d.value) % d.modulus.m:
        raise InvariantViolation(f"1 - d_I 与 d_{{R\\I}} 不符: I={d.index_set!r}")
    return result


def multiply(ds: Sequence[Idempotent]) -> Idempotent:
    """∏ d_I ≡ d_{∪I}"""
    if not ds:
        raise ValueError("至少需要一个幂等元")
    modulus = _same_modulus(ds)
    union = reduce(lambda a, b: a | b, (d.index_set for d in ds))
    result = idempotent_from_set(modulus, union)

    numeric = reduce(lambda a, b: a * b % modulus.m, (d.value for d in ds), 1)
    if numeric != result.value:
        raise InvariantViolation(f"乘积 {numeric} != d_{{∪I}} = {result.value}")
    return result


def add_decompose(d_i: Idempotent, d_j: Idempotent) -> Tuple[Idempotent, Idempotent]:
    """d_I + d_J ≡ d_{I∪J} + d_{I∩J}，返回 (d_{I∪J}, d_{I∩J})"""
    modulus = _same_modulus([d_i, d_j])
    join = idempotent_from_set(modulus, d_i.index_set | d_j.index_set)
    meet = idempotent_from_set(modulus, d_i.index_set & d_j.index_set)
    if (join.value + meet.value - d_i.value - d_j.value) % modulus.m:
        raise InvariantViolation(f"d_I + d_J != d_{{I∪J}} + d_{{I∩J}}: I={d_i.index_set!r}, J={d_j.index_set!r}")
    return join, meet


def subtract(d_j: Idempotent, d_i: Idempotent) -> int:
    """(d_J - d_I) mod m，并校验其等于 d_J + d_{R\\I} - 1"""
    modulus = _same_modulus([d_j, d_i])
    difference = (d_j.value - d_i.value) % modulus.m
    if difference != (d_j.value + complement(d_i).value - 1) % modulus.m:
        raise InvariantViolation(f"d_J - d_I != d_J + d_{{R\\I}} - 1: I={d_i.index_set!r}, J={d_j.index_set!r}")
    return difference


def cofactor_is_valid(d: Idempotent) -> bool:
    """a_I·g_I ≡ 1 (mod m/g_I) 且 gcd(a_I, m/g_I) = 1"""
    rest = d.modulus.m // d.g
    return gcd(d.cofactor, rest) == 1 and (d.cofactor * d.g - 1) % rest == 0
