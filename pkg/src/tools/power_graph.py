"""
顺序幂图工具
轨道 (尾部/循环) 分解、分量识别与整图导出
"""

import logging
from dataclasses import dataclass
from math import gcd, prod
from typing import Any, Dict, List

import networkx as nx

from ..arithmetic import FactoredModulus, euler_phi_prime_power
from ..errors import BadParams, CapExceeded, InvariantViolation
from ..idempotents import Idempotent, IndexSet, idempotent_from_set, idempotent_value, is_idempotent


logger = logging.getLogger(__name__)

DEFAULT_MAX_MODULUS = 10**6
DEFAULT_MAX_GRAPH_MODULUS = 5000


@dataclass(frozen=True)
class OrbitDecomposition:
    """序列 a, a², a³, ... 的尾部与循环"""

    base: int
    tail: List[int]
    cycle: List[int]

    @property
    def tail_length(self) -> int:
        return len(self.tail)

    @property
    def cycle_length(self) -> int:
        return len(self.cycle)

    def idempotent(self, modulus: FactoredModulus) -> int:
        """轨道中唯一的幂等元（必在循环中）"""
        found = [x for x in self.cycle if is_idempotent(modulus, x)]
        if len(found) != 1:
            raise InvariantViolation(f"轨道 {self.base} 的循环中有 {len(found)} 个幂等元")
        return found[0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base": str(self.base),
            "tail": [str(x) for x in self.tail],
            "cycle": [str(x) for x in self.cycle],
            "tail_length": self.tail_length,
            "cycle_length": self.cycle_length,
        }


@dataclass(frozen=True)
class ComponentDescriptor:
    """分量 C_I：乘子 π_I、g_I、幂等元 d_I 与元素个数"""

    index_set: IndexSet
    multiplier: int
    g: int
    idempotent: Idempotent
    size: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "I": list(self.index_set.members),
            "multiplier": str(self.multiplier),
            "g": str(self.g),
            "d": str(self.idempotent.value),
            "size": str(self.size),
        }


def _reduce(modulus: FactoredModulus, b: int) -> int:
    if not 0 <= b < modulus.m:
        raise BadParams(f"{b} 不在 [0, {modulus.m}) 内")
    return b


def multiplier(modulus: FactoredModulus, s: IndexSet) -> int:
    """π_I = ∏_{i∈I} p_i"""
    return prod(modulus.prime(i) for i in s.members)


def component_size(modulus: FactoredModulus, s: IndexSet) -> int:
    """|C_I| = ∏_{i∈I} p_i^{e_i-1} · ∏_{i∉I} φ(p_i^{e_i})"""
    sizes = [
        p ** (e - 1) if (i + 1) in s else euler_phi_prime_power(p, e)
        for i, (p, e) in enumerate(modulus.factors)
    ]
    return prod(sizes)


def component_mask(modulus: FactoredModulus, b: int) -> int:
    """I = {i : p_i | b} 的掩码，b = 0 时为 R"""
    b = _reduce(modulus, b)
    mask = 0
    for bit, (p, _) in enumerate(modulus.factors):
        if b % p == 0:
            mask |= 1 << bit
    return mask


def component_set(modulus: FactoredModulus, b: int) -> IndexSet:
    return IndexSet(component_mask(modulus, b), modulus.r)


def component_of(modulus: FactoredModulus, b: int) -> ComponentDescriptor:
    s = component_set(modulus, b)
    d = idempotent_from_set(modulus, s)
    return ComponentDescriptor(
        index_set=s,
        multiplier=multiplier(modulus, s),
        g=d.g,
        idempotent=d,
        size=component_size(modulus, s),
    )


def orbit(modulus: FactoredModulus, a: int) -> OrbitDecomposition:
    """
    逐次乘 a 直到第一次重复

    尾部取最长的不重复前缀，a 在循环中时尾部为空
    """
    a = _reduce(modulus, a)
    seen: Dict[int, int] = {}
    sequence: List[int] = []
    x = a
    while x not in seen:
        seen[x] = len(sequence)
        sequence.append(x)
        x = x * a % modulus.m

    start = seen[x]
    return OrbitDecomposition(base=a, tail=sequence[:start], cycle=sequence[start:])


def is_cycle_element(modulus: FactoredModulus, b: int) -> bool:
    """d_I·b ≡ b (mod m)，d_I 为 b 所在分量的幂等元"""
    d = idempotent_value(modulus, component_mask(modulus, b))
    return d * b % modulus.m == b


def _check_cap(modulus: FactoredModulus, cap: int):
    if modulus.m > cap:
        raise CapExceeded(f"m = {modulus.m} 超过枚举上限 {cap}")


def units(modulus: FactoredModulus, cap: int = DEFAULT_MAX_MODULUS) -> List[int]:
    _check_cap(modulus, cap)
    return [u for u in range(1, modulus.m) if gcd(u, modulus.m) == 1]


def cycle_elements(
    modulus: FactoredModulus, s: IndexSet, cap: int = DEFAULT_MAX_MODULUS
) -> List[int]:
    """d_I·U，升序；在模 m 乘法下构成以 d_I 为单位元的群"""
    d = idempotent_from_set(modulus, s).value
    return sorted({d * u % modulus.m for u in units(modulus, cap)})


def component_elements(
    modulus: FactoredModulus, s: IndexSet, cap: int = DEFAULT_MAX_MODULUS
) -> List[int]:
    """{π_I·x mod m : gcd(x, m/g_I) = 1}，升序"""
    _check_cap(modulus, cap)
    pi = multiplier(modulus, s)
    rest = modulus.m // idempotent_from_set(modulus, s).g
    return sorted({pi * x % modulus.m for x in range(modulus.m) if gcd(x, rest) == 1})


def power_graph(modulus: FactoredModulus, cap: int = DEFAULT_MAX_GRAPH_MODULUS) -> nx.DiGraph:
    """
    顺序幂图：边 (c^i, c^{i+1})，对所有底数 c 沿轨道行走并去重

    幂等元处保留自环
    """
    _check_cap(modulus, cap)
    m = modulus.m
    graph = nx.DiGraph(m=m)
    graph.add_nodes_from(range(m))

    for c in range(m):
        x = c
        visited = set()
        while x not in visited:
            visited.add(x)
            nxt = x * c % m
            graph.add_edge(x, nxt)
            x = nxt

    for node in graph.nodes:
        graph.nodes[node]["idempotent"] = is_idempotent(modulus, node)

    logger.debug(f"幂图 m={m}: {graph.number_of_edges()} 条边")
    return graph


def graph_components(
    modulus: FactoredModulus, graph: nx.DiGraph
) -> List[Dict[str, Any]]:
    """弱连通分量，按分量幂等元的下标集合掩码升序"""
    found = []
    for nodes in nx.weakly_connected_components(graph):
        idempotents = [x for x in nodes if graph.nodes[x]["idempotent"]]
        if len(idempotents) != 1:
            raise InvariantViolation(f"幂图分量含 {len(idempotents)} 个幂等元")
        d = idempotents[0]
        found.append(
            {
                "index_set": component_set(modulus, d),
                "idempotent": d,
                "nodes": sorted(nodes),
            }
        )
    found.sort(key=lambda c: c["index_set"].mask)
    return found


class PowerGraphTool:
    """幂图工具 - 按配置中的上限执行枚举类操作"""

    def __init__(self, config: Dict[str, Any]):
        """
        初始化幂图工具

        Args:
            config: 配置字典
        """
        self.config = config
        enumeration = config.get("enumeration", {})
        self.max_modulus = enumeration.get("max_modulus", DEFAULT_MAX_MODULUS)
        self.max_graph_modulus = enumeration.get("max_graph_modulus", DEFAULT_MAX_GRAPH_MODULUS)

    def component(self, modulus: FactoredModulus, b: int) -> ComponentDescriptor:
        return component_of(modulus, b)

    def orbit(self, modulus: FactoredModulus, a: int) -> OrbitDecomposition:
        return orbit(modulus, a)

    def cycle_elements(self, modulus: FactoredModulus, s: IndexSet) -> List[int]:
        return cycle_elements(modulus, s, self.max_modulus)

    def component_elements(self, modulus: FactoredModulus, s: IndexSet) -> List[int]:
        return component_elements(modulus, s, self.max_modulus)

    def graph(self, modulus: FactoredModulus) -> nx.DiGraph:
        return power_graph(modulus, self.max_graph_modulus)

    def __str__(self):
        return "幂图工具：轨道分解、分量识别与整图导出"

    def __repr__(self):
        return f"PowerGraphTool(max_modulus={self.max_modulus})"
