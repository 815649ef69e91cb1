"""
格模块
幂等元格 L_m、整除格中的有限一致子格 L_{m,S,T}，以及模 g_S 的推广恒等式
"""

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import comb, gcd, lcm, prod
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from .arithmetic import FactoredModulus
from .errors import (
    BadParams,
    CapExceeded,
    IndexOutOfRange,
    InvariantViolation,
    LevelOutOfRange,
    MixedModuli,
    NotNested,
)
from .idempotents import (
    DEFAULT_MAX_R,
    Idempotent,
    IndexSet,
    g_of,
    idempotent_from_set,
)
from .identities import (
    CorollaryCheck,
    IdentityParams,
    IdentityReport,
    build_report,
    coerce_params,
    congruence,
    require_int,
    set_partitions,
    to_index_set,
    to_index_sets,
)


logger = logging.getLogger(__name__)

DEFAULT_MAX_SPAN = 20


# ===== 幂等元格 L_m =====

def _pair(d_i: Idempotent, d_j: Idempotent) -> FactoredModulus:
    if d_i.modulus != d_j.modulus:
        raise MixedModuli(f"模数不一致: {d_i.modulus.m} vs {d_j.modulus.m}")
    return d_i.modulus


def join(d_i: Idempotent, d_j: Idempotent) -> Idempotent:
    """d_I ∨ d_J = d_{I∪J}，g 为 lcm(g_I, g_J)"""
    modulus = _pair(d_i, d_j)
    result = idempotent_from_set(modulus, d_i.index_set | d_j.index_set)
    if result.g != lcm(d_i.g, d_j.g):
        raise InvariantViolation(f"g_{{I∪J}} = {result.g} != lcm({d_i.g}, {d_j.g})")
    return result


def meet(d_i: Idempotent, d_j: Idempotent) -> Idempotent:
    """d_I ∧ d_J = d_{I∩J}，g 为 gcd(g_I, g_J)"""
    modulus = _pair(d_i, d_j)
    result = idempotent_from_set(modulus, d_i.index_set & d_j.index_set)
    if result.g != gcd(d_i.g, d_j.g):
        raise InvariantViolation(f"g_{{I∩J}} = {result.g} != gcd({d_i.g}, {d_j.g})")
    return result


def leq(d_i: Idempotent, d_j: Idempotent) -> bool:
    """d_I <= d_J ⇔ I ⊆ J"""
    _pair(d_i, d_j)
    return d_i.index_set.issubset(d_j.index_set)


def leq_by_divisibility(d_i: Idempotent, d_j: Idempotent) -> bool:
    """另一种刻画：d_I <= d_J ⇔ g_I | g_J"""
    _pair(d_i, d_j)
    return d_j.g % d_i.g == 0


def level(modulus: FactoredModulus, k: int) -> List[Idempotent]:
    """第 k 层：所有 |I| = k 的幂等元，掩码升序；第 r-1 层为顶层"""
    if not 0 <= k <= modulus.r:
        raise LevelOutOfRange(f"层号 {k} 不在 0..{modulus.r} 内")
    full = IndexSet.full(modulus.r)
    return [idempotent_from_set(modulus, s) for s in full.subsets_of_size(k)]


class IdempotentLattice:
    """Z/mZ 的幂等元格，元素按需生成"""

    def __init__(self, modulus: FactoredModulus, max_r: int = DEFAULT_MAX_R):
        self.modulus = modulus
        self.max_r = max_r

    @property
    def bottom(self) -> Idempotent:
        return idempotent_from_set(self.modulus, IndexSet.empty(self.modulus.r))

    @property
    def top(self) -> Idempotent:
        return idempotent_from_set(self.modulus, IndexSet.full(self.modulus.r))

    def element(self, indices) -> Idempotent:
        return idempotent_from_set(self.modulus, IndexSet.of(indices, self.modulus.r))

    def level(self, k: int) -> List[Idempotent]:
        return level(self.modulus, k)

    def as_consistent(self) -> "ConsistentLattice":
        """S = R, T = ∅ 的一致子格，即 L_m 本身"""
        r = self.modulus.r
        return consistent_lattice(self.modulus, IndexSet.full(r), IndexSet.empty(r))

    def hasse_diagram(self) -> nx.DiGraph:
        if self.modulus.r > self.max_r:
            raise CapExceeded(f"r = {self.modulus.r} 超过枚举上限 {self.max_r}")
        return hasse_diagram(self.as_consistent(), cap=self.max_r)


# ===== 一致子格 L_{m,S,T} =====

@dataclass(frozen=True)
class ConsistentLattice:
    """元素恰为 {g_K : T ⊆ K ⊆ S}，下确界 g_T，上确界 g_S"""

    modulus: FactoredModulus
    S: IndexSet
    T: IndexSet
    g_S: int
    g_T: int

    @property
    def s(self) -> int:
        return len(self.S)

    @property
    def t(self) -> int:
        return len(self.T)

    @property
    def span(self) -> int:
        """|S \\ T|"""
        return len(self.S - self.T)

    def contains(self, k: IndexSet) -> bool:
        return self.T.issubset(k) and k.issubset(self.S)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "modulus": self.modulus.to_dict(),
            "S": list(self.S.members),
            "T": list(self.T.members),
            "g_S": str(self.g_S),
            "g_T": str(self.g_T),
        }


def consistent_lattice(modulus: FactoredModulus, S: IndexSet, T: IndexSet) -> ConsistentLattice:
    """
    构造一致子格

    Raises:
        IndexOutOfRange: 集合宽度与 r 不一致
        NotNested: T ⊄ S
    """
    for name, s in (("S", S), ("T", T)):
        if s.width != modulus.r:
            raise IndexOutOfRange(f"{name} 的宽度 {s.width} 与 r = {modulus.r} 不一致")
    if not T.issubset(S):
        raise NotNested(f"T = {T!r} 不是 S = {S!r} 的子集")

    lattice = ConsistentLattice(
        modulus=modulus, S=S, T=T, g_S=g_of(modulus, S), g_T=g_of(modulus, T)
    )
    logger.debug(f"一致子格 m={modulus.m} S={S!r} T={T!r} g_S={lattice.g_S} g_T={lattice.g_T}")
    return lattice


def lattice_elements(
    lattice: ConsistentLattice, cap: int = DEFAULT_MAX_SPAN
) -> List[Tuple[IndexSet, int]]:
    """全部 (K, g_K)，共 2^{|S\\T|} 个，按 K 的掩码升序"""
    if lattice.span > cap:
        raise CapExceeded(f"|S\\T| = {lattice.span} 超过枚举上限 {cap}")
    return [(k, g_of(lattice.modulus, k)) for k in lattice.T.supersets_within(lattice.S)]


def hasse_diagram(lattice: ConsistentLattice, cap: int = DEFAULT_MAX_SPAN) -> nx.DiGraph:
    """覆盖关系图：K -> K ∪ {i}，节点属性含 g、d 与下标集合"""
    graph = nx.DiGraph(m=lattice.modulus.m, g_S=lattice.g_S, g_T=lattice.g_T)
    elements = lattice_elements(lattice, cap)

    for k, g in elements:
        d = idempotent_from_set(lattice.modulus, k).value
        graph.add_node(k.mask, I=list(k.members), g=g, d=d, level=len(k))

    for k, _ in elements:
        for i in lattice.S - k:
            graph.add_edge(k.mask, k.with_index(i).mask)

    return graph


# ===== 模 g_S 的推广恒等式 =====

class GeneralIdentityId(str, Enum):
    """一致子格上的恒等式编号"""

    GEN_PRODUCT = "GEN_PRODUCT"
    GEN_UNION_SUM = "GEN_UNION_SUM"
    GEN_DISJOINT_SUM = "GEN_DISJOINT_SUM"
    GEN_DUAL_SUM = "GEN_DUAL_SUM"
    GEN_SUBSET_SUM = "GEN_SUBSET_SUM"
    GEN_PRIMITIVE_SUM = "GEN_PRIMITIVE_SUM"
    GEN_LEVEL_SUM = "GEN_LEVEL_SUM"
    GEN_BELOW_N_LEVELS = "GEN_BELOW_N_LEVELS"
    GEN_SUBLATTICE_SUM = "GEN_SUBLATTICE_SUM"
    GEN_DISJOINT_COVER_SUM = "GEN_DISJOINT_COVER_SUM"
    GEN_SINGLETON_SUM = "GEN_SINGLETON_SUM"
    GEN_ONE_LEVEL_BELOW = "GEN_ONE_LEVEL_BELOW"
    GEN_ALL_SUM = "GEN_ALL_SUM"


class _SublatticeContext:
    """幂等元在模 m 下计算，比较时再约化到模 g_S"""

    def __init__(self, lattice: ConsistentLattice):
        self.lattice = lattice
        self.modulus = lattice.modulus
        self.S, self.T = lattice.S, lattice.T
        self.ambient = lattice.g_S

    def d(self, k: IndexSet) -> int:
        return idempotent_from_set(self.modulus, k).value

    @property
    def d_T(self) -> int:
        return self.d(self.T)

    def member(self, indices: Optional[List[int]], name: str) -> IndexSet:
        k = to_index_set(self.modulus, indices, name)
        if not self.lattice.contains(k):
            raise BadParams(f"参数 {name} = {k!r} 不满足 T ⊆ {name} ⊆ S")
        return k

    def family(self, families: Optional[List[List[int]]]) -> List[IndexSet]:
        found = to_index_sets(self.modulus, families)
        for n, k in enumerate(found):
            if not self.lattice.contains(k):
                raise BadParams(f"sets[{n}] = {k!r} 不满足 T ⊆ K ⊆ S")
        return found

    def union(self, family: Sequence[IndexSet]) -> IndexSet:
        result = family[0]
        for k in family[1:]:
            result = result | k
        return result

    def top(self, i: int) -> int:
        """d_{S\\{i}}"""
        return self.d(self.S.without_index(i))

    def check(self, lhs: int, rhs: int) -> CorollaryCheck:
        return congruence("main", self.ambient, lhs, rhs)


def _gen_product(ctx: _SublatticeContext, p: IdentityParams):
    family = ctx.family(p.sets)
    return ctx.check(prod(ctx.d(k) for k in family), ctx.d(ctx.union(family))), []


def _gen_union_sum(ctx: _SublatticeContext, p: IdentityParams):
    i, j = ctx.member(p.I, "I"), ctx.member(p.J, "J")
    return ctx.check(ctx.d(i) + ctx.d(j), ctx.d(i | j) + ctx.d(i & j)), []


def _meets_in_T(ctx: _SublatticeContext, family: Sequence[IndexSet]) -> bool:
    return all(a & b == ctx.T for a, b in combinations(family, 2))


def _gen_disjoint_sum(ctx: _SublatticeContext, p: IdentityParams):
    family = ctx.family(p.sets)
    if not _meets_in_T(ctx, family):
        raise BadParams("GEN_DISJOINT_SUM 要求两两交集等于 T")
    k = len(family)
    lhs = sum(ctx.d(s) for s in family)
    return ctx.check(lhs, (k - 1) * ctx.d_T + ctx.d(ctx.union(family))), []


def _gen_disjoint_cover_sum(ctx: _SublatticeContext, p: IdentityParams):
    family = ctx.family(p.sets)
    if not _meets_in_T(ctx, family):
        raise BadParams("GEN_DISJOINT_COVER_SUM 要求两两交集等于 T")
    if ctx.union(family) != ctx.S:
        raise BadParams("GEN_DISJOINT_COVER_SUM 要求并集等于 S")
    lhs = sum(ctx.d(s) for s in family)
    return ctx.check(lhs, (len(family) - 1) * ctx.d_T), []


def _gen_dual_sum(ctx: _SublatticeContext, p: IdentityParams):
    i = ctx.member(p.I, "I")
    dual = ctx.S - (i - ctx.T)
    return ctx.check(ctx.d(i) + ctx.d(dual), ctx.d_T), []


def _gen_subset_sum(ctx: _SublatticeContext, p: IdentityParams):
    i = ctx.member(p.I, "I")
    if i == ctx.T:
        raise BadParams("GEN_SUBSET_SUM 要求 T ⊊ I")
    lhs = sum(ctx.top(x) for x in i - ctx.T)
    return ctx.check(lhs, ctx.d(ctx.S - (i - ctx.T))), []


def _gen_primitive_sum(ctx: _SublatticeContext, p: IdentityParams):
    j = ctx.member(p.J, "J")
    if j == ctx.S:
        raise BadParams("GEN_PRIMITIVE_SUM 要求 J ⊊ S")
    lhs = sum(ctx.top(x) for x in ctx.S - j)
    return ctx.check(lhs, ctx.d(j)), []


def _gen_level_sum(ctx: _SublatticeContext, p: IdentityParams):
    k = require_int(p.k, "k")
    s, t = ctx.lattice.s, ctx.lattice.t
    if not t < k < s:
        raise BadParams(f"GEN_LEVEL_SUM 要求 t < k < s (t={t}, s={s}): k = {k}")
    lhs = sum(ctx.d(ctx.T | extra) for extra in (ctx.S - ctx.T).subsets_of_size(k - t))
    return ctx.check(lhs, comb(s - t - 1, k - t) * ctx.d_T), []


def _gen_below_n_levels(ctx: _SublatticeContext, p: IdentityParams):
    i = ctx.member(p.I, "I")
    if i == ctx.T or i == ctx.S:
        raise BadParams("GEN_BELOW_N_LEVELS 要求 T ⊊ I ⊊ S")
    k, t, n = len(i), ctx.lattice.t, require_int(p.n, "n")
    if not 0 < n < k - t:
        raise BadParams(f"GEN_BELOW_N_LEVELS 要求 0 < n < k - t = {k - t}: n = {n}")
    lhs = sum(ctx.d(ctx.T | extra) for extra in (i - ctx.T).subsets_of_size(k - n - t))
    rhs = comb(k - t - 1, n - 1) * ctx.d_T + comb(k - t - 1, n) * ctx.d(i)
    return ctx.check(lhs, rhs), []


def _gen_one_level_below(ctx: _SublatticeContext, p: IdentityParams):
    i = ctx.member(p.I, "I")
    k, t = len(i), ctx.lattice.t
    if k - t < 2:
        raise BadParams(f"GEN_ONE_LEVEL_BELOW 要求 |I| - |T| >= 2: {k - t}")
    lhs = sum(ctx.d(ctx.T | extra) for extra in (i - ctx.T).subsets_of_size(k - 1 - t))
    return ctx.check(lhs, ctx.d_T + (k - t - 1) * ctx.d(i)), []


def _gen_sublattice_sum(ctx: _SublatticeContext, p: IdentityParams):
    i = ctx.member(p.I, "I")
    k, t = len(i), ctx.lattice.t
    if k <= t:
        raise BadParams("GEN_SUBLATTICE_SUM 要求 |I| > |T|")
    lhs = sum(ctx.d(j) for j in ctx.T.supersets_within(i))
    weight = 2 ** (k - t - 1)
    main = ctx.check(lhs, weight * (ctx.d_T + ctx.d(i)))
    mod_g = congruence("mod_g_I", g_of(ctx.modulus, i), lhs, weight * ctx.d_T)
    return main, [mod_g]


def _gen_singleton_sum(ctx: _SublatticeContext, p: IdentityParams):
    i = ctx.member(p.I, "I")
    k = len(i)
    if k < 2:
        raise BadParams(f"GEN_SINGLETON_SUM 要求 |I| > 1: |I| = {k}")
    lhs = sum(ctx.d(ctx.T.with_index(x)) for x in i)
    return ctx.check(lhs, (k - 1) * ctx.d_T + ctx.d(i)), []


def _gen_all_sum(ctx: _SublatticeContext, p: IdentityParams):
    s, t = ctx.lattice.s, ctx.lattice.t
    if s <= t:
        raise BadParams("GEN_ALL_SUM 要求 S ≠ T")
    lhs = sum(ctx.d(j) for j in ctx.T.supersets_within(ctx.S))
    return ctx.check(lhs, 2 ** (s - t - 1) * ctx.d_T), []


GENERAL_HANDLERS = {
    GeneralIdentityId.GEN_PRODUCT: _gen_product,
    GeneralIdentityId.GEN_UNION_SUM: _gen_union_sum,
    GeneralIdentityId.GEN_DISJOINT_SUM: _gen_disjoint_sum,
    GeneralIdentityId.GEN_DUAL_SUM: _gen_dual_sum,
    GeneralIdentityId.GEN_SUBSET_SUM: _gen_subset_sum,
    GeneralIdentityId.GEN_PRIMITIVE_SUM: _gen_primitive_sum,
    GeneralIdentityId.GEN_LEVEL_SUM: _gen_level_sum,
    GeneralIdentityId.GEN_BELOW_N_LEVELS: _gen_below_n_levels,
    GeneralIdentityId.GEN_SUBLATTICE_SUM: _gen_sublattice_sum,
    GeneralIdentityId.GEN_DISJOINT_COVER_SUM: _gen_disjoint_cover_sum,
    GeneralIdentityId.GEN_SINGLETON_SUM: _gen_singleton_sum,
    GeneralIdentityId.GEN_ONE_LEVEL_BELOW: _gen_one_level_below,
    GeneralIdentityId.GEN_ALL_SUM: _gen_all_sum,
}


def verify_general_identity(
    lattice: ConsistentLattice,
    identity_id: Any,
    params: Any = None,
    cap: int = DEFAULT_MAX_SPAN,
) -> IdentityReport:
    """
    校验一致子格上的推广恒等式，全部同余均模 g_S

    Args:
        lattice: 一致子格
        identity_id: GeneralIdentityId 或其名称
        params: IdentityParams 或等价字典
        cap: |S\\T| 上限

    Returns:
        IdentityReport，parameters 中附带 S 与 T
    """
    try:
        identity = GeneralIdentityId(identity_id)
    except ValueError as e:
        raise BadParams(f"未知的推广恒等式: {identity_id}") from e
    if lattice.span > cap:
        raise CapExceeded(f"|S\\T| = {lattice.span} 超过枚举上限 {cap}")

    p = coerce_params(params)
    main, corollaries = GENERAL_HANDLERS[identity](_SublatticeContext(lattice), p)
    report = build_report(identity.value, lattice.modulus, p, main, corollaries)
    report.parameters["S"] = list(lattice.S.members)
    report.parameters["T"] = list(lattice.T.members)
    return report


def general_parameter_instances(
    lattice: ConsistentLattice, identity_id: Any
) -> Iterator[IdentityParams]:
    """一致子格上给定推广恒等式的全部合法参数"""
    identity = GeneralIdentityId(identity_id)
    S, T = lattice.S, lattice.T
    t, s = lattice.t, lattice.s
    members = T.supersets_within(S)

    def as_list(k: IndexSet) -> List[int]:
        return list(k.members)

    if identity is GeneralIdentityId.GEN_ALL_SUM:
        if s > t:
            yield IdentityParams()
    elif identity is GeneralIdentityId.GEN_DUAL_SUM:
        for k in members:
            yield IdentityParams(I=as_list(k))
    elif identity is GeneralIdentityId.GEN_SUBSET_SUM:
        for k in members:
            if k != T:
                yield IdentityParams(I=as_list(k))
    elif identity is GeneralIdentityId.GEN_PRIMITIVE_SUM:
        for k in members:
            if k != S:
                yield IdentityParams(J=as_list(k))
    elif identity is GeneralIdentityId.GEN_LEVEL_SUM:
        for k in range(t + 1, s):
            yield IdentityParams(k=k)
    elif identity is GeneralIdentityId.GEN_BELOW_N_LEVELS:
        for k in members:
            if k != T and k != S:
                for n in range(1, len(k) - t):
                    yield IdentityParams(I=as_list(k), n=n)
    elif identity is GeneralIdentityId.GEN_ONE_LEVEL_BELOW:
        for k in members:
            if len(k) - t >= 2:
                yield IdentityParams(I=as_list(k))
    elif identity is GeneralIdentityId.GEN_SUBLATTICE_SUM:
        for k in members:
            if len(k) > t:
                yield IdentityParams(I=as_list(k))
    elif identity is GeneralIdentityId.GEN_SINGLETON_SUM:
        for k in members:
            if len(k) >= 2:
                yield IdentityParams(I=as_list(k))
    elif identity is GeneralIdentityId.GEN_UNION_SUM:
        for a in members:
            for b in members:
                yield IdentityParams(I=as_list(a), J=as_list(b))
    elif identity is GeneralIdentityId.GEN_PRODUCT:
        for a in members:
            for b in members:
                yield IdentityParams(sets=[as_list(a), as_list(b)])
    elif identity is GeneralIdentityId.GEN_DISJOINT_SUM:
        yield IdentityParams(sets=[as_list(T)])
        for w in (S - T).subsets()[1:]:
            for blocks in set_partitions(w.members):
                yield IdentityParams(sets=[sorted(T.members + tuple(b)) for b in blocks])
    elif identity is GeneralIdentityId.GEN_DISJOINT_COVER_SUM:
        free = (S - T).members
        if free:
            for blocks in set_partitions(free):
                yield IdentityParams(sets=[sorted(T.members + tuple(b)) for b in blocks])
        else:
            yield IdentityParams(sets=[as_list(T)])
