"""
幂等元恒等式目录 (模 m)
对每条恒等式逐项计算左右两边并报告是否同余
"""

import logging
from enum import Enum
from itertools import combinations
from math import comb, prod
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from .arithmetic import FactoredModulus
from .errors import BadParams, CapExceeded, IndexOutOfRange
from .idempotents import (
    DEFAULT_MAX_R,
    IndexSet,
    idempotent_from_set,
    is_idempotent,
)


logger = logging.getLogger(__name__)


class IdentityId(str, Enum):
    """模 m 的恒等式编号"""

    COMPLEMENT_SUM = "COMPLEMENT_SUM"
    PRIMITIVE_SUM = "PRIMITIVE_SUM"
    TOP_LEVEL_SUM = "TOP_LEVEL_SUM"
    DISJOINT_UNION_SUM = "DISJOINT_UNION_SUM"
    LEVEL_SUM = "LEVEL_SUM"
    BELOW_N_LEVELS = "BELOW_N_LEVELS"
    SUBLATTICE_SUM = "SUBLATTICE_SUM"
    ALL_IDEMPOTENT_SUM = "ALL_IDEMPOTENT_SUM"
    ODD_SUM_IDEMPOTENT_CRITERION = "ODD_SUM_IDEMPOTENT_CRITERION"
    PRODUCT = "PRODUCT"
    UNION_SUM = "UNION_SUM"
    DUAL = "DUAL"
    SUBTRACTION = "SUBTRACTION"
    DISJOINT_COVER_SUM = "DISJOINT_COVER_SUM"
    SINGLETON_SUM = "SINGLETON_SUM"
    ONE_LEVEL_BELOW = "ONE_LEVEL_BELOW"


class IdentityParams(BaseModel):
    """恒等式参数，集合均为 1 起始的下标列表"""

    model_config = ConfigDict(extra="forbid")

    I: Optional[List[int]] = None
    J: Optional[List[int]] = None
    sets: Optional[List[List[int]]] = None
    k: Optional[int] = None
    n: Optional[int] = None


class CorollaryCheck(BaseModel):
    """附带的推论校验（例如模 g_I 的版本）"""

    name: str
    ambient: int
    lhs: int
    rhs: int
    holds: bool

    @field_serializer("ambient", "lhs", "rhs")
    def _as_decimal(self, value: int) -> str:
        return str(value)


class IdentityReport(BaseModel):
    """单次恒等式校验结果，holds ⇔ lhs ≡ rhs (mod ambient)"""

    identity_id: str
    modulus: Dict[str, Any]
    ambient: int
    parameters: Dict[str, Any] = Field(default_factory=dict)
    lhs: int
    rhs: int
    holds: bool
    corollaries: List[CorollaryCheck] = Field(default_factory=list)

    @field_serializer("ambient", "lhs", "rhs")
    def _as_decimal(self, value: int) -> str:
        return str(value)

    @property
    def all_hold(self) -> bool:
        return self.holds and all(c.holds for c in self.corollaries)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def congruence(name: str, ambient: int, lhs: int, rhs: int) -> CorollaryCheck:
    """两边化为 [0, ambient) 后比较"""
    lhs, rhs = lhs % ambient, rhs % ambient
    return CorollaryCheck(name=name, ambient=ambient, lhs=lhs, rhs=rhs, holds=lhs == rhs)


def build_report(
    identity_id: str,
    modulus: FactoredModulus,
    params: IdentityParams,
    main: CorollaryCheck,
    corollaries: Sequence[CorollaryCheck] = (),
) -> IdentityReport:
    report = IdentityReport(
        identity_id=identity_id,
        modulus=modulus.to_dict(),
        ambient=main.ambient,
        parameters=params.model_dump(exclude_none=True),
        lhs=main.lhs,
        rhs=main.rhs,
        holds=main.holds,
        corollaries=list(corollaries),
    )
    if not report.all_hold:
        logger.warning(f"恒等式不成立: {identity_id} m={modulus.m} {report.parameters}")
    return report


# ===== 参数解析 =====

def to_index_set(modulus: FactoredModulus, indices: Optional[List[int]], name: str) -> IndexSet:
    if indices is None:
        raise BadParams(f"缺少参数 {name}")
    try:
        return IndexSet.of(indices, modulus.r)
    except IndexOutOfRange as e:
        raise BadParams(f"参数 {name}: {e}") from e


def to_index_sets(modulus: FactoredModulus, families: Optional[List[List[int]]]) -> List[IndexSet]:
    if not families:
        raise BadParams("缺少参数 sets（至少一个集合）")
    return [to_index_set(modulus, f, f"sets[{n}]") for n, f in enumerate(families)]


def require_int(value: Optional[int], name: str) -> int:
    if value is None:
        raise BadParams(f"缺少参数 {name}")
    return value


class _Context:
    """单个模数上的求值环境"""

    def __init__(self, modulus: FactoredModulus):
        self.modulus = modulus
        self.m = modulus.m
        self.full = IndexSet.full(modulus.r)

    def d(self, s: IndexSet) -> int:
        return idempotent_from_set(self.modulus, s).value

    def g(self, s: IndexSet) -> int:
        return idempotent_from_set(self.modulus, s).g

    def top(self, i: int) -> int:
        """d_{R\\{i}}"""
        return self.d(self.full.without_index(i))


Handler = Callable[[_Context, IdentityParams], Tuple[CorollaryCheck, List[CorollaryCheck]]]


def _complement_sum(ctx: _Context, p: IdentityParams):
    s = to_index_set(ctx.modulus, p.I, "I")
    lhs = ctx.d(s) + ctx.d(s.complement())
    return congruence("main", ctx.m, lhs, 1), []


def _primitive_sum(ctx: _Context, p: IdentityParams):
    j = to_index_set(ctx.modulus, p.J, "J")
    lhs = sum(ctx.top(i) for i in j.complement())
    return congruence("main", ctx.m, lhs, ctx.d(j)), []


def _top_level_sum(ctx: _Context, p: IdentityParams):
    lhs = sum(ctx.top(i) for i in ctx.modulus.indices)
    return congruence("main", ctx.m, lhs, 1), []


def _pairwise_disjoint(family: Sequence[IndexSet]) -> bool:
    return all(a.isdisjoint(b) for a, b in combinations(family, 2))


def _disjoint_union_sum(ctx: _Context, p: IdentityParams):
    family = to_index_sets(ctx.modulus, p.sets)
    if not _pairwise_disjoint(family):
        raise BadParams("DISJOINT_UNION_SUM 要求集合两两不交")
    union = IndexSet.empty(ctx.modulus.r)
    for s in family:
        union = union | s
    lhs = sum(ctx.d(s) for s in family)
    return congruence("main", ctx.m, lhs, len(family) - 1 + ctx.d(union)), []


def _disjoint_cover_sum(ctx: _Context, p: IdentityParams):
    family = to_index_sets(ctx.modulus, p.sets)
    if not _pairwise_disjoint(family):
        raise BadParams("DISJOINT_COVER_SUM 要求集合两两不交")
    union = IndexSet.empty(ctx.modulus.r)
    for s in family:
        union = union | s
    if union != ctx.full:
        raise BadParams("DISJOINT_COVER_SUM 要求并集为 R")
    lhs = sum(ctx.d(s) for s in family)
    return congruence("main", ctx.m, lhs, len(family) - 1), []


def _level_sum(ctx: _Context, p: IdentityParams):
    k, r = require_int(p.k, "k"), ctx.modulus.r
    if not 0 <= k < r:
        raise BadParams(f"LEVEL_SUM 要求 0 <= k < r = {r}: k = {k}")
    lhs = sum(ctx.d(s) for s in ctx.full.subsets_of_size(k))
    return congruence("main", ctx.m, lhs, comb(r - 1, k)), []


def _below_n_levels(ctx: _Context, p: IdentityParams):
    s = to_index_set(ctx.modulus, p.I, "I")
    k, n = len(s), require_int(p.n, "n")
    if not 0 < n < k:
        raise BadParams(f"BELOW_N_LEVELS 要求 0 < n < |I| = {k}: n = {n}")
    lhs = sum(ctx.d(j) for j in s.subsets_of_size(k - n))
    rhs = comb(k - 1, n - 1) + comb(k - 1, n) * ctx.d(s)
    return congruence("main", ctx.m, lhs, rhs), []


def _one_level_below(ctx: _Context, p: IdentityParams):
    s = to_index_set(ctx.modulus, p.I, "I")
    k = len(s)
    if k < 2:
        raise BadParams(f"ONE_LEVEL_BELOW 要求 |I| >= 2: |I| = {k}")
    lhs = sum(ctx.d(j) for j in s.subsets_of_size(k - 1))
    return congruence("main", ctx.m, lhs, 1 + (k - 1) * ctx.d(s)), []


def _sublattice_sum(ctx: _Context, p: IdentityParams):
    s = to_index_set(ctx.modulus, p.I, "I")
    k = len(s)
    if k < 1:
        raise BadParams("SUBLATTICE_SUM 要求 |I| >= 1")
    lhs = sum(ctx.d(j) for j in s.subsets())
    main = congruence("main", ctx.m, lhs, 2 ** (k - 1) * (1 + ctx.d(s)))
    mod_g = congruence("mod_g_I", ctx.g(s), lhs, 2 ** (k - 1))
    return main, [mod_g]


def _all_idempotent_sum(ctx: _Context, p: IdentityParams):
    lhs = sum(ctx.d(s) for s in ctx.full.subsets())
    return congruence("main", ctx.m, lhs, 2 ** (ctx.modulus.r - 1)), []


def _odd_sum_criterion(ctx: _Context, p: IdentityParams):
    if not ctx.modulus.is_odd:
        raise BadParams(f"ODD_SUM_IDEMPOTENT_CRITERION 要求 m 为奇数: m = {ctx.m}")
    i = to_index_set(ctx.modulus, p.I, "I")
    j = to_index_set(ctx.modulus, p.J, "J")
    total = (ctx.d(i) + ctx.d(j)) % ctx.m
    squares = int(is_idempotent(ctx.modulus, total))
    criterion = int((total - ctx.d(i & j)) % ctx.m == 0)
    covers = int(i | j == ctx.full)
    main = congruence("main", ctx.m, squares, criterion)
    return main, [congruence("union_is_R", ctx.m, squares, covers)]


def _product(ctx: _Context, p: IdentityParams):
    family = to_index_sets(ctx.modulus, p.sets)
    union = IndexSet.empty(ctx.modulus.r)
    for s in family:
        union = union | s
    lhs = prod(ctx.d(s) for s in family)
    return congruence("main", ctx.m, lhs, ctx.d(union)), []


def _union_sum(ctx: _Context, p: IdentityParams):
    i = to_index_set(ctx.modulus, p.I, "I")
    j = to_index_set(ctx.modulus, p.J, "J")
    lhs = ctx.d(i) + ctx.d(j)
    return congruence("main", ctx.m, lhs, ctx.d(i | j) + ctx.d(i & j)), []


def _dual(ctx: _Context, p: IdentityParams):
    s = to_index_set(ctx.modulus, p.I, "I")
    dual = (1 - ctx.d(s)) % ctx.m
    main = congruence("main", ctx.m, dual, ctx.d(s.complement()))
    return main, [congruence("idempotent", ctx.m, dual * dual, dual)]


def _subtraction(ctx: _Context, p: IdentityParams):
    i = to_index_set(ctx.modulus, p.I, "I")
    j = to_index_set(ctx.modulus, p.J, "J")
    lhs = ctx.d(j) - ctx.d(i)
    return congruence("main", ctx.m, lhs, ctx.d(j) + ctx.d(i.complement()) - 1), []


def _singleton_sum(ctx: _Context, p: IdentityParams):
    s = to_index_set(ctx.modulus, p.I, "I")
    k = len(s)
    if k < 2:
        raise BadParams(f"SINGLETON_SUM 要求 |I| > 1: |I| = {k}")
    lhs = sum(ctx.d(IndexSet.of([i], ctx.modulus.r)) for i in s)
    return congruence("main", ctx.m, lhs, k - 1 + ctx.d(s)), []


HANDLERS: Dict[IdentityId, Handler] = {
    IdentityId.COMPLEMENT_SUM: _complement_sum,
    IdentityId.PRIMITIVE_SUM: _primitive_sum,
    IdentityId.TOP_LEVEL_SUM: _top_level_sum,
    IdentityId.DISJOINT_UNION_SUM: _disjoint_union_sum,
    IdentityId.LEVEL_SUM: _level_sum,
    IdentityId.BELOW_N_LEVELS: _below_n_levels,
    IdentityId.SUBLATTICE_SUM: _sublattice_sum,
    IdentityId.ALL_IDEMPOTENT_SUM: _all_idempotent_sum,
    IdentityId.ODD_SUM_IDEMPOTENT_CRITERION: _odd_sum_criterion,
    IdentityId.PRODUCT: _product,
    IdentityId.UNION_SUM: _union_sum,
    IdentityId.DUAL: _dual,
    IdentityId.SUBTRACTION: _subtraction,
    IdentityId.DISJOINT_COVER_SUM: _disjoint_cover_sum,
    IdentityId.SINGLETON_SUM: _singleton_sum,
    IdentityId.ONE_LEVEL_BELOW: _one_level_below,
}

# 需要遍历全部 2^r 个子集的恒等式
_FULL_ENUMERATION = {IdentityId.ALL_IDEMPOTENT_SUM, IdentityId.LEVEL_SUM}


def coerce_params(params: Any) -> IdentityParams:
    if params is None:
        return IdentityParams()
    if isinstance(params, IdentityParams):
        return params
    try:
        return IdentityParams.model_validate(params)
    except ValueError as e:
        raise BadParams(f"参数格式错误: {e}") from e


def verify_identity(
    modulus: FactoredModulus,
    identity_id: Any,
    params: Any = None,
    max_r: int = DEFAULT_MAX_R,
) -> IdentityReport:
    """
    校验一条模 m 的恒等式

    Args:
        modulus: 模数
        identity_id: IdentityId 或其名称
        params: IdentityParams 或等价的字典
        max_r: 需要全格枚举时 r 的上限

    Returns:
        IdentityReport
    """
    try:
        identity = IdentityId(identity_id)
    except ValueError as e:
        raise BadParams(f"未知的恒等式: {identity_id}") from e

    if identity in _FULL_ENUMERATION and modulus.r > max_r:
        raise CapExceeded(f"r = {modulus.r} 超过枚举上限 {max_r}")

    p = coerce_params(params)
    main, corollaries = HANDLERS[identity](_Context(modulus), p)
    logger.debug(f"{identity.value} m={modulus.m}: {main.lhs} vs {main.rhs}")
    return build_report(identity.value, modulus, p, main, corollaries)


# ===== 参数实例枚举（穷举校验用） =====

def set_partitions(members: Sequence[int]) -> Iterator[List[List[int]]]:
    """members 的全部集合划分，块非空"""
    if not members:
        yield []
        return
    first, rest = members[0], members[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for n in range(len(partition)):
            yield partition[:n] + [[first] + partition[n]] + partition[n + 1:]


def parameter_instances(modulus: FactoredModulus, identity_id: Any) -> Iterator[IdentityParams]:
    """给定恒等式在该模数上的全部合法参数"""
    identity = IdentityId(identity_id)
    r = modulus.r
    subsets = list(IndexSet.all_subsets(r))

    if identity in (IdentityId.TOP_LEVEL_SUM, IdentityId.ALL_IDEMPOTENT_SUM):
        yield IdentityParams()
    elif identity in (IdentityId.COMPLEMENT_SUM, IdentityId.DUAL):
        for s in subsets:
            yield IdentityParams(I=list(s.members))
    elif identity is IdentityId.PRIMITIVE_SUM:
        for s in subsets:
            yield IdentityParams(J=list(s.members))
    elif identity is IdentityId.LEVEL_SUM:
        for k in range(r):
            yield IdentityParams(k=k)
    elif identity is IdentityId.BELOW_N_LEVELS:
        for s in subsets:
            for n in range(1, len(s)):
                yield IdentityParams(I=list(s.members), n=n)
    elif identity is IdentityId.SUBLATTICE_SUM:
        for s in subsets[1:]:
            yield IdentityParams(I=list(s.members))
    elif identity in (IdentityId.SINGLETON_SUM, IdentityId.ONE_LEVEL_BELOW):
        for s in subsets:
            if len(s) >= 2:
                yield IdentityParams(I=list(s.members))
    elif identity in (IdentityId.UNION_SUM, IdentityId.SUBTRACTION):
        for a in subsets:
            for b in subsets:
                yield IdentityParams(I=list(a.members), J=list(b.members))
    elif identity is IdentityId.ODD_SUM_IDEMPOTENT_CRITERION:
        if modulus.is_odd:
            for a in subsets:
                for b in subsets:
                    yield IdentityParams(I=list(a.members), J=list(b.members))
    elif identity is IdentityId.PRODUCT:
        for a in subsets:
            for b in subsets:
                yield IdentityParams(sets=[list(a.members), list(b.members)])
    elif identity is IdentityId.DISJOINT_UNION_SUM:
        for s in subsets[1:]:
            for partition in set_partitions(s.members):
                yield IdentityParams(sets=partition)
    elif identity is IdentityId.DISJOINT_COVER_SUM:
        for partition in set_partitions(tuple(modulus.indices)):
            yield IdentityParams(sets=partition)
