"""
格与一致子格测试
"""

from math import gcd, lcm

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.arithmetic import factorize
from src.errors import (
    BadParams,
    CapExceeded,
    IndexOutOfRange,
    InvariantViolation,
    LevelOutOfRange,
    MixedModuli,
    NotNested,
)
from src.idempotents import IndexSet, enumerate_idempotents, idempotent_of, index_set
from src.lattice import (
    GeneralIdentityId,
    IdempotentLattice,
    consistent_lattice,
    general_parameter_instances,
    hasse_diagram,
    join,
    lattice_elements,
    level,
    leq,
    leq_by_divisibility,
    meet,
    verify_general_identity,
)
from src.identities import verify_identity
from tests.strategies import index_sets, small_moduli


class TestLatticeOperations:
    """测试 L_m 的并、交与序"""

    def test_join_meet(self, m30):
        a, b = idempotent_of(m30, [1]), idempotent_of(m30, [2])
        assert join(a, b).value == 6
        assert meet(a, b).value == 1
        assert join(a, b).g == 6

    def test_order_isomorphism(self, m30):
        """I ⊆ J ⇔ g_I | g_J"""
        elements = enumerate_idempotents(m30)
        for a in elements:
            for b in elements:
                assert leq(a, b) == leq_by_divisibility(a, b)
                assert join(a, b).g == lcm(a.g, b.g)
                assert meet(a, b).g == gcd(a.g, b.g)

    def test_mixed_moduli(self, m30, m12):
        with pytest.raises(MixedModuli):
            join(idempotent_of(m30, [1]), idempotent_of(m12, [1]))

    def test_g_mismatch_raises_typed_error(self, m30, monkeypatch):
        a, b = idempotent_of(m30, [1]), idempotent_of(m30, [2])
        monkeypatch.setattr(
            "src.lattice.idempotent_from_set",
            lambda modulus, s: idempotent_of(modulus, modulus.indices),
        )
        with pytest.raises(InvariantViolation):
            join(a, b)
        with pytest.raises(InvariantViolation):
            meet(a, b)

    def test_levels(self, m30):
        """第 r-1 层为顶层"""
        assert [d.value for d in level(m30, 2)] == [6, 10, 15]
        assert [d.value for d in level(m30, 0)] == [1]
        with pytest.raises(LevelOutOfRange):
            level(m30, 4)

    def test_bounds(self, m12):
        lattice = IdempotentLattice(m12)
        assert lattice.bottom.value == 1
        assert lattice.top.value == 0
        assert lattice.element([2]).value == 9
        assert len(lattice.level(1)) == 2


class TestConsistentLattice:
    """测试一致子格"""

    def test_m12_elements(self, m12):
        lattice = consistent_lattice(m12, IndexSet.full(2), IndexSet.empty(2))
        assert [g for _, g in lattice_elements(lattice)] == [1, 4, 3, 12]

    def test_m30_with_bottom(self, m30):
        """S = R，T = {1}"""
        lattice = consistent_lattice(m30, IndexSet.full(3), index_set(m30, [1]))
        elements = lattice_elements(lattice)
        assert [g for _, g in elements] == [2, 6, 10, 30]
        assert lattice.g_T == 2 and lattice.g_S == 30
        assert lattice.span == 2

    def test_partial_top(self, m30):
        lattice = consistent_lattice(m30, index_set(m30, [1, 2]), IndexSet.empty(3))
        assert sorted(g for _, g in lattice_elements(lattice)) == [1, 2, 3, 6]

    def test_degenerate(self, m30):
        """S = T 时只有一个元素"""
        s = index_set(m30, [2])
        lattice = consistent_lattice(m30, s, s)
        assert lattice_elements(lattice) == [(s, 3)]

    def test_not_nested(self, m30):
        with pytest.raises(NotNested):
            consistent_lattice(m30, index_set(m30, [1]), index_set(m30, [2]))

    def test_width_mismatch(self, m30):
        with pytest.raises(IndexOutOfRange):
            consistent_lattice(m30, IndexSet.full(2), IndexSet.empty(2))

    def test_cap(self, m30):
        lattice = consistent_lattice(m30, IndexSet.full(3), IndexSet.empty(3))
        with pytest.raises(CapExceeded):
            lattice_elements(lattice, cap=2)

    @given(small_moduli(max_r=4), st.data())
    @settings(max_examples=50, deadline=None)
    def test_gcd_lcm_closed(self, modulus, data):
        """元素集合对 gcd 与 lcm 封闭，极值为 g_T 与 g_S"""
        s = data.draw(index_sets(modulus.r))
        t = IndexSet(data.draw(st.integers(0, s.mask)) & s.mask, modulus.r)
        lattice = consistent_lattice(modulus, s, t)
        values = {g for _, g in lattice_elements(lattice)}
        assert len(values) == 2 ** lattice.span
        assert min(values) == lattice.g_T and max(values) == lattice.g_S
        for a in values:
            for b in values:
                assert gcd(a, b) in values and lcm(a, b) in values


class TestHasseDiagram:
    """测试覆盖关系图"""

    def test_full_lattice(self, m30):
        graph = IdempotentLattice(m30).hasse_diagram()
        assert graph.number_of_nodes() == 8
        # 立方体 Q_3 的边数
        assert graph.number_of_edges() == 12
        assert graph.nodes[0b011]["g"] == 6
        assert graph.nodes[0b011]["d"] == 6
        assert graph.nodes[0b011]["level"] == 2
        assert graph.has_edge(0b001, 0b011)

    def test_sublattice(self, m30):
        lattice = consistent_lattice(m30, IndexSet.full(3), index_set(m30, [1]))
        graph = hasse_diagram(lattice)
        assert sorted(graph.nodes) == [0b001, 0b011, 0b101, 0b111]
        assert graph.number_of_edges() == 4
        assert graph.graph["g_T"] == 2


CATALOG_COUNTERPARTS = [
    ("GEN_PRODUCT", "PRODUCT"),
    ("GEN_UNION_SUM", "UNION_SUM"),
    ("GEN_DISJOINT_SUM", "DISJOINT_UNION_SUM"),
    ("GEN_DUAL_SUM", "COMPLEMENT_SUM"),
    ("GEN_SUBSET_SUM", "PRIMITIVE_SUM"),
    ("GEN_PRIMITIVE_SUM", "PRIMITIVE_SUM"),
    ("GEN_LEVEL_SUM", "LEVEL_SUM"),
    ("GEN_BELOW_N_LEVELS", "BELOW_N_LEVELS"),
    ("GEN_SUBLATTICE_SUM", "SUBLATTICE_SUM"),
    ("GEN_DISJOINT_COVER_SUM", "DISJOINT_COVER_SUM"),
    ("GEN_SINGLETON_SUM", "SINGLETON_SUM"),
    ("GEN_ONE_LEVEL_BELOW", "ONE_LEVEL_BELOW"),
    ("GEN_ALL_SUM", "ALL_IDEMPOTENT_SUM"),
]


def _plain_params(general_id, params, r):
    """GEN_SUBSET_SUM 的 I 对应 PRIMITIVE_SUM 的 J = R\\I"""
    if general_id == "GEN_SUBSET_SUM":
        return {"J": sorted(set(range(1, r + 1)) - set(params.I))}
    return params


def test_counterparts_cover_every_general_identity():
    assert {g for g, _ in CATALOG_COUNTERPARTS} == {i.value for i in GeneralIdentityId}


class TestGeneralIdentities:
    """测试模 g_S 的推广恒等式"""

    def test_dual_sum(self, m30):
        """S = R，T = {1}，I = {1,2}: 6 + 10 ≡ 16"""
        lattice = consistent_lattice(m30, IndexSet.full(3), index_set(m30, [1]))
        report = verify_general_identity(lattice, "GEN_DUAL_SUM", {"I": [1, 2]})
        assert report.holds
        assert report.lhs == 16 and report.rhs == 16
        assert report.parameters["S"] == [1, 2, 3]
        assert report.parameters["T"] == [1]

    def test_level_sum(self, m30):
        lattice = consistent_lattice(m30, IndexSet.full(3), index_set(m30, [1]))
        report = verify_general_identity(lattice, "GEN_LEVEL_SUM", {"k": 2})
        assert report.lhs == 16 and report.holds

    def test_primitive_sum_mod_g_s(self, m30):
        """S = {1,2}: 21 + 16 = 37 ≡ 1 (mod 6)"""
        lattice = consistent_lattice(m30, index_set(m30, [1, 2]), IndexSet.empty(3))
        report = verify_general_identity(lattice, "GEN_PRIMITIVE_SUM", {"J": []})
        assert report.ambient == 6
        assert report.lhs == 1 and report.holds

    def test_degenerate_sublattice_sum(self, m30):
        """k = t 被拒绝"""
        s = index_set(m30, [2])
        lattice = consistent_lattice(m30, s, s)
        with pytest.raises(BadParams):
            verify_general_identity(lattice, "GEN_SUBLATTICE_SUM", {"I": [2]})

    def test_member_outside_lattice(self, m30):
        lattice = consistent_lattice(m30, IndexSet.full(3), index_set(m30, [1]))
        with pytest.raises(BadParams):
            verify_general_identity(lattice, "GEN_DUAL_SUM", {"I": [2]})

    def test_meets_must_equal_bottom(self, m30):
        lattice = consistent_lattice(m30, IndexSet.full(3), index_set(m30, [1]))
        with pytest.raises(BadParams):
            verify_general_identity(lattice, "GEN_DISJOINT_SUM", {"sets": [[1, 2], [1, 2, 3]]})

    def test_unknown(self, m30):
        lattice = consistent_lattice(m30, IndexSet.full(3), IndexSet.empty(3))
        with pytest.raises(BadParams):
            verify_general_identity(lattice, "LEVEL_SUM", {"k": 1})

    def test_span_cap(self, m30):
        lattice = consistent_lattice(m30, IndexSet.full(3), IndexSet.empty(3))
        with pytest.raises(CapExceeded):
            verify_general_identity(lattice, "GEN_ALL_SUM", cap=2)

    def test_below_n_levels_wide(self):
        """|I \\ T| = 3，n = 1 与 n = 2 两边系数不同"""
        modulus = factorize(2310)
        lattice = consistent_lattice(modulus, IndexSet.full(5), index_set(modulus, [1]))
        for n in (1, 2):
            report = verify_general_identity(lattice, "GEN_BELOW_N_LEVELS", {"I": [1, 2, 3, 4], "n": n})
            assert report.holds

    @pytest.mark.parametrize("m", [12, 30, 60, 210])
    @pytest.mark.parametrize("general_id,plain_id", CATALOG_COUNTERPARTS)
    def test_trivial_bottom_matches_catalog(self, m, general_id, plain_id):
        """T = ∅，S = R 时每条推广恒等式与模 m 的对应版本逐项一致"""
        modulus = factorize(m)
        r = modulus.r
        lattice = consistent_lattice(modulus, IndexSet.full(r), IndexSet.empty(r))
        count = 0
        for params in general_parameter_instances(lattice, general_id):
            general = verify_general_identity(lattice, general_id, params)
            plain = verify_identity(modulus, plain_id, _plain_params(general_id, params, r))
            assert general.ambient == plain.ambient == m
            assert (general.lhs, general.rhs, general.holds) == (plain.lhs, plain.rhs, plain.holds)
            assert [(c.name, c.lhs, c.rhs) for c in general.corollaries] == [
                (c.name, c.lhs, c.rhs) for c in plain.corollaries
            ]
            count += 1
        if r >= 3:
            assert count > 0

    @pytest.mark.parametrize("m", [12, 30, 360, 210, 2310])
    def test_all_instances_hold(self, m):
        """全部 (S, T) 与全部合法参数"""
        modulus = factorize(m)
        for s in IndexSet.all_subsets(modulus.r):
            for t in s.subsets():
                lattice = consistent_lattice(modulus, s, t)
                for identity in GeneralIdentityId:
                    for params in general_parameter_instances(lattice, identity):
                        report = verify_general_identity(lattice, identity, params)
                        assert report.all_hold, (m, s, t, identity.value, report.parameters)
