"""
幂图工具测试
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.arithmetic import factorize
from src.errors import BadParams, CapExceeded
from src.idempotents import IndexSet, idempotent_value, index_set, is_idempotent
from src.tools import PowerGraphTool
from src.tools.power_graph import (
    component_elements,
    component_mask,
    component_of,
    component_set,
    component_size,
    cycle_elements,
    graph_components,
    is_cycle_element,
    multiplier,
    orbit,
    power_graph,
    units,
)
from tests.strategies import small_moduli


class TestComponents:
    """测试分量识别"""

    def test_component_of(self, m30):
        """b = 2 落在 C_{1}"""
        c = component_of(m30, 2)
        assert c.index_set.members == (1,)
        assert c.multiplier == 2
        assert c.g == 2
        assert c.idempotent.value == 16
        assert c.size == 8
        assert c.to_dict()["size"] == "8"

    def test_zero_and_units(self, m30):
        assert component_set(m30, 0) == IndexSet.full(3)
        assert component_set(m30, 7) == IndexSet.empty(3)
        assert component_of(m30, 7).size == 8

    def test_elements(self, m30):
        s = index_set(m30, [1])
        expected = [2, 4, 8, 14, 16, 22, 26, 28]
        assert component_elements(m30, s) == expected
        assert cycle_elements(m30, s) == expected

    def test_multiplier_with_powers(self):
        """π_I 只取素数本身"""
        modulus = factorize(360)
        assert multiplier(modulus, index_set(modulus, [1, 2])) == 6
        assert component_size(modulus, index_set(modulus, [1, 2])) == 4 * 3 * 4

    def test_out_of_range(self, m30):
        with pytest.raises(BadParams):
            component_of(m30, 30)

    @pytest.mark.parametrize("m", [8, 12, 30, 36, 72, 100, 210, 360])
    def test_partition(self, m):
        """各分量互不相交且覆盖 [0, m)，大小与闭式一致"""
        modulus = factorize(m)
        seen = set()
        for s in IndexSet.all_subsets(modulus.r):
            members = component_elements(modulus, s)
            assert len(members) == component_size(modulus, s)
            assert all(component_set(modulus, b) == s for b in members)
            assert seen.isdisjoint(members)
            seen.update(members)
        assert seen == set(range(m))

    @pytest.mark.parametrize("m", [12, 30, 72, 360])
    def test_cycle_group(self, m):
        """d_I·U 对乘法封闭，单位元为 d_I，元素在组内可逆"""
        modulus = factorize(m)
        for s in IndexSet.all_subsets(modulus.r):
            group = set(cycle_elements(modulus, s))
            d = [x for x in group if is_idempotent(modulus, x)]
            assert len(d) == 1
            for x in group:
                assert d[0] * x % m == x
                assert any(x * y % m == d[0] for y in group)
                for y in group:
                    assert x * y % m in group

    @given(small_moduli(max_m=300), st.data())
    @settings(max_examples=60, deadline=None)
    def test_cycle_element_iff_in_cycle_group(self, modulus, data):
        """循环元恰为所在分量的 d_I·U，且可逆"""
        b = data.draw(st.integers(0, modulus.m - 1))
        s = component_of(modulus, b).index_set
        group = set(cycle_elements(modulus, s))
        assert is_cycle_element(modulus, b) == (b in group)
        d = idempotent_value(modulus, s.mask)
        for x in group:
            assert any(x * y % modulus.m == d for y in group)

    def test_component_mask(self, m30):
        assert component_mask(m30, 2) == 0b001
        assert component_mask(m30, 6) == 0b011
        assert component_mask(m30, 7) == 0
        assert component_mask(m30, 0) == 0b111


class TestOrbit:
    """测试轨道分解"""

    def test_with_tail(self, m12):
        o = orbit(m12, 2)
        assert o.tail == [2]
        assert o.cycle == [4, 8]
        assert o.idempotent(m12) == 4

    def test_without_tail(self, m30):
        o = orbit(m30, 2)
        assert o.tail == []
        assert o.cycle == [2, 4, 8, 16]
        assert o.idempotent(m30) == 16
        assert o.to_dict()["cycle_length"] == 4

    def test_fixed_points(self, m30):
        assert orbit(m30, 0).cycle == [0]
        assert orbit(m30, 1).cycle == [1]

    def test_cycle_element(self, m12, m30):
        assert not is_cycle_element(m12, 2)
        assert is_cycle_element(m12, 4)
        assert is_cycle_element(m30, 2)

    @given(small_moduli(max_r=3, max_m=3000), st.data())
    @settings(max_examples=80, deadline=None)
    def test_tail_empty_iff_cycle_element(self, modulus, data):
        a = data.draw(st.integers(0, modulus.m - 1))
        o = orbit(modulus, a)
        assert (o.tail_length == 0) == is_cycle_element(modulus, a)
        assert component_of(modulus, o.idempotent(modulus)).index_set == component_set(modulus, a)


class TestPowerGraph:
    """测试整图"""

    def test_m12_components(self, m12):
        graph = power_graph(m12)
        components = graph_components(m12, graph)
        assert [c["idempotent"] for c in components] == [1, 4, 9, 0]
        assert [c["index_set"].mask for c in components] == [0, 1, 2, 3]
        assert graph.has_edge(2, 4)
        assert graph.has_edge(0, 0)
        assert graph.nodes[9]["idempotent"]

    @pytest.mark.parametrize("m", [2, 12, 30, 60, 210, 360])
    def test_component_count(self, m):
        """弱连通分量恰为 2^r 个且与 C_I 一致"""
        modulus = factorize(m)
        components = graph_components(modulus, power_graph(modulus))
        assert len(components) == 2**modulus.r
        for c in components:
            assert c["nodes"] == component_elements(modulus, c["index_set"])

    def test_cap(self, m30):
        with pytest.raises(CapExceeded):
            power_graph(m30, cap=10)
        with pytest.raises(CapExceeded):
            units(m30, cap=10)


class TestPowerGraphTool:
    """测试按配置取上限的工具类"""

    def test_limits_from_config(self, m30):
        tool = PowerGraphTool({"enumeration": {"max_modulus": 100, "max_graph_modulus": 20}})
        assert tool.max_graph_modulus == 20
        with pytest.raises(CapExceeded):
            tool.graph(m30)
        assert len(tool.cycle_elements(m30, index_set(m30, [1]))) == 8

    def test_defaults(self, m12):
        tool = PowerGraphTool({})
        assert tool.orbit(m12, 2).cycle == [4, 8]
        assert tool.component(m12, 2).idempotent.value == 4
        assert "PowerGraphTool" in repr(tool)
