"""
输出格式化器模块
负责将各子命令的结果格式化为 text / json / dot
"""

import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import networkx as nx
from rich.console import Console
from rich.table import Table

from .arithmetic import FactoredModulus
from .errors import BadParams
from .tools.power_graph import DEFAULT_MAX_GRAPH_MODULUS, power_graph


logger = logging.getLogger(__name__)

FORMATS = ("text", "json", "dot")
GRAPH_KINDS = ("lattice", "sublattice", "graph")


class OutputFormatter:
    """输出格式化器"""

    def __init__(self, config: Dict[str, Any]):
        """
        初始化输出格式化器

        Args:
            config: 配置字典
        """
        self.config = config
        self.output_config = config.get("output", {})
        self.format = self.output_config.get("format", "text")
        json_config = self.output_config.get("json", {})
        self.indent = json_config.get("indent", 2)
        self.ensure_ascii = json_config.get("ensure_ascii", False)
        self.width = self.output_config.get("width", 100)

    def format_output(
        self,
        kind: str,
        data: Dict[str, Any],
        format_type: Optional[str] = None,
        graph: Optional[nx.DiGraph] = None,
        label: str = "g",
    ) -> str:
        """
        格式化输出

        Args:
            kind: 子命令名，决定 text 的排版
            data: 可 JSON 序列化的结果
            format_type: 输出格式，如果为None则使用配置中的格式
            graph: dot 格式所需的图
            label: Hasse 图节点标签，g 或 d

        Returns:
            格式化后的字符串
        """
        format_type = format_type or self.format
        logger.debug(f"格式化 {kind} 为 {format_type} 格式")

        if format_type == "json":
            return json.dumps(data, indent=self.indent, ensure_ascii=self.ensure_ascii)
        elif format_type == "dot":
            if graph is None or kind not in GRAPH_KINDS:
                raise BadParams(f"{kind} 不支持 dot 输出")
            if kind == "graph":
                return power_graph_to_dot(graph)
            return hasse_to_dot(graph, label=label)
        elif format_type == "text":
            return self._format_text(kind, data)
        else:
            raise BadParams(f"不支持的输出格式: {format_type}")

    def save_output(self, content: str, path: str) -> str:
        """保存输出到文件，目录不存在时创建"""
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(content)
            if not content.endswith("\n"):
                f.write("\n")
        logger.info(f"输出已保存到: {output_path}")
        return str(output_path)

    # ===== text =====

    def _format_text(self, kind: str, data: Dict[str, Any]) -> str:
        buffer = io.StringIO()
        console = Console(
            file=buffer, width=self.width, no_color=True, highlight=False, markup=False, emoji=False
        )
        renderer = getattr(self, f"_text_{kind}", None)
        if renderer is None:
            console.print_json(data=data)
        else:
            renderer(console, data)
        return buffer.getvalue().rstrip("\n")

    @staticmethod
    def _modulus_line(modulus: Dict[str, Any]) -> str:
        factors = "*".join(f"{p}^{e}" for p, e in modulus["factors"])
        return f"m = {modulus['m']} = {factors}"

    @staticmethod
    def _set_text(indices: List[int]) -> str:
        return "{" + ",".join(str(i) for i in indices) + "}"

    def _text_idempotents(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        table = Table(title=f"幂等元 ({len(data['idempotents'])} 个)")
        for column in ("I", "d_I", "g_I", "a_I"):
            table.add_column(column, justify="right" if column != "I" else "left")
        for row in data["idempotents"]:
            table.add_row(self._set_text(row["I"]), row["d"], row["g"], row.get("cofactor", ""))
        console.print(table)

    def _text_identity(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        status = "成立" if data["holds"] else "不成立"
        console.print(f"{data['identity_id']} {data['parameters']}: {status}")
        console.print(f"  {data['lhs']} ≡ {data['rhs']} (mod {data['ambient']})")
        for corollary in data.get("corollaries", []):
            mark = "✓" if corollary["holds"] else "✗"
            console.print(
                f"  {mark} {corollary['name']}: {corollary['lhs']} ≡ {corollary['rhs']} "
                f"(mod {corollary['ambient']})"
            )

    def _text_lattice(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        console.print(
            f"S = {self._set_text(data['S'])}, T = {self._set_text(data['T'])}, "
            f"g_S = {data['g_S']}, g_T = {data['g_T']}"
        )
        table = Table(title="格元素（按层）")
        for column in ("层", "K", "g_K", "d_K"):
            table.add_column(column)
        for row in sorted(data["elements"], key=lambda r: (r["level"], r["mask"])):
            table.add_row(str(row["level"]), self._set_text(row["I"]), row["g"], row["d"])
        console.print(table)
        console.print(f"覆盖关系: {data['edge_count']} 条")

    def _text_sublattice(self, console: Console, data: Dict[str, Any]):
        self._text_lattice(console, data)
        if data.get("report"):
            self._text_identity(console, data["report"])

    def _text_component(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        console.print(f"b = {data['b']} 属于分量 C_{self._set_text(data['I'])}")
        console.print(f"  π_I = {data['multiplier']}, g_I = {data['g']}, d_I = {data['d']}")
        console.print(f"  |C_I| = {data['size']}, 循环元: {'是' if data['cycle_element'] else '否'}")

    def _text_orbit(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        console.print(f"a = {data['base']} 的幂序列")
        console.print(f"  尾部 ({data['tail_length']}): {', '.join(data['tail']) or '-'}")
        console.print(f"  循环 ({data['cycle_length']}): {', '.join(data['cycle'])}")
        console.print(f"  幂等元: {data['idempotent']}")

    def _text_graph(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        table = Table(title=f"幂图分量 ({len(data['components'])} 个, {data['edge_count']} 条边)")
        for column in ("I", "幂等元", "元素数"):
            table.add_column(column)
        for row in data["components"]:
            table.add_row(self._set_text(row["I"]), row["idempotent"], str(len(row["nodes"])))
        console.print(table)

    def _text_modexp(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        plan = data["plan"]
        console.print(f"{data['base']}^{data['exponent']} ≡ {data['result']} (mod {data['modulus']['m']})")
        console.print(f"  策略: {plan['strategy']}  约化: {plan['totient_kind']}")
        for i, e in plan["reduced_exponents"]:
            console.print(f"  i = {i}: 约化指数 {e}")

    def _text_bench(self, console: Console, data: Dict[str, Any]):
        console.print(self._modulus_line(data["modulus"]))
        console.print(
            f"样本 {data['samples']}，指数 {data['exponent_bits']} 位，种子 {data['seed']}，"
            f"{data['totient_kind']} / {data['per_prime_mode']}"
        )
        table = Table(title="耗时 (ns)")
        for column in ("策略", "样本", "auto 中位数", "auto p95", "baseline 中位数", "baseline p95"):
            table.add_column(column, justify="right")
        rows = [("ALL", data["auto"], data["baseline"])]
        rows += [(name, v["auto"], v["baseline"]) for name, v in data["per_strategy"].items()]
        for name, auto, baseline in rows:
            table.add_row(
                name,
                str(auto["count"]),
                str(auto["median_ns"]),
                str(auto["p95_ns"]),
                str(baseline["median_ns"]),
                str(baseline["p95_ns"]),
            )
        console.print(table)
        console.print(f"结果不一致: {data['mismatch_count']}")

    def _text_selftest(self, console: Console, data: Dict[str, Any]):
        console.print(f"自检 m ∈ [{data['low']}, {data['high']}]，共 {data['moduli_checked']} 个模数")
        table = Table()
        table.add_column("校验项")
        table.add_column("次数", justify="right")
        for area, count in data["checks"].items():
            table.add_row(area, str(count))
        console.print(table)
        if data["passed"]:
            console.print("全部通过")
        else:
            console.print(f"失败 {data['failure_count']} 项:")
            for failure in data["failures"]:
                console.print(f"  {failure}")


# ===== dot =====

def hasse_to_dot(graph: nx.DiGraph, label: str = "g") -> str:
    """Hasse 图：节点标签取 g 或 d，边由 K 指向 K ∪ {i}"""
    lines = [f'digraph "L_{graph.graph.get("m", "")}" {{', "  rankdir=BT;"]
    for node, attrs in sorted(graph.nodes(data=True)):
        indices = "{" + ",".join(str(i) for i in attrs["I"]) + "}"
        lines.append(f'  n{node} [label="{attrs[label]}\\n{indices}"];')
    for u, v in sorted(graph.edges):
        lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines)


def power_graph_to_dot(graph: nx.DiGraph) -> str:
    """幂图：每个弱连通分量一个 cluster，幂等元画成双圈"""
    lines = [f'digraph "power_{graph.graph.get("m", "")}" {{']
    components = sorted(nx.weakly_connected_components(graph), key=min)
    for n, nodes in enumerate(components):
        lines.append(f"  subgraph cluster_{n} {{")
        for node in sorted(nodes):
            shape = "doublecircle" if graph.nodes[node].get("idempotent") else "circle"
            lines.append(f'    {node} [shape={shape}];')
        lines.append("  }")
    for u, v in sorted(graph.edges):
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines)


def export_power_graph(modulus: FactoredModulus, cap: int = DEFAULT_MAX_GRAPH_MODULUS) -> str:
    """构造顺序幂图并导出为 DOT"""
    return power_graph_to_dot(power_graph(modulus, cap))
