"""
幂等元工具包 - 核心类
加载配置、设置日志，并把各子命令接到对应的工具上
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
from rich.console import Console
from rich.logging import RichHandler

from .arithmetic import FactoredModulus, TotientKind
from .benchmark import BenchmarkReport, ModExpBenchmark
from .config import Settings, load_config
from .errors import InvariantViolation
from .idempotents import cofactor_is_valid, enumerate_idempotents, index_set
from .identities import IdentityParams, IdentityReport, verify_identity
from .lattice import (
    IdempotentLattice,
    consistent_lattice,
    hasse_diagram,
    verify_general_identity,
)
from .modexp import PerPrimeMode, modexp_with_strategy
from .output_formatter import OutputFormatter
from .parsers import ModulusParser
from .selftest import SelfTestReport, SelfTestRunner
from .tools import PowerGraphTool
from .tools.power_graph import graph_components, is_cycle_element


logger = logging.getLogger(__name__)


class IdempotentToolkit:
    """
    Z/mZ 幂等元工具包

    统一持有配置与各工具实例，命令行每个子命令对应一个方法，
    方法返回可 JSON 序列化的字典（必要时附带图）
    """

    def __init__(
        self,
        config_path: str = "config.yaml",
        settings: Optional[Settings] = None,
        verbose: bool = False,
        setup_logging: bool = True,
    ):
        """
        初始化工具包

        Args:
            config_path: 配置文件路径
            settings: 直接给定的配置，优先于 config_path
            verbose: 强制 DEBUG 日志
            setup_logging: 是否配置根日志
        """
        # 加载配置
        self.settings = settings if settings is not None else load_config(config_path)
        self.config = self.settings.to_dict()

        if setup_logging:
            self._setup_logging(verbose)

        enumeration = self.config["enumeration"]
        self.max_r = enumeration["max_r"]
        self.max_lattice_span = enumeration["max_lattice_span"]
        self.trial_bound = self.config["arithmetic"]["trial_division_bound"]
        self.totient_kind = TotientKind(self.config["modexp"]["totient_kind"])
        self.per_prime_mode = PerPrimeMode(self.config["modexp"]["per_prime_mode"])

        # 初始化工具
        self.parser = ModulusParser()
        self.power_graph = PowerGraphTool(self.config)
        self.benchmark = ModExpBenchmark(self.config)
        self.selftest_runner = SelfTestRunner(self.config)
        self.formatter = OutputFormatter(self.config)

        logger.debug("幂等元工具包初始化完成")

    def _setup_logging(self, verbose: bool = False):
        """设置日志：文件 + 可选的 rich 控制台（stderr）"""
        log_config = self.config.get("logging", {})
        level = "DEBUG" if verbose else log_config.get("level", "INFO")
        log_file = log_config.get("file")

        handlers: List[logging.Handler] = []
        if log_file:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file, encoding="utf-8")
            file_handler.setFormatter(logging.Formatter(log_config.get("format")))
            handlers.append(file_handler)

        if log_config.get("console", True):
            handlers.append(
                RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
            )

        logging.basicConfig(
            level=getattr(logging, level),
            format="%(message)s",
            handlers=handlers or [logging.NullHandler()],
            force=True,
        )

    def apply_caps(self, max_r: int, max_modulus: int, max_graph_modulus: int):
        """用单次调用的上限覆盖配置中的枚举上限"""
        enumeration = self.config["enumeration"]
        enumeration.update(max_r=max_r, max_modulus=max_modulus, max_graph_modulus=max_graph_modulus)
        self.max_r = max_r
        self.power_graph.max_modulus = max_modulus
        self.power_graph.max_graph_modulus = max_graph_modulus

    # ===== 输入 =====

    def parse_modulus(self, text: str) -> FactoredModulus:
        return self.parser.parse_modulus(text, self.trial_bound)

    # ===== 子命令 =====

    def idempotents(self, modulus: FactoredModulus) -> Dict[str, Any]:
        """枚举全部 2^r 个幂等元"""
        rows = []
        for d in enumerate_idempotents(modulus, self.max_r):
            row = d.to_dict()
            row["cofactor"] = str(d.cofactor)
            if not cofactor_is_valid(d):
                raise InvariantViolation(f"余因子 a_I = {d.cofactor} 不满足 a_I·g_I ≡ 1 (mod m/g_I)")
            rows.append(row)
        return {"modulus": modulus.to_dict(), "idempotents": rows}

    def identity(
        self, modulus: FactoredModulus, identity_id: str, params: IdentityParams
    ) -> IdentityReport:
        return verify_identity(modulus, identity_id, params, self.max_r)

    def lattice(self, modulus: FactoredModulus) -> Tuple[Dict[str, Any], nx.DiGraph]:
        """完整幂等元格 L_m 及其 Hasse 图"""
        full = IdempotentLattice(modulus, self.max_r)
        graph = full.hasse_diagram()
        return self._lattice_payload(modulus, graph, full.as_consistent()), graph

    def sublattice(
        self,
        modulus: FactoredModulus,
        S: List[int],
        T: List[int],
        identity_id: Optional[str] = None,
        params: Optional[IdentityParams] = None,
    ) -> Tuple[Dict[str, Any], nx.DiGraph, Optional[IdentityReport]]:
        """一致子格 L_{m,S,T}，可选地校验一条推广恒等式"""
        lattice = consistent_lattice(modulus, index_set(modulus, S), index_set(modulus, T))
        graph = hasse_diagram(lattice, self.max_lattice_span)
        data = self._lattice_payload(modulus, graph, lattice)

        report = None
        if identity_id:
            report = verify_general_identity(lattice, identity_id, params, self.max_lattice_span)
            data["report"] = report.to_dict()
        return data, graph, report

    @staticmethod
    def _lattice_payload(modulus: FactoredModulus, graph: nx.DiGraph, lattice) -> Dict[str, Any]:
        data = lattice.to_dict()
        data["modulus"] = modulus.to_dict()
        data["elements"] = [
            {
                "mask": node,
                "I": attrs["I"],
                "g": str(attrs["g"]),
                "d": str(attrs["d"]),
                "level": attrs["level"],
            }
            for node, attrs in sorted(graph.nodes(data=True))
        ]
        data["edges"] = [[graph.nodes[u]["I"], graph.nodes[v]["I"]] for u, v in sorted(graph.edges)]
        data["edge_count"] = graph.number_of_edges()
        return data

    def component(self, modulus: FactoredModulus, b: int) -> Dict[str, Any]:
        b %= modulus.m
        data = self.power_graph.component(modulus, b).to_dict()
        data.update(modulus=modulus.to_dict(), b=str(b), cycle_element=is_cycle_element(modulus, b))
        return data

    def orbit(self, modulus: FactoredModulus, a: int) -> Dict[str, Any]:
        a %= modulus.m
        decomposition = self.power_graph.orbit(modulus, a)
        data = decomposition.to_dict()
        data.update(modulus=modulus.to_dict(), idempotent=str(decomposition.idempotent(modulus)))
        return data

    def graph(self, modulus: FactoredModulus) -> Tuple[Dict[str, Any], nx.DiGraph]:
        graph = self.power_graph.graph(modulus)
        components = [
            {
                "I": list(c["index_set"].members),
                "idempotent": str(c["idempotent"]),
                "nodes": [str(x) for x in c["nodes"]],
            }
            for c in graph_components(modulus, graph)
        ]
        data = {
            "modulus": modulus.to_dict(),
            "components": components,
            "adjacency": {
                str(node): [str(v) for v in sorted(successors)]
                for node, successors in sorted(nx.to_dict_of_lists(graph).items())
            },
            "edge_count": graph.number_of_edges(),
        }
        return data, graph

    def modexp(
        self,
        modulus: FactoredModulus,
        b: int,
        e: int,
        strategy: str = "auto",
        totient_kind: Optional[TotientKind] = None,
    ) -> Dict[str, Any]:
        kind = totient_kind or self.totient_kind
        value, plan = modexp_with_strategy(modulus, b, e, strategy, kind, self.per_prime_mode)
        return {
            "modulus": modulus.to_dict(),
            "base": str(b % modulus.m),
            "exponent": str(e),
            "result": str(value),
            "plan": plan.to_dict(),
        }

    def bench(
        self,
        modulus: FactoredModulus,
        samples: Optional[int] = None,
        exponent_bits: Optional[int] = None,
        seed: Optional[int] = None,
        console: Optional[Console] = None,
    ) -> BenchmarkReport:
        return self.benchmark.run(modulus, samples, exponent_bits, seed, console)

    def selftest(
        self,
        low: int,
        high: int,
        areas: Optional[List[str]] = None,
        console: Optional[Console] = None,
    ) -> SelfTestReport:
        return self.selftest_runner.run(low, high, areas, console)
