"""
命令行入口
解析参数、调用 IdempotentToolkit 并把结果写到 stdout；诊断信息写到 stderr

退出码: 0 成功，1 校验失败，2 用法或输入错误
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError
from rich.console import Console

from .arithmetic import TotientKind
from .config import CliConfig
from .errors import ConfigError, IdempotentError, InvariantViolation, ParseError
from .identities import IdentityId
from .lattice import GeneralIdentityId
from .modexp import strategy_names
from .output_formatter import FORMATS
from .parsers import ModulusParser
from .toolkit import IdempotentToolkit


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2

SELFTEST_AREAS = ("idempotents", "identities", "general_identities", "lattice", "power_graph", "modexp")


class _ArgumentParser(argparse.ArgumentParser):
    """用法错误抛出 ParseError，由 run 统一映射为退出码 2"""

    def error(self, message: str):
        raise ParseError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default="config.yaml", help="配置文件路径（默认: config.yaml）")
    common.add_argument("-f", "--format", choices=FORMATS, help="输出格式（默认取配置）")
    common.add_argument("-o", "--output", help="把结果写入文件而不是 stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="显示详细日志")
    common.add_argument("--max-r", type=int, help="覆盖需要遍历 2^r 个子集时 r 的上限")

    parser = _ArgumentParser(
        prog="idempotent",
        description="Z/mZ 幂等元工具：枚举、恒等式校验、格、幂图与模幂",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  python main.py idempotents 30 --format json
  python main.py identity 30 TOP_LEVEL_SUM
  python main.py identity 2^2*3*5 SUBLATTICE_SUM I=1,2
  python main.py sublattice 210 --S 1,2,3 --T 1 --identity GEN_DUAL_SUM I=1,2
  python main.py graph 12 --dot
  python main.py modexp 30 7 5 --strategy auto --carmichael
  python main.py selftest 2-500
        """,
    )
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_ArgumentParser)
    sub.required = True

    p = sub.add_parser("idempotents", parents=[common], help="枚举全部 2^r 个幂等元")
    p.add_argument("modulus", help="十进制、p^e*... 或 JSON 形式的模数")

    p = sub.add_parser("identity", parents=[common], help="校验模 m 的恒等式")
    p.add_argument("modulus")
    p.add_argument("identity_id", choices=[i.value for i in IdentityId], metavar="identity_id")
    p.add_argument("params", nargs="*", help="key=value 参数，如 I=1,2 J=3 sets=1;2,3 k=2 n=1")

    p = sub.add_parser("lattice", parents=[common], help="幂等元格的 Hasse 图")
    p.add_argument("modulus")
    p.add_argument("--dot", action="store_true", help="以 DOT 格式输出")
    p.add_argument("--label", choices=("g", "d"), default="g", help="DOT 节点标签")

    p = sub.add_parser("sublattice", parents=[common], help="一致子格与模 g_S 的推广恒等式")
    p.add_argument("modulus")
    p.add_argument("--S", dest="S", required=True, help="上确界下标集合，如 1,2,3")
    p.add_argument("--T", dest="T", default="", help="下确界下标集合（默认空集）")
    p.add_argument(
        "--identity",
        nargs="+",
        metavar=("GEN_ID", "PARAM"),
        help="推广恒等式编号及其 key=value 参数，如 GEN_DUAL_SUM I=1,2",
    )
    p.add_argument("--dot", action="store_true")
    p.add_argument("--label", choices=("g", "d"), default="g")

    p = sub.add_parser("component", parents=[common], help="b 所在的幂图分量")
    p.add_argument("modulus")
    p.add_argument("b", type=int)

    p = sub.add_parser("orbit", parents=[common], help="a 的幂序列：尾部与循环")
    p.add_argument("modulus")
    p.add_argument("a", type=int)

    p = sub.add_parser("graph", parents=[common], help="顺序幂图")
    p.add_argument("modulus")
    p.add_argument("--dot", action="store_true")

    p = sub.add_parser("modexp", parents=[common], help="幂等元-CRT 模幂")
    p.add_argument("modulus")
    p.add_argument("b", type=int)
    p.add_argument("e", type=int)
    p.add_argument("--strategy", choices=strategy_names(), default="auto")
    p.add_argument("--carmichael", action="store_true", help="用 Carmichael 函数约化指数")

    p = sub.add_parser("bench", parents=[common], help="模幂基准测试")
    p.add_argument("modulus")
    p.add_argument("--samples", type=int)
    p.add_argument("--bits", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("selftest", parents=[common], help="在模数区间上跑全部不变量")
    p.add_argument("range", help="如 2-500 或单个模数")
    p.add_argument("--workers", type=int, help="进程数（默认取配置）")
    p.add_argument("--max-exponent", type=int, help="模幂校验的最大指数")
    p.add_argument("--areas", help=f"逗号分隔的校验项: {','.join(SELFTEST_AREAS)}")

    return parser


def _cli_config(args: argparse.Namespace, toolkit: IdempotentToolkit) -> CliConfig:
    settings = toolkit.settings
    output_format = "dot" if getattr(args, "dot", False) else args.format or settings.output.format
    return CliConfig(
        modulus_input=getattr(args, "modulus", None),
        output_format=output_format,
        max_r=args.max_r if getattr(args, "max_r", None) is not None else settings.enumeration.max_r,
        max_modulus=settings.enumeration.max_modulus,
        max_graph_modulus=settings.enumeration.max_graph_modulus,
        seed=args.seed if getattr(args, "seed", None) is not None else settings.benchmark.seed,
        totient_kind=TotientKind.CARMICHAEL if getattr(args, "carmichael", False) else settings.modexp.totient_kind,
    )


def _dispatch(args: argparse.Namespace, toolkit: IdempotentToolkit, cli: CliConfig) -> int:
    """执行子命令并输出，返回退出码"""
    command = args.command
    fmt = cli.output_format
    graph = None
    ok = True
    stderr = Console(stderr=True)

    if command == "selftest":
        low, high = ModulusParser.parse_range(args.range)
        if args.workers is not None:
            toolkit.selftest_runner.max_workers = args.workers
        if args.max_exponent is not None:
            toolkit.config["selftest"]["max_exponent"] = args.max_exponent
        areas = None
        if args.areas:
            areas = [a.strip() for a in args.areas.split(",") if a.strip()]
            unknown = set(areas) - set(SELFTEST_AREAS)
            if unknown:
                raise ParseError(f"未知的校验项: {sorted(unknown)}")
        report = toolkit.selftest(low, high, areas, console=stderr)
        data, ok = report.to_dict(), report.passed
    else:
        modulus = toolkit.parse_modulus(cli.modulus_input)

        if command == "idempotents":
            data = toolkit.idempotents(modulus)
        elif command == "identity":
            params = ModulusParser.parse_identity_params(args.params)
            report = toolkit.identity(modulus, args.identity_id, params)
            data, ok = report.to_dict(), report.all_hold
        elif command == "lattice":
            data, graph = toolkit.lattice(modulus)
        elif command == "sublattice":
            identity_id, params = None, None
            if args.identity:
                identity_id = args.identity[0]
                if identity_id not in {i.value for i in GeneralIdentityId}:
                    raise ParseError(f"未知的推广恒等式: {identity_id}")
                params = ModulusParser.parse_identity_params(args.identity[1:])
            data, graph, report = toolkit.sublattice(
                modulus,
                ModulusParser.parse_indices(args.S),
                ModulusParser.parse_indices(args.T),
                identity_id,
                params,
            )
            ok = report is None or report.all_hold
        elif command == "component":
            data = toolkit.component(modulus, args.b)
        elif command == "orbit":
            data = toolkit.orbit(modulus, args.a)
        elif command == "graph":
            data, graph = toolkit.graph(modulus)
        elif command == "modexp":
            data = toolkit.modexp(modulus, args.b, args.e, args.strategy, cli.totient_kind)
        elif command == "bench":
            report = toolkit.bench(modulus, args.samples, args.bits, cli.seed, console=stderr)
            data, ok = report.to_dict(), report.mismatch_count == 0
        else:
            raise ParseError(f"未知的子命令: {command}")

    content = toolkit.formatter.format_output(
        command, data, fmt, graph=graph, label=getattr(args, "label", "g")
    )
    if args.output:
        toolkit.formatter.save_output(content, args.output)
    else:
        print(content)

    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def run(argv: Optional[List[str]] = None) -> int:
    """
    命令行主流程

    Args:
        argv: 参数列表，None 时取 sys.argv[1:]

    Returns:
        退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ParseError as e:
        print(f"错误: {e}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    try:
        toolkit = IdempotentToolkit(config_path=args.config, verbose=args.verbose)
        cli = _cli_config(args, toolkit)
        toolkit.apply_caps(cli.max_r, cli.max_modulus, cli.max_graph_modulus)
        return _dispatch(args, toolkit, cli)
    except ValidationError as e:
        print(f"错误: 参数无效: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ConfigError) as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as e:
        print(f"校验失败: {e}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILED
    except IdempotentError as e:
        logger.debug("命令失败", exc_info=True)
        print(f"错误: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
