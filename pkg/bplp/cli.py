"""命令行入口：gen / solve / check / compare / bench / presets。"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from tqdm import tqdm

from .bp_engine import BPConfigError
from .config import LOG_LEVEL_ENV
from .config_store import list_presets, load_config, load_preset
from .factor_graph import FactorGraphError
from .generators import GeneratorError, GenOptions, gen
from .instance_store import InstanceFormatError, load_instance, parse_fraction, save_instance, serialize_instance
from .oracles import OracleError
from .pipeline import bench_one, bp_settings, check_report, compare_report, solve_report
from .problems import ProblemError, ProblemKind
from .reports import bench_aggregate, dumps, render_human

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_CONTRADICTION = 3


class _Parser(argparse.ArgumentParser):
    """用法错误统一返回退出码 1（argparse 默认是 2，与解析错误冲突）。"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction_arg(text: str) -> Fraction:
    try:
        value = parse_fraction(text, "--noise")
    except InstanceFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if value < 0:
        raise argparse.ArgumentTypeError("噪声幅度不能为负")
    return value


def _configure_logging(verbose: bool) -> None:
    level_name = "DEBUG" if verbose else (os.environ.get(LOG_LEVEL_ENV) or "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _add_bp_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("BP")
    group.add_argument("--max-iters", type=int)
    group.add_argument("--residual-tol", type=float)
    group.add_argument("--tie-tol", type=float, help="相对于 max|w| 的平局容差")
    group.add_argument("--stable-window", type=int)
    group.add_argument("--decode-patience", type=int)
    group.add_argument("--init", choices=("uniform", "random"))
    group.add_argument("--init-range", type=float)
    group.add_argument("--seed", type=int, help="random 初始化的种子")
    group.add_argument("--workers", type=int)


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="写入文件而不是标准输出")
    parser.add_argument("--format", choices=("human", "structured"), default="human")


def _bp_overrides(args) -> dict:
    return {
        "max_iters": args.max_iters,
        "residual_tol": args.residual_tol,
        "tie_tol": args.tie_tol,
        "stable_window": args.stable_window,
        "decode_patience": args.decode_patience,
        "init": args.init,
        "init_range": args.init_range,
        "init_seed": args.seed,
        "workers": args.workers,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bplp", description="Max-product BP for LP relaxations of combinatorial problems.")
    parser.add_argument("--config", help="配置文件路径（覆盖 BPLP_CONFIG）")
    parser.add_argument("--preset", help="presets 目录下的预设名称")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    kinds = [kind.value for kind in ProblemKind]

    p_gen = sub.add_parser("gen", help="生成随机实例")
    p_gen.add_argument("kind", choices=kinds)
    p_gen.add_argument("--nodes", type=int, default=6)
    p_gen.add_argument("--density", type=float, default=0.3)
    p_gen.add_argument("--max-weight", type=int, default=9)
    p_gen.add_argument("--cycle-length", type=int, default=3)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--noise", type=_fraction_arg, help="噪声幅度；缺省为 relative × 最小权重差")
    p_gen.add_argument("--out", help="实例文件路径；缺省写到标准输出")

    for name, help_text in (
        ("solve", "运行 BP 并还原解"),
        ("check", "检查 C1/C2/C3"),
        ("compare", "BP 与 oracle 对比"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("instance")
        p.add_argument("--noise", type=_fraction_arg, help="覆盖实例文件中的噪声幅度")
        if name != "check":
            _add_bp_flags(p)
        _add_output_flags(p)

    p_bench = sub.add_parser("bench", help="批量生成并对比")
    p_bench.add_argument("kind", choices=kinds)
    p_bench.add_argument("--count", type=int, default=10)
    p_bench.add_argument("--nodes", type=int, default=6)
    p_bench.add_argument("--density", type=float, default=0.3)
    p_bench.add_argument("--max-weight", type=int, default=9)
    p_bench.add_argument("--cycle-length", type=int, default=3)
    p_bench.add_argument("--noise", type=_fraction_arg)
    p_bench.add_argument("--jobs", type=int, default=1)
    _add_bp_flags(p_bench)
    _add_output_flags(p_bench)

    sub.add_parser("presets", help="列出可用预设")
    return parser


def _load_config(args) -> dict:
    if args.config:
        return load_config(os.path.abspath(args.config))
    if args.preset:
        return load_preset(args.preset)
    return load_config()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _render(payload: dict, fmt: str) -> str:
    return dumps(payload) if fmt == "structured" else render_human(payload)


def _gen_options(args) -> GenOptions:
    return GenOptions(
        nodes=args.nodes,
        density=args.density,
        max_weight=args.max_weight,
        cycle_length=args.cycle_length,
    )


def cmd_gen(args, config: dict) -> int:
    instance = gen(args.kind, _gen_options(args), seed=args.seed, noise=args.noise, relative=config["noise"]["relative"])
    if args.out:
        save_instance(instance, args.out)
    else:
        sys.stdout.write(serialize_instance(instance))
    return EXIT_OK


def cmd_solve(args, config: dict) -> int:
    instance = load_instance(args.instance)
    payload = solve_report(instance, config, bp_settings(config, **_bp_overrides(args)), noise=args.noise)
    _emit(_render(payload, args.format), args.out)
    return EXIT_OK


def cmd_check(args, config: dict) -> int:
    instance = load_instance(args.instance)
    payload = check_report(instance, config, noise=args.noise)
    _emit(_render(payload, args.format), args.out)
    return EXIT_OK


def cmd_compare(args, config: dict) -> int:
    instance = load_instance(args.instance)
    payload = compare_report(instance, config, bp_settings(config, **_bp_overrides(args)), noise=args.noise)
    _emit(_render(payload, args.format), args.out)
    return EXIT_CONTRADICTION if payload["contradiction"] else EXIT_OK


def cmd_bench(args, config: dict) -> int:
    if args.count < 0:
        raise GeneratorError("--count 不能为负")
    # bench 的 --seed 是生成种子，不作为初始化种子
    overrides = {key: value for key, value in _bp_overrides(args).items() if value is not None and key != "init_seed"}
    bp_settings(config, **overrides)
    options = {
        "nodes": args.nodes,
        "density": args.density,
        "max_weight": args.max_weight,
        "cycle_length": args.cycle_length,
    }
    base_seed = args.seed or 0
    jobs = [
        (index, args.kind, options, base_seed + index, args.noise, config, overrides)
        for index in range(args.count)
    ]
    progress = dict(total=len(jobs), desc=f"bench {args.kind}", unit="inst", disable=None, file=sys.stderr)
    if args.jobs > 1 and jobs:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(tqdm(pool.map(bench_one, jobs), **progress))
    else:
        records = [bench_one(job) for job in tqdm(jobs, **progress)]
    aggregate = bench_aggregate(records)

    if args.format == "structured":
        lines = [dumps(record, indent=None) for record in records]
        lines.append(dumps(aggregate, indent=None))
        _emit("\n".join(lines), args.out)
    else:
        _emit(render_human(aggregate), args.out)
    return EXIT_CONTRADICTION if aggregate["contradictions"] else EXIT_OK


def cmd_presets(args, config: dict) -> int:
    presets = list_presets()
    if not presets:
        sys.stdout.write("没有找到预设\n")
        return EXIT_OK
    for preset in presets:
        description = f"  {preset['description']}" if preset["description"] else ""
        sys.stdout.write(f"{preset['name']}{description}\n")
    return EXIT_OK


_COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "check": cmd_check,
    "compare": cmd_compare,
    "bench": cmd_bench,
    "presets": cmd_presets,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    config = _load_config(args)
    logger.debug("运行子命令 %s", args.command)
    try:
        return _COMMANDS[args.command](args, config)
    except InstanceFormatError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_PARSE
    except (ProblemError, FactorGraphError, GeneratorError, BPConfigError, OracleError) as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE


__all__ = ["EXIT_OK", "EXIT_USAGE", "EXIT_PARSE", "EXIT_CONTRADICTION", "build_parser", "main"]
