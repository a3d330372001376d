"""bplp：用 max-product BP 求解组合优化问题 LP 松弛的库与命令行工具。"""

from dotenv import load_dotenv

# 读取 .env 中的 BPLP_CONFIG / BPLP_PRESETS / BPLP_LOG_LEVEL
load_dotenv()

from .bp_engine import BPConfig, BPResult, Decision, InitSpec, decode, run
from .checkers import ConditionReport, check_conditions
from .factor_graph import Factor, FactorGraph, Sense, build_graph
from .generators import GenOptions, apply_noise, gen
from .instance_store import load_instance, parse_instance, save_instance, serialize_instance
from .problems import GMBundle, ProblemInstance, ProblemKind, build_gm, recover

__all__ = [
    "BPConfig",
    "BPResult",
    "Decision",
    "InitSpec",
    "decode",
    "run",
    "ConditionReport",
    "check_conditions",
    "Factor",
    "FactorGraph",
    "Sense",
    "build_graph",
    "GenOptions",
    "apply_noise",
    "gen",
    "load_instance",
    "parse_instance",
    "save_instance",
    "serialize_instance",
    "GMBundle",
    "ProblemInstance",
    "ProblemKind",
    "build_gm",
    "recover",
]
