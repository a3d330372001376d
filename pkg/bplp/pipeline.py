"""实例 → GM → BP → 还原 → 条件检查 / 与 oracle 对比 的完整流程。

CLI 的 solve / check / compare / bench 都只是这里几个函数的薄包装，返回可直接
序列化的报告字典。
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .bp_engine import BPConfig, BPResult, config_from_dict, run
from .checkers import ConditionReport, check_conditions
from .config import fallback_config
from .factor_graph import FactorGraphError
from .generators import GeneratorError, GenOptions, apply_noise, gen
from .oracles import (
    CapExceeded,
    MapStatus,
    OracleError,
    brute_force_map,
    dijkstra,
    flow_oracle,
    matching_oracle,
)
from .problems import (
    GMBundle,
    InfeasibleDecode,
    NotACover,
    ProblemError,
    ProblemInstance,
    ProblemKind,
    RecoveredSolution,
    UndecidedVariables,
    build_gm,
    recover,
    recover_primal_vertex_cover,
)
from .reports import conditions_payload, decision_payload, objective_payload, report_error, report_success, solution_payload

logger = logging.getLogger(__name__)


class CompareVerdict(str, Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    ORACLE_UNAVAILABLE = "oracle_unavailable"


@dataclass(frozen=True, slots=True)
class Comparison:
    oracle: str
    verdict: CompareVerdict
    details: str = ""
    # 并列最优解之间取值不同的 GM 变量
    ties: tuple[int, ...] = ()
    oracle_objective: Fraction | None = None

    def as_dict(self) -> dict:
        return {
            "oracle": self.oracle,
            "verdict": self.verdict.value,
            "details": self.details,
            "ties": list(self.ties),
            "oracle_objective": objective_payload(self.oracle_objective),
        }


@dataclass(frozen=True, slots=True)
class Outcome:
    bundle: GMBundle
    result: BPResult
    solution: RecoveredSolution | None
    cover: tuple[int, ...] | None = None
    recovery_error: str = ""


def bp_settings(config: dict | None = None, **overrides) -> BPConfig:
    """配置文件 bp 分节 + 命令行覆盖项。"""

    config = config or fallback_config()
    return config_from_dict(config.get("bp"), **overrides)


def prepare(instance: ProblemInstance, config: dict | None = None, noise: Fraction | None = None) -> GMBundle:
    """构造 GM 并按实例文件中的噪声设置扰动权重；noise 不为 None 时覆盖文件中的幅度。"""

    config = config or fallback_config()
    section = config["factor_graph"]
    bundle = build_gm(
        instance,
        verify=bool(section["verify_hints"]),
        exhaustive_max_scope=int(section["exhaustive_max_scope"]),
        generic_max_scope=int(section["generic_max_scope"]),
    )
    magnitude = instance.noise.magnitude if noise is None else Fraction(noise)
    return apply_noise(bundle, instance.noise.seed, magnitude)


def solve_bundle(bundle: GMBundle, settings: BPConfig) -> Outcome:
    result = run(bundle.graph, settings)
    try:
        solution = recover(bundle, result.decision)
    except (UndecidedVariables, InfeasibleDecode) as exc:
        logger.info("无法还原解：%s", exc)
        return Outcome(bundle, result, None, recovery_error=str(exc))
    cover = None
    error = ""
    if bundle.kind is ProblemKind.VERTEX_COVER_DUAL:
        try:
            cover = recover_primal_vertex_cover(bundle.instance, solution)
        except NotACover as exc:
            error = str(exc)
    return Outcome(bundle, result, solution, cover, error)


def conditions_for(bundle: GMBundle, config: dict | None = None) -> ConditionReport:
    config = config or fallback_config()
    oracles = config["oracles"]
    return check_conditions(
        bundle,
        max_dim=int(oracles["vertex_max_dim"]),
        max_rows=int(oracles["vertex_max_rows"]),
        map_max_vars=int(oracles["map_max_vars"]),
        c3_cap=int(config["checkers"]["c3_cap"]),
    )


def _differing(assignments) -> tuple[int, ...]:
    if len(assignments) < 2:
        return ()
    first = assignments[0]
    return tuple(i for i in range(len(first)) if any(a[i] != first[i] for a in assignments[1:]))


def _compare_map(outcome: Outcome, max_vars: int) -> Comparison:
    bundle = outcome.bundle
    values = outcome.result.decision.values
    try:
        found = brute_force_map(bundle.graph, bundle.weights, max_vars=max_vars)
    except CapExceeded as exc:
        return Comparison("brute_force_map", CompareVerdict.ORACLE_UNAVAILABLE, str(exc))
    if found.status is MapStatus.INFEASIBLE:
        return Comparison("brute_force_map", CompareVerdict.ORACLE_UNAVAILABLE, "GM 没有可行解")
    ties = _differing(found.assignments)
    undecided = [i for i, v in enumerate(values) if v is None]
    if values in found.assignments:
        details = "" if found.status is MapStatus.UNIQUE else "解码命中并列最优解之一"
        return Comparison("brute_force_map", CompareVerdict.MATCH, details, ties, found.value)
    if found.status is MapStatus.UNIQUE:
        wrong = [i for i, (v, a) in enumerate(zip(values, found.assignment)) if v is not None and v != a]
        details = f"未定位置 {undecided}，取值错误位置 {wrong}"
    else:
        details = f"未定位置 {undecided}，oracle 并列位置 {list(ties)}"
    return Comparison("brute_force_map", CompareVerdict.MISMATCH, details, ties, found.value)


def _classical_optimum(instance: ProblemInstance, max_nodes: int) -> tuple[str, Fraction] | None:
    kind = instance.kind
    if kind is ProblemKind.SHORTEST_PATH:
        return "dijkstra", dijkstra(instance).cost
    if kind in (ProblemKind.PERFECT_MATCHING, ProblemKind.PM_ODD_CYCLES):
        return "matching_oracle", matching_oracle(instance, max_nodes=max_nodes).value
    if kind is ProblemKind.NETWORK_FLOW:
        return "flow_oracle", flow_oracle(instance, max_nodes=max_nodes).cost
    return None


def compare_outcome(outcome: Outcome, config: dict | None = None) -> Comparison:
    """GM 变量不多时与穷举 MAP 对比；否则用经典算法的最优值对比还原后的目标值。"""

    config = config or fallback_config()
    oracles = config["oracles"]
    max_vars = int(oracles["map_max_vars"])
    if outcome.bundle.graph.num_vars <= max_vars:
        return _compare_map(outcome, max_vars)
    try:
        classical = _classical_optimum(outcome.bundle.instance, int(oracles["matching_max_nodes"]))
    except OracleError as exc:
        return Comparison("classical", CompareVerdict.ORACLE_UNAVAILABLE, str(exc))
    if classical is None:
        return Comparison("none", CompareVerdict.ORACLE_UNAVAILABLE, "该问题类型超出穷举上限且没有经典 oracle")
    name, optimum = classical
    if outcome.solution is None:
        return Comparison(name, CompareVerdict.MISMATCH, outcome.recovery_error, oracle_objective=optimum)
    if outcome.solution.objective == optimum:
        return Comparison(name, CompareVerdict.MATCH, oracle_objective=optimum)
    details = f"BP 目标值 {outcome.solution.objective}，oracle 最优值 {optimum}"
    return Comparison(name, CompareVerdict.MISMATCH, details, oracle_objective=optimum)


# ---------------------------------------------------------------------------
# 报告


def _base(command: str, bundle: GMBundle) -> dict:
    return report_success(
        command,
        {
            "kind": bundle.kind.value,
            "num_vars": bundle.graph.num_vars,
            "num_factors": len(bundle.graph.factors),
            "fixed": len(bundle.fixed),
        },
    )


def _outcome_fields(payload: dict, outcome: Outcome) -> dict:
    payload["decision"] = decision_payload(outcome.result)
    payload["solution"] = solution_payload(outcome.solution, outcome.cover)
    if outcome.recovery_error:
        payload["recovery_error"] = outcome.recovery_error
    return payload


def solve_report(instance: ProblemInstance, config: dict | None = None, settings: BPConfig | None = None, noise=None) -> dict:
    start = time.perf_counter()
    bundle = prepare(instance, config, noise)
    outcome = solve_bundle(bundle, settings or bp_settings(config))
    payload = _outcome_fields(_base("solve", bundle), outcome)
    payload["wall_time"] = time.perf_counter() - start
    return payload


def check_report(instance: ProblemInstance, config: dict | None = None, noise=None) -> dict:
    start = time.perf_counter()
    bundle = prepare(instance, config, noise)
    payload = _base("check", bundle)
    payload["conditions"] = conditions_payload(conditions_for(bundle, config))
    payload["wall_time"] = time.perf_counter() - start
    return payload


def compare_report(instance: ProblemInstance, config: dict | None = None, settings: BPConfig | None = None, noise=None) -> dict:
    """solve + 条件检查 + oracle 对比；条件全部成立却不一致时标记 contradiction。"""

    start = time.perf_counter()
    bundle = prepare(instance, config, noise)
    outcome = solve_bundle(bundle, settings or bp_settings(config))
    conditions = conditions_for(bundle, config)
    comparison = compare_outcome(outcome, config)
    payload = _outcome_fields(_base("compare", bundle), outcome)
    payload["conditions"] = conditions_payload(conditions)
    payload["comparison"] = comparison.as_dict()
    payload["contradiction"] = conditions.all_hold and comparison.verdict is CompareVerdict.MISMATCH
    if payload["contradiction"]:
        logger.error("条件 C1–C3 成立但 BP 与 oracle 不一致：%s", comparison.details)
    payload["wall_time"] = time.perf_counter() - start
    return payload


def bench_one(job: tuple) -> dict:
    """单个 bench 实例；参数是普通元组以便跨进程传递。"""

    index, kind, options, seed, noise, config, overrides = job
    start = time.perf_counter()
    try:
        instance = gen(kind, GenOptions(**options), seed=seed, noise=noise, relative=config["noise"]["relative"])
        payload = compare_report(instance, config, bp_settings(config, **overrides))
    except (ProblemError, FactorGraphError, GeneratorError) as exc:
        payload = report_error("bench", str(exc), 1)
        payload["wall_time"] = time.perf_counter() - start
    payload["index"] = index
    payload["seed"] = seed
    return payload


__all__ = [
    "CompareVerdict",
    "Comparison",
    "Outcome",
    "bp_settings",
    "prepare",
    "solve_bundle",
    "conditions_for",
    "compare_outcome",
    "solve_report",
    "check_report",
    "compare_report",
    "bench_one",
]
