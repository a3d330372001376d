"""Helpers for consistent run reports."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .bp_engine import BPResult
from .checkers import C1Verdict, C2Verdict, C3Verdict, ConditionReport
from .config import BENCH_REPORT_SCHEMA, RUN_REPORT_SCHEMA
from .problems import RecoveredSolution


def rational(value) -> str:
    """有理数统一写成 ``p/q`` 字符串（整数只写分子）。"""

    return str(Fraction(value))


def _number(value: float) -> float | str:
    value = float(value)
    if math.isfinite(value):
        return value
    if math.isnan(value):
        return "nan"
    return "inf" if value > 0 else "-inf"


def _vector(values: Sequence | None) -> list[str] | None:
    if values is None:
        return None
    return [rational(v) for v in values]


def objective_payload(value: Fraction | None) -> dict | None:
    if value is None:
        return None
    return {"rational": rational(value), "float": float(value)}


def report_success(command: str, data: dict | None = None) -> dict:
    """返回标准成功报告，可附带额外数据。"""
    payload = {"schema": RUN_REPORT_SCHEMA, "command": command, "success": True}
    if data:
        payload.update(data)
    return payload


def report_error(command: str, message: str, exit_code: int) -> dict:
    """返回错误报告，并记录对应的退出码。"""
    return {
        "schema": RUN_REPORT_SCHEMA,
        "command": command,
        "success": False,
        "error": message,
        "exit_code": exit_code,
    }


def decision_payload(result: BPResult) -> dict:
    decision = result.decision
    return {
        "values": decision.symbols(),
        "undecided": list(decision.undecided),
        "integral": decision.is_integral,
        "iterations": result.iterations_run,
        "converged": result.converged,
        "final_residual": _number(result.final_residual),
        "stop_reason": result.stop_reason,
    }


def solution_payload(solution: RecoveredSolution | None, cover: Sequence[int] | None = None) -> dict | None:
    if solution is None:
        return None
    payload = {
        "values": _vector(solution.values),
        "objective": objective_payload(solution.objective),
    }
    if solution.aux:
        payload["aux"] = _vector(solution.aux)
    if cover is not None:
        payload["vertex_cover"] = list(cover)
    return payload


def _c1_payload(verdict: C1Verdict) -> dict:
    payload: dict = {"status": verdict.status.value}
    if verdict.x_star is not None:
        payload["x_star"] = _vector(verdict.x_star)
    if verdict.witnesses:
        payload["witnesses"] = [_vector(w) for w in verdict.witnesses]
    if verdict.reason:
        payload["reason"] = verdict.reason
    return payload


def _c2_payload(verdict: C2Verdict) -> dict:
    payload: dict = {"status": verdict.status.value}
    if verdict.variables:
        payload["variables"] = list(verdict.variables)
    return payload


def _c3_payload(verdict: C3Verdict) -> dict:
    payload: dict = {"status": verdict.status.value}
    if verdict.factor is not None:
        payload["factor"] = verdict.factor
        payload["local"] = list(verdict.local or ())
        payload["flip"] = verdict.flip
    if verdict.reason:
        payload["reason"] = verdict.reason
    return payload


def conditions_payload(report: ConditionReport) -> dict:
    return {
        "c1": _c1_payload(report.c1),
        "c2": _c2_payload(report.c2),
        "c3": _c3_payload(report.c3),
        "c3_witness": _c3_payload(report.c3_witness),
        "x_star": None if report.x_star is None else list(report.x_star),
        "x_star_source": report.x_star_source,
        "all_hold": report.all_hold,
    }


def bench_aggregate(records: Iterable[dict]) -> dict:
    """汇总 bench 的逐实例记录；结果与记录顺序无关。"""

    records = list(records)
    ok = [r for r in records if r.get("success")]
    holding = [r for r in ok if (r.get("conditions") or {}).get("all_hold")]
    verdicts: dict[str, int] = {}
    c1_status: dict[str, int] = {}
    for record in ok:
        verdict = (record.get("comparison") or {}).get("verdict", "none")
        verdicts[verdict] = verdicts.get(verdict, 0) + 1
        status = ((record.get("conditions") or {}).get("c1") or {}).get("status", "none")
        c1_status[status] = c1_status.get(status, 0) + 1
    holding_match = sum(1 for r in holding if r["comparison"]["verdict"] == "match")
    contradictions = sorted(r["index"] for r in holding if r["comparison"]["verdict"] == "mismatch")
    iterations = [r["decision"]["iterations"] for r in ok]
    wall = [r.get("wall_time", 0.0) for r in records]
    return {
        "schema": BENCH_REPORT_SCHEMA,
        "aggregate": True,
        "count": len(records),
        "errors": len(records) - len(ok),
        "verdicts": verdicts,
        "c1": c1_status,
        "conditions_hold": len(holding),
        "pass_rate": (holding_match / len(holding)) if holding else None,
        "contradictions": contradictions,
        "mean_iterations": (sum(iterations) / len(iterations)) if iterations else None,
        "mean_wall_time": (sum(wall) / len(wall)) if wall else None,
    }


def dumps(payload: dict, *, indent: int | None = 2) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=indent)


def render_human(payload: dict) -> str:
    """把报告渲染成便于终端阅读的若干行文本。"""

    if payload.get("aggregate"):
        lines = [f"instances: {payload['count']} (errors {payload['errors']})"]
        lines.append(f"conditions hold: {payload['conditions_hold']}")
        rate = payload["pass_rate"]
        lines.append("pass rate: n/a" if rate is None else f"pass rate: {rate:.2%}")
        for verdict, count in sorted(payload["verdicts"].items()):
            lines.append(f"  {verdict}: {count}")
        if payload["contradictions"]:
            lines.append(f"contradictions: {payload['contradictions']}")
        if payload["mean_iterations"] is not None:
            lines.append(f"mean iterations: {payload['mean_iterations']:.1f}")
        if payload["mean_wall_time"] is not None:
            lines.append(f"mean wall time: {payload['mean_wall_time']:.3f}s")
        return "\n".join(lines)

    if not payload.get("success", False):
        return f"error: {payload.get('error', '')}"

    lines = [f"{payload['command']}: {payload.get('kind', '')}"]
    decision = payload.get("decision")
    if decision:
        state = "converged" if decision["converged"] else "not converged"
        lines.append(f"decision: {decision['values']}")
        lines.append(
            f"iterations: {decision['iterations']} ({state}, {decision['stop_reason']}, "
            f"residual {decision['final_residual']})"
        )
    solution = payload.get("solution")
    if solution:
        lines.append(f"solution: {' '.join(solution['values'])}")
        lines.append(f"objective: {solution['objective']['rational']}")
        if "vertex_cover" in solution:
            lines.append(f"vertex cover: {solution['vertex_cover']}")
    elif payload.get("recovery_error"):
        lines.append(f"recovery: {payload['recovery_error']}")
    conditions = payload.get("conditions")
    if conditions:
        for key in ("c1", "c2", "c3", "c3_witness"):
            entry = conditions[key]
            reason = f" ({entry['reason']})" if entry.get("reason") else ""
            lines.append(f"{key}: {entry['status']}{reason}")
    comparison = payload.get("comparison")
    if comparison:
        lines.append(f"oracle: {comparison['oracle']} -> {comparison['verdict']}")
        if comparison.get("details"):
            lines.append(f"  {comparison['details']}")
    if "wall_time" in payload:
        lines.append(f"wall time: {payload['wall_time']:.3f}s")
    return "\n".join(lines)


__all__ = [
    "rational",
    "objective_payload",
    "report_success",
    "report_error",
    "decision_payload",
    "solution_payload",
    "conditions_payload",
    "bench_aggregate",
    "dumps",
    "render_human",
]
