import json
from fractions import Fraction

import pytest

from bplp.bp_engine import BPConfig
from bplp.config import BENCH_REPORT_SCHEMA, RUN_REPORT_SCHEMA, fallback_config
from bplp.generators import GenOptions, gen
from bplp.pipeline import (
    CompareVerdict,
    bench_one,
    bp_settings,
    check_report,
    compare_outcome,
    compare_report,
    prepare,
    solve_bundle,
    solve_report,
)
from bplp.problems import NoiseSpec, ProblemKind, build_gm
from bplp.reports import bench_aggregate, dumps, rational, render_human, report_error

from conftest import edge, four_cycle, instance, three_node_path


def _noisy_cycle():
    return four_cycle(noise=NoiseSpec(seed=1, magnitude=Fraction(1, 1000)))


def _parallel_matching():
    return instance("perfect_matching", 2, [edge(0, 1, 1), edge(0, 1, 1)])


def test_bp_settings_merge_overrides():
    config = fallback_config()
    settings = bp_settings(config, max_iters=5, init=None)
    assert settings.max_iters == 5
    assert settings.stable_window == config["bp"]["stable_window"]


def test_prepare_applies_instance_noise():
    plain = build_gm(four_cycle())
    noisy = prepare(_noisy_cycle())
    assert noisy.weights != plain.weights
    assert prepare(_noisy_cycle(), noise=Fraction(0)).weights == plain.weights


def test_solve_report_on_noisy_cycle():
    payload = solve_report(_noisy_cycle())
    assert payload["schema"] == RUN_REPORT_SCHEMA
    assert payload["success"]
    assert payload["decision"]["values"] == "00110011"
    assert payload["decision"]["converged"]
    assert payload["solution"]["values"] == ["0", "1", "0", "1"]
    assert payload["solution"]["objective"] == {"rational": "4", "float": 4.0}
    assert payload["wall_time"] >= 0
    json.loads(dumps(payload))


def test_solve_bundle_keeps_recovery_errors():
    outcome = solve_bundle(build_gm(_parallel_matching()), BPConfig(max_iters=20))
    assert outcome.solution is None
    assert outcome.recovery_error


def test_vertex_cover_solution_includes_cover():
    inst = instance(
        "vertex_cover_dual",
        3,
        [edge(0, 1, 1), edge(1, 2, 1)],
        budgets=(1, 1, 1),
        noise=NoiseSpec(seed=2, magnitude=Fraction(1, 1000)),
    )
    payload = solve_report(inst)
    assert payload["solution"]["objective"]["rational"] == "1"
    assert payload["solution"]["vertex_cover"] == [1]


def test_check_report_on_path():
    payload = check_report(three_node_path())
    conditions = payload["conditions"]
    assert conditions["all_hold"]
    assert conditions["x_star"] == [1, 1, 0]
    assert conditions["c1"]["x_star"] == ["1", "1", "0"]


def test_compare_report_matches_map():
    payload = compare_report(_noisy_cycle())
    assert payload["comparison"]["oracle"] == "brute_force_map"
    assert payload["comparison"]["verdict"] == "match"
    assert payload["conditions"]["all_hold"]
    assert payload["contradiction"] is False


def test_compare_uses_classical_oracle_beyond_map_cap():
    config = fallback_config()
    config["oracles"]["map_max_vars"] = 2
    bundle = prepare(_noisy_cycle(), config)
    comparison = compare_outcome(solve_bundle(bundle, bp_settings(config)), config)
    assert comparison.oracle == "matching_oracle"
    assert comparison.verdict is CompareVerdict.MATCH
    assert comparison.oracle_objective == 4


def test_compare_without_oracle():
    config = fallback_config()
    config["oracles"]["map_max_vars"] = 0
    inst = instance("edge_cover", 2, [edge(0, 1, 3)])
    comparison = compare_outcome(solve_bundle(prepare(inst, config), bp_settings(config)), config)
    assert comparison.verdict is CompareVerdict.ORACLE_UNAVAILABLE


def test_tied_instance_is_not_a_contradiction():
    config = fallback_config()
    payload = compare_report(_parallel_matching(), config, BPConfig(max_iters=20))
    assert payload["comparison"]["verdict"] == "mismatch"
    assert not payload["conditions"]["all_hold"]
    assert payload["contradiction"] is False


def test_bench_one_records():
    config = fallback_config()
    record = bench_one((0, "tsp", {"nodes": 4}, 11, None, config, {}))
    assert record["success"]
    assert (record["index"], record["seed"]) == (0, 11)
    failed = bench_one((1, "perfect_matching", {"nodes": 5}, 3, None, config, {}))
    assert not failed["success"]
    assert failed["exit_code"] == 1
    assert failed["index"] == 1


def _record(index, all_hold, verdict, iterations=4):
    return {
        "success": True,
        "index": index,
        "conditions": {"all_hold": all_hold, "c1": {"status": "holds" if all_hold else "unknown"}},
        "comparison": {"verdict": verdict},
        "decision": {"iterations": iterations},
        "wall_time": 0.5,
    }


def test_bench_aggregate_counts():
    records = [
        _record(0, True, "match"),
        _record(1, True, "mismatch"),
        _record(2, False, "mismatch", iterations=8),
        dict(report_error("bench", "boom", 1), index=3, wall_time=0.5),
    ]
    aggregate = bench_aggregate(records)
    assert aggregate["schema"] == BENCH_REPORT_SCHEMA
    assert aggregate["count"] == 4
    assert aggregate["errors"] == 1
    assert aggregate["conditions_hold"] == 2
    assert aggregate["pass_rate"] == 0.5
    assert aggregate["contradictions"] == [1]
    assert aggregate["verdicts"] == {"match": 1, "mismatch": 2}
    assert aggregate["mean_iterations"] == pytest.approx(16 / 3)
    assert bench_aggregate(reversed(records)) == aggregate
    assert "contradictions: [1]" in render_human(aggregate)


def test_empty_bench_aggregate():
    aggregate = bench_aggregate([])
    assert aggregate["count"] == 0
    assert aggregate["pass_rate"] is None
    assert "pass rate: n/a" in render_human(aggregate)


def test_report_helpers():
    assert rational(Fraction(1, 2)) == "1/2"
    assert rational(4) == "4"
    assert render_human(report_error("solve", "bad input", 1)) == "error: bad input"
    text = dumps({"b": 1, "a": 2}, indent=None)
    assert text == '{"a": 2, "b": 1}'


@pytest.mark.slow
@pytest.mark.parametrize("kind", list(ProblemKind))
def test_no_contradictions_on_small_instances(kind):
    config = fallback_config()
    # 条件成立的实例不超过 10 个 GM 变量
    config["oracles"]["map_max_vars"] = 16
    for seed in range(100):
        inst = gen(kind, GenOptions(nodes=4 + 2 * (seed % 3)), seed=seed)
        if len(inst.edges) > 16:
            continue
        payload = compare_report(inst, config)
        assert payload["contradiction"] is False, (seed, payload["comparison"])
        if payload["conditions"]["all_hold"]:
            assert payload["comparison"]["verdict"] == "match", (seed, payload["comparison"])
            assert payload["decision"]["values"] == "".join(map(str, payload["conditions"]["x_star"]))
