import math

import numpy as np
import pytest
from dataclasses import replace

from bplp.factor_graph import (
    NEG_INF,
    POS_INF,
    BadReference,
    HintKind,
    InfeasibleFactor,
    LengthMismatch,
    ScopeTooLarge,
    ScopeTooSmall,
    Sense,
    build_graph,
    degree_eq,
    degree_ge,
    degree_le,
    eval_factor,
    eval_global,
    ext_sum,
    factor_max_marginal,
    factor_messages,
    feasible_table,
    generic_factor,
    generic_max_marginal,
    hint_accepts,
    odd_cycle_blossom,
    signed_conservation,
    with_weights,
)

from conftest import three_node_path
from bplp.problems import build_gm


def _with_table(factor):
    return replace(factor, table=feasible_table(factor))


def test_minimal_graph_adjacency(two_var_graph):
    assert two_var_graph.adjacency == ((0,), (0,))
    assert two_var_graph.num_pairs == 2
    assert two_var_graph.sense is Sense.MINIMIZE


def test_unsatisfiable_factor_rejected():
    with pytest.raises(InfeasibleFactor) as exc:
        build_graph(2, [0.0, 0.0], "minimize", [generic_factor([0, 1], eq_rows=[((1, 1), 3)])])
    assert exc.value.factor_id == 0


def test_triangle_matching_builds_without_global_check():
    factors = [degree_eq([0, 2], 1), degree_eq([0, 1], 1), degree_eq([1, 2], 1)]
    graph = build_graph(3, [1.0, 1.0, 1.0], "maximize", factors)
    for code in range(8):
        assignment = [(code >> j) & 1 for j in range(3)]
        assert not eval_global(graph, assignment).feasible


@pytest.mark.parametrize(
    "factors, num_vars, error",
    [
        ([degree_eq([0], 1)], 1, ScopeTooSmall),
        ([degree_eq([0, 5], 1)], 2, BadReference),
        ([degree_eq([0, 0], 1)], 2, BadReference),
    ],
)
def test_malformed_factors(factors, num_vars, error):
    with pytest.raises(error):
        build_graph(num_vars, [0.0] * num_vars, "minimize", factors)


def test_weight_length_mismatch():
    with pytest.raises(LengthMismatch):
        build_graph(2, [1.0], "minimize", [degree_eq([0, 1], 1)])


def test_generic_scope_cap():
    scope = list(range(6))
    factor = generic_factor(scope, ineq_rows=[((1,) * 6, 0)])
    with pytest.raises(ScopeTooLarge):
        build_graph(6, [0.0] * 6, "minimize", [factor], exhaustive_max_scope=4, generic_max_scope=5)


def test_large_hinted_factor_skips_table():
    scope = list(range(6))
    graph = build_graph(6, [0.0] * 6, "minimize", [degree_le(scope, 2)], exhaustive_max_scope=4)
    assert graph.factors[0].table is None


def test_eval_factor_examples():
    assert eval_factor(degree_eq(range(4), 2), (1, 1, 0, 0))
    assert not eval_factor(degree_eq(range(4), 2), (1, 0, 0, 0))
    assert eval_factor(signed_conservation([0, 1], [1, -1], 0), (1, 1))
    with pytest.raises(LengthMismatch):
        eval_factor(degree_eq(range(4), 2), (1, 0))


def test_eval_global_shortest_path():
    graph = build_gm(three_node_path()).graph
    result = eval_global(graph, [1, 1, 0])
    assert result.feasible and result.objective == 2.0
    broken = eval_global(graph, [1, 0, 0])
    assert not broken.feasible
    assert broken.violated == 1


def test_all_zero_with_upper_bounds():
    graph = build_graph(3, [1.0, 2.0, 3.0], "minimize", [degree_le([0, 1], 1), degree_le([1, 2], 1)])
    assert eval_global(graph, [0, 0, 0]).objective == 0.0


def test_ext_sum_rules():
    assert ext_sum([POS_INF, NEG_INF]) == NEG_INF
    assert ext_sum([1.0, POS_INF]) == POS_INF
    assert ext_sum([1.0, 2.0]) == 3.0
    assert ext_sum([]) == 0.0


def test_max_marginal_examples():
    assert factor_max_marginal(degree_eq([0, 1], 1), 0, 1, [0.0, 7.0]) == 0.0
    assert factor_max_marginal(degree_eq([0, 1, 2], 1), 0, 0, [0.0, 2.0, 5.0]) == 5.0
    for value in (0, 1):
        assert factor_max_marginal(degree_eq([0, 1], 3), 0, value, [0.0, 1.0]) == NEG_INF


def test_messages_saturate_on_forced_partner():
    # x0 + x1 = 2：对方必须为 1，0 分支不可行
    assert factor_messages(degree_eq([0, 1], 2), [0.0, -4.0]) == [POS_INF, POS_INF]


def test_two_forced_partners_do_not_cancel():
    # 两个 +∞ 输入都落在 M(1) 与 M(0) 中时，比较的是有限部分
    messages = factor_messages(degree_eq([0, 1, 2, 3], 2), [POS_INF, POS_INF, 1.0, -2.0])
    assert messages == [-1.0, -1.0, NEG_INF, NEG_INF]


def test_single_forced_partner_leaves_finite_ratio():
    messages = factor_messages(degree_eq([0, 1, 2], 1), [POS_INF, 2.0, -1.0])
    assert messages[0] == -2.0
    assert messages[1:] == [NEG_INF, NEG_INF]


def _random_factor(rng, max_size=8):
    kind = rng.integers(5)
    if kind == 4:
        size = int(rng.choice(list(range(3, max_size + 1, 2))))
        return odd_cycle_blossom(range(size))
    size = int(rng.integers(2, max_size + 1))
    scope = range(size)
    if kind == 0:
        return degree_eq(scope, int(rng.integers(0, size + 1)))
    if kind == 1:
        return degree_le(scope, int(rng.integers(0, size + 1)))
    if kind == 2:
        return degree_ge(scope, int(rng.integers(0, size + 1)))
    signs = [int(s) for s in rng.choice([1, -1], size=size)]
    pos = signs.count(1)
    return signed_conservation(scope, signs, int(rng.integers(-(size - pos), pos + 1)))


def test_specialized_matches_generic_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(400):
        factor = _with_table(_random_factor(rng))
        if factor.table.shape[0] == 0:
            continue
        incoming = list(rng.normal(0.0, 5.0, size=factor.size))
        for pinned in range(factor.size):
            for value in (0, 1):
                fast = factor_max_marginal(factor, pinned, value, incoming)
                slow = generic_max_marginal(factor, pinned, value, incoming)
                if slow == NEG_INF:
                    assert fast == NEG_INF
                else:
                    assert math.isclose(fast, slow, rel_tol=0.0, abs_tol=1e-12)


def test_specialized_matches_generic_with_infinities():
    rng = np.random.default_rng(5)
    for _ in range(200):
        factor = _with_table(_random_factor(rng))
        if factor.table.shape[0] == 0:
            continue
        incoming = list(rng.choice([NEG_INF, -1.5, 0.0, 2.0, POS_INF], size=factor.size))
        for pinned in range(factor.size):
            for value in (0, 1):
                assert factor_max_marginal(factor, pinned, value, incoming) == generic_max_marginal(
                    factor, pinned, value, incoming
                )


@pytest.mark.slow
def test_specialized_matches_generic_on_large_scopes():
    rng = np.random.default_rng(29)
    for _ in range(10_000):
        factor = _with_table(_random_factor(rng, max_size=12))
        if factor.table.shape[0] == 0:
            continue
        incoming = rng.normal(0.0, 5.0, size=factor.size)
        saturated = rng.random(factor.size) < 0.1
        incoming[saturated] = rng.choice([NEG_INF, POS_INF], size=int(saturated.sum()))
        incoming = list(incoming)
        for pinned in range(factor.size):
            for value in (0, 1):
                fast = factor_max_marginal(factor, pinned, value, incoming)
                slow = generic_max_marginal(factor, pinned, value, incoming)
                if math.isinf(slow) or math.isinf(fast):
                    assert fast == slow
                else:
                    assert math.isclose(fast, slow, rel_tol=0.0, abs_tol=1e-12)


@pytest.mark.parametrize(
    "factor",
    [
        degree_eq(range(5), 2),
        degree_le(range(5), 3),
        degree_ge(range(5), 2),
        signed_conservation(range(4), [1, 1, -1, -1], 1),
        odd_cycle_blossom(range(5)),
        odd_cycle_blossom(range(7)),
    ],
)
def test_hints_agree_with_rows(factor):
    for code in range(1 << factor.size):
        local = tuple((code >> j) & 1 for j in range(factor.size))
        assert hint_accepts(factor, local) == eval_factor(factor, local)


def test_verify_mode_accepts_standard_hints():
    factors = [odd_cycle_blossom([0, 1, 2]), degree_eq([2, 3], 1)]
    graph = build_graph(4, [0.0] * 4, "maximize", factors, verify=True)
    assert graph.factors[0].hint.kind is HintKind.ODD_CYCLE_BLOSSOM


def test_with_weights_keeps_reporting_sense():
    graph = build_graph(2, [1.0, 2.0], "maximize", [degree_eq([0, 1], 1)])
    assert list(graph.weights) == [-1.0, -2.0]
    reweighted = with_weights(graph, [4.0, 5.0])
    assert list(reweighted.reporting_weights) == [4.0, 5.0]
    assert reweighted.factors == graph.factors
