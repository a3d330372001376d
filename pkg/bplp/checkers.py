"""判定一个 GMBundle 是否满足收敛定理的三个条件 C1、C2、C3。

C3 有两种检查方式：按子集穷举的通用检查，以及按各问题的构造性规则挑选伙伴变量的 witness 检查。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .factor_graph import (
    Factor,
    FactorGraph,
    HintKind,
    ScopeTooLarge,
    eval_global,
    feasible_set,
    local_assignment,
)
from .oracles import (
    CapExceeded,
    MapStatus,
    PolytopeDescription,
    brute_force_map,
    enumerate_vertices,
    polytope_from_graph,
)
from .problems import GMBundle, ProblemKind, VarRole

logger = logging.getLogger(__name__)


class UnknownKind(ValueError):
    """Raised when no witness rule exists for a bundle kind."""


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    FAILS_NON_UNIQUE = "fails_non_unique"
    FAILS_FRACTIONAL = "fails_fractional"
    UNKNOWN = "unknown"


@dataclass(frozen=True, slots=True)
class C1Verdict:
    status: Verdict
    x_star: tuple[Fraction, ...] | None = None
    # FailsFractional 给出一个分数最优顶点，FailsNonUnique 给出两个不同的最优顶点
    witnesses: tuple[tuple[Fraction, ...], ...] = ()
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Verdict.HOLDS


@dataclass(frozen=True, slots=True)
class C2Verdict:
    status: Verdict
    variables: tuple[int, ...] = ()

    @property
    def holds(self) -> bool:
        return self.status is Verdict.HOLDS


@dataclass(frozen=True, slots=True)
class C3Verdict:
    status: Verdict
    factor: int | None = None
    local: tuple[int, ...] | None = None
    # 作用域内的翻转位置
    flip: int | None = None
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Verdict.HOLDS


@dataclass(frozen=True, slots=True)
class ConditionReport:
    c1: C1Verdict
    c2: C2Verdict
    c3: C3Verdict
    c3_witness: C3Verdict
    x_star: tuple[int, ...] | None = None
    x_star_source: str = ""

    @property
    def all_hold(self) -> bool:
        return self.c1.holds and self.c2.holds and self.c3.holds


# ---------------------------------------------------------------------------
# C2


def check_c2(graph: FactorGraph) -> C2Verdict:
    offenders = tuple(i for i in range(graph.num_vars) if graph.degree(i) > 2)
    if offenders:
        return C2Verdict(Verdict.FAILS, offenders)
    return C2Verdict(Verdict.HOLDS)


# ---------------------------------------------------------------------------
# C3


def _flip_ok(
    graph: FactorGraph,
    factor: Factor,
    feasible: frozenset[tuple[int, ...]],
    local: tuple[int, ...],
    star: tuple[int, ...],
    members: Sequence[int],
) -> bool:
    """条件 (a)(b)(c)：members = {i} ∪ γ（作用域位置）。"""

    if sum(1 for p in members if graph.degree(factor.scope[p]) == 2) > 2:
        return False
    chosen = set(members)
    x_prime = tuple(star[p] if p in chosen else local[p] for p in range(factor.size))
    x_double = tuple(local[p] if p in chosen else star[p] for p in range(factor.size))
    return x_prime in feasible and x_double in feasible


def _factor_sets(graph: FactorGraph, cap: int) -> tuple[list[frozenset[tuple[int, ...]]] | None, C3Verdict | None]:
    sets = []
    for factor_id, factor in enumerate(graph.factors):
        if factor.size > cap:
            return None, C3Verdict(Verdict.UNKNOWN, factor=factor_id, reason=f"作用域 {factor.size} 超过上限 {cap}")
        try:
            sets.append(feasible_set(factor))
        except ScopeTooLarge as exc:
            return None, C3Verdict(Verdict.UNKNOWN, factor=factor_id, reason=str(exc))
    return sets, None


def _check_star(graph: FactorGraph, x_star: Sequence[int]) -> C3Verdict | None:
    if len(x_star) != graph.num_vars or not eval_global(graph, list(x_star)).feasible:
        return C3Verdict(Verdict.UNKNOWN, reason="参考解 x* 不是全局可行解")
    return None


def _search_gamma(
    graph: FactorGraph,
    factor: Factor,
    feasible: frozenset[tuple[int, ...]],
    local: tuple[int, ...],
    star: tuple[int, ...],
    flip: int,
    differing: list[int],
) -> tuple[int, ...] | None:
    """按大小递增、同大小按字典序搜索 γ；γ 只取 x 与 x* 不同的位置。"""

    others = [p for p in differing if p != flip]
    for size in range(len(others) + 1):
        for gamma in combinations(others, size):
            if _flip_ok(graph, factor, feasible, local, star, (flip,) + gamma):
                return gamma
    return None


def check_c3_generic(graph: FactorGraph, x_star: Sequence[int], *, cap: int = 16) -> C3Verdict:
    """对每个因子、每个可行局部赋值、每个与 x* 不同的位置，穷举寻找满足条件的 γ。"""

    invalid = _check_star(graph, x_star)
    if invalid is not None:
        return invalid
    sets, unknown = _factor_sets(graph, cap)
    if unknown is not None:
        return unknown
    for factor_id, factor in enumerate(graph.factors):
        star = local_assignment(factor, x_star)
        feasible = sets[factor_id]
        for local in sorted(feasible):
            differing = [p for p in range(factor.size) if local[p] != star[p]]
            for flip in differing:
                if _search_gamma(graph, factor, feasible, local, star, flip, differing) is None:
                    return C3Verdict(Verdict.FAILS, factor=factor_id, local=local, flip=flip)
    return C3Verdict(Verdict.HOLDS)


# ---------------------------------------------------------------------------
# witness 规则：每条规则给出按证明顺序排列的候选 γ，随后逐一验证


Candidates = Callable[[GMBundle, int, tuple[int, ...], tuple[int, ...], int], list[tuple[int, ...]]]


def _deltas(local: tuple[int, ...], star: tuple[int, ...]) -> list[int]:
    return [a - b for a, b in zip(local, star)]


def _degree_candidates(bundle, factor_id, local, star, flip) -> list[tuple[int, ...]]:
    delta = _deltas(local, star)
    partners = [(p,) for p in range(len(local)) if p != flip and delta[p] == -delta[flip]]
    return partners + [()]


def _signed_candidates(bundle, factor_id, local, star, flip) -> list[tuple[int, ...]]:
    signs = bundle.graph.factors[factor_id].hint.signs
    delta = _deltas(local, star)
    same = [(p,) for p in range(len(local)) if p != flip and signs[p] == signs[flip] and delta[p] == -delta[flip]]
    opposite = [(p,) for p in range(len(local)) if p != flip and signs[p] == -signs[flip] and delta[p] == delta[flip]]
    return same + opposite + [()]


def _packing_candidates(bundle, factor_id, local, star, flip) -> list[tuple[int, ...]]:
    factor = bundle.graph.factors[factor_id]
    roles = [bundle.var_map[v].role for v in factor.scope]
    delta = _deltas(local, star)
    aux = [p for p, role in enumerate(roles) if role is VarRole.AUX]
    edges = [p for p, role in enumerate(roles) if role is not VarRole.AUX]
    if roles[flip] is VarRole.AUX:
        return [tuple(p for p in edges if delta[p] != 0)]
    opposite = [(p,) for p in edges if p != flip and delta[p] == -delta[flip]]
    with_y = [tuple(sorted((p, y))) for p in edges if p != flip and delta[p] == delta[flip] for y in aux if delta[y] != 0]
    return opposite + with_y + [()]


def _blossom_candidates(bundle, factor_id, local, star, flip) -> list[tuple[int, ...]]:
    """沿 u1 所在的偶路径（取 y 与 y* 中 u1 为 1 的那一个）挑选 u2，其次取路径端点外侧的顶点。"""

    factor = bundle.graph.factors[factor_id]
    origins = [bundle.var_map[v] for v in factor.scope]
    cycle_index = origins[flip].cycle
    cycle = bundle.instance.params.odd_cycles[cycle_index]
    length = len(cycle)
    position_of = {u: k for k, u in enumerate(cycle)}

    fixed_values = {}
    for j, value in bundle.fixed:
        origin = bundle.origins[j]
        if origin.role is VarRole.BLOSSOM and origin.cycle == cycle_index:
            fixed_values[position_of[origin.vertex]] = value
    scope_at = {position_of[o.vertex]: p for p, o in enumerate(origins) if o.role is VarRole.BLOSSOM}

    def full(values: tuple[int, ...]) -> list[int]:
        row = [0] * length
        for k in range(length):
            row[k] = values[scope_at[k]] if k in scope_at else fixed_values.get(k, 0)
        return row

    y, y_star = full(local), full(star)
    u1 = position_of[origins[flip].vertex]
    z = y if y[u1] == 1 else y_star
    start = u1
    while z[(start - 1) % length] == 1 and (start - 1) % length != u1:
        start = (start - 1) % length
    run = [start]
    while z[(run[-1] + 1) % length] == 1 and (run[-1] + 1) % length != start:
        run.append((run[-1] + 1) % length)
    ends = [(run[0] - 1) % length, (run[-1] + 1) % length]

    def mismatched(k: int) -> bool:
        return k in scope_at and scope_at[k] != flip and y[k] != y_star[k]

    ordered: list[tuple[int, ...]] = []
    for k in run + ends:
        if mismatched(k) and (scope_at[k],) not in ordered:
            ordered.append((scope_at[k],))
    return ordered + [()]


def _vertex_rule(bundle: GMBundle, factor_id: int) -> Candidates:
    hint = bundle.graph.factors[factor_id].hint
    if bundle.kind is ProblemKind.CYCLE_PACKING:
        return _packing_candidates
    if hint.kind is HintKind.SIGNED_CONSERVATION:
        return _signed_candidates
    if hint.kind in (HintKind.DEGREE_EQ, HintKind.DEGREE_LE, HintKind.DEGREE_GE):
        return _degree_candidates
    raise UnknownKind(f"{bundle.kind.value} 的因子 {factor_id} 没有对应的 witness 规则")


_WITNESS_KINDS = frozenset(ProblemKind)


def check_c3_witness(bundle: GMBundle, x_star: Sequence[int], *, cap: int = 16) -> C3Verdict:
    """按各问题证明中的伙伴选择规则构造 γ 并直接验证 (a)–(c)。"""

    if getattr(bundle, "kind", None) not in _WITNESS_KINDS:
        raise UnknownKind(f"未知的问题类型 {getattr(bundle, 'kind', None)!r}")
    graph = bundle.graph
    invalid = _check_star(graph, x_star)
    if invalid is not None:
        return invalid
    sets, unknown = _factor_sets(graph, cap)
    if unknown is not None:
        return unknown
    for factor_id, factor in enumerate(graph.factors):
        role = bundle.factor_roles[factor_id]
        rule = _blossom_candidates if role.kind == "blossom" else _vertex_rule(bundle, factor_id)
        star = local_assignment(factor, x_star)
        feasible = sets[factor_id]
        for local in sorted(feasible):
            for flip in (p for p in range(factor.size) if local[p] != star[p]):
                candidates = rule(bundle, factor_id, local, star, flip)
                if not any(_flip_ok(graph, factor, feasible, local, star, (flip,) + gamma) for gamma in candidates):
                    return C3Verdict(Verdict.FAILS, factor=factor_id, local=local, flip=flip)
    return C3Verdict(Verdict.HOLDS)


# ---------------------------------------------------------------------------
# C1


def check_c1(
    bundle: GMBundle,
    polytope: PolytopeDescription | None = None,
    *,
    max_dim: int = 10,
    max_rows: int = 24,
) -> C1Verdict:
    """枚举 LP 顶点：唯一且为 0/1 的最优顶点即 C1 成立。"""

    polytope = polytope or polytope_from_graph(bundle.graph, bundle.weights)
    try:
        vertex_set = enumerate_vertices(polytope, max_dim=max_dim, max_rows=max_rows)
    except CapExceeded as exc:
        logger.info("C1 无法判定：%s", exc)
        return C1Verdict(Verdict.UNKNOWN, reason=str(exc))
    optima = vertex_set.optimal_vertices
    if not optima:
        return C1Verdict(Verdict.UNKNOWN, reason="LP 不可行")
    if len(optima) > 1:
        return C1Verdict(Verdict.FAILS_NON_UNIQUE, witnesses=tuple(optima[:2]))
    vertex = optima[0]
    if any(v.denominator != 1 for v in vertex):
        return C1Verdict(Verdict.FAILS_FRACTIONAL, witnesses=(vertex,))
    return C1Verdict(Verdict.HOLDS, x_star=vertex)


def check_conditions(
    bundle: GMBundle,
    *,
    max_dim: int = 10,
    max_rows: int = 24,
    map_max_vars: int = 25,
    c3_cap: int = 16,
) -> ConditionReport:
    """C1、C2、C3（通用与 witness）；x* 优先取自 C1，否则取唯一的穷举 MAP。"""

    graph = bundle.graph
    c2 = check_c2(graph)
    c1 = check_c1(bundle, max_dim=max_dim, max_rows=max_rows)
    x_star: tuple[int, ...] | None = None
    source = ""
    if c1.holds:
        x_star = tuple(int(v) for v in c1.x_star)
        source = "c1"
    elif graph.num_vars <= map_max_vars:
        result = brute_force_map(graph, bundle.weights, max_vars=map_max_vars)
        if result.status is MapStatus.UNIQUE:
            x_star = result.assignment
            source = "map"
    if x_star is None:
        missing = C3Verdict(Verdict.UNKNOWN, reason="没有唯一的参考解 x*")
        return ConditionReport(c1=c1, c2=c2, c3=missing, c3_witness=missing)
    c3 = check_c3_generic(graph, x_star, cap=c3_cap)
    c3_witness = check_c3_witness(bundle, x_star, cap=c3_cap)
    return ConditionReport(c1=c1, c2=c2, c3=c3, c3_witness=c3_witness, x_star=x_star, x_star_source=source)


__all__ = [
    "UnknownKind",
    "Verdict",
    "C1Verdict",
    "C2Verdict",
    "C3Verdict",
    "ConditionReport",
    "check_c2",
    "check_c3_generic",
    "check_c3_witness",
    "check_c1",
    "check_conditions",
]
