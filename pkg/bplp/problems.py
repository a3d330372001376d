"""组合优化问题实例到图模型（GM）的构造，以及 BP/LP 解到原问题的还原。

八种构造共用同一条流水线：先生成完整变量表与因子，再做强制变量约简，
最后在剩余的自由变量上建立 FactorGraph。被约简掉的变量记在 ``GMBundle.fixed``，
还原时与 BP 解码合并。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

from .factor_graph import (
    Factor,
    FactorGraph,
    FactorHint,
    HintKind,
    InfeasibleFactor,
    Sense,
    blossom_signs,
    build_graph,
    degree_eq,
    degree_ge,
    degree_le,
    eval_factor,
    eval_global,
    generic_factor,
    odd_cycle_blossom,
    signed_conservation,
)
from .oracles import PolytopeDescription, PolytopeRow, Relation, box_rows

logger = logging.getLogger(__name__)


class ProblemError(ValueError):
    """问题实例或还原过程出错的基类。"""


class InvalidInstance(ProblemError):
    """Raised when an instance violates basic structural requirements."""


class DegenerateVertex(ProblemError):
    """Raised when the source or sink of a shortest-path instance is isolated."""


class IsolatedVertex(ProblemError):
    """Raised when a vertex has no incident edge but must be covered or matched."""


class NonDisjointCycles(ProblemError):
    """Raised when the given odd cycles share a vertex."""


class EvenCycle(ProblemError):
    """Raised when a given cycle has even length or fewer than three vertices."""


class CycleNotInGraph(ProblemError):
    """Raised when consecutive cycle vertices are not joined by an edge."""


class VertexDegreeTooSmall(ProblemError):
    """Raised when a TSP vertex has fewer than two incident edges."""


class UnbalancedDemand(ProblemError):
    """Raised when network-flow demands do not sum to zero."""


class InfeasibleInstance(ProblemError):
    """Raised when forced variables or a factor leave no feasible assignment."""


class UndecidedVariables(ProblemError):
    """Raised when recovery is asked for a decision containing '?'."""

    def __init__(self, positions: Sequence[int]):
        super().__init__(f"解码中仍有未决变量：{list(positions)}")
        self.positions = tuple(positions)


class InfeasibleDecode(ProblemError):
    """Raised when a '?'-free decision violates a factor."""

    def __init__(self, factor_id: int):
        super().__init__(f"解码违反了因子 {factor_id} 的约束")
        self.factor_id = factor_id


class NotACover(ProblemError):
    """Raised when the primal vertex set recovered from a dual leaves an edge uncovered."""

    def __init__(self, edge_id: int):
        super().__init__(f"还原出的顶点集合没有覆盖边 {edge_id}")
        self.edge_id = edge_id


class ProblemKind(str, Enum):
    SHORTEST_PATH = "shortest_path"
    PERFECT_MATCHING = "perfect_matching"
    PM_ODD_CYCLES = "pm_odd_cycles"
    VERTEX_COVER_DUAL = "vertex_cover_dual"
    EDGE_COVER = "edge_cover"
    TSP = "tsp"
    CYCLE_PACKING = "cycle_packing"
    NETWORK_FLOW = "network_flow"


DIRECTED_KINDS = frozenset({ProblemKind.SHORTEST_PATH, ProblemKind.NETWORK_FLOW})


@dataclass(frozen=True, slots=True)
class Edge:
    u: int
    v: int
    weight: Fraction
    directed: bool = False


@dataclass(frozen=True, slots=True)
class InstanceParams:
    source: int | None = None
    sink: int | None = None
    odd_cycles: tuple[tuple[int, ...], ...] = ()
    budgets: tuple[int, ...] = ()
    demands: tuple[int, ...] = ()
    capacities: tuple[int, ...] = ()


@dataclass(frozen=True, slots=True)
class NoiseSpec:
    seed: int = 0
    magnitude: Fraction = Fraction(0)


@dataclass(frozen=True, slots=True)
class ProblemInstance:
    kind: ProblemKind
    num_nodes: int
    edges: tuple[Edge, ...]
    params: InstanceParams = field(default_factory=InstanceParams)
    noise: NoiseSpec = field(default_factory=NoiseSpec)


class VarRole(str, Enum):
    EDGE = "edge"
    COPY = "copy"
    AUX = "aux"
    BLOSSOM = "blossom"


@dataclass(frozen=True, slots=True)
class VarOrigin:
    role: VarRole
    edge: int | None = None
    copy: int | None = None
    vertex: int | None = None
    cycle: int | None = None


class RecoveryKind(str, Enum):
    NONE = "none"
    HALF_INTEGRAL = "half_integral"
    CAPACITY_SUM = "capacity_sum"
    BLOSSOM_UNFOLD = "blossom_unfold"


@dataclass(frozen=True, slots=True)
class FactorRole:
    # "vertex" 表示原图顶点因子，"blossom" 表示奇环因子
    kind: str
    vertex: int | None = None
    cycle: int | None = None


@dataclass(frozen=True, slots=True)
class GMBundle:
    kind: ProblemKind
    graph: FactorGraph
    instance: ProblemInstance
    # 约简前的全部 GM 变量；graph 的变量 i 对应 origins[free[i]]
    origins: tuple[VarOrigin, ...]
    free: tuple[int, ...]
    fixed: tuple[tuple[int, int], ...]
    # graph 变量在报告方向上的精确权重
    weights: tuple[Fraction, ...]
    factor_roles: tuple[FactorRole, ...]
    recovery: RecoveryKind = RecoveryKind.NONE
    copies: int = 1

    @property
    def sense(self) -> Sense:
        return self.graph.sense

    @property
    def var_map(self) -> tuple[VarOrigin, ...]:
        return tuple(self.origins[j] for j in self.free)


@dataclass(frozen=True, slots=True)
class RecoveredSolution:
    values: tuple[Fraction, ...]
    objective: Fraction
    # 环填充问题中每个顶点的 y_v
    aux: tuple[Fraction, ...] = ()


@dataclass(slots=True)
class _RawGM:
    kind: ProblemKind
    sense: Sense
    origins: list[VarOrigin] = field(default_factory=list)
    weights: list[Fraction] = field(default_factory=list)
    factors: list[Factor] = field(default_factory=list)
    roles: list[FactorRole] = field(default_factory=list)
    recovery: RecoveryKind = RecoveryKind.NONE
    copies: int = 1

    def add_var(self, origin: VarOrigin, weight: Fraction) -> int:
        self.origins.append(origin)
        self.weights.append(Fraction(weight))
        return len(self.origins) - 1

    def add_factor(self, factor: Factor, role: FactorRole) -> None:
        self.factors.append(factor)
        self.roles.append(role)


# ---------------------------------------------------------------------------
# 实例校验


def validate_instance(instance: ProblemInstance) -> None:
    """检查与问题类型无关的结构约束以及各类型的参数。"""

    n = instance.num_nodes
    if n < 0:
        raise InvalidInstance("顶点数不能为负")
    directed = instance.kind in DIRECTED_KINDS
    for edge_id, edge in enumerate(instance.edges):
        if not (0 <= edge.u < n and 0 <= edge.v < n):
            raise InvalidInstance(f"边 {edge_id} 的端点越界")
        if edge.u == edge.v:
            raise InvalidInstance(f"边 {edge_id} 是自环")
        if edge.directed != directed:
            expected = "有向" if directed else "无向"
            raise InvalidInstance(f"{instance.kind.value} 要求{expected}边，边 {edge_id} 不符合")
        if instance.kind is not ProblemKind.VERTEX_COVER_DUAL and edge.weight < 0:
            raise InvalidInstance(f"边 {edge_id} 的权重为负")

    params = instance.params
    if instance.kind is ProblemKind.SHORTEST_PATH:
        if params.source is None or params.sink is None:
            raise InvalidInstance("最短路实例需要 source 与 sink")
        if not (0 <= params.source < n and 0 <= params.sink < n):
            raise InvalidInstance("source/sink 越界")
        if params.source == params.sink:
            raise InvalidInstance("source 与 sink 不能相同")
    elif instance.kind is ProblemKind.PM_ODD_CYCLES:
        _validate_cycles(instance)
    elif instance.kind is ProblemKind.VERTEX_COVER_DUAL:
        if len(params.budgets) != n:
            raise InvalidInstance("budgets 长度必须等于顶点数")
        if any(b < 0 for b in params.budgets):
            raise InvalidInstance("budgets 必须为非负整数")
    elif instance.kind is ProblemKind.NETWORK_FLOW:
        if len(params.demands) != n:
            raise InvalidInstance("demands 长度必须等于顶点数")
        if len(params.capacities) != len(instance.edges):
            raise InvalidInstance("capacities 长度必须等于边数")
        if any(c < 1 for c in params.capacities):
            raise InvalidInstance("capacities 必须为正整数")
        if sum(params.demands) != 0:
            raise UnbalancedDemand(f"需求之和为 {sum(params.demands)}，应为 0")


def _validate_cycles(instance: ProblemInstance) -> None:
    seen: set[int] = set()
    for index, cycle in enumerate(instance.params.odd_cycles):
        if len(cycle) < 3 or len(cycle) % 2 == 0:
            raise EvenCycle(f"环 {index} 长度为 {len(cycle)}，需要奇数且 ≥ 3")
        if len(set(cycle)) != len(cycle):
            raise InvalidInstance(f"环 {index} 含有重复顶点")
        for vertex in cycle:
            if not 0 <= vertex < instance.num_nodes:
                raise InvalidInstance(f"环 {index} 的顶点 {vertex} 越界")
            if vertex in seen:
                raise NonDisjointCycles(f"顶点 {vertex} 同时出现在多个环中")
            seen.add(vertex)
        cycle_edge_ids(instance, cycle)


def cycle_edge_ids(instance: ProblemInstance, cycle: Sequence[int]) -> list[int]:
    """环上第 k 条边 (c_k, c_{k+1}) 的边编号；有平行边时取编号最小者。"""

    ids: list[int] = []
    length = len(cycle)
    for k in range(length):
        a, b = cycle[k], cycle[(k + 1) % length]
        match = next(
            (i for i, e in enumerate(instance.edges) if {e.u, e.v} == {a, b}),
            None,
        )
        if match is None:
            raise CycleNotInGraph(f"环上的顶点 {a} 与 {b} 之间没有边")
        ids.append(match)
    return ids


def _incident(instance: ProblemInstance) -> list[list[int]]:
    incident: list[list[int]] = [[] for _ in range(instance.num_nodes)]
    for edge_id, edge in enumerate(instance.edges):
        incident[edge.u].append(edge_id)
        incident[edge.v].append(edge_id)
    return incident


# ---------------------------------------------------------------------------
# 强制变量约简


@dataclass(frozen=True, slots=True)
class ReducedFactors:
    factors: tuple[Factor, ...]
    roles: tuple[FactorRole, ...]
    fixed: dict[int, int]


def _shift_hint(hint: FactorHint, keep: list[int], removed: list[tuple[int, int]]) -> FactorHint:
    if hint.kind in (HintKind.DEGREE_EQ, HintKind.DEGREE_LE, HintKind.DEGREE_GE):
        return replace(hint, bound=hint.bound - sum(value for _, value in removed))
    if hint.kind is HintKind.SIGNED_CONSERVATION:
        shift = sum(hint.signs[p] * value for p, value in removed)
        return replace(hint, bound=hint.bound - shift, signs=tuple(hint.signs[p] for p in keep))
    # blossom 的可行集合在部分变量固定后不再是环上匹配，退化为 Generic
    return FactorHint()


def _substitute(factor: Factor, fixed: dict[int, int]) -> Factor:
    removed = [(p, fixed[v]) for p, v in enumerate(factor.scope) if v in fixed]
    if not removed:
        return factor
    keep = [p for p, v in enumerate(factor.scope) if v not in fixed]

    def shift(rows):
        return tuple(
            (tuple(coeffs[p] for p in keep), rhs - sum(coeffs[p] * value for p, value in removed))
            for coeffs, rhs in rows
        )

    return Factor(
        scope=tuple(factor.scope[p] for p in keep),
        eq_rows=shift(factor.eq_rows),
        ineq_rows=shift(factor.ineq_rows),
        hint=_shift_hint(factor.hint, keep, removed),
    )


def _lp_exact(factor: Factor) -> bool:
    return all(abs(c) <= 1 for coeffs, _ in factor.ineq_rows for c in coeffs)


def reduce_forced(
    num_vars: int,
    factors: Sequence[Factor],
    roles: Sequence[FactorRole] | None = None,
) -> ReducedFactors:
    """反复固定只剩一个变量的因子所强制的取值，直到剩余作用域都至少含两个变量。"""

    roles = list(roles) if roles is not None else [FactorRole("vertex")] * len(factors)
    fixed: dict[int, int] = {}
    current = list(zip(factors, roles))
    changed = True
    while changed:
        changed = False
        remaining: list[tuple[Factor, FactorRole]] = []
        for factor, role in current:
            factor = _substitute(factor, fixed)
            if factor.size == 0:
                if not eval_factor(factor, ()):
                    raise InfeasibleInstance(f"{role.kind} 因子在固定变量后不可满足")
                continue
            if factor.size == 1:
                options = [value for value in (0, 1) if eval_factor(factor, (value,))]
                if not options:
                    raise InfeasibleInstance(f"变量 {factor.scope[0]} 没有可行取值")
                if len(options) == 2:
                    continue
                if not factor.eq_rows and not _lp_exact(factor):
                    raise InvalidInstance(f"变量 {factor.scope[0]} 的单变量约束在 LP 松弛下不精确")
                var = factor.scope[0]
                fixed[var] = options[0]
                logger.debug("强制变量 %d = %d", var, options[0])
                changed = True
                continue
            remaining.append((factor, role))
        current = remaining
    for var in fixed:
        if not 0 <= var < num_vars:
            raise InvalidInstance(f"固定变量 {var} 越界")
    return ReducedFactors(
        factors=tuple(f for f, _ in current),
        roles=tuple(r for _, r in current),
        fixed=fixed,
    )


def _finish(
    raw: _RawGM,
    instance: ProblemInstance,
    *,
    verify: bool = False,
    exhaustive_max_scope: int = 20,
    generic_max_scope: int = 25,
) -> GMBundle:
    reduced = reduce_forced(len(raw.origins), raw.factors, raw.roles)
    free = [j for j in range(len(raw.origins)) if j not in reduced.fixed]
    index = {j: i for i, j in enumerate(free)}
    factors = [replace(f, scope=tuple(index[v] for v in f.scope)) for f in reduced.factors]
    weights = tuple(raw.weights[j] for j in free)
    try:
        graph = build_graph(
            len(free),
            [float(w) for w in weights],
            raw.sense,
            factors,
            verify=verify,
            exhaustive_max_scope=exhaustive_max_scope,
            generic_max_scope=generic_max_scope,
        )
    except InfeasibleFactor as exc:
        role = reduced.roles[exc.factor_id]
        raise InfeasibleInstance(f"{role.kind} 因子（顶点 {role.vertex}，环 {role.cycle}）不可满足") from exc
    if reduced.fixed:
        logger.debug("%s：约简固定了 %d 个变量，剩余 %d 个", raw.kind.value, len(reduced.fixed), len(free))
    return GMBundle(
        kind=raw.kind,
        graph=graph,
        instance=instance,
        origins=tuple(raw.origins),
        free=tuple(free),
        fixed=tuple(sorted(reduced.fixed.items())),
        weights=weights,
        factor_roles=reduced.roles,
        recovery=raw.recovery,
        copies=raw.copies,
    )


# ---------------------------------------------------------------------------
# 八种构造


def shortest_path_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    params = instance.params
    incident = _incident(instance)
    for terminal in (params.source, params.sink):
        if not incident[terminal]:
            raise DegenerateVertex(f"端点 {terminal} 是孤立顶点")
    raw = _RawGM(ProblemKind.SHORTEST_PATH, Sense.MINIMIZE)
    for edge_id, edge in enumerate(instance.edges):
        raw.add_var(VarOrigin(VarRole.EDGE, edge=edge_id), edge.weight)
    for v in range(instance.num_nodes):
        demand = 1 if v == params.source else -1 if v == params.sink else 0
        scope = incident[v]
        signs = [1 if instance.edges[e].u == v else -1 for e in scope]
        raw.add_factor(signed_conservation(scope, signs, demand), FactorRole("vertex", vertex=v))
    return _finish(raw, instance, **options)


def _duplicated_degree_gm(
    instance: ProblemInstance,
    kind: ProblemKind,
    sense: Sense,
    copies: int,
    make_factor: Callable[[list[int], int], Factor],
    weight_of: Callable[[Edge], Fraction],
    **options,
) -> GMBundle:
    raw = _RawGM(kind, sense, recovery=RecoveryKind.HALF_INTEGRAL, copies=copies)
    copy_vars: list[list[int]] = []
    for edge_id, edge in enumerate(instance.edges):
        copy_vars.append(
            [raw.add_var(VarOrigin(VarRole.COPY, edge=edge_id, copy=i), weight_of(edge)) for i in range(copies)]
        )
    for v, edge_ids in enumerate(_incident(instance)):
        scope = [var for e in edge_ids for var in copy_vars[e]]
        raw.add_factor(make_factor(scope, v), FactorRole("vertex", vertex=v))
    return _finish(raw, instance, **options)


def _require_no_isolated(instance: ProblemInstance) -> None:
    for v, edge_ids in enumerate(_incident(instance)):
        if not edge_ids:
            raise IsolatedVertex(f"顶点 {v} 没有关联边")


def perfect_matching_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    _require_no_isolated(instance)
    return _duplicated_degree_gm(
        instance,
        ProblemKind.PERFECT_MATCHING,
        Sense.MAXIMIZE,
        2,
        lambda scope, v: degree_eq(scope, 2),
        lambda edge: edge.weight,
        **options,
    )


def edge_cover_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    _require_no_isolated(instance)
    return _duplicated_degree_gm(
        instance,
        ProblemKind.EDGE_COVER,
        Sense.MINIMIZE,
        2,
        lambda scope, v: degree_ge(scope, 2),
        lambda edge: edge.weight,
        **options,
    )


def vertex_cover_dual_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    budgets = instance.params.budgets
    b_max = max(budgets, default=0)
    return _duplicated_degree_gm(
        instance,
        ProblemKind.VERTEX_COVER_DUAL,
        Sense.MAXIMIZE,
        2 * b_max,
        lambda scope, v: degree_le(scope, 2 * budgets[v]),
        lambda edge: Fraction(1),
        **options,
    )


def tsp_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    raw = _RawGM(ProblemKind.TSP, Sense.MINIMIZE)
    for edge_id, edge in enumerate(instance.edges):
        raw.add_var(VarOrigin(VarRole.EDGE, edge=edge_id), edge.weight)
    for v, edge_ids in enumerate(_incident(instance)):
        if len(edge_ids) < 2:
            raise VertexDegreeTooSmall(f"顶点 {v} 的度为 {len(edge_ids)}，至少需要 2")
        raw.add_factor(degree_eq(edge_ids, 2), FactorRole("vertex", vertex=v))
    return _finish(raw, instance, **options)


def cycle_packing_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    raw = _RawGM(ProblemKind.CYCLE_PACKING, Sense.MAXIMIZE)
    for edge_id, edge in enumerate(instance.edges):
        raw.add_var(VarOrigin(VarRole.EDGE, edge=edge_id), edge.weight)
    y_vars = [raw.add_var(VarOrigin(VarRole.AUX, vertex=v), Fraction(0)) for v in range(instance.num_nodes)]
    for v, edge_ids in enumerate(_incident(instance)):
        scope = list(edge_ids) + [y_vars[v]]
        coeffs = (1,) * len(edge_ids) + (-2,)
        raw.add_factor(generic_factor(scope, eq_rows=[(coeffs, 0)]), FactorRole("vertex", vertex=v))
    return _finish(raw, instance, **options)


def network_flow_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    params = instance.params
    raw = _RawGM(ProblemKind.NETWORK_FLOW, Sense.MINIMIZE, recovery=RecoveryKind.CAPACITY_SUM)
    copy_vars: list[list[int]] = []
    for edge_id, edge in enumerate(instance.edges):
        copy_vars.append(
            [
                raw.add_var(VarOrigin(VarRole.COPY, edge=edge_id, copy=i), edge.weight)
                for i in range(params.capacities[edge_id])
            ]
        )
    for v, edge_ids in enumerate(_incident(instance)):
        scope: list[int] = []
        signs: list[int] = []
        for e in edge_ids:
            sign = 1 if instance.edges[e].u == v else -1
            scope.extend(copy_vars[e])
            signs.extend([sign] * len(copy_vars[e]))
        raw.add_factor(signed_conservation(scope, signs, params.demands[v]), FactorRole("vertex", vertex=v))
    return _finish(raw, instance, **options)


def blossom_weights(instance: ProblemInstance, cycle: Sequence[int]) -> tuple[Fraction, ...]:
    """w′_{(u, v_C)} = ½ Σ_{e ∈ E(C)} (−1)^{d_C(u, e)} w_e，按环上顺序给出。"""

    edge_ids = cycle_edge_ids(instance, cycle)
    signs = blossom_signs(len(cycle))
    return tuple(
        sum((signs[k][u] * instance.edges[e].weight for k, e in enumerate(edge_ids)), Fraction(0)) / 2
        for u in range(len(cycle))
    )


def pm_odd_cycles_gm(instance: ProblemInstance, **options) -> GMBundle:
    validate_instance(instance)
    cycles = instance.params.odd_cycles
    cycle_edges = {e for cycle in cycles for e in cycle_edge_ids(instance, cycle)}
    raw = _RawGM(ProblemKind.PM_ODD_CYCLES, Sense.MAXIMIZE)
    raw.recovery = RecoveryKind.BLOSSOM_UNFOLD if cycles else RecoveryKind.NONE
    delta: list[list[int]] = [[] for _ in range(instance.num_nodes)]
    for edge_id, edge in enumerate(instance.edges):
        if edge_id in cycle_edges:
            continue
        var = raw.add_var(VarOrigin(VarRole.EDGE, edge=edge_id), edge.weight)
        delta[edge.u].append(var)
        delta[edge.v].append(var)
    blossom_scopes: list[list[int]] = []
    for index, cycle in enumerate(cycles):
        scope = []
        for u, weight in zip(cycle, blossom_weights(instance, cycle)):
            var = raw.add_var(VarOrigin(VarRole.BLOSSOM, vertex=u, cycle=index), weight)
            delta[u].append(var)
            scope.append(var)
        blossom_scopes.append(scope)
    for v in range(instance.num_nodes):
        if not delta[v]:
            raise IsolatedVertex(f"顶点 {v} 在变换后的图中没有关联边")
        raw.add_factor(degree_eq(delta[v], 1), FactorRole("vertex", vertex=v))
    for index, scope in enumerate(blossom_scopes):
        raw.add_factor(odd_cycle_blossom(scope), FactorRole("blossom", cycle=index))
    return _finish(raw, instance, **options)


_CONSTRUCTORS: dict[ProblemKind, Callable[..., GMBundle]] = {
    ProblemKind.SHORTEST_PATH: shortest_path_gm,
    ProblemKind.PERFECT_MATCHING: perfect_matching_gm,
    ProblemKind.PM_ODD_CYCLES: pm_odd_cycles_gm,
    ProblemKind.VERTEX_COVER_DUAL: vertex_cover_dual_gm,
    ProblemKind.EDGE_COVER: edge_cover_gm,
    ProblemKind.TSP: tsp_gm,
    ProblemKind.CYCLE_PACKING: cycle_packing_gm,
    ProblemKind.NETWORK_FLOW: network_flow_gm,
}


def build_gm(instance: ProblemInstance, **options) -> GMBundle:
    """按问题类型分派到对应的构造函数；options 透传给 build_graph。"""

    return _CONSTRUCTORS[ProblemKind(instance.kind)](instance, **options)


# ---------------------------------------------------------------------------
# 还原


def full_assignment(bundle: GMBundle, decision) -> tuple[int, ...]:
    """合并 BP 解码与约简时固定的变量，得到约简前全部 GM 变量的取值。"""

    values = tuple(getattr(decision, "values", decision))
    if len(values) != len(bundle.free):
        raise InvalidInstance(f"解码长度 {len(values)} 与自由变量个数 {len(bundle.free)} 不一致")
    undecided = [i for i, v in enumerate(values) if v is None]
    if undecided:
        raise UndecidedVariables(undecided)
    full = [0] * len(bundle.origins)
    for j, value in bundle.fixed:
        full[j] = value
    for i, j in enumerate(bundle.free):
        full[j] = int(values[i])
    return tuple(full)


def unfold_blossom(bundle: GMBundle, values: Sequence) -> tuple[Fraction, ...]:
    """由 y 还原原图每条边的取值：环边 x_e = ½ Σ_u (−1)^{d_C(u,e)} y_u，其余边直接取 y_e。"""

    instance = bundle.instance
    edge_values = [Fraction(0)] * len(instance.edges)
    blossom_values: dict[int, dict[int, Fraction]] = {}
    for origin, value in zip(bundle.origins, values):
        if origin.role is VarRole.EDGE:
            edge_values[origin.edge] = Fraction(value)
        elif origin.role is VarRole.BLOSSOM:
            blossom_values.setdefault(origin.cycle, {})[origin.vertex] = Fraction(value)
    for index, cycle in enumerate(instance.params.odd_cycles):
        y = [blossom_values.get(index, {}).get(u, Fraction(0)) for u in cycle]
        signs = blossom_signs(len(cycle))
        for k, edge_id in enumerate(cycle_edge_ids(instance, cycle)):
            edge_values[edge_id] = sum((s * yu for s, yu in zip(signs[k], y)), Fraction(0)) / 2
    return tuple(edge_values)


def fold_assignment(bundle: GMBundle, values: Sequence) -> tuple[Fraction, ...]:
    """按 recovery 标记把全部 GM 变量的取值（整数或有理数）折回原图的边。"""

    if bundle.recovery is RecoveryKind.BLOSSOM_UNFOLD or bundle.kind is ProblemKind.PM_ODD_CYCLES:
        return unfold_blossom(bundle, values)
    edge_values = [Fraction(0)] * len(bundle.instance.edges)
    for origin, value in zip(bundle.origins, values):
        if origin.role in (VarRole.EDGE, VarRole.COPY):
            edge_values[origin.edge] += Fraction(value)
    if bundle.recovery is RecoveryKind.HALF_INTEGRAL:
        edge_values = [v / 2 for v in edge_values]
    return tuple(edge_values)


def original_objective(instance: ProblemInstance, edge_values: Sequence[Fraction]) -> Fraction:
    if instance.kind is ProblemKind.VERTEX_COVER_DUAL:
        return sum(edge_values, Fraction(0))
    return sum((e.weight * x for e, x in zip(instance.edges, edge_values)), Fraction(0))


def recover(bundle: GMBundle, decision) -> RecoveredSolution:
    values = tuple(getattr(decision, "values", decision))
    undecided = [i for i, v in enumerate(values) if v is None]
    if undecided:
        raise UndecidedVariables(undecided)
    evaluation = eval_global(bundle.graph, values)
    if not evaluation.feasible:
        raise InfeasibleDecode(evaluation.violated)
    full = full_assignment(bundle, values)
    edge_values = fold_assignment(bundle, full)
    aux = ()
    if bundle.kind is ProblemKind.CYCLE_PACKING:
        y = [Fraction(0)] * bundle.instance.num_nodes
        for origin, value in zip(bundle.origins, full):
            if origin.role is VarRole.AUX:
                y[origin.vertex] = Fraction(value)
        aux = tuple(y)
    return RecoveredSolution(
        values=edge_values,
        objective=original_objective(bundle.instance, edge_values),
        aux=aux,
    )


def recover_primal_vertex_cover(instance: ProblemInstance, dual: RecoveredSolution) -> tuple[int, ...]:
    """由对偶解的紧约束（互补松弛）还原顶点覆盖。

    只有一个紧端点的边先把该端点加入；两个端点都紧且仍未覆盖的边加入编号较小的端点；
    没有紧端点的边说明原始 LP 不是唯一整数解。
    """

    budgets = instance.params.budgets
    load = [Fraction(0)] * instance.num_nodes
    for edge, value in zip(instance.edges, dual.values):
        load[edge.u] += value
        load[edge.v] += value
    tight = {v for v in range(instance.num_nodes) if load[v] == budgets[v]}
    cover: set[int] = set()
    for edge_id, edge in enumerate(instance.edges):
        ends = [x for x in (edge.u, edge.v) if x in tight]
        if not ends:
            raise NotACover(edge_id)
        if len(ends) == 1:
            cover.add(ends[0])
    for edge in instance.edges:
        if edge.u not in cover and edge.v not in cover:
            cover.add(min(edge.u, edge.v))
    return tuple(sorted(cover))


# ---------------------------------------------------------------------------
# 原问题 LP（未复制）


def lp_polytope(instance: ProblemInstance) -> PolytopeDescription:
    """各问题原始 LP 的多面体描述，变量为原图的边（环填充另加每个顶点的 y_v）。"""

    validate_instance(instance)
    m = len(instance.edges)
    incident = _incident(instance)
    kind = instance.kind
    rows: list[PolytopeRow] = []

    def edge_row(edge_ids: Sequence[int], coeff_of, dim: int) -> list[int]:
        full = [0] * dim
        for e in edge_ids:
            full[e] += coeff_of(e)
        return full

    dim = m + instance.num_nodes if kind is ProblemKind.CYCLE_PACKING else m
    upper = [1] * dim
    objective = [e.weight for e in instance.edges]
    sense = Sense.MINIMIZE

    for v, edge_ids in enumerate(incident):
        unit = edge_row(edge_ids, lambda e: 1, dim)
        if kind in (ProblemKind.SHORTEST_PATH, ProblemKind.NETWORK_FLOW):
            signed = edge_row(edge_ids, lambda e, v=v: 1 if instance.edges[e].u == v else -1, dim)
            if kind is ProblemKind.SHORTEST_PATH:
                params = instance.params
                demand = 1 if v == params.source else -1 if v == params.sink else 0
            else:
                demand = instance.params.demands[v]
            rows.append(PolytopeRow(tuple(signed), Relation.EQ, demand))
        elif kind in (ProblemKind.PERFECT_MATCHING, ProblemKind.PM_ODD_CYCLES):
            rows.append(PolytopeRow(tuple(unit), Relation.EQ, 1))
        elif kind is ProblemKind.EDGE_COVER:
            rows.append(PolytopeRow(tuple(unit), Relation.GE, 1))
        elif kind is ProblemKind.VERTEX_COVER_DUAL:
            rows.append(PolytopeRow(tuple(-c for c in unit), Relation.GE, -instance.params.budgets[v]))
        elif kind is ProblemKind.TSP:
            rows.append(PolytopeRow(tuple(unit), Relation.EQ, 2))
        elif kind is ProblemKind.CYCLE_PACKING:
            unit[m + v] = -2
            rows.append(PolytopeRow(tuple(unit), Relation.EQ, 0))

    if kind is ProblemKind.PM_ODD_CYCLES:
        for cycle in instance.params.odd_cycles:
            members = cycle_edge_ids(instance, cycle)
            rows.append(
                PolytopeRow(tuple(-c for c in edge_row(members, lambda e: 1, dim)), Relation.GE, -((len(cycle) - 1) // 2))
            )
    if kind in (ProblemKind.PERFECT_MATCHING, ProblemKind.PM_ODD_CYCLES, ProblemKind.CYCLE_PACKING):
        sense = Sense.MAXIMIZE
    if kind is ProblemKind.VERTEX_COVER_DUAL:
        sense = Sense.MAXIMIZE
        objective = [Fraction(1)] * m
        upper = [max(instance.params.budgets, default=0)] * m
    if kind is ProblemKind.NETWORK_FLOW:
        upper = list(instance.params.capacities)
    if kind is ProblemKind.CYCLE_PACKING:
        objective = objective + [Fraction(0)] * instance.num_nodes

    rows.extend(box_rows(dim, upper))
    return PolytopeDescription(
        dim=dim,
        rows=tuple(rows),
        objective=tuple(Fraction(w) for w in objective),
        sense=sense,
        upper=tuple(upper),
    )


__all__ = [
    "ProblemError",
    "InvalidInstance",
    "DegenerateVertex",
    "IsolatedVertex",
    "NonDisjointCycles",
    "EvenCycle",
    "CycleNotInGraph",
    "VertexDegreeTooSmall",
    "UnbalancedDemand",
    "InfeasibleInstance",
    "UndecidedVariables",
    "InfeasibleDecode",
    "NotACover",
    "ProblemKind",
    "DIRECTED_KINDS",
    "Edge",
    "InstanceParams",
    "NoiseSpec",
    "ProblemInstance",
    "VarRole",
    "VarOrigin",
    "RecoveryKind",
    "FactorRole",
    "GMBundle",
    "RecoveredSolution",
    "ReducedFactors",
    "validate_instance",
    "cycle_edge_ids",
    "reduce_forced",
    "shortest_path_gm",
    "perfect_matching_gm",
    "pm_odd_cycles_gm",
    "vertex_cover_dual_gm",
    "edge_cover_gm",
    "tsp_gm",
    "cycle_packing_gm",
    "network_flow_gm",
    "build_gm",
    "blossom_weights",
    "full_assignment",
    "unfold_blossom",
    "fold_assignment",
    "original_objective",
    "recover",
    "recover_primal_vertex_cover",
    "lp_polytope",
]
