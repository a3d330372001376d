"""小规模下的独立真值：穷举 MAP、有理数精确的 LP 顶点枚举、多面体距离常数 K，以及经典算法。

本模块所有最终结论都以 ``Fraction`` 精确给出；浮点计算只用来预筛候选，
每个保留下来的候选都会用精确算术重新求解并验证。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

import networkx as nx
import numpy as np
import sympy as sp

from .factor_graph import FactorGraph, Sense, feasible_table

logger = logging.getLogger(__name__)

_SUBSET_BATCH = 4096
_FLOAT_SLACK = 1e-9


class OracleError(RuntimeError):
    """Base class for oracle failures."""


class CapExceeded(OracleError):
    """Raised when an instance is beyond the exhaustive oracle limits."""


class Unreachable(OracleError):
    """Raised when the sink cannot be reached from the source."""


class NoPerfectMatching(OracleError):
    """Raised when the graph has no perfect matching."""


class InfeasibleDemand(OracleError):
    """Raised when no integral flow satisfies the demands."""


class Relation(str, Enum):
    GE = ">="
    EQ = "="


@dataclass(frozen=True, slots=True)
class PolytopeRow:
    coeffs: tuple[int, ...]
    relation: Relation
    rhs: int

    def holds(self, x: Sequence[Fraction]) -> bool:
        value = sum((c * v for c, v in zip(self.coeffs, x) if c), Fraction(0))
        return value == self.rhs if self.relation is Relation.EQ else value >= self.rhs


@dataclass(frozen=True, slots=True)
class PolytopeDescription:
    dim: int
    rows: tuple[PolytopeRow, ...]
    objective: tuple[Fraction, ...]
    sense: Sense = Sense.MINIMIZE
    # 盒约束上界，默认全部为 1
    upper: tuple[int, ...] = ()

    def contains(self, x: Sequence[Fraction]) -> bool:
        return len(x) == self.dim and all(row.holds(x) for row in self.rows)

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x)), Fraction(0))


@dataclass(frozen=True, slots=True)
class VertexSet:
    vertices: tuple[tuple[Fraction, ...], ...]
    optimal: tuple[int, ...]
    optimum: Fraction | None = None

    @property
    def optimal_vertices(self) -> list[tuple[Fraction, ...]]:
        return [self.vertices[i] for i in self.optimal]


class MapStatus(str, Enum):
    UNIQUE = "unique"
    TIED = "tied"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, slots=True)
class MapResult:
    status: MapStatus
    assignments: tuple[tuple[int, ...], ...] = ()
    value: Fraction | None = None

    @property
    def assignment(self) -> tuple[int, ...] | None:
        return self.assignments[0] if self.status is MapStatus.UNIQUE else None


@dataclass(frozen=True, slots=True)
class PathResult:
    edges: tuple[int, ...]
    cost: Fraction
    tie: bool = False


@dataclass(frozen=True, slots=True)
class MatchingResult:
    matchings: tuple[tuple[int, ...], ...]
    value: Fraction

    @property
    def tie(self) -> bool:
        return len(self.matchings) > 1


@dataclass(frozen=True, slots=True)
class FlowResult:
    flows: tuple[int, ...]
    cost: Fraction


# ---------------------------------------------------------------------------
# 多面体描述


def box_rows(dim: int, upper: Sequence[int] | None = None) -> list[PolytopeRow]:
    """0 ≤ x_i ≤ u_i 的全部盒约束行。"""

    upper = list(upper) if upper is not None else [1] * dim
    rows: list[PolytopeRow] = []
    for i in range(dim):
        unit = tuple(1 if j == i else 0 for j in range(dim))
        rows.append(PolytopeRow(unit, Relation.GE, 0))
        rows.append(PolytopeRow(tuple(-c for c in unit), Relation.GE, -int(upper[i])))
    return rows


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(float(value))


def polytope_from_graph(graph: FactorGraph, weights: Sequence[Fraction] | None = None) -> PolytopeDescription:
    """因子图对应的 LP：所有因子行加上 [0,1]^n 盒约束，目标为报告方向的 w。"""

    n = graph.num_vars
    rows: list[PolytopeRow] = []
    for factor in graph.factors:
        for relation, factor_rows in ((Relation.EQ, factor.eq_rows), (Relation.GE, factor.ineq_rows)):
            for coeffs, rhs in factor_rows:
                full = [0] * n
                for var, c in zip(factor.scope, coeffs):
                    full[var] = c
                rows.append(PolytopeRow(tuple(full), relation, rhs))
    rows.extend(box_rows(n))
    objective = tuple(to_fraction(w) for w in (weights if weights is not None else graph.reporting_weights))
    return PolytopeDescription(dim=n, rows=tuple(rows), objective=objective, sense=graph.sense, upper=(1,) * n)


# ---------------------------------------------------------------------------
# 穷举 MAP


def brute_force_map(
    graph: FactorGraph,
    weights: Sequence[Fraction] | None = None,
    *,
    max_vars: int = 25,
) -> MapResult:
    """精确枚举 {0,1}^n；并列的最优解全部报告。"""

    n = graph.num_vars
    if n > max_vars:
        raise CapExceeded(f"变量个数 {n} 超过穷举上限 {max_vars}")
    exact = [to_fraction(w) for w in (weights if weights is not None else graph.reporting_weights)]
    sign = -1 if graph.sense is Sense.MAXIMIZE else 1
    canon = np.array([float(sign * w) for w in exact], dtype=float)
    slack = _FLOAT_SLACK * (1.0 + float(np.abs(canon).sum()))

    total = 1 << n
    chunk = 1 << 16
    best_float = float("inf")
    candidates: list[tuple[float, tuple[int, ...]]] = []
    tables = [(np.asarray(f.scope, dtype=np.int64), feasible_table(f)) for f in graph.factors]
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)
        ok = np.ones(bits.shape[0], dtype=bool)
        for scope, table in tables:
            local_codes = bits[:, scope] @ (1 << np.arange(scope.shape[0], dtype=np.int64))
            table_codes = table.astype(np.int64) @ (1 << np.arange(scope.shape[0], dtype=np.int64))
            ok &= np.isin(local_codes, table_codes)
        if not ok.any():
            continue
        feasible = bits[ok]
        values = feasible @ canon if n else np.zeros(feasible.shape[0])
        chunk_best = float(values.min())
        if chunk_best < best_float:
            best_float = chunk_best
            candidates = [(v, c) for v, c in candidates if v <= best_float + slack]
        for row in np.nonzero(values <= best_float + slack)[0]:
            candidates.append((float(values[row]), tuple(int(x) for x in feasible[row])))

    if not candidates:
        return MapResult(status=MapStatus.INFEASIBLE)
    scored = [(sum((sign * w for w, x in zip(exact, a) if x), Fraction(0)), a) for _, a in candidates]
    best = min(score for score, _ in scored)
    winners = tuple(sorted(a for score, a in scored if score == best))
    status = MapStatus.UNIQUE if len(winners) == 1 else MapStatus.TIED
    return MapResult(status=status, assignments=winners, value=sign * best)


# ---------------------------------------------------------------------------
# 顶点枚举


def _check_caps(poly: PolytopeDescription, max_dim: int, max_rows: int) -> None:
    if poly.dim > max_dim or len(poly.rows) > max_rows:
        raise CapExceeded(
            f"多面体规模 n={poly.dim}, m={len(poly.rows)} 超过上限 n≤{max_dim}, m≤{max_rows}"
        )


def _independent_rows(rows: Sequence[PolytopeRow], indices: Sequence[int]) -> list[int]:
    if not indices:
        return []
    matrix = sp.Matrix([list(rows[i].coeffs) for i in indices])
    _, pivots = matrix.T.rref()
    return [indices[p] for p in pivots]


def _basis_subsets(poly: PolytopeDescription) -> Iterator[tuple[int, ...]]:
    """每个子集都包含等式行的一个极大无关组；每个顶点都有这样的基。"""

    eq_idx = [i for i, row in enumerate(poly.rows) if row.relation is Relation.EQ]
    basis = _independent_rows(poly.rows, eq_idx)
    others = [i for i, row in enumerate(poly.rows) if row.relation is Relation.GE]
    need = poly.dim - len(basis)
    if need < 0 or need > len(others):
        return
    for combo in combinations(others, need):
        yield tuple(sorted(basis + list(combo)))


def _batched(subsets: Iterator[tuple[int, ...]], size: int) -> Iterator[np.ndarray]:
    batch: list[tuple[int, ...]] = []
    for subset in subsets:
        batch.append(subset)
        if len(batch) == size:
            yield np.asarray(batch, dtype=np.int64)
            batch = []
    if batch:
        yield np.asarray(batch, dtype=np.int64)


def _exact_solve(coeffs: list[list[int]], rhs: list[int]) -> tuple[Fraction, ...]:
    solution = sp.Matrix(coeffs).LUsolve(sp.Matrix(rhs))
    return tuple(Fraction(int(v.p), int(v.q)) for v in solution)


def _float_rows(poly: PolytopeDescription) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    A = np.array([row.coeffs for row in poly.rows], dtype=float).reshape(len(poly.rows), poly.dim)
    b = np.array([row.rhs for row in poly.rows], dtype=float)
    is_eq = np.array([row.relation is Relation.EQ for row in poly.rows], dtype=bool)
    return A, b, is_eq


def enumerate_vertices(
    poly: PolytopeDescription,
    *,
    max_dim: int = 10,
    max_rows: int = 24,
) -> VertexSet:
    """对每个可逆的 n×n 子系统 A_ξ 求 v_ξ = A_ξ⁻¹ b_ξ，保留落在多面体内的点并去重。"""

    _check_caps(poly, max_dim, max_rows)
    n = poly.dim
    if n == 0:
        vertices = [()] if poly.contains(()) else []
        return _mark_optimal(poly, vertices)

    A, b, is_eq = _float_rows(poly)
    seen: dict[tuple[float, ...], tuple[Fraction, ...] | None] = {}
    vertices: list[tuple[Fraction, ...]] = []
    examined = 0
    for batch in _batched(_basis_subsets(poly), _SUBSET_BATCH):
        examined += batch.shape[0]
        subs = A[batch]
        dets = np.linalg.det(subs)
        keep = np.abs(dets) > 0.5  # 整数矩阵可逆时 |det| ≥ 1
        if not keep.any():
            continue
        batch, subs = batch[keep], subs[keep]
        xs = np.linalg.solve(subs, b[batch][..., None])[..., 0]
        lhs = xs @ A.T - b
        ok = np.where(is_eq, np.abs(lhs) <= _FLOAT_SLACK, lhs >= -_FLOAT_SLACK).all(axis=1)
        for subset, x in zip(batch[ok], xs[ok]):
            key = tuple(np.round(x, 9).tolist())
            if key in seen:
                continue
            point = _exact_solve([list(poly.rows[i].coeffs) for i in subset], [poly.rows[i].rhs for i in subset])
            if poly.contains(point):
                seen[key] = point
                if point not in vertices:
                    vertices.append(point)
            else:
                seen[key] = None
    logger.debug("顶点枚举：检查 %d 个子系统，得到 %d 个顶点", examined, len(vertices))
    vertices.sort()
    return _mark_optimal(poly, vertices)


def _mark_optimal(poly: PolytopeDescription, vertices: list[tuple[Fraction, ...]]) -> VertexSet:
    if not vertices:
        return VertexSet(vertices=(), optimal=(), optimum=None)
    values = [poly.value(v) for v in vertices]
    optimum = max(values) if poly.sense is Sense.MAXIMIZE else min(values)
    optimal = tuple(i for i, value in enumerate(values) if value == optimum)
    return VertexSet(vertices=tuple(vertices), optimal=optimal, optimum=optimum)


def lemma1_constant(
    poly: PolytopeDescription,
    *,
    max_dim: int = 10,
    max_rows: int = 24,
) -> Fraction:
    """K = max_ξ ‖A_ξ⁻¹ 1‖₁，等式行先拆成两条 ≥ 行；不做行归一化。"""

    ge_rows: list[tuple[int, ...]] = []
    for row in poly.rows:
        ge_rows.append(row.coeffs)
        if row.relation is Relation.EQ:
            ge_rows.append(tuple(-c for c in row.coeffs))
    if poly.dim > max_dim or len(ge_rows) > max_rows:
        raise CapExceeded(f"多面体规模 n={poly.dim}, m={len(ge_rows)} 超过上限 n≤{max_dim}, m≤{max_rows}")
    n = poly.dim
    if n == 0:
        return Fraction(0)

    A = np.array(ge_rows, dtype=float)
    ones = np.ones(n)
    best_float = -1.0
    finalists: list[tuple[float, tuple[int, ...]]] = []
    for batch in _batched(combinations(range(len(ge_rows)), n), _SUBSET_BATCH):
        subs = A[batch]
        keep = np.abs(np.linalg.det(subs)) > 0.5
        if not keep.any():
            continue
        batch, subs = batch[keep], subs[keep]
        norms = np.abs(np.linalg.solve(subs, np.broadcast_to(ones, (subs.shape[0], n))[..., None])[..., 0]).sum(axis=1)
        batch_best = float(norms.max())
        if batch_best > best_float:
            best_float = batch_best
            finalists = [(v, s) for v, s in finalists if v >= best_float - 1e-6]
        for idx in np.nonzero(norms >= best_float - 1e-6)[0]:
            finalists.append((float(norms[idx]), tuple(int(i) for i in batch[idx])))
    if not finalists:
        raise OracleError("多面体没有可逆的 n×n 子系统")
    return max(
        sum((abs(v) for v in _exact_solve([list(ge_rows[i]) for i in subset], [1] * n)), Fraction(0))
        for _, subset in finalists
    )


# ---------------------------------------------------------------------------
# 经典算法


def dijkstra(instance) -> PathResult:
    """精确最短路；并列时取字典序最小的边序列并置 tie 标记。"""

    source, sink = instance.params.source, instance.params.sink
    graph = nx.DiGraph()
    graph.add_nodes_from(range(instance.num_nodes))
    parallel: dict[tuple[int, int], list[int]] = {}
    for edge_id, edge in enumerate(instance.edges):
        parallel.setdefault((edge.u, edge.v), []).append(edge_id)
    tie = False
    best_edge: dict[tuple[int, int], int] = {}
    for pair, edge_ids in parallel.items():
        cheapest = min(instance.edges[e].weight for e in edge_ids)
        winners = [e for e in edge_ids if instance.edges[e].weight == cheapest]
        best_edge[pair] = winners[0]
        graph.add_edge(*pair, weight=cheapest, tied=len(winners) > 1)
    try:
        paths = list(nx.all_shortest_paths(graph, source, sink, weight="weight"))
    except nx.NetworkXNoPath as exc:
        raise Unreachable(f"从 {source} 无法到达 {sink}") from exc
    edge_paths = sorted(tuple(best_edge[(a, b)] for a, b in zip(path, path[1:])) for path in paths)
    chosen = edge_paths[0]
    tie = len(edge_paths) > 1 or any(graph.edges[instance.edges[e].u, instance.edges[e].v]["tied"] for e in chosen)
    cost = sum((instance.edges[e].weight for e in chosen), Fraction(0))
    return PathResult(edges=chosen, cost=cost, tie=tie)


def matching_oracle(instance, *, max_nodes: int = 12) -> MatchingResult:
    """穷举所有完美匹配，返回最大权的全部并列解。"""

    n = instance.num_nodes
    if n > max_nodes:
        raise CapExceeded(f"顶点数 {n} 超过完美匹配穷举上限 {max_nodes}")
    incident: list[list[int]] = [[] for _ in range(n)]
    for edge_id, edge in enumerate(instance.edges):
        if edge.u != edge.v:
            incident[edge.u].append(edge_id)
            incident[edge.v].append(edge_id)

    found: list[tuple[Fraction, tuple[int, ...]]] = []

    def extend(matched: frozenset[int], chosen: list[int], value: Fraction) -> None:
        free = next((v for v in range(n) if v not in matched), None)
        if free is None:
            found.append((value, tuple(sorted(chosen))))
            return
        for edge_id in incident[free]:
            edge = instance.edges[edge_id]
            other = edge.v if edge.u == free else edge.u
            if other in matched:
                continue
            chosen.append(edge_id)
            extend(matched | {free, other}, chosen, value + edge.weight)
            chosen.pop()

    if n % 2 == 0:
        extend(frozenset(), [], Fraction(0))
    if not found:
        raise NoPerfectMatching("图中不存在完美匹配")
    best = max(value for value, _ in found)
    winners = tuple(sorted({m for value, m in found if value == best}))
    return MatchingResult(matchings=winners, value=best)


_SUPER_SOURCE = "source"
_SUPER_SINK = "sink"


def flow_oracle(instance, *, max_nodes: int = 12) -> FlowResult:
    """逐次最短路（Bellman-Ford 于残量网络）求最小费用整数流。"""

    n = instance.num_nodes
    if n > max_nodes:
        raise CapExceeded(f"顶点数 {n} 超过最小费用流上限 {max_nodes}")
    edges = instance.edges
    capacities = instance.params.capacities
    demands = instance.params.demands
    if any(edge.weight < 0 for edge in edges):
        raise OracleError("逐次最短路要求费用非负")
    flows = [0] * len(edges)
    supply = {v: d for v, d in enumerate(demands) if d > 0}
    deficit = {v: -d for v, d in enumerate(demands) if d < 0}

    while sum(supply.values()) > 0:
        residual = nx.DiGraph()
        arcs: dict[tuple, tuple[Fraction, int, int]] = {}

        def offer(a, b, cost: Fraction, edge_id: int, direction: int) -> None:
            current = arcs.get((a, b))
            if current is None or cost < current[0]:
                arcs[(a, b)] = (cost, edge_id, direction)

        for edge_id, edge in enumerate(edges):
            if flows[edge_id] < capacities[edge_id]:
                offer(edge.u, edge.v, edge.weight, edge_id, 1)
            if flows[edge_id] > 0:
                offer(edge.v, edge.u, -edge.weight, edge_id, -1)
        for v, amount in supply.items():
            if amount > 0:
                offer(_SUPER_SOURCE, v, Fraction(0), -1, 0)
        for v, amount in deficit.items():
            if amount > 0:
                offer(v, _SUPER_SINK, Fraction(0), -1, 0)
        for (a, b), (cost, _, _) in arcs.items():
            residual.add_edge(a, b, weight=cost)
        if _SUPER_SOURCE not in residual or _SUPER_SINK not in residual:
            raise InfeasibleDemand("需求无法被满足")
        try:
            path = nx.bellman_ford_path(residual, _SUPER_SOURCE, _SUPER_SINK, weight="weight")
        except nx.NetworkXNoPath as exc:
            raise InfeasibleDemand("需求超过割容量，无法满足") from exc
        supply[path[1]] -= 1
        deficit[path[-2]] -= 1
        for a, b in zip(path[1:-2], path[2:-1]):
            _, edge_id, direction = arcs[(a, b)]
            flows[edge_id] += direction

    cost = sum((edge.weight * f for edge, f in zip(edges, flows)), Fraction(0))
    return FlowResult(flows=tuple(flows), cost=cost)


__all__ = [
    "OracleError",
    "CapExceeded",
    "Unreachable",
    "NoPerfectMatching",
    "InfeasibleDemand",
    "Relation",
    "PolytopeRow",
    "PolytopeDescription",
    "VertexSet",
    "MapStatus",
    "MapResult",
    "PathResult",
    "MatchingResult",
    "FlowResult",
    "box_rows",
    "to_fraction",
    "polytope_from_graph",
    "brute_force_map",
    "enumerate_vertices",
    "lemma1_constant",
    "dijkstra",
    "matching_oracle",
    "flow_oracle",
]
