"""随机实例生成与 GM 权重噪声注入。"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import networkx as nx
import numpy as np

from .factor_graph import with_weights
from .problems import (
    DIRECTED_KINDS,
    Edge,
    GMBundle,
    InstanceParams,
    NoiseSpec,
    ProblemInstance,
    ProblemKind,
)

logger = logging.getLogger(__name__)


class GeneratorError(ValueError):
    """Raised for size parameters a generator cannot honour."""


@dataclass(frozen=True, slots=True)
class GenOptions:
    nodes: int = 6
    # 额外随机边的出现概率
    density: float = 0.3
    max_weight: int = 9
    cycle_length: int = 3
    max_capacity: int = 2


def default_noise_magnitude(weights: Sequence[Fraction], relative: float = 1e-3) -> Fraction:
    """relative × 最小正权重差；权重全部相同时以最大绝对值（或 1）代替权重差。"""

    distinct = sorted(set(Fraction(w) for w in weights))
    gaps = [b - a for a, b in zip(distinct, distinct[1:]) if b > a]
    if gaps:
        gap = min(gaps)
    else:
        gap = max((abs(w) for w in distinct), default=Fraction(0)) or Fraction(1)
    return Fraction(str(relative)) * gap


def noise_offsets(count: int, seed: int, magnitude: Fraction) -> list[Fraction]:
    """(0, magnitude] 上的独立均匀扰动，由 seed 决定。"""

    if magnitude <= 0 or count == 0:
        return [Fraction(0)] * count
    rng = np.random.default_rng(seed)
    scale = float(magnitude)
    return [Fraction(scale - float(u)) for u in rng.uniform(0.0, scale, size=count)]


def apply_noise(bundle: GMBundle, seed: int, magnitude: Fraction) -> GMBundle:
    """在复制之后逐个 GM 变量加噪声；扰动按约简前的变量顺序抽取。"""

    magnitude = Fraction(magnitude)
    if magnitude < 0:
        raise GeneratorError("噪声幅度不能为负")
    if magnitude == 0:
        return bundle
    offsets = noise_offsets(len(bundle.origins), seed, magnitude)
    weights = tuple(w + offsets[j] for w, j in zip(bundle.weights, bundle.free))
    graph = with_weights(bundle.graph, [float(w) for w in weights])
    logger.debug("对 %d 个 GM 变量注入幅度 %s 的噪声", len(weights), magnitude)
    return replace(bundle, graph=graph, weights=weights)


# ---------------------------------------------------------------------------


def _weights(rng: np.random.Generator, count: int, options: GenOptions) -> list[Fraction]:
    return [Fraction(int(w)) for w in rng.integers(1, options.max_weight + 1, size=count)]


def _extra_edges(n: int, density: float, seed: int, directed: bool = False) -> list[tuple[int, int]]:
    graph = nx.gnp_random_graph(n, density, seed=seed, directed=directed)
    return sorted(graph.edges())


def _dedupe(pairs: list[tuple[int, int]], directed: bool = False) -> list[tuple[int, int]]:
    seen: set = set()
    out = []
    for u, v in pairs:
        key = (u, v) if directed else frozenset((u, v))
        if u == v or key in seen:
            continue
        seen.add(key)
        out.append((u, v))
    return out


def _forward_dag(n: int, options: GenOptions, seed: int) -> list[tuple[int, int]]:
    chain = [(i, i + 1) for i in range(n - 1)]
    extra = [(u, v) for u, v in _extra_edges(n, options.density, seed, directed=True) if u < v]
    return _dedupe(chain + extra, directed=True)


def _pairing(rng: np.random.Generator, nodes: list[int]) -> list[tuple[int, int]]:
    order = [int(v) for v in rng.permutation(nodes)]
    return [(min(a, b), max(a, b)) for a, b in zip(order[::2], order[1::2])]


def _build(kind: ProblemKind, n: int, pairs: list[tuple[int, int]], weights: list[Fraction], params: InstanceParams) -> ProblemInstance:
    directed = kind in DIRECTED_KINDS
    edges = tuple(Edge(u, v, w, directed) for (u, v), w in zip(pairs, weights))
    return ProblemInstance(kind=kind, num_nodes=n, edges=edges, params=params)


def gen(
    kind: ProblemKind | str,
    options: GenOptions | None = None,
    seed: int = 0,
    noise: Fraction | None = None,
    relative: float = 1e-3,
) -> ProblemInstance:
    """生成可复现的随机实例；noise 为 None 时使用默认幅度。"""

    kind = ProblemKind(kind)
    options = options or GenOptions()
    n = options.nodes
    if n < 2:
        raise GeneratorError("至少需要 2 个顶点")
    if not 0.0 <= options.density <= 1.0:
        raise GeneratorError("density 必须位于 [0, 1]")
    if options.max_weight < 1:
        raise GeneratorError("max_weight 至少为 1")
    rng = np.random.default_rng(seed)
    params = InstanceParams()

    if kind is ProblemKind.SHORTEST_PATH:
        pairs = _forward_dag(n, options, seed)
        params = InstanceParams(source=0, sink=n - 1)
    elif kind is ProblemKind.NETWORK_FLOW:
        pairs = _forward_dag(n, options, seed)
        amount = int(rng.integers(1, options.max_capacity + 1))
        capacities = tuple(
            amount if v == u + 1 else int(rng.integers(1, options.max_capacity + 1)) for u, v in pairs
        )
        demands = [0] * n
        demands[0], demands[n - 1] = amount, -amount
        params = InstanceParams(demands=tuple(demands), capacities=capacities)
    elif kind in (ProblemKind.PERFECT_MATCHING, ProblemKind.PM_ODD_CYCLES):
        if n % 2:
            raise GeneratorError("完美匹配实例需要偶数个顶点")
        pairs = _pairing(rng, list(range(n)))
        if kind is ProblemKind.PM_ODD_CYCLES:
            length = options.cycle_length
            if length < 3 or length % 2 == 0 or length > n:
                raise GeneratorError("cycle_length 必须是不超过顶点数的奇数且 ≥ 3")
            cycle = tuple(int(v) for v in rng.permutation(n)[:length])
            pairs += [(cycle[k], cycle[(k + 1) % length]) for k in range(length)]
            params = InstanceParams(odd_cycles=(cycle,))
        pairs = _dedupe(pairs + _extra_edges(n, options.density, seed))
    elif kind is ProblemKind.TSP:
        if n < 3:
            raise GeneratorError("TSP 实例至少需要 3 个顶点")
        order = [int(v) for v in rng.permutation(n)]
        tour = [(order[k], order[(k + 1) % n]) for k in range(n)]
        pairs = _dedupe(tour + _extra_edges(n, options.density, seed))
    elif kind is ProblemKind.EDGE_COVER:
        pairs = _dedupe(_extra_edges(n, options.density, seed))
        touched = {x for pair in pairs for x in pair}
        for v in range(n):
            if v not in touched:
                other = int(rng.choice([u for u in range(n) if u != v]))
                pairs.append((min(v, other), max(v, other)))
                touched.update((v, other))
        pairs = _dedupe(pairs)
    elif kind is ProblemKind.VERTEX_COVER_DUAL:
        pairs = _dedupe(_extra_edges(n, options.density, seed))
        budgets = tuple(int(b) for b in rng.integers(1, 3, size=n))
        params = InstanceParams(budgets=budgets)
    elif kind is ProblemKind.CYCLE_PACKING:
        pairs = _dedupe(_extra_edges(n, max(options.density, 0.4), seed))
    else:  # pragma: no cover - ProblemKind 已穷举
        raise GeneratorError(f"不支持的问题类型 {kind}")

    if kind is ProblemKind.VERTEX_COVER_DUAL:
        weights = [Fraction(1)] * len(pairs)
    else:
        weights = _weights(rng, len(pairs), options)
    instance = _build(kind, n, pairs, weights, params)
    magnitude = default_noise_magnitude(weights, relative) if noise is None else Fraction(noise)
    return replace(instance, noise=NoiseSpec(seed=seed, magnitude=magnitude))


__all__ = [
    "GeneratorError",
    "GenOptions",
    "default_noise_magnitude",
    "noise_offsets",
    "apply_noise",
    "gen",
]
