from fractions import Fraction

import pytest

from bplp.config_store import refresh_config_cache
from bplp.factor_graph import build_graph, degree_eq
from bplp.generators import apply_noise
from bplp.problems import (
    Edge,
    InstanceParams,
    NoiseSpec,
    ProblemInstance,
    ProblemKind,
    build_gm,
)


def edge(u, v, weight, directed=False):
    return Edge(u, v, Fraction(weight), directed)


def instance(kind, num_nodes, edges, noise=None, **params):
    return ProblemInstance(
        kind=ProblemKind(kind),
        num_nodes=num_nodes,
        edges=tuple(edges),
        params=InstanceParams(**params),
        noise=noise or NoiseSpec(),
    )


def three_node_path():
    """s=0 → a=1 → t=2（权重 1, 1）以及 s → t（权重 3）。"""
    return instance(
        "shortest_path",
        3,
        [edge(0, 1, 1, True), edge(1, 2, 1, True), edge(0, 2, 3, True)],
        source=0,
        sink=2,
    )


def four_cycle(weights=(1, 2, 1, 2), noise=None):
    pairs = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return instance("perfect_matching", 4, [edge(u, v, w) for (u, v), w in zip(pairs, weights)], noise=noise)


def triangle(kind="perfect_matching", weights=(1, 1, 1)):
    pairs = [(0, 1), (1, 2), (2, 0)]
    return instance(kind, 3, [edge(u, v, w) for (u, v), w in zip(pairs, weights)])


def diamond_flow():
    """s=0 →a=1 →t=3 费用 1 + 1/10，s →b=2 →t 费用 3，单位容量。"""
    return instance(
        "network_flow",
        4,
        [
            edge(0, 1, 1, True),
            edge(1, 3, Fraction(1, 10), True),
            edge(0, 2, 2, True),
            edge(2, 3, 1, True),
        ],
        demands=(1, 0, 0, -1),
        capacities=(1, 1, 1, 1),
    )


def k4_with_blossom():
    """K4，三角形 (0,1,2) 作为奇环；唯一最优完美匹配为 {(2,0), (1,3)}，权重 8。"""
    pairs = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]
    return instance(
        "pm_odd_cycles",
        4,
        [edge(u, v, w) for (u, v), w in zip(pairs, range(1, 7))],
        odd_cycles=((0, 1, 2),),
    )


def noised(bundle, seed=1, magnitude=Fraction(1, 1000)):
    return apply_noise(bundle, seed, magnitude)


@pytest.fixture
def two_var_graph():
    """w = (1, 3)，单个因子 x0 + x1 = 1。"""
    return build_graph(2, [1.0, 3.0], "minimize", [degree_eq([0, 1], 1)])


@pytest.fixture
def path_bundle():
    return build_gm(three_node_path())


@pytest.fixture
def cycle_bundle():
    return noised(build_gm(four_cycle()))


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch):
    """测试不读取外部环境中的配置文件。"""
    monkeypatch.delenv("BPLP_CONFIG", raising=False)
    monkeypatch.delenv("BPLP_PRESETS", raising=False)
    monkeypatch.delenv("BPLP_LOG_LEVEL", raising=False)
    refresh_config_cache()
    yield
    refresh_config_cache()
