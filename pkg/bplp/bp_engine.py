"""同步 max-product BP（log 域、每个有向对一个 log-ratio）以及 {0, 1, ?} 解码。"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .factor_graph import POS_INF, FactorGraph, ext_sum, factor_messages

logger = logging.getLogger(__name__)


class BPConfigError(ValueError):
    """Raised when a BPConfig violates its preconditions."""


class InitKind(str, Enum):
    UNIFORM = "uniform"
    RANDOM = "random"


@dataclass(frozen=True, slots=True)
class InitSpec:
    kind: InitKind = InitKind.UNIFORM
    seed: int = 0
    range: float = 1.0

    @classmethod
    def uniform(cls) -> "InitSpec":
        return cls()

    @classmethod
    def random(cls, seed: int, value_range: float = 1.0) -> "InitSpec":
        return cls(kind=InitKind.RANDOM, seed=seed, range=value_range)


@dataclass(frozen=True, slots=True)
class BPConfig:
    max_iters: int = 1000
    residual_tol: float = 1e-9
    tie_tol: float = 1e-9
    stable_window: int = 5
    init: InitSpec = field(default_factory=InitSpec)
    # 解码连续稳定这么多轮即停止（即使消息仍在变化），0 表示关闭
    decode_patience: int = 200
    workers: int = 1
    trace: bool = False

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise BPConfigError("max_iters 至少为 1")
        if self.residual_tol < 0 or self.tie_tol < 0:
            raise BPConfigError("residual_tol 与 tie_tol 不能为负")
        if self.stable_window < 1:
            raise BPConfigError("stable_window 至少为 1")
        if self.decode_patience < 0:
            raise BPConfigError("decode_patience 不能为负")
        if self.workers < 1:
            raise BPConfigError("workers 至少为 1")
        if self.init.range < 0:
            raise BPConfigError("随机初始化范围不能为负")


@dataclass(frozen=True, slots=True)
class MessageState:
    # 按 FactorGraph 的有向对编号排列的 λ_{i→α}
    lam: np.ndarray
    iteration: int = 0

    def message(self, graph: FactorGraph, var: int, factor_id: int) -> float:
        position = graph.factors[factor_id].scope.index(var)
        return float(self.lam[graph.offsets[factor_id] + position])


@dataclass(frozen=True, slots=True)
class BeliefVector:
    delta: np.ndarray

    def __len__(self) -> int:
        return int(self.delta.shape[0])


@dataclass(frozen=True, slots=True)
class Decision:
    # None 表示 '?'
    values: tuple[int | None, ...]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def is_integral(self) -> bool:
        return all(v is not None for v in self.values)

    @property
    def undecided(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if v is None]

    def symbols(self) -> str:
        return "".join("?" if v is None else str(v) for v in self.values)


@dataclass(frozen=True, slots=True)
class BPResult:
    decision: Decision
    iterations_run: int
    converged: bool
    final_residual: float
    stop_reason: str = "max_iters"
    belief_trace: tuple[BeliefVector, ...] | None = None


def config_from_dict(section: dict | None = None, **overrides) -> BPConfig:
    """由配置文件的 ``bp`` 分节与命令行覆盖项构造 BPConfig；值为 None 的覆盖项忽略。"""

    values = dict(section or {})
    values.update({key: value for key, value in overrides.items() if value is not None})
    init_kind = InitKind(str(values.get("init", InitKind.UNIFORM.value)))
    init = InitSpec(
        kind=init_kind,
        seed=int(values.get("init_seed", 0)),
        range=float(values.get("init_range", 1.0)),
    )
    return BPConfig(
        max_iters=int(values.get("max_iters", 1000)),
        residual_tol=float(values.get("residual_tol", 1e-9)),
        tie_tol=float(values.get("tie_tol", 1e-9)),
        stable_window=int(values.get("stable_window", 5)),
        init=init,
        decode_patience=int(values.get("decode_patience", 200)),
        workers=int(values.get("workers", 1)),
        trace=bool(values.get("trace", False)),
    )


def init_messages(graph: FactorGraph, init: InitSpec | None = None) -> MessageState:
    init = init or InitSpec()
    if init.kind is InitKind.UNIFORM:
        lam = np.zeros(graph.num_pairs, dtype=float)
    else:
        rng = np.random.default_rng(init.seed)
        lam = rng.uniform(-init.range, init.range, size=graph.num_pairs)
    return MessageState(lam=lam, iteration=0)


# ---------------------------------------------------------------------------


def _factor_to_var(graph: FactorGraph, lam: np.ndarray, executor: ThreadPoolExecutor | None) -> np.ndarray:
    """μ_{α→i} = M(1) ⊖ M(0)，与 λ 使用同样的有向对编号。"""

    def one(factor_id: int) -> list[float]:
        pairs = graph.factor_pairs(factor_id)
        return factor_messages(graph.factors[factor_id], lam[pairs.start : pairs.stop])

    factor_ids = range(len(graph.factors))
    results = executor.map(one, factor_ids) if executor is not None else map(one, factor_ids)
    mu = np.empty(graph.num_pairs, dtype=float)
    for factor_id, values in zip(factor_ids, results):
        start = graph.offsets[factor_id]
        mu[start : start + len(values)] = values
    return mu


def _combine(graph: FactorGraph, mu: np.ndarray) -> np.ndarray:
    """λ′_{i→α} = −w_i + Σ_{α′ ∈ F_i ∖ α} μ_{α′→i}。"""

    new_lam = np.empty(graph.num_pairs, dtype=float)
    for var, pairs in enumerate(graph.var_pairs):
        base = -float(graph.weights[var])
        for pair in pairs:
            new_lam[pair] = ext_sum([base] + [float(mu[q]) for q in pairs if q != pair])
    return new_lam


def _beliefs_from(graph: FactorGraph, mu: np.ndarray) -> BeliefVector:
    delta = np.array(
        [
            ext_sum([-float(graph.weights[var])] + [float(mu[q]) for q in pairs])
            for var, pairs in enumerate(graph.var_pairs)
        ],
        dtype=float,
    )
    return BeliefVector(delta=delta)


def _residual(old: np.ndarray, new: np.ndarray) -> float:
    if old.shape[0] == 0:
        return 0.0
    same = old == new  # 同号 ∞ 对 ∞ 也计为 0
    with np.errstate(invalid="ignore"):
        diff = np.abs(new - old)
    diff = np.where(same, 0.0, diff)
    diff = np.where(np.isnan(diff), POS_INF, diff)
    return float(diff.max())


def bp_step(
    graph: FactorGraph,
    state: MessageState,
    executor: ThreadPoolExecutor | None = None,
) -> tuple[MessageState, float]:
    """一次同步更新；新状态只依赖旧状态。"""

    if state.lam.shape[0] != graph.num_pairs:
        raise BPConfigError("消息状态与因子图的邻接结构不一致")
    mu = _factor_to_var(graph, state.lam, executor)
    new_lam = _combine(graph, mu)
    residual = _residual(state.lam, new_lam)
    return MessageState(lam=new_lam, iteration=state.iteration + 1), residual


def beliefs(graph: FactorGraph, state: MessageState, executor: ThreadPoolExecutor | None = None) -> BeliefVector:
    return _beliefs_from(graph, _factor_to_var(graph, state.lam, executor))


def decode(belief: BeliefVector | Sequence[float], tie_tol: float) -> Decision:
    delta = belief.delta if isinstance(belief, BeliefVector) else np.asarray(belief, dtype=float)
    values: list[int | None] = []
    for value in delta:
        if value > tie_tol:
            values.append(1)
        elif value < -tie_tol:
            values.append(0)
        else:
            values.append(None)
    return Decision(values=tuple(values))


def effective_tie_tol(graph: FactorGraph, tie_tol: float) -> float:
    scale = float(np.max(np.abs(graph.weights))) if graph.num_vars else 0.0
    return tie_tol * scale if scale > 0 else tie_tol


def run(graph: FactorGraph, config: BPConfig | None = None) -> BPResult:
    """迭代 bp_step 直到残差与解码同时稳定、解码稳定超过 patience，或达到 max_iters。"""

    config = config or BPConfig()
    tol = effective_tie_tol(graph, config.tie_tol)
    state = init_messages(graph, config.init)
    trace: list[BeliefVector] = []
    executor = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        mu = _factor_to_var(graph, state.lam, executor)
        decision: Decision | None = None
        stable = 0
        residual = POS_INF
        stop_reason = "max_iters"
        for _ in range(config.max_iters):
            new_lam = _combine(graph, mu)
            residual = _residual(state.lam, new_lam)
            state = MessageState(lam=new_lam, iteration=state.iteration + 1)
            mu = _factor_to_var(graph, state.lam, executor)
            belief = _beliefs_from(graph, mu)
            if config.trace:
                trace.append(belief)
            current = decode(belief, tol)
            stable = stable + 1 if current == decision else 1
            decision = current
            logger.debug("第 %d 轮：残差 %.3e，解码 %s", state.iteration, residual, current.symbols())
            if residual < config.residual_tol and stable >= config.stable_window:
                stop_reason = "residual"
                break
            if config.decode_patience and stable >= config.decode_patience:
                stop_reason = "decode_patience"
                break
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    converged = stop_reason != "max_iters"
    if not converged:
        logger.info("BP 在 %d 轮内未收敛，最终残差 %.3e", state.iteration, residual)
    return BPResult(
        decision=decision if decision is not None else Decision(values=()),
        iterations_run=state.iteration,
        converged=converged,
        final_residual=residual,
        stop_reason=stop_reason,
        belief_trace=tuple(trace) if config.trace else None,
    )


__all__ = [
    "BPConfigError",
    "InitKind",
    "InitSpec",
    "BPConfig",
    "MessageState",
    "BeliefVector",
    "Decision",
    "BPResult",
    "config_from_dict",
    "init_messages",
    "bp_step",
    "beliefs",
    "decode",
    "effective_tie_tol",
    "run",
]
