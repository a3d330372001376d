"""二值变量 + 线性约束指示因子构成的图模型，以及因子的 max-marginal 计算。

因子 ψ_α(x_α) = 1 当且仅当 A_α x_α ≥ b_α 且 C_α x_α = d_α。目标统一为最小化 w·x，
最大化问题以取负的权重存储，``sense`` 只用于报告。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

NEG_INF = float("-inf")
POS_INF = float("inf")

# 枚举可行局部赋值时每批处理的行数
_CHUNK_BITS = 16

Row = tuple[tuple[int, ...], int]
Assignment = tuple[int, ...]


class FactorGraphError(ValueError):
    """因子图构建或求值失败的基类。"""


class InfeasibleFactor(FactorGraphError):
    """Raised when a factor admits no feasible local assignment."""

    def __init__(self, factor_id: int):
        super().__init__(f"因子 {factor_id} 没有任何可行的局部赋值")
        self.factor_id = factor_id


class ScopeTooSmall(FactorGraphError):
    """Raised when a factor scope has fewer than two variables."""


class BadReference(FactorGraphError):
    """Raised when a factor references a variable outside [0, n) or twice."""


class ScopeTooLarge(FactorGraphError):
    """Raised when a Generic factor exceeds the enumeration cap."""


class LengthMismatch(FactorGraphError):
    """Raised when an assignment or row length disagrees with its scope."""


class HintMismatch(FactorGraphError):
    """Raised in verify mode when a hint disagrees with the row system."""


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class HintKind(str, Enum):
    GENERIC = "generic"
    DEGREE_EQ = "degree_eq"
    DEGREE_LE = "degree_le"
    DEGREE_GE = "degree_ge"
    SIGNED_CONSERVATION = "signed_conservation"
    ODD_CYCLE_BLOSSOM = "odd_cycle_blossom"


@dataclass(frozen=True, slots=True)
class FactorHint:
    kind: HintKind = HintKind.GENERIC
    # DegreeEq 的 d、DegreeLE/GE 的 b、SignedConservation 的需求量
    bound: int = 0
    signs: tuple[int, ...] = ()
    cycle_length: int = 0


GENERIC_HINT = FactorHint()


@dataclass(frozen=True, slots=True)
class Factor:
    scope: tuple[int, ...]
    eq_rows: tuple[Row, ...] = ()
    ineq_rows: tuple[Row, ...] = ()
    hint: FactorHint = GENERIC_HINT
    # 可行局部赋值表（F × |α|），由 build_graph 填充
    table: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.scope)


@dataclass(frozen=True, slots=True)
class FactorGraph:
    num_vars: int
    weights: np.ndarray
    sense: Sense
    factors: tuple[Factor, ...]
    adjacency: tuple[tuple[int, ...], ...]
    # 有向对 (i, α) 的编号：因子 a 的第 k 个作用域位置对应 offsets[a] + k
    offsets: tuple[int, ...]
    pair_var: np.ndarray
    var_pairs: tuple[tuple[int, ...], ...]

    @property
    def num_pairs(self) -> int:
        return int(self.pair_var.shape[0])

    @property
    def reporting_weights(self) -> np.ndarray:
        return -self.weights if self.sense is Sense.MAXIMIZE else self.weights

    def factor_pairs(self, factor_id: int) -> range:
        start = self.offsets[factor_id]
        return range(start, start + self.factors[factor_id].size)

    def degree(self, var: int) -> int:
        return len(self.adjacency[var])


@dataclass(frozen=True, slots=True)
class GlobalEval:
    feasible: bool
    objective: float | None = None
    violated: int | None = None


# ---------------------------------------------------------------------------
# 扩展实数运算：(+∞) + (−∞) 定义为 −∞，不可行分支永远不会胜出


def ext_sum(values: Iterable[float]) -> float:
    """−∞ 优先，其次 +∞，否则按从左到右的顺序求和。"""

    total = 0.0
    has_pos_inf = False
    for value in values:
        if value == NEG_INF:
            return NEG_INF
        if value == POS_INF:
            has_pos_inf = True
        elif not has_pos_inf:
            total += value
    return POS_INF if has_pos_inf else total


# ---------------------------------------------------------------------------
# 常用因子构造


def degree_eq(scope: Sequence[int], d: int) -> Factor:
    k = len(scope)
    return Factor(
        scope=tuple(scope),
        eq_rows=(((1,) * k, d),),
        hint=FactorHint(HintKind.DEGREE_EQ, bound=d),
    )


def degree_le(scope: Sequence[int], b: int) -> Factor:
    k = len(scope)
    return Factor(
        scope=tuple(scope),
        ineq_rows=(((-1,) * k, -b),),
        hint=FactorHint(HintKind.DEGREE_LE, bound=b),
    )


def degree_ge(scope: Sequence[int], b: int) -> Factor:
    k = len(scope)
    return Factor(
        scope=tuple(scope),
        ineq_rows=(((1,) * k, b),),
        hint=FactorHint(HintKind.DEGREE_GE, bound=b),
    )


def signed_conservation(scope: Sequence[int], signs: Sequence[int], demand: int) -> Factor:
    """Σ_out x − Σ_in x = demand，signs 中 +1 表示出边、−1 表示入边。"""

    signs = tuple(int(s) for s in signs)
    if any(s not in (1, -1) for s in signs):
        raise FactorGraphError("SignedConservation 系数只能为 ±1")
    return Factor(
        scope=tuple(scope),
        eq_rows=((signs, demand),),
        hint=FactorHint(HintKind.SIGNED_CONSERVATION, bound=demand, signs=signs),
    )


def _cyclic_distance(a: int, b: int, length: int) -> int:
    gap = abs(a - b) % length
    return min(gap, length - gap)


def blossom_signs(length: int) -> tuple[tuple[int, ...], ...]:
    """奇环上每条边 e=(k, k+1) 对应的符号行 (−1)^{d_C(u, e)}。"""

    rows = []
    for k in range(length):
        a, b = k, (k + 1) % length
        row = []
        for j in range(length):
            dist = min(_cyclic_distance(j, a, length), _cyclic_distance(j, b, length))
            row.append(1 if dist % 2 == 0 else -1)
        rows.append(tuple(row))
    return tuple(rows)


def odd_cycle_blossom(scope: Sequence[int]) -> Factor:
    """scope 按环上顺序给出 y_{(v_C, u)}；奇偶行取值于 [0, 2]，预算行 Σy ≤ |C| − 1。"""

    length = len(scope)
    if length < 3 or length % 2 == 0:
        raise FactorGraphError(f"blossom 因子需要长度为奇数且 ≥ 3 的环，得到 {length}")
    ineq_rows: list[Row] = []
    for signs in blossom_signs(length):
        ineq_rows.append((signs, 0))
        ineq_rows.append((tuple(-s for s in signs), -2))
    ineq_rows.append(((-1,) * length, -(length - 1)))
    return Factor(
        scope=tuple(scope),
        ineq_rows=tuple(ineq_rows),
        hint=FactorHint(HintKind.ODD_CYCLE_BLOSSOM, cycle_length=length),
    )


def generic_factor(
    scope: Sequence[int],
    eq_rows: Iterable[Row] = (),
    ineq_rows: Iterable[Row] = (),
) -> Factor:
    return Factor(
        scope=tuple(scope),
        eq_rows=tuple((tuple(int(c) for c in coeffs), int(rhs)) for coeffs, rhs in eq_rows),
        ineq_rows=tuple((tuple(int(c) for c in coeffs), int(rhs)) for coeffs, rhs in ineq_rows),
    )


# ---------------------------------------------------------------------------
# 因子求值


def _rows_hold(factor: Factor, local: Sequence[int]) -> bool:
    for coeffs, rhs in factor.eq_rows:
        if sum(c * x for c, x in zip(coeffs, local)) != rhs:
            return False
    for coeffs, rhs in factor.ineq_rows:
        if sum(c * x for c, x in zip(coeffs, local)) < rhs:
            return False
    return True


def eval_factor(factor: Factor, local: Sequence[int]) -> bool:
    """ψ_α(x_α)：所有等式行取等、所有不等式行成立时为真。"""

    if len(local) != factor.size:
        raise LengthMismatch(f"局部赋值长度 {len(local)} 与作用域大小 {factor.size} 不一致")
    return _rows_hold(factor, local)


def _blossom_runs_even(local: Sequence[int]) -> bool:
    length = len(local)
    ones = sum(local)
    if ones == length:
        return False
    if ones == 0:
        return True
    start = next(j for j in range(length) if local[j] == 0)
    run = 0
    for step in range(1, length + 1):
        if local[(start + step) % length]:
            run += 1
        else:
            if run % 2:
                return False
            run = 0
    return True


def hint_accepts(factor: Factor, local: Sequence[int]) -> bool:
    """只通过 hint 判断可行性（与行系统互相独立）。"""

    hint = factor.hint
    if hint.kind is HintKind.GENERIC:
        return _rows_hold(factor, local)
    if hint.kind is HintKind.DEGREE_EQ:
        return sum(local) == hint.bound
    if hint.kind is HintKind.DEGREE_LE:
        return sum(local) <= hint.bound
    if hint.kind is HintKind.DEGREE_GE:
        return sum(local) >= hint.bound
    if hint.kind is HintKind.SIGNED_CONSERVATION:
        return sum(s * x for s, x in zip(hint.signs, local)) == hint.bound
    if hint.kind is HintKind.ODD_CYCLE_BLOSSOM:
        return _blossom_runs_even(local)
    raise FactorGraphError(f"未知 hint 类型 {hint.kind}")


def _hint_feasible(hint: FactorHint, size: int) -> bool:
    """大作用域因子的可行性证明：只依赖 hint 参数。"""

    if hint.kind is HintKind.DEGREE_EQ:
        return 0 <= hint.bound <= size
    if hint.kind is HintKind.DEGREE_LE:
        return hint.bound >= 0
    if hint.kind is HintKind.DEGREE_GE:
        return hint.bound <= size
    if hint.kind is HintKind.SIGNED_CONSERVATION:
        pos = sum(1 for s in hint.signs if s > 0)
        neg = len(hint.signs) - pos
        return -neg <= hint.bound <= pos
    if hint.kind is HintKind.ODD_CYCLE_BLOSSOM:
        return True
    return False


def _bits(start: int, stop: int, size: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(size, dtype=np.int64)) & 1).astype(np.int64)


def _row_matrix(rows: tuple[Row, ...], size: int) -> tuple[np.ndarray, np.ndarray]:
    if not rows:
        return np.zeros((0, size), dtype=np.int64), np.zeros(0, dtype=np.int64)
    coeffs = np.array([r[0] for r in rows], dtype=np.int64)
    rhs = np.array([r[1] for r in rows], dtype=np.int64)
    return coeffs, rhs


def feasible_table(factor: Factor) -> np.ndarray:
    """分批枚举 {0,1}^{|α|}，返回所有满足行系统的局部赋值。"""

    size = factor.size
    eq_c, eq_d = _row_matrix(factor.eq_rows, size)
    in_a, in_b = _row_matrix(factor.ineq_rows, size)
    total = 1 << size
    chunk = 1 << _CHUNK_BITS
    kept: list[np.ndarray] = []
    for start in range(0, total, chunk):
        bits = _bits(start, min(total, start + chunk), size)
        ok = np.ones(bits.shape[0], dtype=bool)
        if eq_c.shape[0]:
            ok &= np.all(bits @ eq_c.T == eq_d, axis=1)
        if in_a.shape[0]:
            ok &= np.all(bits @ in_a.T >= in_b, axis=1)
        if ok.any():
            kept.append(bits[ok].astype(np.uint8))
    if not kept:
        return np.zeros((0, size), dtype=np.uint8)
    table = np.concatenate(kept, axis=0)
    table.setflags(write=False)
    return table


def feasible_set(factor: Factor) -> frozenset[Assignment]:
    """可行局部赋值集合，供条件检查使用。"""

    if factor.table is None:
        raise ScopeTooLarge(f"作用域大小 {factor.size} 超出穷举上限，没有可行赋值表")
    return frozenset(tuple(int(x) for x in row) for row in factor.table)


def _verify_hint(factor_id: int, factor: Factor, table: np.ndarray) -> None:
    feasible = {tuple(int(x) for x in row) for row in table}
    for code in range(1 << factor.size):
        local = tuple((code >> j) & 1 for j in range(factor.size))
        if hint_accepts(factor, local) != (local in feasible):
            raise HintMismatch(f"因子 {factor_id} 的 hint {factor.hint.kind.value} 与行系统在 {local} 处不一致")


def _check_factor_shape(factor_id: int, factor: Factor, num_vars: int) -> None:
    if factor.size < 2:
        raise ScopeTooSmall(f"因子 {factor_id} 的作用域大小为 {factor.size}，至少需要 2")
    if len(set(factor.scope)) != factor.size:
        raise BadReference(f"因子 {factor_id} 的作用域包含重复变量")
    for var in factor.scope:
        if not 0 <= var < num_vars:
            raise BadReference(f"因子 {factor_id} 引用了越界变量 {var}")
    for coeffs, _ in factor.eq_rows + factor.ineq_rows:
        if len(coeffs) != factor.size:
            raise LengthMismatch(f"因子 {factor_id} 的约束行长度与作用域不一致")
    hint = factor.hint
    if hint.kind is HintKind.SIGNED_CONSERVATION and len(hint.signs) != factor.size:
        raise LengthMismatch(f"因子 {factor_id} 的符号向量长度与作用域不一致")
    if hint.kind is HintKind.ODD_CYCLE_BLOSSOM and hint.cycle_length != factor.size:
        raise LengthMismatch(f"因子 {factor_id} 的环长与作用域不一致")


def build_graph(
    num_vars: int,
    weights: Sequence[float],
    sense: Sense | str,
    factors: Sequence[Factor],
    *,
    verify: bool = False,
    exhaustive_max_scope: int = 20,
    generic_max_scope: int = 25,
) -> FactorGraph:
    """构建不可变的因子图；只检查单个因子的可行性，不检查全局可行性。"""

    sense = Sense(sense)
    if num_vars < 0:
        raise FactorGraphError("变量个数不能为负")
    w = np.asarray(list(weights), dtype=float)
    if w.shape != (num_vars,):
        raise LengthMismatch(f"权重个数 {w.shape[0]} 与变量个数 {num_vars} 不一致")
    if not np.all(np.isfinite(w)):
        raise FactorGraphError("权重必须是有限实数")
    if sense is Sense.MAXIMIZE:
        w = -w
    w.setflags(write=False)

    built: list[Factor] = []
    for factor_id, factor in enumerate(factors):
        _check_factor_shape(factor_id, factor, num_vars)
        size = factor.size
        table = None
        if size <= exhaustive_max_scope or (factor.hint.kind is HintKind.GENERIC and size <= generic_max_scope):
            table = feasible_table(factor)
            if table.shape[0] == 0:
                raise InfeasibleFactor(factor_id)
            if verify and factor.hint.kind is not HintKind.GENERIC and size <= exhaustive_max_scope:
                _verify_hint(factor_id, factor, table)
        elif factor.hint.kind is HintKind.GENERIC:
            raise ScopeTooLarge(f"Generic 因子 {factor_id} 的作用域 {size} 超过上限 {generic_max_scope}，需要提供 hint")
        elif not _hint_feasible(factor.hint, size):
            raise InfeasibleFactor(factor_id)
        built.append(replace(factor, table=table))

    adjacency: list[list[int]] = [[] for _ in range(num_vars)]
    offsets: list[int] = []
    pair_var: list[int] = []
    var_pairs: list[list[int]] = [[] for _ in range(num_vars)]
    for factor_id, factor in enumerate(built):
        offsets.append(len(pair_var))
        for var in factor.scope:
            adjacency[var].append(factor_id)
            var_pairs[var].append(len(pair_var))
            pair_var.append(var)

    pair_arr = np.asarray(pair_var, dtype=np.int64)
    pair_arr.setflags(write=False)
    logger.debug("构建因子图：%d 个变量，%d 个因子，%d 个有向对", num_vars, len(built), len(pair_var))
    return FactorGraph(
        num_vars=num_vars,
        weights=w,
        sense=sense,
        factors=tuple(built),
        adjacency=tuple(tuple(a) for a in adjacency),
        offsets=tuple(offsets),
        pair_var=pair_arr,
        var_pairs=tuple(tuple(p) for p in var_pairs),
    )


def with_weights(graph: FactorGraph, weights: Sequence[float]) -> FactorGraph:
    """替换报告方向的权重，因子与邻接结构保持不变。"""

    w = np.asarray(list(weights), dtype=float)
    if w.shape != (graph.num_vars,):
        raise LengthMismatch(f"权重个数 {w.shape[0]} 与变量个数 {graph.num_vars} 不一致")
    if not np.all(np.isfinite(w)):
        raise FactorGraphError("权重必须是有限实数")
    if graph.sense is Sense.MAXIMIZE:
        w = -w
    w.setflags(write=False)
    return replace(graph, weights=w)


def local_assignment(factor: Factor, assignment: Sequence[int]) -> Assignment:
    return tuple(int(assignment[v]) for v in factor.scope)


def eval_global(graph: FactorGraph, assignment: Sequence[int]) -> GlobalEval:
    """全局可行性；可行时给出报告方向上的目标值 w·x。"""

    if len(assignment) != graph.num_vars:
        raise LengthMismatch(f"赋值长度 {len(assignment)} 与变量个数 {graph.num_vars} 不一致")
    for factor_id, factor in enumerate(graph.factors):
        if not _rows_hold(factor, local_assignment(factor, assignment)):
            return GlobalEval(feasible=False, violated=factor_id)
    x = np.asarray(assignment, dtype=float)
    objective = float(graph.reporting_weights @ x) if graph.num_vars else 0.0
    return GlobalEval(feasible=True, objective=objective)


# ---------------------------------------------------------------------------
# max-marginal：max_{z_α: z_i=c} Σ_{j≠i, z_j=1} λ_j
#
# 内部以 (+∞ 项个数, 有限部分之和) 按字典序比较；含 −∞ 项的补全记为 _INFEASIBLE。
# 两个都含 +∞ 的切片相减时比较个数，个数相同则取有限部分之差。

LexValue = tuple[float, float]

_ZERO: LexValue = (0.0, 0.0)
_INFEASIBLE: LexValue = (NEG_INF, 0.0)


def _lift(value: float) -> LexValue:
    if value == NEG_INF:
        return _INFEASIBLE
    if value == POS_INF:
        return (1.0, 0.0)
    return (0.0, value)


def _lex_add(a: LexValue, b: LexValue) -> LexValue:
    if a[0] == NEG_INF or b[0] == NEG_INF:
        return _INFEASIBLE
    return (a[0] + b[0], a[1] + b[1])


def _lex_sum(values: Iterable[LexValue]) -> LexValue:
    total = _ZERO
    for value in values:
        total = _lex_add(total, value)
        if total[0] == NEG_INF:
            return _INFEASIBLE
    return total


def _lex_float(value: LexValue) -> float:
    count, finite = value
    if count == NEG_INF:
        return NEG_INF
    return POS_INF if count > 0 else finite


def _lex_ratio(one: LexValue, zero: LexValue) -> float:
    """M(1) ⊖ M(0)：任一切片不可行时按 −∞ 规则；否则先比 +∞ 个数。"""

    if one[0] == NEG_INF:
        return NEG_INF
    if zero[0] == NEG_INF:
        return POS_INF
    if one[0] != zero[0]:
        return POS_INF if one[0] > zero[0] else NEG_INF
    return one[1] - zero[1]


def _generic_lex(factor: Factor, pinned: int, value: int, lam: Sequence[LexValue]) -> LexValue:
    if factor.table is None:
        raise ScopeTooLarge(f"作用域大小 {factor.size} 没有可行赋值表")
    rows = factor.table[factor.table[:, pinned] == value].astype(bool)
    if rows.shape[0] == 0:
        return _INFEASIBLE
    counts = np.array([c for c, _ in lam], dtype=float)
    finite = np.array([f for _, f in lam], dtype=float)
    counts[pinned] = 0.0
    finite[pinned] = 0.0
    blocked = (rows & np.isneginf(counts)[None, :]).any(axis=1)
    if blocked.all():
        return _INFEASIBLE
    rows = rows[~blocked]
    pos = rows.astype(np.int64) @ (counts > 0).astype(np.int64)
    sums = np.where(rows, finite[None, :], 0.0).sum(axis=1)
    best = pos.max()
    return (float(best), float(sums[pos == best].max()))


def generic_max_marginal(factor: Factor, pinned: int, value: int, incoming: Sequence[float]) -> float:
    """通过可行赋值表枚举得到的参考值。"""

    return _lex_float(_generic_lex(factor, pinned, value, [_lift(float(v)) for v in incoming]))


def _top(values: list[LexValue], count: int) -> LexValue:
    if count < 0 or count > len(values):
        return _INFEASIBLE
    return _lex_sum(values[:count])


def _path_matching(values: list[LexValue]) -> LexValue:
    """路径上相邻配对的最大权匹配，配对权重为两端 λ 之和。"""

    prev2, prev1 = _ZERO, _ZERO
    for k in range(1, len(values)):
        pair = _lex_add(values[k - 1], values[k])
        current = max(prev1, _lex_add(prev2, pair))
        prev2, prev1 = prev1, current
    return prev1


def _blossom_lex(pinned: int, value: int, lam: list[LexValue]) -> LexValue:
    length = len(lam)

    def path(first: int, count: int) -> list[LexValue]:
        return [lam[(first + step) % length] for step in range(count)]

    if value == 0:
        return _path_matching(path(pinned + 1, length - 1))
    right = _lex_add(lam[(pinned + 1) % length], _path_matching(path(pinned + 2, length - 2)))
    left = _lex_add(lam[(pinned - 1) % length], _path_matching(path(pinned + 1, length - 2)))
    return max(left, right)


def _max_marginal_lex(factor: Factor, pinned: int, value: int, lam: list[LexValue]) -> LexValue:
    hint = factor.hint
    others = sorted((lam[j] for j in range(factor.size) if j != pinned), reverse=True)

    if hint.kind is HintKind.DEGREE_EQ:
        return _top(others, hint.bound - value)
    if hint.kind is HintKind.DEGREE_LE:
        limit = hint.bound - value
        if limit < 0:
            return _INFEASIBLE
        return _lex_sum(v for v in others[:limit] if v > _ZERO)
    if hint.kind is HintKind.DEGREE_GE:
        need = max(hint.bound - value, 0)
        if need > len(others):
            return _INFEASIBLE
        return _lex_sum(others[:need] + [v for v in others[need:] if v > _ZERO])
    if hint.kind is HintKind.SIGNED_CONSERVATION:
        residual = hint.bound - hint.signs[pinned] * value
        pos = sorted((lam[j] for j in range(factor.size) if j != pinned and hint.signs[j] > 0), reverse=True)
        neg = sorted((lam[j] for j in range(factor.size) if j != pinned and hint.signs[j] < 0), reverse=True)
        best = _INFEASIBLE
        for count in range(max(0, residual), min(len(pos), len(neg) + residual) + 1):
            best = max(best, _lex_sum(pos[:count] + neg[: count - residual]))
        return best
    if hint.kind is HintKind.ODD_CYCLE_BLOSSOM:
        cycle = list(lam)
        cycle[pinned] = _ZERO
        return _blossom_lex(pinned, value, cycle)
    return _generic_lex(factor, pinned, value, lam)


def _lifted(factor: Factor, incoming: Sequence[float]) -> list[LexValue]:
    lam = [_lift(float(v)) for v in incoming]
    if len(lam) != factor.size:
        raise LengthMismatch(f"输入消息个数 {len(lam)} 与作用域大小 {factor.size} 不一致")
    return lam


def factor_max_marginal(factor: Factor, pinned: int, value: int, incoming: Sequence[float]) -> float:
    """log 域因子到变量消息的一个分量；无可行补全时返回 −∞。"""

    return _lex_float(_max_marginal_lex(factor, pinned, value, _lifted(factor, incoming)))


def factor_messages(factor: Factor, incoming: Sequence[float]) -> list[float]:
    """一个因子发往其作用域内全部变量的 log-ratio 消息 M(·,1) ⊖ M(·,0)。"""

    lam = _lifted(factor, incoming)
    return [
        _lex_ratio(
            _max_marginal_lex(factor, pinned, 1, lam),
            _max_marginal_lex(factor, pinned, 0, lam),
        )
        for pinned in range(factor.size)
    ]


__all__ = [
    "NEG_INF",
    "POS_INF",
    "Assignment",
    "Row",
    "FactorGraphError",
    "InfeasibleFactor",
    "ScopeTooSmall",
    "BadReference",
    "ScopeTooLarge",
    "LengthMismatch",
    "HintMismatch",
    "Sense",
    "HintKind",
    "FactorHint",
    "GENERIC_HINT",
    "Factor",
    "FactorGraph",
    "GlobalEval",
    "ext_sum",
    "degree_eq",
    "degree_le",
    "degree_ge",
    "signed_conservation",
    "blossom_signs",
    "odd_cycle_blossom",
    "generic_factor",
    "eval_factor",
    "hint_accepts",
    "feasible_table",
    "feasible_set",
    "build_graph",
    "with_weights",
    "local_assignment",
    "eval_global",
    "generic_max_marginal",
    "factor_max_marginal",
    "factor_messages",
]
