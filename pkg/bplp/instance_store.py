"""实例文件（YAML）的读写与规范化。

权重与噪声幅度以十进制字符串保存；无法用有限小数表示的有理数写成 ``p/q``。
"""

from __future__ import annotations

import io
import os
import tempfile
from fractions import Fraction

import yaml
from ruamel.yaml import YAML

from .config import INSTANCE_FILE_VERSION
from .problems import (
    DIRECTED_KINDS,
    Edge,
    InstanceParams,
    NoiseSpec,
    ProblemInstance,
    ProblemKind,
)

load_yaml = yaml.safe_load

# 统一 YAML 输出格式，确保缩进与换行一致
_yaml_writer = YAML()
_yaml_writer.default_flow_style = False
_yaml_writer.allow_unicode = True
_yaml_writer.indent(mapping=2, sequence=4, offset=2)
_yaml_writer.width = 4096


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed; carries the 1-based line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        location = f"第 {line} 行第 {column} 列：" if line is not None else ""
        super().__init__(f"{location}{message}")
        self.line = line
        self.column = column


def format_fraction(value: Fraction) -> str:
    """有限小数写成十进制字符串，否则写成 p/q。"""

    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    digits = max(twos, fives)
    scaled = abs(value.numerator) * 10**digits // value.denominator
    sign = "-" if value < 0 else ""
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0')}"


def parse_fraction(value, field_name: str) -> Fraction:
    if isinstance(value, bool):
        raise InstanceFormatError(f"{field_name} 不是数值")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceFormatError(f"{field_name} 无法解析为有理数：{value!r}") from exc
    raise InstanceFormatError(f"{field_name} 不是数值")


def _as_int(value, field_name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFormatError(f"{field_name} 必须是整数")
    return value


def _int_list(value, field_name: str) -> tuple[int, ...]:
    if value is None:
        return ()
    if not isinstance(value, list):
        raise InstanceFormatError(f"{field_name} 必须是列表")
    return tuple(_as_int(item, f"{field_name}[{i}]") for i, item in enumerate(value))


def _canonicalize_instance(data) -> dict:
    """统一实例结构：补齐缺省字段、规范类型名称，便于后续构造。"""

    if not isinstance(data, dict):
        raise InstanceFormatError("实例文件顶层必须是映射")
    version = data.get("version", INSTANCE_FILE_VERSION)
    if version != INSTANCE_FILE_VERSION:
        raise InstanceFormatError(f"不支持的实例文件版本 {version!r}")
    kind_text = str(data.get("kind") or "").strip().lower().replace("-", "_")
    try:
        kind = ProblemKind(kind_text)
    except ValueError as exc:
        raise InstanceFormatError(f"未知的问题类型 {data.get('kind')!r}") from exc

    edges = data.get("edges") or []
    if not isinstance(edges, list):
        raise InstanceFormatError("edges 必须是列表")
    canonical_edges = []
    for i, entry in enumerate(edges):
        if isinstance(entry, list) and len(entry) in (3, 4):
            entry = dict(zip(("u", "v", "weight", "directed"), entry))
        if not isinstance(entry, dict):
            raise InstanceFormatError(f"edges[{i}] 必须是映射")
        if "u" not in entry or "v" not in entry:
            raise InstanceFormatError(f"edges[{i}] 缺少端点")
        canonical_edges.append(
            {
                "u": _as_int(entry["u"], f"edges[{i}].u"),
                "v": _as_int(entry["v"], f"edges[{i}].v"),
                "weight": parse_fraction(entry.get("weight", 0), f"edges[{i}].weight"),
                "directed": bool(entry.get("directed", kind in DIRECTED_KINDS)),
            }
        )

    params = data.get("params") or {}
    if not isinstance(params, dict):
        raise InstanceFormatError("params 必须是映射")
    cycles = params.get("odd_cycles") or []
    if not isinstance(cycles, list):
        raise InstanceFormatError("params.odd_cycles 必须是列表")

    noise = data.get("noise") or {}
    if not isinstance(noise, dict):
        raise InstanceFormatError("noise 必须是映射")

    return {
        "version": INSTANCE_FILE_VERSION,
        "kind": kind,
        "num_nodes": _as_int(data.get("num_nodes", 0), "num_nodes"),
        "edges": canonical_edges,
        "params": {
            "source": None if params.get("source") is None else _as_int(params["source"], "params.source"),
            "sink": None if params.get("sink") is None else _as_int(params["sink"], "params.sink"),
            "odd_cycles": tuple(_int_list(c, f"params.odd_cycles[{i}]") for i, c in enumerate(cycles)),
            "budgets": _int_list(params.get("budgets"), "params.budgets"),
            "demands": _int_list(params.get("demands"), "params.demands"),
            "capacities": _int_list(params.get("capacities"), "params.capacities"),
        },
        "noise": {
            "seed": _as_int(noise.get("seed", 0), "noise.seed"),
            "magnitude": parse_fraction(noise.get("magnitude", 0), "noise.magnitude"),
        },
    }


def instance_from_dict(data) -> ProblemInstance:
    canonical = _canonicalize_instance(data)
    return ProblemInstance(
        kind=canonical["kind"],
        num_nodes=canonical["num_nodes"],
        edges=tuple(Edge(**edge) for edge in canonical["edges"]),
        params=InstanceParams(**canonical["params"]),
        noise=NoiseSpec(**canonical["noise"]),
    )


def instance_to_dict(instance: ProblemInstance) -> dict:
    params = instance.params
    out_params: dict = {}
    if params.source is not None:
        out_params["source"] = params.source
    if params.sink is not None:
        out_params["sink"] = params.sink
    if params.odd_cycles:
        out_params["odd_cycles"] = [list(c) for c in params.odd_cycles]
    for key in ("budgets", "demands", "capacities"):
        values = getattr(params, key)
        if values:
            out_params[key] = list(values)
    return {
        "version": INSTANCE_FILE_VERSION,
        "kind": instance.kind.value,
        "num_nodes": instance.num_nodes,
        "edges": [
            {"u": e.u, "v": e.v, "weight": format_fraction(e.weight), "directed": e.directed}
            for e in instance.edges
        ],
        "params": out_params,
        "noise": {"seed": instance.noise.seed, "magnitude": format_fraction(instance.noise.magnitude)},
    }


def parse_instance(text: str) -> ProblemInstance:
    try:
        data = load_yaml(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None) or getattr(exc, "context_mark", None)
        if mark is not None:
            raise InstanceFormatError(str(getattr(exc, "problem", None) or exc), mark.line + 1, mark.column + 1) from exc
        raise InstanceFormatError(str(exc)) from exc
    return instance_from_dict(data)


def serialize_instance(instance: ProblemInstance) -> str:
    buffer = io.StringIO()
    _yaml_writer.dump(instance_to_dict(instance), buffer)
    return buffer.getvalue()


def load_instance(path: str) -> ProblemInstance:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InstanceFormatError(f"无法读取实例文件 {path}: {exc}") from exc
    return parse_instance(text)


def save_instance(instance: ProblemInstance, path: str) -> None:
    """先写临时文件再替换，避免写到一半的文件。"""

    text = serialize_instance(instance)
    load_yaml(text)
    directory = os.path.dirname(os.path.abspath(path))
    tmp_fd, tmp_path = tempfile.mkstemp(prefix="instance_", suffix=".yaml", dir=directory)
    try:
        with os.fdopen(tmp_fd, "w", encoding="utf-8") as tmp_file:
            tmp_file.write(text)
        os.replace(tmp_path, path)
    finally:
        try:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
        except OSError:
            pass


__all__ = [
    "InstanceFormatError",
    "format_fraction",
    "parse_fraction",
    "instance_from_dict",
    "instance_to_dict",
    "parse_instance",
    "serialize_instance",
    "load_instance",
    "save_instance",
]
