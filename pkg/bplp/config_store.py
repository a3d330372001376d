"""用于从磁盘加载 YAML 配置预设的工具函数。"""

import copy
import logging
import os
from functools import lru_cache

import yaml

from .config import (
    CONFIG_SECTIONS,
    DEFAULT_PRESET_NAME,
    config_path,
    fallback_config,
    presets_root,
)

logger = logging.getLogger(__name__)


def _merge_section(base: dict, override: object) -> dict:
    """按键覆盖兜底值；类型不一致的键保持兜底值。"""

    merged = dict(base)
    if not isinstance(override, dict):
        return merged
    for key, value in override.items():
        if key not in base:
            logger.warning("忽略未知配置项 %s", key)
            continue
        fallback = base[key]
        if isinstance(fallback, bool):
            if isinstance(value, bool):
                merged[key] = value
        elif isinstance(fallback, (int, float)) and not isinstance(fallback, bool):
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                merged[key] = float(value) if isinstance(fallback, float) else int(value)
        elif isinstance(fallback, str):
            merged[key] = str(value)
        else:
            merged[key] = value
    return merged


@lru_cache(maxsize=8)
def _read_config(path: str) -> dict[str, dict]:
    config = fallback_config()
    try:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle) or {}
            if not isinstance(data, dict):
                logger.warning("配置文件 %s 顶层不是映射，使用默认配置", path)
                return config
            for section in CONFIG_SECTIONS:
                config[section] = _merge_section(config[section], data.get(section))
        else:
            logger.debug("配置文件 %s 不存在，使用默认配置", path)
    except (OSError, yaml.YAMLError) as exc:
        logger.warning("加载配置失败 %s: %s", path, exc)
    return config


def load_config(path: str | None = None) -> dict[str, dict]:
    """从 YAML 载入配置；缺失的分节或字段回退到默认值。

    最近读取的文件由 ``@lru_cache`` 缓存；每次返回缓存结果的深拷贝，调用方可以随意修改。
    """

    return copy.deepcopy(_read_config(path or config_path()))


def load_preset(name: str = DEFAULT_PRESET_NAME) -> dict[str, dict]:
    """按名称读取 presets 目录下的预设。"""

    filename = name if name.lower().endswith((".yaml", ".yml")) else f"{name}.yaml"
    return load_config(os.path.join(presets_root(), filename))


def refresh_config_cache() -> None:
    """清空 LRU 缓存，编辑配置文件后调用即可强制重新加载。"""

    _read_config.cache_clear()


def list_presets() -> list[dict[str, str]]:
    """列出可用预设文件及其说明。"""

    root = presets_root()
    presets: list[dict[str, str]] = []
    if not os.path.isdir(root):
        return presets
    for fname in sorted(os.listdir(root)):
        if not fname.lower().endswith((".yaml", ".yml")):
            continue
        path = os.path.join(root, fname)
        try:
            with open(path, "r", encoding="utf-8") as handle:
                raw = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as exc:
            logger.warning("读取预设失败 %s: %s", path, exc)
            continue
        description = str(raw.get("description") or "").strip() if isinstance(raw, dict) else ""
        presets.append({"name": os.path.splitext(fname)[0], "path": path, "description": description})
    return presets


__all__ = [
    "load_config",
    "load_preset",
    "refresh_config_cache",
    "list_presets",
]
