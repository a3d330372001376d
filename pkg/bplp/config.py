"""项目级配置常量与初始化辅助函数。"""

import copy
import os


DEFAULT_PRESET_NAME = "default"
# 默认配置文件名，可根据需要在 presets 中新增不同方案
DEFAULT_PRESET_FILENAME = "default.yaml"

# 环境变量：指向单个配置文件 / 预设目录 / 日志级别
CONFIG_PATH_ENV = "BPLP_CONFIG"
PRESETS_ROOT_ENV = "BPLP_PRESETS"
LOG_LEVEL_ENV = "BPLP_LOG_LEVEL"

INSTANCE_FILE_VERSION = 1
RUN_REPORT_SCHEMA = "bplp.run_report/1"
BENCH_REPORT_SCHEMA = "bplp.bench_report/1"

# 若预设文件缺失或字段不全，使用该结构作为兜底
FALLBACK_CONFIG: dict[str, dict] = {
    "bp": {
        "max_iters": 1000,
        "residual_tol": 1e-9,
        "tie_tol": 1e-9,
        "stable_window": 5,
        "decode_patience": 200,
        "init": "uniform",
        "init_range": 1.0,
        "init_seed": 0,
        "workers": 1,
    },
    "factor_graph": {
        # Generic 枚举求值的上限；超过必须提供 hint
        "generic_max_scope": 25,
        # 构建时穷举可行性 / hint 校验的上限
        "exhaustive_max_scope": 20,
        "verify_hints": False,
    },
    "oracles": {
        "map_max_vars": 25,
        "vertex_max_dim": 10,
        "vertex_max_rows": 24,
        "matching_max_nodes": 12,
    },
    "checkers": {
        "c3_cap": 16,
    },
    "noise": {
        # 默认噪声幅度 = relative × 最小正权重差
        "relative": 1e-3,
    },
}

CONFIG_SECTIONS = tuple(FALLBACK_CONFIG)


def presets_root() -> str:
    """确定 YAML 预设所在目录。"""

    root = os.environ.get(PRESETS_ROOT_ENV)
    if root:
        return root
    return os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "presets"))


def config_path() -> str:
    """返回默认配置文件路径，环境变量 BPLP_CONFIG 优先。"""

    override = (os.environ.get(CONFIG_PATH_ENV) or "").strip()
    if override:
        return override
    return os.path.join(presets_root(), DEFAULT_PRESET_FILENAME)


def fallback_config() -> dict[str, dict]:
    """返回兜底配置的深拷贝，避免调用方修改全局常量。"""

    return copy.deepcopy(FALLBACK_CONFIG)


__all__ = [
    "DEFAULT_PRESET_NAME",
    "DEFAULT_PRESET_FILENAME",
    "CONFIG_PATH_ENV",
    "PRESETS_ROOT_ENV",
    "LOG_LEVEL_ENV",
    "INSTANCE_FILE_VERSION",
    "RUN_REPORT_SCHEMA",
    "BENCH_REPORT_SCHEMA",
    "FALLBACK_CONFIG",
    "CONFIG_SECTIONS",
    "presets_root",
    "config_path",
    "fallback_config",
]
