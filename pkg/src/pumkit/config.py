"""Run configuration loaded from `key = value` text files.

Keys are namespaced (`subarray.rows`, `cost.t_aap_ns`,
`classify.mpki_high`); '#' starts a comment.  Command-line `--set`
overrides are applied after the file.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classifier import Thresholds
from .codegen import SubarrayConfig
from .costmodel import CostParams
from .errors import ConfigError

_KEY_TYPES = {
    "subarray.rows": int,
    "subarray.columns": int,
    "subarray.data_rows": int,
    "cost.t_aap_ns": float,
    "cost.t_tra_ns": float,
    "cost.e_act_pj": float,
    "cost.e_pre_pj": float,
    "cost.transpose_ns_per_word": float,
    "cost.banks": int,
    "classify.mpki_high": float,
    "classify.locality_high": float,
    "classify.ai_high": float,
    "classify.lfmr_high": float,
    "classify.trend_epsilon": float,
}


@dataclass(frozen=True)
class RunConfig:
    subarray: SubarrayConfig
    cost: CostParams
    thresholds: Thresholds


def parse_config_text(text: str) -> dict[str, float | int]:
    values: dict[str, float | int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _KEY_TYPES[key](val)
        except ValueError as e:
            raise ConfigError(f"line {lineno}: bad value for {key}: {e}") from e
    return values


def load_config(path: str | None = None, overrides: list[str] | None = None) -> RunConfig:
    values: dict[str, float | int] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"bad override {item!r}: expected key=value")
        key, _, val = item.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _KEY_TYPES:
            raise ConfigError(f"unknown key {key!r}")
        try:
            values[key] = _KEY_TYPES[key](val)
        except ValueError as e:
            raise ConfigError(f"bad value for {key}: {e}") from e
    return build_config(values)


def build_config(values: dict[str, float | int]) -> RunConfig:
    sub = SubarrayConfig(
        total_rows=int(values.get("subarray.rows", 512)),
        columns=int(values.get("subarray.columns", 65536)),
        data_row_count=(int(values["subarray.data_rows"])
                        if "subarray.data_rows" in values else None),
    )
    cost = CostParams(
        t_aap_ns=float(values.get("cost.t_aap_ns", 100.0)),
        t_tra_ns=float(values.get("cost.t_tra_ns", 150.0)),
        e_act_pj=float(values.get("cost.e_act_pj", 900.0)),
        e_pre_pj=float(values.get("cost.e_pre_pj", 300.0)),
        transpose_ns_per_word=float(values.get("cost.transpose_ns_per_word", 10.0)),
        banks=int(values.get("cost.banks", 1)),
        columns_per_subarray=sub.columns,
    )
    thresholds = Thresholds(
        mpki_high=float(values.get("classify.mpki_high", 10.0)),
        locality_high=float(values.get("classify.locality_high", 0.1)),
        ai_high=float(values.get("classify.ai_high", 0.25)),
        lfmr_high=float(values.get("classify.lfmr_high", 0.7)),
        trend_epsilon=float(values.get("classify.trend_epsilon", 0.05)),
    )
    return RunConfig(sub, cost, thresholds)
