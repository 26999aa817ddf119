"""Pipeline configuration: one YAML file, defaults at the published working point."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import yaml

from .heuristics import REMARK_KEYWORDS, SET_KEYWORDS, KeywordTable
from .model import Heuristic
from .reliability import DEFAULT_PARAMS, DEFAULT_T_B, DEFAULT_T_R, FilterParams
from .siblings import DEFAULT_MAX_ASNS, DEFAULT_TOP_DOMAINS

CACHE_ENV = "IRRTOR_CACHE_DIR"
REPORT_FORMATS = ("text", "tsv")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    registries: list = field(default_factory=list)  # [(path, registry name)]
    output_dir: Path = Path("out")
    cache_dir: Optional[Path] = None
    remark_keywords: KeywordTable = REMARK_KEYWORDS
    set_keywords: KeywordTable = SET_KEYWORDS
    filters: dict = field(default_factory=lambda: dict(DEFAULT_PARAMS))
    sweep_t_b: tuple = DEFAULT_T_B
    sweep_t_r: tuple = DEFAULT_T_R
    top_domains: int = DEFAULT_TOP_DOMAINS
    max_sibling_asns: int = DEFAULT_MAX_ASNS
    accuracy_floor: float = 0.0
    report_formats: tuple = REPORT_FORMATS
    jobs: int = 1

    @property
    def resolved_cache_dir(self) -> Path:
        if self.cache_dir is not None:
            return self.cache_dir
        env = os.environ.get(CACHE_ENV)
        return Path(env) if env else self.output_dir / "cache"


def _keyword_table(raw: Optional[dict], default: KeywordTable) -> KeywordTable:
    if not raw:
        return default
    unknown = set(raw) - {"p2c", "c2p", "p2p", "plural", "solo", "gated"}
    if unknown:
        raise ConfigError(f"unknown keyword table keys: {sorted(unknown)}")
    return replace(
        default,
        p2c=tuple(w.lower() for w in raw.get("p2c", default.p2c)),
        c2p=tuple(w.lower() for w in raw.get("c2p", default.c2p)),
        p2p=tuple(w.lower() for w in raw.get("p2p", default.p2p)),
        plural=bool(raw.get("plural", default.plural)),
        solo=tuple(w.lower() for w in raw.get("solo", default.solo)),
        gated=bool(raw.get("gated", default.gated)),
    )


def _filter_params(raw: dict, default: FilterParams) -> FilterParams:
    try:
        return FilterParams(int(raw.get("t_b", default.t_b)), float(raw.get("t_r", default.t_r)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad filter thresholds {raw!r}: {exc}") from None


def load_config(path) -> PipelineConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(raw, base=path.parent)


def config_from_dict(raw: dict, base: Path = Path(".")) -> PipelineConfig:
    cfg = PipelineConfig()
    registries = []
    for entry in raw.get("registries", []) or []:
        if not isinstance(entry, dict) or "path" not in entry or "registry" not in entry:
            raise ConfigError(f"registry entries need 'path' and 'registry': {entry!r}")
        registries.append((str((base / entry["path"]).resolve()), str(entry["registry"])))
    cfg.registries = registries
    cfg.output_dir = (base / raw.get("output_dir", "out")).resolve()
    if raw.get("cache_dir"):
        cfg.cache_dir = (base / raw["cache_dir"]).resolve()

    keywords = raw.get("keywords") or {}
    cfg.remark_keywords = _keyword_table(keywords.get("remarks"), REMARK_KEYWORDS)
    cfg.set_keywords = _keyword_table(keywords.get("sets"), SET_KEYWORDS)

    filters = raw.get("filter") or {}
    for h in Heuristic:
        if h.value in filters:
            cfg.filters[h] = _filter_params(filters[h.value] or {}, DEFAULT_PARAMS[h])

    sweep = raw.get("sweep") or {}
    cfg.sweep_t_b = tuple(int(x) for x in sweep.get("t_b", DEFAULT_T_B))
    cfg.sweep_t_r = tuple(float(x) for x in sweep.get("t_r", DEFAULT_T_R))
    for t_b in cfg.sweep_t_b:
        for t_r in cfg.sweep_t_r:
            _filter_params({"t_b": t_b, "t_r": t_r}, FilterParams())

    sib = raw.get("siblings") or {}
    cfg.top_domains = int(sib.get("top_domains", DEFAULT_TOP_DOMAINS))
    cfg.max_sibling_asns = int(sib.get("max_asns", DEFAULT_MAX_ASNS))
    if cfg.top_domains < 0 or cfg.max_sibling_asns < 2:
        raise ConfigError("siblings.top_domains must be >= 0 and siblings.max_asns >= 2")

    ev = raw.get("eval") or {}
    cfg.accuracy_floor = float(ev.get("accuracy_floor", 0.0))
    if not 0 <= cfg.accuracy_floor <= 1:
        raise ConfigError("eval.accuracy_floor must be in [0, 1]")
    formats = tuple(raw.get("report_formats", REPORT_FORMATS))
    if not set(formats) <= set(REPORT_FORMATS):
        raise ConfigError(f"report_formats must be a subset of {REPORT_FORMATS}")
    cfg.report_formats = formats
    cfg.jobs = int(raw.get("jobs", 1))
    return cfg
