"""In-process pipeline stages used by the CLI."""

from __future__ import annotations

import hashlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from . import rpsl
from .config import PipelineConfig
from .heuristics import run_heuristics
from .model import Heuristic
from .reliability import (
    agreement_ratio,
    collect_entity_stats,
    default_grid,
    filter_links,
    link_coverage,
    passing_entities,
    sweep,
)
from .union import unify

log = logging.getLogger(__name__)

CACHE_VERSION = "1"


def _file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def corpus_digest(registries) -> str:
    """Content address of a manifest: parser version plus each file's registry and digest."""
    h = hashlib.sha256(f"irrtor-corpus {rpsl.CACHE_MAGIC} {CACHE_VERSION}\n".encode())
    for path, registry in registries:
        h.update(f"{registry}\t{_file_digest(path)}\n".encode())
    return h.hexdigest()[:20]


def cache_path(cfg: PipelineConfig, digest: str) -> Path:
    return cfg.resolved_cache_dir / f"corpus-{digest}.txt"


@dataclass
class IngestResult:
    corpus: rpsl.Corpus
    path: Path
    stats: dict = field(default_factory=dict)
    cached: bool = False


def ingest(cfg: PipelineConfig, force: bool = False) -> IngestResult:
    if not cfg.registries:
        raise ValueError("the registry manifest is empty")
    digest = corpus_digest(cfg.registries)
    path = cache_path(cfg, digest)
    if path.exists() and not force:
        with open(path, encoding="utf-8") as fh:
            return IngestResult(rpsl.load_corpus(fh), path, cached=True)
    corpus, stats = rpsl.load_manifest(cfg.registries, jobs=cfg.jobs)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        rpsl.dump_corpus(corpus, fh)
    tmp.replace(path)
    return IngestResult(corpus, path, stats)


@dataclass
class ClassifyResult:
    observations: dict
    entities: dict
    filtered: dict
    records: list
    stats: Counter


def compute_entities(observations: dict) -> dict:
    ie = observations[Heuristic.IMPORT_EXPORT]
    return {h: collect_entity_stats(obs, ie) for h, obs in observations.items()}


def classify(corpus: rpsl.Corpus, cfg: PipelineConfig) -> ClassifyResult:
    stats: Counter = Counter()
    observations = run_heuristics(corpus, cfg.remark_keywords, cfg.set_keywords, stats)
    entities = compute_entities(observations)
    filtered = {h: filter_links(observations[h], entities[h], cfg.filters[h]) for h in Heuristic}
    records = unify(filtered[Heuristic.IMPORT_EXPORT], filtered[Heuristic.REMARKS], filtered[Heuristic.SETS])
    for key, value in sorted(stats.items()):
        log.info("classify: %s = %d", key, value)
    return ClassifyResult(observations, entities, filtered, records, stats)


def heuristic_summary(result: ClassifyResult, cfg: PipelineConfig) -> list:
    rows = []
    for h in Heuristic:
        params = cfg.filters[h]
        ents = list(result.entities[h].values())
        rows.append(
            {
                "heuristic": h,
                "t_b": params.t_b,
                "t_r": params.t_r,
                "entities": len(ents),
                "passing": len(passing_entities(ents, params)),
                "observations": len(result.observations[h]),
                "R": agreement_ratio(ents, params),
                "C": link_coverage(ents, params),
                "filtered_links": len(result.filtered[h]),
            }
        )
    return rows


def run_sweep(corpus: rpsl.Corpus, cfg: PipelineConfig, grid=None) -> list:
    observations = run_heuristics(corpus, cfg.remark_keywords, cfg.set_keywords)
    entities = compute_entities(observations)
    return sweep(entities, grid or default_grid(cfg.sweep_t_b, cfg.sweep_t_r))
