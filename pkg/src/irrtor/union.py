"""Combine the per-heuristic filtered links into one ToR database."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .model import HEURISTIC_ORDER, GradedLink, Heuristic, Relation


class Decision(str, enum.Enum):
    MAJORITY = "majority"
    HIGHEST_GRADE = "highest_grade"
    BIDIR_COUNT = "bidir_count"
    IE_DEFAULT = "ie_default"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TorRecord:
    a: int
    b: int
    relation: Relation  # role of a
    reliability: Fraction
    sources: frozenset
    decided_by: Decision


def decide(candidates: list) -> tuple:
    """Pick ``(relation, reliability, decision)`` for one link.

    ``candidates`` holds at most one ``GradedLink`` per heuristic, all oriented
    the same way.
    """
    votes = Counter(c.relation for c in candidates)
    relation, count = max(votes.items(), key=lambda kv: (kv[1], kv[0].value))
    if count >= 2:
        return relation, Fraction(1), Decision.MAJORITY
    top = max(c.reliability for c in candidates)
    tied = [c for c in candidates if c.reliability == top]
    if len(tied) == 1:
        return tied[0].relation, top, Decision.HIGHEST_GRADE
    most = max(c.bidir_count for c in tied)
    tied = [c for c in tied if c.bidir_count == most]
    if len(tied) == 1:
        return tied[0].relation, top, Decision.BIDIR_COUNT
    winner = min(tied, key=lambda c: HEURISTIC_ORDER.index(c.heuristic))
    return winner.relation, top, Decision.IE_DEFAULT


def unify(ie: Iterable[GradedLink], remarks: Iterable[GradedLink] = (), sets: Iterable[GradedLink] = ()) -> list:
    """One ``TorRecord`` per link appearing in any input, ordered by link."""
    per_link: dict = {}
    for heuristic, links in ((Heuristic.IMPORT_EXPORT, ie), (Heuristic.REMARKS, remarks), (Heuristic.SETS, sets)):
        for link in links:
            slot = per_link.setdefault(link.key, {})
            if heuristic in slot:
                raise ValueError(f"duplicate {heuristic} entry for link {link.key}")
            slot[heuristic] = link
    records = []
    for key in sorted(per_link):
        candidates = list(per_link[key].values())
        relation, reliability, decision = decide(candidates)
        records.append(TorRecord(key[0], key[1], relation, reliability, frozenset(per_link[key]), decision))
    return records


RELIABILITY_BANDS = (
    ("=1.0", Fraction(1), Fraction(1)),
    (">=0.9", Fraction(9, 10), Fraction(1)),
    (">=0.8", Fraction(8, 10), Fraction(9, 10)),
    (">=0.7", Fraction(7, 10), Fraction(8, 10)),
    (">=0.6", Fraction(6, 10), Fraction(7, 10)),
    (">=0.5", Fraction(5, 10), Fraction(6, 10)),
    ("<0.5", Fraction(0), Fraction(5, 10)),
)


def summarize(records: Iterable[TorRecord]) -> dict:
    """Counts by number of contributing heuristics, by decision and by reliability band.

    The ``>=0.9`` band excludes exact 1.0; ``at_least_0.9`` is cumulative.
    """
    records = list(records)
    by_sources = Counter(len(r.sources) for r in records)
    by_decision = Counter(r.decided_by.value for r in records)
    bands: Counter = Counter()
    for r in records:
        for name, lo, hi in RELIABILITY_BANDS:
            if (lo == hi and r.reliability == lo) or lo <= r.reliability < hi:
                bands[name] += 1
                break
    return {
        "links": len(records),
        "sources": {n: by_sources.get(n, 0) for n in (1, 2, 3)},
        "decided_by": {d.value: by_decision.get(d.value, 0) for d in Decision},
        "bands": {name: bands.get(name, 0) for name, _, _ in RELIABILITY_BANDS},
        "at_least_0.9": sum(1 for r in records if r.reliability >= Fraction(9, 10)),
    }
