"""Entity reliability grades, agreement ratio / coverage trade-off, link filtering."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .model import GradedLink, Heuristic, ToRObservation, link_key, orient

DEFAULT_T_B = (1, 2, 3, 4)
DEFAULT_T_R = (0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class FilterParams:
    t_b: int = 1
    t_r: float = 0.6

    def __post_init__(self):
        if self.t_b < 1:
            raise ValueError(f"T_b must be >= 1, got {self.t_b}")
        if not 0 <= self.t_r <= 1:
            raise ValueError(f"T_r must be in [0, 1], got {self.t_r}")


DEFAULT_PARAMS = {
    Heuristic.IMPORT_EXPORT: FilterParams(1, 0.6),
    Heuristic.REMARKS: FilterParams(1, 0.8),
    Heuristic.SETS: FilterParams(1, 0.6),
}


@dataclass
class EntityStats:
    """Links classified by one entity: all (L), bidirectional (B), agreed (A)."""

    entity_id: str
    heuristic: Heuristic
    links: set = field(default_factory=set)
    bidir: set = field(default_factory=set)
    agreed: set = field(default_factory=set)

    def grade(self, t_b: int) -> Fraction:
        return reliability_grade(self, t_b)


def reliability_grade(stats: EntityStats, t_b) -> Fraction:
    """|A|/|B| when the entity has at least ``t_b`` bidirectional links, else 0."""
    if isinstance(t_b, FilterParams):
        t_b = t_b.t_b
    nb = len(stats.bidir)
    if nb >= t_b and nb > 0:
        return Fraction(len(stats.agreed), nb)
    return Fraction(0)


def collect_entity_stats(observations: Iterable[ToRObservation], ie_observations: Iterable[ToRObservation]) -> dict:
    """Group observations by entity and mark which links the other end's I/E confirms.

    A link is bidirectional when the opposite AS's import/export entity also
    classifies it; it is agreed when that classification is the reverse role.
    """
    ie_view = {(o.from_asn, o.to_asn): o.relation for o in ie_observations}
    entities: dict = {}
    for obs in observations:
        stats = entities.get(obs.entity_id)
        if stats is None:
            stats = entities[obs.entity_id] = EntityStats(obs.entity_id, obs.heuristic)
        key = link_key(obs.from_asn, obs.to_asn)
        stats.links.add(key)
        other = ie_view.get((obs.to_asn, obs.from_asn))
        if other is not None:
            stats.bidir.add(key)
            if other is obs.relation.reverse():
                stats.agreed.add(key)
    return entities


def as_fraction(value) -> Fraction:
    """Exact threshold: 0.9 means 9/10, not the nearest binary float."""
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**9)
    return Fraction(value)


def _qualifying(entities, t_b: int, t_r):
    t_r = as_fraction(t_r)
    return [e for e in entities if reliability_grade(e, t_b) >= t_r]


def passing_entities(entities: Iterable[EntityStats], params: FilterParams) -> list:
    return _qualifying(entities, params.t_b, params.t_r)


def agreement_ratio(entities: Iterable[EntityStats], params: FilterParams) -> Optional[Fraction]:
    """|union A| / |union B| over entities graded at least T_r; ``None`` if undefined."""
    passing = _qualifying(entities, params.t_b, params.t_r)
    bidir = set().union(*(e.bidir for e in passing)) if passing else set()
    if not bidir:
        return None
    agreed = set().union(*(e.agreed for e in passing))
    return Fraction(len(agreed), len(bidir))


def link_coverage(entities: Iterable[EntityStats], params: FilterParams) -> Optional[Fraction]:
    """Share of all links still covered by entities graded at least T_r."""
    entities = list(entities)
    everything = set().union(*(e.links for e in entities)) if entities else set()
    if not everything:
        return None
    passing = _qualifying(entities, params.t_b, params.t_r)
    kept = set().union(*(e.links for e in passing)) if passing else set()
    return Fraction(len(kept), len(everything))


@dataclass(frozen=True)
class SweepRow:
    heuristic: Heuristic
    t_b: int
    t_r: float
    agreement: Optional[Fraction]
    coverage: Optional[Fraction]
    entities: int
    bidir_links: int


def sweep_cell(heuristic: Heuristic, entities: list, params: FilterParams) -> SweepRow:
    passing = _qualifying(entities, params.t_b, params.t_r)
    bidir = set().union(*(e.bidir for e in passing)) if passing else set()
    return SweepRow(
        heuristic,
        params.t_b,
        params.t_r,
        agreement_ratio(entities, params),
        link_coverage(entities, params),
        len(passing),
        len(bidir),
    )


def sweep(entities_by_heuristic: dict, grid: Iterable[FilterParams]) -> list:
    grid = list(grid)
    rows = []
    for heuristic in sorted(entities_by_heuristic, key=lambda h: list(Heuristic).index(h)):
        entities = list(entities_by_heuristic[heuristic].values())
        for params in grid:
            rows.append(sweep_cell(heuristic, entities, params))
    return rows


def default_grid(t_b=DEFAULT_T_B, t_r=DEFAULT_T_R) -> list:
    return [FilterParams(b, r) for b in t_b for r in t_r]


def filter_links(observations: Iterable[ToRObservation], entities: dict, params: FilterParams) -> list:
    """Keep observations from entities graded at least T_r and merge them per link.

    The surviving end with the higher grade decides the relation and the link
    inherits its grade; ties go to the entity with more bidirectional links,
    then to the smallest entity id.
    """
    t_r = as_fraction(params.t_r)
    grades = {eid: reliability_grade(e, params.t_b) for eid, e in entities.items()}
    best: dict = {}
    for obs in observations:
        grade = grades[obs.entity_id]
        if grade < t_r:
            continue
        nb = len(entities[obs.entity_id].bidir)
        a, b, rel = orient(obs.from_asn, obs.to_asn, obs.relation)
        rank = (grade, nb, _neg(obs.entity_id), _neg(rel.value))
        current = best.get((a, b))
        if current is None or rank > current[0]:
            best[(a, b)] = (rank, GradedLink(a, b, rel, grade, obs.entity_id, obs.heuristic, nb))
    return [best[k][1] for k in sorted(best)]


def _neg(text: str) -> tuple:
    # sorts strings in reverse so that max() prefers the smallest
    return tuple(-ord(c) for c in text) + (1,)
