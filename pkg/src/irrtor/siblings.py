"""Sibling (S2S) inference from shared administrative field values."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple, Optional

from .heuristics import mnt_index, set_owner
from .model import Relation, link_key
from .rpsl import Corpus

AUTNUM_FIELDS = ("changed-domain", "org", "mnt-by", "admin", "tech", "notify", "as-name")
FIELDS = AUTNUM_FIELDS + ("mnt-by-as",)
DEFAULT_TOP_DOMAINS = 20
DEFAULT_MAX_ASNS = 5  # values shared by 6 or more ASes are dropped


class FieldAssertion(NamedTuple):
    field: str
    value: str
    asn: int


@dataclass(frozen=True)
class SiblingPair:
    a: int
    b: int
    matched_fields: frozenset


def extract_assertions(corpus: Corpus) -> list:
    """One assertion per (field, normalized value, ASN); values lower-cased."""
    seen = set()
    owners = mnt_index(corpus)
    for asn, obj in corpus.autnums.items():
        for name in AUTNUM_FIELDS:
            for raw in obj.admin_fields.get(name, ()):
                value = raw.strip().lower()
                if value:
                    seen.add(FieldAssertion(name, value, asn))
    for name, aset in corpus.assets.items():
        owner = set_owner(name, aset.mnt_by, owners)
        if owner is None:
            continue
        for raw in aset.mnt_by:
            value = raw.strip().lower()
            if value:
                seen.add(FieldAssertion("mnt-by-as", value, owner))
    return sorted(seen)


def top_domains(assertions: Iterable[FieldAssertion], k: int = DEFAULT_TOP_DOMAINS) -> set:
    """The ``k`` changed-domain values declared by the most ASes (ties by name)."""
    counts = Counter(a.value for a in assertions if a.field == "changed-domain")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return {v for v, _ in ranked[:k]}


def filter_assertions(
    assertions: Iterable[FieldAssertion],
    top_k: int = DEFAULT_TOP_DOMAINS,
    max_asns: int = DEFAULT_MAX_ASNS,
) -> list:
    """Drop uninformative values.

    Removes the ``top_k`` most common changed-domains, any value containing
    "dum", the as-name "unspecified", and any (field, value) declared by more
    than ``max_asns`` distinct ASes.
    """
    assertions = list(assertions)
    popular = top_domains(assertions, top_k)
    group_size = Counter((a.field, a.value) for a in assertions)
    kept = []
    for a in assertions:
        if a.field == "changed-domain" and a.value in popular:
            continue
        if "dum" in a.value:
            continue
        if a.field == "as-name" and a.value == "unspecified":
            continue
        if group_size[(a.field, a.value)] > max_asns:
            continue
        kept.append(a)
    return kept


def group_by_value(assertions: Iterable[FieldAssertion]) -> dict:
    groups: dict = defaultdict(set)
    for a in assertions:
        groups[(a.field, a.value)].add(a.asn)
    return groups


@dataclass
class SiblingResult:
    pairs: list
    discoveries: dict  # field -> sum of C(n, 2) over its value groups
    pairs_by_field: dict  # field -> set of (a, b)

    def unique(self, field: str) -> set:
        others = set()
        for f, ps in self.pairs_by_field.items():
            if f != field:
                others |= ps
        return self.pairs_by_field.get(field, set()) - others


def infer_siblings(assertions: Iterable[FieldAssertion]) -> SiblingResult:
    """All pairs of ASes sharing a filtered (field, value)."""
    matched: dict = defaultdict(set)
    discoveries: Counter = Counter()
    by_field: dict = defaultdict(set)
    for (field, _value), asns in sorted(group_by_value(assertions).items()):
        n = len(asns)
        if n < 2:
            continue
        discoveries[field] += n * (n - 1) // 2
        for a, b in combinations(sorted(asns), 2):
            matched[(a, b)].add(field)
            by_field[field].add((a, b))
    pairs = [SiblingPair(a, b, frozenset(fields)) for (a, b), fields in sorted(matched.items())]
    return SiblingResult(pairs, dict(discoveries), dict(by_field))


def run_siblings(corpus: Corpus, top_k: int = DEFAULT_TOP_DOMAINS, max_asns: int = DEFAULT_MAX_ASNS) -> SiblingResult:
    return infer_siblings(filter_assertions(extract_assertions(corpus), top_k, max_asns))


@dataclass(frozen=True)
class FieldReportRow:
    field: str
    discoveries: int
    overlap: Optional[int]
    match: Optional[int]
    unique_discoveries: int
    unique_overlap: Optional[int]
    unique_match: Optional[int]


def field_report(result: SiblingResult, reference: Optional[dict] = None) -> list:
    """Per-field overall/unique counts, optionally compared with a reference dataset.

    ``reference`` maps an unordered link ``(a, b)`` to its ``Relation``; overlap
    counts pairs present there, match counts those labelled S2S.
    """
    def compare(pairs):
        if reference is None:
            return None, None
        hits = [p for p in pairs if p in reference]
        return len(hits), sum(1 for p in hits if reference[p] is Relation.S2S)

    rows = []
    all_pairs: set = set()
    all_unique: set = set()
    for field in FIELDS:
        pairs = result.pairs_by_field.get(field, set())
        unique = result.unique(field)
        all_pairs |= pairs
        all_unique |= unique
        ov, m = compare(pairs)
        uov, um = compare(unique)
        rows.append(FieldReportRow(field, result.discoveries.get(field, 0), ov, m, len(unique), uov, um))
    ov, m = compare(all_pairs)
    uov, um = compare(all_unique)
    rows.append(FieldReportRow("total", len(all_pairs), ov, m, len(all_unique), uov, um))
    return rows


def reference_links(records) -> dict:
    """Unordered-link view of labelled records for ``field_report``."""
    out = {}
    for r in records:
        out.setdefault(link_key(r.a, r.b), r.relation)
    return out
