"""Directed ToR observations from policy shape, remark blocks and AS-SET names."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .assets import AsSetResolver
from .model import Heuristic, Relation, ToRObservation, format_asn, parse_asn
from .rpsl import AutNumObject, Corpus

P2C, C2P, P2P = Relation.P2C, Relation.C2P, Relation.P2P

_WORD_RE = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class KeywordTable:
    p2c: tuple
    c2p: tuple
    p2p: tuple
    plural: bool = True  # also match the keyword with a trailing "s"
    solo: tuple = ()  # only used when no other keyword appears in the object
    gated: bool = False  # P2P keywords need earlier P2C and C2P keywords

    def __post_init__(self):
        index = {}
        for rel, words in ((P2C, self.p2c), (C2P, self.c2p), (P2P, self.p2p)):
            for w in words:
                index[w] = (w, rel)
                if self.plural:
                    index.setdefault(w + "s", (w, rel))
        object.__setattr__(self, "_index", index)

    def hits(self, text: str) -> list:
        """``(keyword, relation)`` for each keyword token in ``text``, in order."""
        index = self._index  # type: ignore[attr-defined]
        return [index[t] for t in _WORD_RE.findall(text.lower()) if t in index]

    def as_dict(self) -> dict:
        return {"p2c": list(self.p2c), "c2p": list(self.c2p), "p2p": list(self.p2p)}


REMARK_KEYWORDS = KeywordTable(
    p2c=("downstream", "downlink", "customer", "client"),
    c2p=("provider", "upstream", "uplink", "transit"),
    p2p=("peer",),
    solo=("transit",),
    gated=True,
)

SET_KEYWORDS = KeywordTable(
    p2c=("downstream", "downlink", "customer", "client", "custs"),
    c2p=("provider", "upstream", "uplink", "backbone"),
    p2p=("peer",),
)


# ---------------------------------------------------------------------------
# import / export


def export_any_counts(corpus: Corpus) -> Counter:
    """Number of ``export ... announce ANY`` statements per AS."""
    counts: Counter = Counter()
    for asn, obj in corpus.autnums.items():
        n = sum(1 for p in obj.policies if p.direction == "export" and p.is_any)
        if n:
            counts[asn] = n
    return counts


def resolve_any_any(a: int, b: int, counts: Mapping[int, int]) -> ToRObservation:
    """ANY in both directions: the AS exporting ANY more often is the provider."""
    ca, cb = counts.get(a, 0), counts.get(b, 0)
    if ca > cb:
        rel = P2C
    elif ca < cb:
        rel = C2P
    else:
        rel = P2P
    return ToRObservation(a, b, rel, Heuristic.IMPORT_EXPORT, format_asn(a))


def infer_import_export(
    autnum: AutNumObject,
    counts: Mapping[int, int],
    stats: Optional[Counter] = None,
) -> list:
    """Classify each peer that has both an import and an export rule.

    Import ANY / export specific -> customer of the peer (C2P); import
    specific / export ANY -> provider (P2C); specific / specific -> P2P;
    ANY / ANY -> ``resolve_any_any``.
    """
    own = autnum.asn
    imports: dict = {}
    exports: dict = {}
    for rule in autnum.policies:
        if rule.peer == own:
            continue
        side = imports if rule.direction == "import" else exports
        side[rule.peer] = side.get(rule.peer, False) or rule.is_any
    out = []
    for peer in sorted(imports.keys() | exports.keys()):
        if peer not in imports or peer not in exports:
            if stats is not None:
                stats["ie_one_direction"] += 1
            continue
        imp_any, exp_any = imports[peer], exports[peer]
        if imp_any and exp_any:
            out.append(resolve_any_any(own, peer, counts))
            continue
        if imp_any:
            rel = C2P
        elif exp_any:
            rel = P2C
        else:
            rel = P2P
        out.append(ToRObservation(own, peer, rel, Heuristic.IMPORT_EXPORT, format_asn(own)))
    if stats is not None:
        unparsed_peers = {u.peer for u in autnum.unparsed if u.peer is not None} - imports.keys() - exports.keys()
        stats["ie_unparsed_peers"] += len(unparsed_peers)
    return out


# ---------------------------------------------------------------------------
# remarks


@dataclass
class RemarkBlock:
    owner_asn: int
    block_index: int
    relation_hint: Relation
    keyword: str
    peer_asns: list = field(default_factory=list)

    @property
    def entity_id(self) -> str:
        return f"{format_asn(self.owner_asn)}#{self.block_index}"


def _is_end(text: str) -> bool:
    words = _WORD_RE.findall(text.lower())
    return bool(words) and words[0] == "end"


def segment_remarks(autnum: AutNumObject, table: KeywordTable = REMARK_KEYWORDS) -> list:
    """Split an object's policies into keyword-introduced remark blocks.

    Any keyword remark closes the running block and opens a new one; blocks
    whose keywords are all suppressed by the gating rules collect policies but
    are not returned.  Block indices count suppressed blocks too.
    """
    hits = [(idx, table.hits(text), text) for idx, text in autnum.remark_lines]
    solo = set(table.solo)
    other_present = any(word not in solo for _, hs, _ in hits for word, _ in hs)

    events = [(idx, 0, (hs, text)) for idx, hs, text in hits]
    events += [(p.line, 1, p.peer) for p in autnum.policies]
    events += [(u.line, 1, u.peer) for u in autnum.unparsed if u.peer is not None]
    events.sort(key=lambda e: (e[0], e[1]))

    seen: set = set()
    blocks = []
    current: Optional[RemarkBlock] = None
    current_peers: Optional[dict] = None
    index = -1
    for _, kind, payload in events:
        if kind == 1:
            if current_peers is not None and payload != autnum.asn:
                current_peers[payload] = None
            continue
        hs, text = payload
        if _is_end(text):
            current = current_peers = None
            continue
        if not hs:
            continue
        chosen = None
        for word, rel in hs:
            if word in solo and other_present:
                continue
            if table.gated and rel is P2P and not (P2C in seen and C2P in seen):
                continue
            if rel is not P2P:
                seen.add(rel)
            if chosen is None:
                chosen = (word, rel)
        index += 1
        current_peers = {}
        if chosen is None:
            current = None
        else:
            current = RemarkBlock(autnum.asn, index, chosen[1], chosen[0])
            current.peer_asns = current_peers  # type: ignore[assignment]
            blocks.append(current)
    for block in blocks:
        block.peer_asns = list(block.peer_asns)
    return blocks


def infer_remarks(blocks: Iterable[RemarkBlock]) -> list:
    out = []
    for block in blocks:
        entity = block.entity_id
        for peer in sorted(set(block.peer_asns)):
            if peer == block.owner_asn:
                continue
            out.append(ToRObservation(block.owner_asn, peer, block.relation_hint, Heuristic.REMARKS, entity))
    return out


# ---------------------------------------------------------------------------
# sets


def mnt_index(corpus: Corpus) -> dict:
    """Maintainer (upper-cased) -> set of AUT-NUM ASNs it maintains."""
    index: dict = {}
    for asn, obj in corpus.autnums.items():
        for mnt in obj.admin_fields.get("mnt-by", ()):
            index.setdefault(mnt.upper(), set()).add(asn)
    return index


def set_owner(name: str, mnt_by: Iterable[str], mnt_to_asns: Mapping) -> Optional[int]:
    """Owner ASN of a set: the ``ASnnn:`` prefix, else a unique mnt-by match."""
    head = name.split(":", 1)[0]
    if ":" in name:
        asn = parse_asn(head)
        if asn is not None:
            return asn
    candidates: set = set()
    for mnt in mnt_by:
        candidates |= mnt_to_asns.get(mnt.upper(), set())
    if len(candidates) == 1:
        return next(iter(candidates))
    return None


def set_relation(name: str, table: KeywordTable = SET_KEYWORDS) -> Optional[Relation]:
    """Relation implied by a set name, or ``None`` if absent or contradictory."""
    rels = set()
    for part in name.split(":"):
        if parse_asn(part) is None:
            rels.update(rel for _, rel in table.hits(part))
    if len(rels) == 1:
        return rels.pop()
    return None


def infer_sets(
    corpus: Corpus,
    resolver: Optional[AsSetResolver] = None,
    table: KeywordTable = SET_KEYWORDS,
    stats: Optional[Counter] = None,
) -> list:
    resolver = resolver or AsSetResolver(corpus)
    owners = mnt_index(corpus)
    out = []
    for name in sorted(corpus.assets):
        rel = set_relation(name, table)
        if rel is None:
            continue
        aset = corpus.assets[name]
        owner = set_owner(name, aset.mnt_by, owners)
        if owner is None:
            if stats is not None:
                stats["sets_no_owner"] += 1
            continue
        for member in sorted(resolver.expand_set(name).asns):
            if member != owner:
                out.append(ToRObservation(owner, member, rel, Heuristic.SETS, name))
    return out


# ---------------------------------------------------------------------------


def run_heuristics(
    corpus: Corpus,
    remark_table: KeywordTable = REMARK_KEYWORDS,
    set_table: KeywordTable = SET_KEYWORDS,
    stats: Optional[Counter] = None,
) -> dict:
    """All three heuristics over a corpus, each list canonically sorted."""
    counts = export_any_counts(corpus)
    ie, remarks = [], []
    for asn in sorted(corpus.autnums):
        obj = corpus.autnums[asn]
        ie.extend(infer_import_export(obj, counts, stats))
        remarks.extend(infer_remarks(segment_remarks(obj, remark_table)))
    sets = infer_sets(corpus, AsSetResolver(corpus), set_table, stats)
    return {
        Heuristic.IMPORT_EXPORT: sorted(ie),
        Heuristic.REMARKS: sorted(remarks),
        Heuristic.SETS: sorted(sets),
    }
