"""Compare ToR datasets: symmetrized confusion matrices, precision/recall, agreement."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

from .model import Relation, link_key, parse_asn

log = logging.getLogger(__name__)

CLASSES = (Relation.P2P, Relation.P2C, Relation.C2P)
CLASSES_S2S = CLASSES + (Relation.S2S,)
FORMATS = ("caida-asrel", "problink", "internal", "ground-truth-csv")
MAX_MALFORMED = 0.10


class LabeledTor(NamedTuple):
    a: int
    b: int
    relation: Relation
    origin: str = ""


class MalformedDataset(ValueError):
    pass


def symmetrize(records: Iterable[LabeledTor]) -> list:
    """Add the reverse of every record; output sorted and duplicate-free."""
    out = set()
    for r in records:
        out.add(LabeledTor(r.a, r.b, r.relation, r.origin))
        out.add(LabeledTor(r.b, r.a, r.relation.reverse(), r.origin))
    return sorted(out)


def directed_view(records: Iterable[LabeledTor]) -> dict:
    """``(a, b) -> relation`` for both directions; the first label of a link wins."""
    view: dict = {}
    conflicts = 0
    for r in records:
        if r.a == r.b:
            continue
        if (r.a, r.b) in view:
            if view[(r.a, r.b)] is not r.relation:
                conflicts += 1
            continue
        view[(r.a, r.b)] = r.relation
        view[(r.b, r.a)] = r.relation.reverse()
    if conflicts:
        log.warning("%d conflicting duplicate labels ignored", conflicts)
    return view


@dataclass
class EvalReport:
    classes: tuple
    matrix: list  # rows: truth class, columns: predicted class
    overlap: int  # unordered links present in both datasets
    excluded_s2s: int = 0  # overlapping links dropped because only one side has siblings

    @property
    def total(self) -> int:
        return sum(map(sum, self.matrix))

    def recall(self, cls: Relation) -> Optional[float]:
        i = self.classes.index(cls)
        row = sum(self.matrix[i])
        return self.matrix[i][i] / row if row else None

    def precision(self, cls: Relation) -> Optional[float]:
        i = self.classes.index(cls)
        col = sum(r[i] for r in self.matrix)
        return self.matrix[i][i] / col if col else None

    @property
    def accuracy(self) -> Optional[float]:
        total = self.total
        if not total:
            return None
        return sum(self.matrix[i][i] for i in range(len(self.classes))) / total


def report_from_matrix(matrix, classes=CLASSES) -> EvalReport:
    """Wrap precomputed cells (e.g. a published table) in an ``EvalReport``."""
    matrix = [list(map(int, row)) for row in matrix]
    return EvalReport(tuple(classes), matrix, overlap=sum(map(sum, matrix)) // 2)


def _carries_siblings(view: dict) -> bool:
    return any(rel is Relation.S2S for rel in view.values())


def confusion(pred: Iterable[LabeledTor], truth: Iterable[LabeledTor]) -> EvalReport:
    """Confusion matrix over the links both datasets label, both directions counted."""
    pv, tv = directed_view(pred), directed_view(truth)
    with_s2s = _carries_siblings(pv) and _carries_siblings(tv)
    classes = CLASSES_S2S if with_s2s else CLASSES
    idx = {c: i for i, c in enumerate(classes)}
    matrix = [[0] * len(classes) for _ in classes]
    overlap = 0
    excluded = 0
    for (a, b), t in tv.items():
        if a > b or (a, b) not in pv:
            continue
        p = pv[(a, b)]
        if t not in idx or p not in idx:
            excluded += 1
            continue
        overlap += 1
        matrix[idx[t]][idx[p]] += 1
        matrix[idx[t.reverse()]][idx[p.reverse()]] += 1
    return EvalReport(classes, matrix, overlap, excluded)


@dataclass
class AgreementReport:
    overlap: int
    per_class: dict = field(default_factory=dict)  # label -> (agreed, overlapping)
    new_links: int = 0  # links in ours absent from other
    ours_links: int = 0

    @property
    def overall(self) -> Optional[float]:
        agreed = sum(a for a, _ in self.per_class.values())
        total = sum(n for _, n in self.per_class.values())
        return agreed / total if total else None

    @property
    def new_fraction(self) -> Optional[float]:
        return self.new_links / self.ours_links if self.ours_links else None


def _class_label(rel: Relation) -> str:
    return "P2C/C2P" if rel in (Relation.P2C, Relation.C2P) else rel.value


def agreement_report(ours: Iterable[LabeledTor], other: Iterable[LabeledTor]) -> AgreementReport:
    """Per-class agreement on overlapping links, classed by ``other``'s label.

    Counts are per unordered link; each link's two directed tuples always
    agree or disagree together, so the ratios equal the symmetrized ones.
    """
    ov, tv = directed_view(ours), directed_view(other)
    per_class: dict = {}
    overlap = 0
    for (a, b), t in tv.items():
        if a > b or (a, b) not in ov:
            continue
        overlap += 1
        label = _class_label(t)
        agreed, n = per_class.get(label, (0, 0))
        per_class[label] = (agreed + (ov[(a, b)] is t), n + 1)
    ours_links = {k for k in ov if k[0] < k[1]}
    other_links = {k for k in tv if k[0] < k[1]}
    return AgreementReport(overlap, per_class, len(ours_links - other_links), len(ours_links))


# ---------------------------------------------------------------------------
# dataset adapters

_ASREL_CODES = {-1: Relation.P2C, 0: Relation.P2P}
_PROBLINK_CODES = {-1: Relation.P2C, 0: Relation.P2P, 1: Relation.S2S}
_INTERNAL_CODES = {-1: Relation.P2C, 0: Relation.P2P, 1: Relation.C2P, 2: Relation.S2S}
_NAMES = {r.value: r for r in Relation}


def _relation_token(token: str, codes: dict) -> Optional[Relation]:
    token = token.strip()
    if token.upper() in _NAMES:
        return _NAMES[token.upper()]
    try:
        return codes.get(int(token))
    except ValueError:
        return None


def _parse_pipe_line(line: str, codes: dict, origin: str) -> Optional[LabeledTor]:
    parts = line.split("|")
    if len(parts) < 3:
        return None
    a, b = parse_asn(parts[0]), parse_asn(parts[1])
    rel = _relation_token(parts[2], codes)
    if a is None or b is None or rel is None or a == b:
        return None
    return LabeledTor(a, b, rel, origin)


def parse_external(path, fmt: str, origin: Optional[str] = None) -> list:
    """Read a labelled ToR file.

    ``caida-asrel``: ``a|b|-1`` (a provider of b) or ``a|b|0``;
    ``problink``: as caida-asrel plus ``1`` for siblings;
    ``internal``: this package's database/sibling files (``-1``, ``0``, ``2`` or relation names);
    ``ground-truth-csv``: CSV with columns ``a,b,relation``.
    Comment (``#``) and blank lines are skipped; malformed lines are counted
    and more than 10% malformed raises ``MalformedDataset``.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    origin = origin or str(path)
    records, malformed, total = [], 0, 0
    with open(path, encoding="utf-8", errors="replace", newline="") as fh:
        if fmt == "ground-truth-csv":
            reader = csv.DictReader(line for line in fh if line.strip() and not line.lstrip().startswith("#"))
            if reader.fieldnames is None or not {"a", "b", "relation"} <= {f.strip().lower() for f in reader.fieldnames}:
                raise MalformedDataset(f"{path}: CSV header must contain a,b,relation")
            for row in reader:
                total += 1
                row = {k.strip().lower(): (v or "") for k, v in row.items() if k}
                a, b = parse_asn(row["a"]), parse_asn(row["b"])
                rel = _relation_token(row["relation"], _INTERNAL_CODES)
                if a is None or b is None or rel is None or a == b:
                    malformed += 1
                    continue
                records.append(LabeledTor(a, b, rel, origin))
        else:
            codes = {"caida-asrel": _ASREL_CODES, "problink": _PROBLINK_CODES, "internal": _INTERNAL_CODES}[fmt]
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                total += 1
                rec = _parse_pipe_line(line, codes, origin)
                if rec is None:
                    malformed += 1
                    continue
                records.append(rec)
    if malformed:
        log.warning("%s: skipped %d malformed of %d lines", path, malformed, total)
    if total and malformed / total > MAX_MALFORMED:
        raise MalformedDataset(f"{path}: {malformed} of {total} lines malformed (> {MAX_MALFORMED:.0%})")
    return records


def links_of(records: Iterable[LabeledTor]) -> set:
    return {link_key(r.a, r.b) for r in records}
