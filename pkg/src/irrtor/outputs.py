"""Delimiter-separated writers for every pipeline artifact.

Database line format (``tor.txt``)::

    a|b|code|reliability|sources|decided_by

``code`` follows the CAIDA as-rel convention: ``-1`` means ``a`` is the
provider of ``b``, ``0`` is peer-to-peer; ``2`` marks siblings.  Customer
records are flipped so the provider always comes first.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, TextIO

from .model import HEURISTIC_ORDER, Relation

DB_HEADER = (
    "# irrtor tor-db v1\n"
    "# a|b|code|reliability|sources|decided_by\n"
    "# code: -1 = a is provider of b, 0 = peers, 2 = siblings\n"
)
SIBLING_HEADER = "# irrtor siblings v1\n# a|b|S2S|matched_fields\n"


def fmt_ratio(value: Optional[Fraction], digits: int = 6) -> str:
    if value is None:
        return "NA"
    return f"{float(value):.{digits}f}"


def encode_relation(a: int, b: int, relation: Relation) -> tuple:
    """``(a, b, code)`` in as-rel orientation."""
    if relation is Relation.C2P:
        return b, a, -1
    if relation is Relation.P2C:
        return a, b, -1
    if a > b:
        a, b = b, a
    return a, b, 0 if relation is Relation.P2P else 2


def write_observations(fh: TextIO, observations: Iterable) -> None:
    fh.write("# from|to|relation|heuristic|entity\n")
    for o in observations:
        fh.write(f"{o.from_asn}|{o.to_asn}|{o.relation.value}|{o.heuristic.value}|{o.entity_id}\n")


def write_graded(fh: TextIO, links: Iterable) -> None:
    fh.write("# a|b|relation|reliability|entity|bidir_links\n")
    for link in links:
        fh.write(f"{link.a}|{link.b}|{link.relation.value}|{fmt_ratio(link.reliability)}|{link.source_entity}|{link.bidir_count}\n")


def write_database(fh: TextIO, records: Iterable) -> None:
    fh.write(DB_HEADER)
    rows = []
    for r in records:
        a, b, code = encode_relation(r.a, r.b, r.relation)
        sources = ",".join(h.value for h in HEURISTIC_ORDER if h in r.sources)
        rows.append((a, b, code, fmt_ratio(r.reliability), sources, r.decided_by.value))
    for row in sorted(rows):
        fh.write("|".join(map(str, row)) + "\n")


def write_siblings(fh: TextIO, pairs: Iterable) -> None:
    fh.write(SIBLING_HEADER)
    for p in pairs:
        fh.write(f"{p.a}|{p.b}|S2S|{';'.join(sorted(p.matched_fields))}\n")


def _cell(value) -> str:
    return "NA" if value is None else str(value)


def write_sibling_report(fh: TextIO, rows: Iterable) -> None:
    fh.write("field\tdiscoveries\toverlap\tmatch\tunique_discoveries\tunique_overlap\tunique_match\n")
    for r in rows:
        fh.write(
            "\t".join(
                [r.field, str(r.discoveries), _cell(r.overlap), _cell(r.match),
                 str(r.unique_discoveries), _cell(r.unique_overlap), _cell(r.unique_match)]
            )
            + "\n"
        )


def write_sweep(fh: TextIO, rows: Iterable) -> None:
    fh.write("heuristic\tT_b\tT_r\tR\tC\tentities\tbidir_links\n")
    for r in rows:
        fh.write(
            f"{r.heuristic.value}\t{r.t_b}\t{r.t_r:g}\t{fmt_ratio(r.agreement)}\t"
            f"{fmt_ratio(r.coverage)}\t{r.entities}\t{r.bidir_links}\n"
        )


def _pct(x: Optional[float]) -> str:
    return "NA" if x is None else f"{100 * x:.1f}%"


def render_confusion(report, truth_name: str = "Truth", pred_name: str = "Predicted") -> str:
    """Human-readable confusion table with precision row and recall column."""
    names = [c.value for c in report.classes]
    width = max(12, len(truth_name) + 5)
    head = " " * width + "".join(f"{pred_name[:9] + ' ' + n:>16}" for n in names) + f"{'Recall':>10}"
    lines = [head]
    for i, cls in enumerate(report.classes):
        cells = "".join(f"{v:>16,}" for v in report.matrix[i])
        lines.append(f"{(truth_name + ' ' + cls.value):<{width}}{cells}{_pct(report.recall(cls)):>10}")
    prec = "".join(f"{_pct(report.precision(c)):>16}" for c in report.classes)
    lines.append(f"{'Precision':<{width}}{prec}{_pct(report.accuracy):>10}")
    lines.append(f"overlap: {report.overlap} links; accuracy: {_pct(report.accuracy)}")
    if report.excluded_s2s:
        lines.append(f"sibling links excluded from matrix: {report.excluded_s2s}")
    return "\n".join(lines) + "\n"


def confusion_tsv(report) -> str:
    out = ["truth\t" + "\t".join(c.value for c in report.classes) + "\trecall"]
    for i, cls in enumerate(report.classes):
        out.append(cls.value + "\t" + "\t".join(map(str, report.matrix[i])) + "\t" + fmt_ratio(report.recall(cls)))
    out.append("precision\t" + "\t".join(fmt_ratio(report.precision(c)) for c in report.classes) + "\t" + fmt_ratio(report.accuracy))
    out.append(f"overlap\t{report.overlap}")
    out.append(f"excluded_s2s\t{report.excluded_s2s}")
    return "\n".join(out) + "\n"


def render_agreement(rep) -> str:
    lines = [f"Overlap: {rep.overlap}"]
    for label in sorted(rep.per_class):
        agreed, n = rep.per_class[label]
        lines.append(f"{label} agreement: {agreed}/{n} ({_pct(agreed / n if n else None)})")
    lines.append(f"Overall agreement: {_pct(rep.overall)}")
    lines.append(f"New links (ours only): {rep.new_links}/{rep.ours_links} ({_pct(rep.new_fraction)})")
    return "\n".join(lines) + "\n"


def agreement_tsv(rep) -> str:
    out = ["class\tagreed\toverlapping"]
    for label in sorted(rep.per_class):
        agreed, n = rep.per_class[label]
        out.append(f"{label}\t{agreed}\t{n}")
    out.append(f"overall\t{fmt_ratio(rep.overall)}")
    out.append(f"overlap\t{rep.overlap}")
    out.append(f"new_links\t{rep.new_links}\t{rep.ours_links}")
    return "\n".join(out) + "\n"
