"""Core value types shared across the pipeline."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

ASN_MAX = 2**32 - 1

_ASN_RE = re.compile(r"^(?:AS)?([0-9]+)(?:\.([0-9]+))?$", re.IGNORECASE)


def parse_asn(text: str) -> Optional[int]:
    """Parse ``AS65001``, ``as65001``, ``65001`` or asdot ``AS1.2``.

    Returns ``None`` for anything that is not a valid 32-bit AS number.
    """
    m = _ASN_RE.match(text.strip())
    if m is None:
        return None
    high, low = m.group(1), m.group(2)
    if low is None:
        value = int(high)
    else:
        hi, lo = int(high), int(low)
        if hi > 0xFFFF or lo > 0xFFFF:
            return None
        value = (hi << 16) | lo
    if value > ASN_MAX:
        return None
    return value


def format_asn(asn: int) -> str:
    return f"AS{asn}"


class Relation(str, enum.Enum):
    """Role of the first AS relative to the second."""

    P2P = "P2P"
    P2C = "P2C"
    C2P = "C2P"
    S2S = "S2S"

    def reverse(self) -> "Relation":
        return _REVERSE[self]

    def __str__(self) -> str:
        return self.value


_REVERSE = {
    Relation.P2P: Relation.P2P,
    Relation.P2C: Relation.C2P,
    Relation.C2P: Relation.P2C,
    Relation.S2S: Relation.S2S,
}


class Heuristic(str, enum.Enum):
    IMPORT_EXPORT = "import_export"
    REMARKS = "remarks"
    SETS = "sets"

    def __str__(self) -> str:
        return self.value


# fixed precedence used whenever two heuristics need a deterministic order
HEURISTIC_ORDER = (Heuristic.IMPORT_EXPORT, Heuristic.REMARKS, Heuristic.SETS)


class ToRObservation(NamedTuple):
    """One directed classification: ``relation`` is the role of ``from_asn``."""

    from_asn: int
    to_asn: int
    relation: Relation
    heuristic: Heuristic
    entity_id: str


@dataclass(frozen=True)
class GradedLink:
    """A filtered per-heuristic classification of an unordered link.

    ``relation`` is the role of ``a`` relative to ``b``; ``a < b``.
    """

    a: int
    b: int
    relation: Relation
    reliability: Fraction
    source_entity: str
    heuristic: Heuristic
    bidir_count: int = 0

    @property
    def key(self) -> tuple[int, int]:
        return (self.a, self.b)


def link_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def orient(a: int, b: int, relation: Relation) -> tuple[int, int, Relation]:
    """Rewrite a directed relation so that the smaller ASN comes first."""
    if a <= b:
        return a, b, relation
    return b, a, relation.reverse()
