"""RPSL dump ingestion: AUT-NUM and AS-SET objects, latest-version dedup."""

from __future__ import annotations

import contextlib
import datetime as dt
import gc
import gzip
import io
import json
import logging
import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator, NamedTuple, Optional, Union

from .model import format_asn, parse_asn
from . import scan as _scan
from .scan import split_blocks

log = logging.getLogger(__name__)

WANTED_CLASSES = frozenset({"aut-num", "as-set"})
POLICY_ATTRS = {"import": "import", "export": "export", "mp-import": "import", "mp-export": "export"}
# attribute name in the dump -> sibling field name
ADMIN_ATTRS = {
    "org": "org",
    "mnt-by": "mnt-by",
    "admin-c": "admin",
    "admin": "admin",
    "tech-c": "tech",
    "tech": "tech",
    "notify": "notify",
}
CHUNK_SIZE = 32 * 1024 * 1024


class PolicyRule(NamedTuple):
    direction: str  # "import" | "export"
    peer: int
    targets: tuple  # ints (ASNs) and str (set / AS-name references); empty when is_any
    is_any: bool
    line: int = -1  # attribute index within the object


class Unparsed(NamedTuple):
    raw: str
    reason: str
    peer: Optional[int] = None  # set when the peering part was a single ASN
    direction: Optional[str] = None
    line: int = -1


@dataclass
class AutNumObject:
    asn: int
    as_name: str = ""
    registry: str = ""
    last_modified: Optional[dt.date] = None
    policies: list = field(default_factory=list)
    remark_lines: list = field(default_factory=list)  # (attribute index, text)
    admin_fields: dict = field(default_factory=dict)
    unparsed: list = field(default_factory=list)

    @property
    def key(self):
        return self.asn


@dataclass
class AsSetObject:
    name: str
    members: tuple = ()
    last_modified: Optional[dt.date] = None
    mnt_by: tuple = ()
    registry: str = ""

    @property
    def key(self):
        return self.name


@dataclass
class IngestStats:
    registry: str = ""
    autnums: int = 0
    assets: int = 0
    malformed_blocks: int = 0
    other_classes: int = 0
    skipped_autnums: Counter = field(default_factory=Counter)
    unparsed_policies: int = 0

    def merge(self, other: "IngestStats") -> None:
        self.autnums += other.autnums
        self.assets += other.assets
        self.malformed_blocks += other.malformed_blocks
        self.other_classes += other.other_classes
        self.skipped_autnums.update(other.skipped_autnums)
        self.unparsed_policies += other.unparsed_policies


@dataclass
class Corpus:
    autnums: dict = field(default_factory=dict)
    assets: dict = field(default_factory=dict)
    duplicates: int = 0

    def __eq__(self, other):
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.autnums == other.autnums and self.assets == other.assets


# ---------------------------------------------------------------------------
# policy lines

_TOKEN_RE = re.compile(r"[^\s,;]+|[,;]")
_ROUTER_RE = re.compile(r"^[0-9A-Fa-f:.]*[0-9][0-9A-Fa-f:.]*$")
_NAME_RE = re.compile(r"^[A-Za-z0-9_.:\-]+$")
_RESERVED = frozenset(
    {"and", "or", "not", "except", "refine", "from", "to", "accept", "announce",
     "action", "at", "protocol", "into", "afi", "any", "as-any", "networks", "community"}
)


def parse_policy_line(value: str) -> Union[list, Unparsed]:
    """Parse the simple ``from <peer> accept <targets>`` / ``to <peer> announce <targets>`` forms.

    Protocol, ``into`` and ``afi`` qualifiers, router addresses and a single
    ``action`` clause are tolerated.  Anything richer returns ``Unparsed``.
    """
    tokens = _TOKEN_RE.findall(value)
    n = len(tokens)
    i = 0
    while i < n and tokens[i].lower() in ("protocol", "into"):
        i += 2
    if i < n and tokens[i].lower() == "afi":
        i += 2
        while i < n and tokens[i] == ",":
            i += 2
    if i + 1 >= n:
        return Unparsed(value, "truncated")
    kw = tokens[i].lower()
    if kw == "from":
        direction, verb = "import", "accept"
    elif kw == "to":
        direction, verb = "export", "announce"
    else:
        return Unparsed(value, "no peering")
    peer = parse_asn(tokens[i + 1])
    if peer is None:
        return Unparsed(value, "peer is not an ASN", direction=direction)
    i += 2

    while i < n:
        tok = tokens[i]
        low = tok.lower()
        if low == verb:
            break
        if low == "action":
            # one or more "attr op value;" statements up to the filter keyword
            while i < n and tokens[i].lower() != verb:
                i += 1
            continue
        if low == "at" or _ROUTER_RE.match(tok):
            i += 1
            continue
        return Unparsed(value, "multiple or complex peering", peer, direction)
    else:
        return Unparsed(value, "missing " + verb, peer, direction)

    rest = [t for t in tokens[i + 1 :] if t not in (",", ";")]
    if not rest:
        return Unparsed(value, "empty filter", peer, direction)
    if len(rest) == 1 and rest[0].lower() in ("any", "as-any"):
        return [PolicyRule(direction, peer, (), True)]
    targets = []
    for tok in rest:
        if tok.lower() in _RESERVED or not _NAME_RE.match(tok):
            return Unparsed(value, "complex filter", peer, direction)
        asn = parse_asn(tok)
        if asn is not None:
            targets.append(asn)
        elif tok.lower() == "peeras":
            targets.append(peer)
        else:
            targets.append(tok.upper())
    return [PolicyRule(direction, peer, tuple(targets), False)]


# ---------------------------------------------------------------------------
# objects

_CHANGED_RE = re.compile(r"^(\S+@(\S+?))(?:\s+(\d{8}))?\s*$")


def _parse_date(text: str) -> Optional[dt.date]:
    text = text.strip()
    try:
        if len(text) >= 10 and text[4] == "-":
            return dt.date.fromisoformat(text[:10])
        if len(text) == 8 and text.isdigit():
            return dt.date(int(text[:4]), int(text[4:6]), int(text[6:8]))
    except ValueError:
        return None
    return None


def _split_list(value: str) -> list:
    return [v for v in re.split(r"[\s,]+", value) if v]


class Skip(NamedTuple):
    reason: str


def _changed_parts(value: str):
    """``(domain, date)`` of a ``changed:`` value; ``domain`` is None when it does not parse."""
    m = _CHANGED_RE.match(value)
    if not m:
        return None, None
    return m.group(2).lower(), _parse_date(m.group(3)) if m.group(3) else None


def _apply_changed(admin: dict, dates: list, value: str) -> None:
    domain, date = _changed_parts(value)
    if domain is not None:
        admin.setdefault("changed-domain", []).append(domain)
    if date is not None:
        dates.append(date)


def _apply_policy(obj: AutNumObject, direction: str, value: str, idx: int) -> None:
    parsed = parse_policy_line(value)
    if isinstance(parsed, Unparsed):
        obj.unparsed.append(parsed._replace(line=idx))
    elif parsed[0].direction != direction:
        obj.unparsed.append(Unparsed(value, "direction mismatch", parsed[0].peer, None, idx))
    else:
        obj.policies.extend(rule._replace(line=idx) for rule in parsed)


def parse_autnum(block: list, registry: str = "") -> Union[AutNumObject, Skip]:
    """Build an ``AutNumObject`` from a block of ``(key, value)`` pairs."""
    if not block or block[0][0] != "aut-num":
        return Skip("not an aut-num block")
    asn = parse_asn(block[0][1])
    if asn is None:
        return Skip("invalid aut-num value")
    obj = AutNumObject(asn=asn, registry=registry)
    admin = obj.admin_fields
    last_modified = None
    changed_dates: list = []
    for idx, (key, value) in enumerate(block):
        direction = POLICY_ATTRS.get(key)
        if direction is not None:
            _apply_policy(obj, direction, value, idx)
        elif key == "remarks":
            obj.remark_lines.append((idx, value))
        elif key == "as-name":
            obj.as_name = value
            admin.setdefault("as-name", []).append(value)
        elif key == "last-modified":
            last_modified = _parse_date(value)
        elif key == "changed":
            _apply_changed(admin, changed_dates, value)
        elif key in ADMIN_ATTRS:
            admin.setdefault(ADMIN_ATTRS[key], []).extend(_split_list(value))
    obj.last_modified = last_modified or (max(changed_dates) if changed_dates else None)
    return obj


def parse_asset(block: list, registry: str = "") -> Union[AsSetObject, Skip]:
    if not block or block[0][0] != "as-set":
        return Skip("not an as-set block")
    name = block[0][1].strip().upper()
    if not name or not _NAME_RE.match(name):
        return Skip("invalid as-set name")
    members = []
    mnt_by = []
    last_modified = None
    changed_dates = []
    for key, value in block[1:]:
        if key == "members":
            for tok in _split_list(value):
                asn = parse_asn(tok)
                if asn is not None:
                    members.append(asn)
                elif _NAME_RE.match(tok):
                    members.append(tok.upper())
        elif key == "mnt-by":
            mnt_by.extend(_split_list(value))
        elif key == "last-modified":
            last_modified = _parse_date(value)
        elif key == "changed":
            date = _changed_parts(value)[1]
            if date is not None:
                changed_dates.append(date)
    return AsSetObject(
        name=name,
        members=tuple(members),
        last_modified=last_modified or (max(changed_dates) if changed_dates else None),
        mnt_by=tuple(mnt_by),
        registry=registry,
    )


# ---------------------------------------------------------------------------
# files


def open_dump(path) -> BinaryIO:
    """Open a plain or gzip-compressed dump, sniffing the gzip magic bytes."""
    fh = open(path, "rb")
    magic = fh.read(2)
    fh.seek(0)
    if magic == b"\x1f\x8b":
        return gzip.GzipFile(fileobj=fh)  # type: ignore[return-value]
    return fh


def iter_chunks(stream: BinaryIO, size: int = CHUNK_SIZE) -> Iterator[bytes]:
    """Yield chunks of ``stream`` that end on a blank line (or at EOF)."""
    pending = b""
    while True:
        data = stream.read(size)
        if not data:
            if pending:
                yield pending
            return
        buf = pending + data
        cut = max(buf.rfind(b"\n\n"), buf.rfind(b"\n\r\n"))
        if cut < 0:
            pending = buf
            continue
        yield buf[: cut + 1]
        pending = buf[cut + 1 :]


def split_objects(raw, wanted: Optional[frozenset] = None) -> Iterator[list]:
    """Yield attribute blocks from bytes or a binary stream, any object class by default."""
    stream = io.BytesIO(raw) if isinstance(raw, (bytes, bytearray)) else raw
    for chunk in iter_chunks(stream):
        yield from split_blocks(chunk, wanted)[0]


def parse_blocks(blocks: Iterable, registry: str, stats: IngestStats):
    autnums, assets = [], []
    for block in blocks:
        cls = block[0][0]
        if cls == "aut-num":
            obj = parse_autnum(block, registry)
            if isinstance(obj, Skip):
                stats.skipped_autnums[obj.reason] += 1
                continue
            stats.autnums += 1
            stats.unparsed_policies += len(obj.unparsed)
            autnums.append(obj)
        elif cls == "as-set":
            aset = parse_asset(block, registry)
            if isinstance(aset, Skip):
                stats.skipped_autnums[aset.reason] += 1
                continue
            stats.assets += 1
            assets.append(aset)
    return autnums, assets


@contextlib.contextmanager
def _gc_paused():
    # parsed objects hold no reference cycles; collector passes over a large
    # heap of them would otherwise dominate ingest time
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def parse_bytes(data: bytes, registry: str = ""):
    """Parse an in-memory dump. Returns ``(autnums, assets, stats)``."""
    if _scan.parse_chunk is None:
        return parse_bytes_py(data, registry)
    with _gc_paused():
        autnums, assets, malformed, other, skips, unparsed = _scan.parse_chunk(
            bytes(data), registry, sys.modules[__name__]
        )
    stats = IngestStats(registry, len(autnums), len(assets), malformed, other, Counter(skips), unparsed)
    return autnums, assets, stats


def parse_bytes_py(data: bytes, registry: str = ""):
    """Reference implementation of ``parse_bytes``: scan to blocks, then build objects."""
    stats = IngestStats(registry=registry)
    with _gc_paused():
        blocks, malformed, other = split_blocks(data, WANTED_CLASSES)
        stats.malformed_blocks += malformed
        stats.other_classes += other
        autnums, assets = parse_blocks(blocks, registry, stats)
    return autnums, assets, stats


def load_dump(path, registry: str, chunk_size: int = CHUNK_SIZE):
    """Parse one dump file. Returns ``(autnums, assets, stats)``."""
    stats = IngestStats(registry=registry)
    autnums, assets = [], []
    with open_dump(path) as fh:
        for chunk in iter_chunks(fh, chunk_size):
            a, s, st = parse_bytes(chunk, registry)
            autnums.extend(a)
            assets.extend(s)
            stats.merge(st)
    log.info(
        "%s: %d aut-num, %d as-set, %d malformed blocks, %d unparsed policies",
        path, stats.autnums, stats.assets, stats.malformed_blocks, stats.unparsed_policies,
    )
    return autnums, assets, stats


def _load_task(item):
    path, registry = item
    return load_dump(path, registry)


def load_manifest(entries, jobs: int = 1):
    """Parse every ``(path, registry)`` entry and dedupe into a ``Corpus``.

    Returns ``(corpus, per_registry_stats)``.  Output does not depend on ``jobs``.
    """
    entries = list(entries)
    if jobs > 1 and len(entries) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_load_task, entries))
    else:
        results = [_load_task(e) for e in entries]
    stats: dict = {}
    autnums, assets = [], []
    for (_, registry), (a, s, st) in zip(entries, results):
        autnums.extend(a)
        assets.extend(s)
        stats.setdefault(registry, IngestStats(registry=registry)).merge(st)
    return dedupe_latest(autnums, assets), stats


# ---------------------------------------------------------------------------
# dedup


def _rank(obj):
    d = obj.last_modified
    return (d is not None, d.toordinal() if d else 0, obj.registry)


def _pick(current, candidate):
    rc, rn = _rank(current), _rank(candidate)
    if rn != rc:
        return candidate if rn > rc else current
    # same date and registry: fall back to content so the winner is order-independent
    fc, fn = _fingerprint(current), _fingerprint(candidate)
    return candidate if fn > fc else current


def _fingerprint(obj) -> str:
    return json.dumps(_encode(obj), sort_keys=True)


def dedupe_latest(autnums: Iterable, assets: Iterable = ()) -> Corpus:
    """Keep, per key, the most recently modified object across all registries.

    Ties on date go to the lexicographically greatest registry name; undated
    objects lose to dated ones.
    """
    corpus = Corpus()
    for table, objects in ((corpus.autnums, autnums), (corpus.assets, assets)):
        for obj in objects:
            key = obj.key
            current = table.get(key)
            if current is None:
                table[key] = obj
            else:
                corpus.duplicates += 1
                table[key] = _pick(current, obj)
    return corpus


def merge_corpora(*corpora: Corpus) -> Corpus:
    merged = dedupe_latest(
        [o for c in corpora for o in c.autnums.values()],
        [o for c in corpora for o in c.assets.values()],
    )
    merged.duplicates += sum(c.duplicates for c in corpora)
    return merged


# ---------------------------------------------------------------------------
# corpus cache: "#irrtor-corpus v1" then one line per object:
#   kind \t key \t registry \t date \t json-body

CACHE_MAGIC = "#irrtor-corpus v1"


def _encode(obj) -> dict:
    if isinstance(obj, AutNumObject):
        return {
            "as_name": obj.as_name,
            "policies": [[p.direction, p.peer, list(p.targets), p.is_any, p.line] for p in obj.policies],
            "remarks": [list(r) for r in obj.remark_lines],
            "admin": obj.admin_fields,
            "unparsed": [[u.raw, u.reason, u.peer, u.direction, u.line] for u in obj.unparsed],
        }
    return {"members": list(obj.members), "mnt_by": list(obj.mnt_by)}


def dump_corpus(corpus: Corpus, fh: io.TextIOBase) -> None:
    fh.write(CACHE_MAGIC + "\n")
    for asn in sorted(corpus.autnums):
        obj = corpus.autnums[asn]
        date = obj.last_modified.isoformat() if obj.last_modified else "-"
        body = json.dumps(_encode(obj), sort_keys=True, ensure_ascii=False)
        fh.write(f"aut-num\t{format_asn(asn)}\t{obj.registry}\t{date}\t{body}\n")
    for name in sorted(corpus.assets):
        obj = corpus.assets[name]
        date = obj.last_modified.isoformat() if obj.last_modified else "-"
        body = json.dumps(_encode(obj), sort_keys=True, ensure_ascii=False)
        fh.write(f"as-set\t{name}\t{obj.registry}\t{date}\t{body}\n")


def load_corpus(fh: io.TextIOBase) -> Corpus:
    header = fh.readline().rstrip("\n")
    if header != CACHE_MAGIC:
        raise ValueError(f"not a corpus cache (header {header!r})")
    corpus = Corpus()
    for lineno, line in enumerate(fh, start=2):
        parts = line.rstrip("\n").split("\t", 4)
        if len(parts) != 5:
            raise ValueError(f"corpus cache line {lineno}: expected 5 fields")
        kind, key, registry, date, body = parts
        last_modified = None if date == "-" else dt.date.fromisoformat(date)
        data = json.loads(body)
        if kind == "aut-num":
            asn = parse_asn(key)
            corpus.autnums[asn] = AutNumObject(
                asn=asn,
                as_name=data["as_name"],
                registry=registry,
                last_modified=last_modified,
                policies=[PolicyRule(d, p, tuple(t), a, ln) for d, p, t, a, ln in data["policies"]],
                remark_lines=[tuple(r) for r in data["remarks"]],
                admin_fields=data["admin"],
                unparsed=[Unparsed(*u) for u in data["unparsed"]],
            )
        elif kind == "as-set":
            corpus.assets[key] = AsSetObject(
                name=key,
                members=tuple(data["members"]),
                last_modified=last_modified,
                mnt_by=tuple(data["mnt_by"]),
                registry=registry,
            )
        else:
            raise ValueError(f"corpus cache line {lineno}: unknown kind {kind!r}")
    return corpus
