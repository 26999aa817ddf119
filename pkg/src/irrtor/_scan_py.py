"""Pure-Python RPSL block scanner.

Reference implementation of the compiled ``_scan`` extension; both must
produce identical output for every input.
"""

from __future__ import annotations

from typing import Optional

_WS = b" \t\r\x0b\x0c"
_KEY_CHARS = frozenset(b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_")


def _decode(raw: bytes) -> str:
    return raw.decode("utf-8", "replace")


def split_blocks(data: bytes, wanted: Optional[frozenset] = None):
    """Split an RPSL dump into blocks of ``(key, value)`` attribute pairs.

    Returns ``(blocks, malformed, skipped)`` where ``malformed`` counts blocks
    whose first line is not ``attr: value`` and ``skipped`` counts blocks whose
    class is not in ``wanted``.
    """
    blocks = []
    malformed = 0
    skipped = 0

    cur: Optional[list] = None  # list of [key_bytes, [value parts]]
    state = 0  # 0 = between blocks, 1 = in a kept block, 2 = in a dropped block

    def flush():
        if cur:
            blocks.append(
                [(_decode(k).lower(), _decode(b" ".join(parts))) for k, parts in cur]
            )

    for line in data.split(b"\n"):
        if not line.strip(_WS):
            if state == 1:
                flush()
            cur = None
            state = 0
            continue
        first = line[0]
        if first == 0x25 or first == 0x23:  # '%' or '#'
            continue
        if state == 2:
            continue
        hash_at = line.find(b"#")
        if hash_at >= 0:
            line = line[:hash_at]
        if first == 0x20 or first == 0x09 or first == 0x2B:  # ' ', '\t', '+'
            if state == 0:
                malformed += 1
                state = 2
                continue
            content = (line[1:] if first == 0x2B else line).strip(_WS)
            if content:
                cur[-1][1].append(content)
            continue
        colon = line.find(b":")
        key = line[:colon] if colon > 0 else b""
        if not key or any(c not in _KEY_CHARS for c in key):
            if state == 0:
                malformed += 1
                state = 2
            continue
        value = line[colon + 1 :].strip(_WS)
        if state == 0:
            if wanted is not None and _decode(key).lower() not in wanted:
                skipped += 1
                state = 2
                continue
            cur = []
            state = 1
        cur.append([key, [value] if value else []])
    if state == 1:
        flush()
    return blocks, malformed, skipped
