# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RPSL block scanner. Mirrors ``_scan_py.split_blocks`` exactly."""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_GET_SIZE
from cpython.unicode cimport PyUnicode_DecodeUTF8


cdef inline bint _is_ws(char c) noexcept nogil:
    return c == b' ' or c == b'\t' or c == b'\r' or c == 11 or c == 12


cdef inline bint _is_key_char(char c) noexcept nogil:
    return ((c >= b'a' and c <= b'z') or (c >= b'A' and c <= b'Z')
            or (c >= b'0' and c <= b'9') or c == b'-' or c == b'_')


cdef inline str _dec(const char* p, Py_ssize_t n):
    return PyUnicode_DecodeUTF8(p, n, "replace")


def split_blocks(bytes data, wanted=None):
    cdef const char* buf = PyBytes_AS_STRING(data)
    cdef Py_ssize_t n = PyBytes_GET_SIZE(data)
    cdef Py_ssize_t pos = 0, eol, s, e, i, colon, hash_at
    cdef char first
    cdef int state = 0
    cdef Py_ssize_t malformed = 0, skipped = 0
    cdef bint blank, ok
    cdef list blocks = []
    cdef list cur = None
    cdef list parts = None
    cdef str key

    while pos <= n:
        eol = pos
        while eol < n and buf[eol] != b'\n':
            eol += 1
        s = pos
        e = eol
        pos = eol + 1

        blank = True
        i = s
        while i < e:
            if not _is_ws(buf[i]):
                blank = False
                break
            i += 1
        if blank:
            if state == 1 and cur:
                blocks.append(_finish(cur))
            cur = None
            state = 0
            continue

        first = buf[s]
        if first == b'%' or first == b'#':
            continue
        if state == 2:
            continue

        hash_at = s
        while hash_at < e and buf[hash_at] != b'#':
            hash_at += 1
        e = hash_at

        if first == b' ' or first == b'\t' or first == b'+':
            if state == 0:
                malformed += 1
                state = 2
                continue
            if first == b'+':
                s += 1
            while s < e and _is_ws(buf[s]):
                s += 1
            while e > s and _is_ws(buf[e - 1]):
                e -= 1
            if e > s:
                parts = <list>(<list>cur[len(cur) - 1])[1]
                parts.append(buf[s:e])
            continue

        colon = s
        while colon < e and buf[colon] != b':':
            colon += 1
        ok = colon > s and colon < e
        if ok:
            i = s
            while i < colon:
                if not _is_key_char(buf[i]):
                    ok = False
                    break
                i += 1
        if not ok:
            if state == 0:
                malformed += 1
                state = 2
            continue

        key = _dec(buf + s, colon - s).lower()
        i = colon + 1
        while i < e and _is_ws(buf[i]):
            i += 1
        while e > i and _is_ws(buf[e - 1]):
            e -= 1
        if state == 0:
            if wanted is not None and key not in wanted:
                skipped += 1
                state = 2
                continue
            cur = []
            state = 1
        if e > i:
            cur.append([key, [buf[i:e]]])
        else:
            cur.append([key, []])

    if state == 1 and cur:
        blocks.append(_finish(cur))
    return blocks, malformed, skipped


cdef list _finish(list cur):
    cdef list out = []
    cdef list item
    cdef list parts
    cdef bytes joined
    for item in cur:
        parts = <list>item[1]
        if len(parts) == 1:
            joined = <bytes>parts[0]
        elif not parts:
            joined = b""
        else:
            joined = b" ".join(parts)
        out.append((item[0], _dec(PyBytes_AS_STRING(joined), PyBytes_GET_SIZE(joined))))
    return out


# ---------------------------------------------------------------------------
# whole-object kernel: scan and build aut-num / as-set objects in one pass.
# Blocks with bytes outside printable ASCII, and any policy line the simple
# grammar below does not accept, are handed to the Python parser so results
# are identical to ``rpsl.parse_blocks(split_blocks(...))``.

from libcpp.string cimport string
from libcpp.vector cimport vector
from libc.stdint cimport int64_t, uint64_t


cdef struct Attr:
    Py_ssize_t ks
    Py_ssize_t ke
    size_t vs
    size_t ve
    int code


cdef struct Span:
    size_t s
    size_t e


cdef enum:
    K_OTHER = 0
    K_IMPORT
    K_EXPORT
    K_REMARKS
    K_ASNAME
    K_LASTMOD
    K_CHANGED
    K_ORG
    K_MNTBY
    K_ADMIN
    K_TECH
    K_NOTIFY
    K_MEMBERS
    K_AUTNUM
    K_ASSET


cdef inline char _low(char c) noexcept nogil:
    if c >= b'A' and c <= b'Z':
        return c + 32
    return c


cdef bint _ieq(const char* p, size_t n, const char* lit) noexcept nogil:
    cdef size_t i = 0
    while i < n:
        if lit[i] == 0 or _low(p[i]) != lit[i]:
            return False
        i += 1
    return lit[n] == 0


cdef int _classify(const char* p, size_t n) noexcept nogil:
    if _ieq(p, n, b"import") or _ieq(p, n, b"mp-import"):
        return K_IMPORT
    if _ieq(p, n, b"export") or _ieq(p, n, b"mp-export"):
        return K_EXPORT
    if _ieq(p, n, b"remarks"):
        return K_REMARKS
    if _ieq(p, n, b"as-name"):
        return K_ASNAME
    if _ieq(p, n, b"last-modified"):
        return K_LASTMOD
    if _ieq(p, n, b"changed"):
        return K_CHANGED
    if _ieq(p, n, b"org"):
        return K_ORG
    if _ieq(p, n, b"mnt-by"):
        return K_MNTBY
    if _ieq(p, n, b"admin-c") or _ieq(p, n, b"admin"):
        return K_ADMIN
    if _ieq(p, n, b"tech-c") or _ieq(p, n, b"tech"):
        return K_TECH
    if _ieq(p, n, b"notify"):
        return K_NOTIFY
    if _ieq(p, n, b"members"):
        return K_MEMBERS
    if _ieq(p, n, b"aut-num"):
        return K_AUTNUM
    if _ieq(p, n, b"as-set"):
        return K_ASSET
    return K_OTHER


cdef inline bint _digit(char c) noexcept nogil:
    return c >= b'0' and c <= b'9'


cdef int64_t _digits(const char* p, size_t n) noexcept nogil:
    # value of an all-digit run, saturating above 2**33; -1 if empty or not digits
    cdef uint64_t v = 0
    cdef size_t i
    if n == 0:
        return -1
    for i in range(n):
        if not _digit(p[i]):
            return -1
        if v < (<uint64_t>1 << 33):
            v = v * 10 + <uint64_t>(p[i] - 48)
    return <int64_t>v


cdef int64_t _asn(const char* p, size_t n) noexcept nogil:
    """Same acceptance as ``model.parse_asn`` on a whitespace-free token; -1 if invalid."""
    cdef size_t i = 0, dot
    cdef int64_t hi, lo
    if n >= 2 and _low(p[0]) == b'a' and _low(p[1]) == b's':
        i = 2
    dot = i
    while dot < n and p[dot] != b'.':
        dot += 1
    if dot == n:
        hi = _digits(p + i, n - i)
        if hi < 0 or hi > (<int64_t>1 << 32) - 1:
            return -1
        return hi
    hi = _digits(p + i, dot - i)
    lo = _digits(p + dot + 1, n - dot - 1)
    if hi < 0 or lo < 0 or hi > 0xFFFF or lo > 0xFFFF:
        return -1
    return (hi << 16) | lo


cdef inline bint _name_char(char c) noexcept nogil:
    return ((c >= b'a' and c <= b'z') or (c >= b'A' and c <= b'Z') or _digit(c)
            or c == b'_' or c == b'.' or c == b':' or c == b'-')


cdef bint _is_name(const char* p, size_t n) noexcept nogil:
    cdef size_t i
    if n == 0:
        return False
    for i in range(n):
        if not _name_char(p[i]):
            return False
    return True


cdef bint _is_router(const char* p, size_t n) noexcept nogil:
    cdef size_t i
    cdef bint seen = False
    cdef char c
    for i in range(n):
        c = p[i]
        if _digit(c):
            seen = True
        elif not ((c >= b'a' and c <= b'f') or (c >= b'A' and c <= b'F') or c == b':' or c == b'.'):
            return False
    return seen


cdef bint _reserved(const char* p, size_t n) noexcept nogil:
    return (_ieq(p, n, b"and") or _ieq(p, n, b"or") or _ieq(p, n, b"not")
            or _ieq(p, n, b"except") or _ieq(p, n, b"refine") or _ieq(p, n, b"from")
            or _ieq(p, n, b"to") or _ieq(p, n, b"accept") or _ieq(p, n, b"announce")
            or _ieq(p, n, b"action") or _ieq(p, n, b"at") or _ieq(p, n, b"protocol")
            or _ieq(p, n, b"into") or _ieq(p, n, b"afi") or _ieq(p, n, b"any")
            or _ieq(p, n, b"as-any") or _ieq(p, n, b"networks") or _ieq(p, n, b"community"))


cdef inline bint _sep(char c) noexcept nogil:
    return c == b' ' or c == b'\t'


cdef void _tokenize(const char* p, size_t n, vector[Span]& out, bint comma_splits) noexcept nogil:
    # policy tokens (comma_splits=False keeps "," and ";" as tokens) or list items
    cdef size_t i = 0, j
    cdef Span sp
    out.clear()
    while i < n:
        if _sep(p[i]) or (comma_splits and p[i] == b','):
            i += 1
            continue
        if not comma_splits and (p[i] == b',' or p[i] == b';'):
            sp.s = i
            sp.e = i + 1
            out.push_back(sp)
            i += 1
            continue
        j = i
        while j < n and not _sep(p[j]) and p[j] != b',' and (comma_splits or p[j] != b';'):
            j += 1
        sp.s = i
        sp.e = j
        out.push_back(sp)
        i = j


cdef inline str _ascii(const char* p, size_t n):
    return PyUnicode_DecodeUTF8(p, n, NULL)


cdef str _upper(const char* p, size_t n):
    cdef bytes b = p[:n]
    return b.decode("ascii").upper()


cdef object _fast_policy(const char* p, size_t n, vector[Span]& toks, int* direction):
    """``(peer, targets, is_any)`` if the line parses in the simple grammar, else None."""
    cdef size_t i = 0, nt, k, ts, tn
    cdef const char* t
    cdef int64_t peer, a
    cdef bint is_import
    cdef const char* verb
    _tokenize(p, n, toks, False)
    nt = toks.size()
    while i < nt and (_ieq(p + toks[i].s, toks[i].e - toks[i].s, b"protocol")
                      or _ieq(p + toks[i].s, toks[i].e - toks[i].s, b"into")):
        i += 2
    if i < nt and _ieq(p + toks[i].s, toks[i].e - toks[i].s, b"afi"):
        i += 2
        while i < nt and p[toks[i].s] == b',' and toks[i].e - toks[i].s == 1:
            i += 2
    if i + 1 >= nt:
        return None
    t = p + toks[i].s
    tn = toks[i].e - toks[i].s
    if _ieq(t, tn, b"from"):
        is_import = True
        verb = b"accept"
    elif _ieq(t, tn, b"to"):
        is_import = False
        verb = b"announce"
    else:
        return None
    peer = _asn(p + toks[i + 1].s, toks[i + 1].e - toks[i + 1].s)
    if peer < 0:
        return None
    i += 2
    while True:
        if i >= nt:
            return None
        t = p + toks[i].s
        tn = toks[i].e - toks[i].s
        if _ieq(t, tn, verb):
            break
        if _ieq(t, tn, b"action"):
            while i < nt and not _ieq(p + toks[i].s, toks[i].e - toks[i].s, verb):
                i += 1
            continue
        if _ieq(t, tn, b"at") or _is_router(t, tn):
            i += 1
            continue
        return None
    direction[0] = 1 if is_import else 2
    cdef list targets = []
    cdef size_t count = 0
    cdef size_t last = 0
    for k in range(i + 1, nt):
        tn = toks[k].e - toks[k].s
        t = p + toks[k].s
        if tn == 1 and (t[0] == b',' or t[0] == b';'):
            continue
        count += 1
        last = k
    if count == 0:
        return None
    if count == 1:
        t = p + toks[last].s
        tn = toks[last].e - toks[last].s
        if _ieq(t, tn, b"any") or _ieq(t, tn, b"as-any"):
            return (peer, (), True)
    for k in range(i + 1, nt):
        tn = toks[k].e - toks[k].s
        t = p + toks[k].s
        if tn == 1 and (t[0] == b',' or t[0] == b';'):
            continue
        if _reserved(t, tn) or not _is_name(t, tn):
            return None
        a = _asn(t, tn)
        if a >= 0:
            targets.append(a)
        elif _ieq(t, tn, b"peeras"):
            targets.append(peer)
        else:
            targets.append(_upper(t, tn))
    return (peer, tuple(targets), False)


cdef list _split_items(const char* p, size_t n, vector[Span]& toks):
    cdef list out = []
    cdef size_t k
    _tokenize(p, n, toks, True)
    for k in range(toks.size()):
        out.append(_ascii(p + toks[k].s, toks[k].e - toks[k].s))
    return out


cdef class _Hooks:
    cdef object parse_autnum, parse_asset, apply_policy, apply_changed, changed_parts
    cdef object parse_date, AutNumObject, AsSetObject, PolicyRule, Skip, admin_names
    cdef dict dates

    cdef object date(self, str text):
        try:
            return self.dates[text]
        except KeyError:
            value = self.dates[text] = self.parse_date(text)
            return value

    cdef object rule(self, str direction, object peer, tuple targets, bint is_any, size_t idx):
        return tuple.__new__(self.PolicyRule, (direction, peer, targets, is_any, idx))

    def __init__(self, mod):
        self.parse_autnum = mod.parse_autnum
        self.parse_asset = mod.parse_asset
        self.apply_policy = mod._apply_policy
        self.apply_changed = mod._apply_changed
        self.changed_parts = mod._changed_parts
        self.parse_date = mod._parse_date
        self.AutNumObject = mod.AutNumObject
        self.AsSetObject = mod.AsSetObject
        self.PolicyRule = mod.PolicyRule
        self.Skip = mod.Skip
        self.dates = {}
        self.admin_names = {K_ORG: "org", K_MNTBY: "mnt-by", K_ADMIN: "admin",
                            K_TECH: "tech", K_NOTIFY: "notify"}


cdef bint _fast_changed(const char* p, size_t n, _Hooks h, dict admin, list dates) except -1:
    """``email YYYYMMDD`` with a single ``@``; False leaves the value to the Python helper."""
    cdef size_t i = 0, at = 0, ats = 0, sp
    while i < n and not _sep(p[i]):
        if p[i] == b'@':
            at = i
            ats += 1
        i += 1
    sp = i
    if ats != 1 or at == 0 or at + 1 >= sp:
        return False
    while i < n and _sep(p[i]):
        i += 1
    if i == sp or n - i != 8 or _digits(p + i, 8) < 0:
        return False
    admin.setdefault("changed-domain", []).append(_ascii(p + at + 1, sp - at - 1).lower())
    date = h.date(_ascii(p + i, 8))
    if date is not None:
        dates.append(date)
    return True


cdef object _fast_autnum(const char* buf, const char* sc, vector[Attr]& attrs,
                         str registry, _Hooks h, vector[Span]& toks):
    cdef Attr at = attrs[0]
    cdef int64_t asn = _asn(sc + at.vs, at.ve - at.vs)
    cdef size_t idx
    cdef int direction
    cdef str value
    cdef dict admin
    cdef list policies, remarks, changed_dates = []
    if asn < 0:
        return None
    obj = h.AutNumObject(asn, "", registry)
    admin = obj.admin_fields
    policies = obj.policies
    remarks = obj.remark_lines
    last_modified = None
    for idx in range(attrs.size()):
        at = attrs[idx]
        if at.code == K_IMPORT or at.code == K_EXPORT:
            direction = 0
            parsed = _fast_policy(sc + at.vs, at.ve - at.vs, toks, &direction)
            if parsed is not None and direction == (1 if at.code == K_IMPORT else 2):
                policies.append(h.rule("import" if direction == 1 else "export",
                                       parsed[0], parsed[1], parsed[2], idx))
            else:
                h.apply_policy(obj, "import" if at.code == K_IMPORT else "export",
                               _ascii(sc + at.vs, at.ve - at.vs), idx)
        elif at.code == K_REMARKS:
            remarks.append((idx, _ascii(sc + at.vs, at.ve - at.vs)))
        elif at.code == K_ASNAME:
            value = _ascii(sc + at.vs, at.ve - at.vs)
            obj.as_name = value
            admin.setdefault("as-name", []).append(value)
        elif at.code == K_LASTMOD:
            last_modified = h.date(_ascii(sc + at.vs, at.ve - at.vs))
        elif at.code == K_CHANGED:
            if not _fast_changed(sc + at.vs, at.ve - at.vs, h, admin, changed_dates):
                h.apply_changed(admin, changed_dates, _ascii(sc + at.vs, at.ve - at.vs))
        elif K_ORG <= at.code <= K_NOTIFY:
            admin.setdefault(h.admin_names[at.code], []).extend(_split_items(sc + at.vs, at.ve - at.vs, toks))
    obj.last_modified = last_modified or (max(changed_dates) if changed_dates else None)
    return obj


cdef object _fast_asset(const char* sc, vector[Attr]& attrs, str registry, _Hooks h, vector[Span]& toks):
    cdef Attr at = attrs[0]
    cdef size_t idx, k
    cdef int64_t a
    cdef const char* t
    cdef size_t tn
    cdef list members = [], mnt_by = [], changed_dates = []
    if not _is_name(sc + at.vs, at.ve - at.vs):
        return None
    name = _upper(sc + at.vs, at.ve - at.vs)
    last_modified = None
    for idx in range(1, attrs.size()):
        at = attrs[idx]
        if at.code == K_MEMBERS:
            _tokenize(sc + at.vs, at.ve - at.vs, toks, True)
            for k in range(toks.size()):
                t = sc + at.vs + toks[k].s
                tn = toks[k].e - toks[k].s
                a = _asn(t, tn)
                if a >= 0:
                    members.append(a)
                elif _is_name(t, tn):
                    members.append(_upper(t, tn))
        elif at.code == K_MNTBY:
            mnt_by.extend(_split_items(sc + at.vs, at.ve - at.vs, toks))
        elif at.code == K_LASTMOD:
            last_modified = h.date(_ascii(sc + at.vs, at.ve - at.vs))
        elif at.code == K_CHANGED:
            date = h.changed_parts(_ascii(sc + at.vs, at.ve - at.vs))[1]
            if date is not None:
                changed_dates.append(date)
    return h.AsSetObject(name, tuple(members),
                         last_modified or (max(changed_dates) if changed_dates else None),
                         tuple(mnt_by), registry)


cdef list _py_block(const char* buf, const char* sc, vector[Attr]& attrs):
    cdef list out = []
    cdef size_t idx
    for idx in range(attrs.size()):
        out.append((_dec(buf + attrs[idx].ks, attrs[idx].ke - attrs[idx].ks).lower(),
                    _dec(sc + attrs[idx].vs, attrs[idx].ve - attrs[idx].vs)))
    return out


cdef inline bint _plain(const char* p, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef char c
    for i in range(n):
        c = p[i]
        if not ((c >= 0x20 and c <= 0x7e) or c == b'\t'):
            return False
    return True


def parse_chunk(bytes data, str registry, mod):
    """Scan ``data`` and build objects directly.

    Returns ``(autnums, assets, malformed, other, skip_reasons, unparsed)``.
    ``mod`` supplies the object types and the Python fallbacks.
    """
    cdef _Hooks h = _Hooks(mod)
    cdef const char* buf = PyBytes_AS_STRING(data)
    cdef Py_ssize_t n = PyBytes_GET_SIZE(data)
    cdef Py_ssize_t pos = 0, eol, s, e, i, colon, hash_at
    cdef char first
    cdef int state = 0, cls = 0
    cdef Py_ssize_t malformed = 0, other = 0, unparsed = 0
    cdef bint blank, ok, plain = True
    cdef vector[Attr] attrs
    cdef vector[Span] toks
    cdef string scratch
    cdef Attr at
    cdef list autnums = [], assets = [], skips = []

    while pos <= n:
        eol = pos
        while eol < n and buf[eol] != b'\n':
            eol += 1
        s = pos
        e = eol
        pos = eol + 1

        blank = True
        i = s
        while i < e:
            if not _is_ws(buf[i]):
                blank = False
                break
            i += 1
        if blank:
            if state == 1 and attrs.size():
                unparsed += _emit(buf, scratch.c_str(), attrs, cls, plain, registry, h,
                                  toks, autnums, assets, skips)
            attrs.clear()
            scratch.clear()
            state = 0
            continue

        first = buf[s]
        if first == b'%' or first == b'#':
            continue
        if state == 2:
            continue

        hash_at = s
        while hash_at < e and buf[hash_at] != b'#':
            hash_at += 1
        e = hash_at

        if first == b' ' or first == b'\t' or first == b'+':
            if state == 0:
                malformed += 1
                state = 2
                continue
            if first == b'+':
                s += 1
            while s < e and _is_ws(buf[s]):
                s += 1
            while e > s and _is_ws(buf[e - 1]):
                e -= 1
            if e > s:
                if attrs.back().ve > attrs.back().vs:
                    scratch.push_back(b' ')
                if plain and not _plain(buf + s, e - s):
                    plain = False
                scratch.append(buf + s, <size_t>(e - s))
                attrs.back().ve = scratch.size()
            continue

        colon = s
        while colon < e and buf[colon] != b':':
            colon += 1
        ok = colon > s and colon < e
        if ok:
            i = s
            while i < colon:
                if not _is_key_char(buf[i]):
                    ok = False
                    break
                i += 1
        if not ok:
            if state == 0:
                malformed += 1
                state = 2
            continue

        i = colon + 1
        while i < e and _is_ws(buf[i]):
            i += 1
        while e > i and _is_ws(buf[e - 1]):
            e -= 1
        at.code = _classify(buf + s, colon - s)
        if state == 0:
            if at.code != K_AUTNUM and at.code != K_ASSET:
                other += 1
                state = 2
                continue
            cls = at.code
            state = 1
            plain = True
        at.ks = s
        at.ke = colon
        at.vs = scratch.size()
        if e > i:
            if plain and not _plain(buf + i, e - i):
                plain = False
            scratch.append(buf + i, <size_t>(e - i))
        at.ve = scratch.size()
        attrs.push_back(at)

    if state == 1 and attrs.size():
        unparsed += _emit(buf, scratch.c_str(), attrs, cls, plain, registry, h,
                          toks, autnums, assets, skips)
    return autnums, assets, malformed, other, skips, unparsed


cdef Py_ssize_t _emit(const char* buf, const char* sc, vector[Attr]& attrs, int cls, bint plain,
                      str registry, _Hooks h, vector[Span]& toks,
                      list autnums, list assets, list skips) except -1:
    obj = None
    if cls == K_AUTNUM:
        if plain:
            obj = _fast_autnum(buf, sc, attrs, registry, h, toks)
        if obj is None:
            obj = h.parse_autnum(_py_block(buf, sc, attrs), registry)
        if isinstance(obj, h.Skip):
            skips.append(obj.reason)
            return 0
        autnums.append(obj)
        return len(obj.unparsed)
    if plain:
        obj = _fast_asset(sc, attrs, registry, h, toks)
    if obj is None:
        obj = h.parse_asset(_py_block(buf, sc, attrs), registry)
    if isinstance(obj, h.Skip):
        skips.append(obj.reason)
    else:
        assets.append(obj)
    return 0
