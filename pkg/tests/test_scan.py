import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrtor import _scan_py, scan
from irrtor.rpsl import WANTED_CLASSES, parse_bytes, split_objects

compiled = pytest.importorskip("irrtor._scan", reason="compiled scanner not built")

SAMPLE = (
    b"% header comment\n"
    b"aut-num:   AS65000\n"
    b"as-name:   EXAMPLE   # trailing comment\n"
    b"import:    from AS1\n"
    b"           accept ANY\n"
    b"+          ;\n"
    b"remarks:\n"
    b"\n"
    b"route: 192.0.2.0/24\n"
    b"origin: AS1\n"
    b"\r\n"
    b"  orphan continuation\n"
    b"key: value\n"
    b"\n"
    b"as-set: AS-FOO\n"
    b"members: AS1, AS2\n"
)

rpsl_lines = st.lists(
    st.one_of(
        st.sampled_from(
            [b"", b"\r", b" ", b"% c", b"# c", b"aut-num: AS1", b"as-set: AS-X", b"members: AS1, AS-Y",
             b"import: from AS2 accept ANY", b"export: to AS2 announce AS1", b"remarks: customers",
             b"   continued", b"+ plus", b"\tTAB", b"bad line", b"x#y: z", b"k\xffey: v\xfe", b"route: 1.0.0.0/8"]
        ),
        st.binary(max_size=30),
    ),
    max_size=40,
)


def test_sample_blocks():
    blocks, malformed, skipped = _scan_py.split_blocks(SAMPLE, WANTED_CLASSES)
    assert blocks[0] == [
        ("aut-num", "AS65000"),
        ("as-name", "EXAMPLE"),
        ("import", "from AS1 accept ANY ;"),
        ("remarks", ""),
    ]
    assert blocks[1] == [("as-set", "AS-FOO"), ("members", "AS1, AS2")]
    assert (malformed, skipped) == (1, 1)


def test_unfiltered_keeps_every_class():
    blocks, _, skipped = _scan_py.split_blocks(SAMPLE)
    assert [b[0][0] for b in blocks] == ["aut-num", "route", "as-set"]
    assert skipped == 0


@pytest.mark.parametrize("wanted", [None, WANTED_CLASSES])
def test_backends_agree_on_sample(wanted):
    assert compiled.split_blocks(SAMPLE, wanted) == _scan_py.split_blocks(SAMPLE, wanted)


@settings(max_examples=300, deadline=None)
@given(rpsl_lines, st.booleans())
def test_backends_agree_on_fuzz(lines, filtered):
    data = b"\n".join(lines)
    wanted = WANTED_CLASSES if filtered else None
    assert compiled.split_blocks(data, wanted) == _scan_py.split_blocks(data, wanted)


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=400))
def test_parse_is_total_on_arbitrary_bytes(data):
    autnums, assets, stats = parse_bytes(data)
    assert stats.autnums == len(autnums)
    assert stats.assets == len(assets)
    list(split_objects(data))


def test_split_objects_accepts_streams():
    import io

    assert list(split_objects(io.BytesIO(SAMPLE))) == list(split_objects(SAMPLE))


def test_backend_selected():
    assert scan.BACKEND in ("cython", "python")


_WORDS = [
    "from", "to", "FROM", "accept", "announce", "ACCEPT", "AS1", "as2", "AS1.5", "AS70000.1", "AS0.65535",
    "4294967295", "4294967296", "AS99999999999999999999", "AS", "AS-X", "as-y:AS-Z", "ANY", "as-any", "PeerAS",
    "action", "pref=10;", "med=0;", "at", "192.0.2.1", "2001:db8::1", "1.2", "protocol", "BGP4", "into", "OSPF",
    "afi", "ipv4.unicast", "ipv6", ",", ";", "and", "or", "NOT", "{", "}", "<^AS1+$>", "networks", "é", "x\x85y",
    "a@b.net", "a@b@c", "@b", "a@", "20200101", "2020010", "20201301", "2020-01-02T00:00:00Z", "MNT-A", "\t",
]
_KEYS = [
    "import", "export", "mp-import", "mp-export", "IMPORT", "remarks", "as-name", "changed", "last-modified",
    "org", "mnt-by", "admin-c", "admin", "tech-c", "tech", "notify", "members", "as-set", "aut-num", "descr",
]
_words = st.lists(st.sampled_from(_WORDS), max_size=8).map(" ".join)


@st.composite
def rpsl_objects(draw):
    out = []
    for _ in range(draw(st.integers(0, 4))):
        cls = draw(st.sampled_from(["aut-num", "as-set", "AUT-NUM", "route"]))
        out.append(f"{cls}: {draw(_words)}")
        for _ in range(draw(st.integers(0, 8))):
            if draw(st.integers(0, 5)) == 0:
                out.append(draw(st.sampled_from([" ", "+", "\t"])) + draw(_words))
            else:
                out.append(f"{draw(st.sampled_from(_KEYS))}: {draw(_words)}")
        out.append(draw(st.sampled_from(["", " ", "\r"])))
    return "\n".join(out).encode("utf-8")


@pytest.mark.skipif(scan.parse_chunk is None, reason="compiled kernel not built")
@settings(max_examples=1500, deadline=None)
@given(rpsl_objects())
def test_kernel_matches_reference_parser(data):
    from irrtor.rpsl import parse_bytes_py

    assert parse_bytes(data, "R") == parse_bytes_py(data, "R")


@pytest.mark.skipif(scan.parse_chunk is None, reason="compiled kernel not built")
@settings(max_examples=300, deadline=None)
@given(rpsl_lines)
def test_kernel_matches_reference_on_raw_lines(lines):
    from irrtor.rpsl import parse_bytes_py

    data = b"\n".join(lines)
    assert parse_bytes(data, "R") == parse_bytes_py(data, "R")


def test_kernel_matches_reference_on_bundled_corpus():
    import gzip

    from irrtor.rpsl import parse_bytes_py

    from conftest import SYNTHETIC

    for path in sorted(SYNTHETIC.glob("*.db*")):
        raw = path.read_bytes()
        if path.suffix == ".gz":
            raw = gzip.decompress(raw)
        assert parse_bytes(raw, "R") == parse_bytes_py(raw, "R")
