import itertools
import time
from collections import Counter

import pytest

from irrtor.config import PipelineConfig, config_from_dict
from irrtor.heuristics import (
    REMARK_KEYWORDS,
    SET_KEYWORDS,
    KeywordTable,
    export_any_counts,
    infer_import_export,
    infer_remarks,
    infer_sets,
    resolve_any_any,
    run_heuristics,
    segment_remarks,
    set_owner,
    set_relation,
)
from irrtor.model import Heuristic, Relation
from irrtor.rpsl import AutNumObject, PolicyRule

from conftest import corpus_from_text

P2C, C2P, P2P = Relation.P2C, Relation.C2P, Relation.P2P
OWN, PEER = 100, 200

# Role of the peer implied by the owner's policy toward it, from the owner's view.
TABLE = {
    ("ANY", "specific"): C2P,  # owner behaves as the customer
    ("specific", "ANY"): P2C,  # owner behaves as the provider
    ("specific", "specific"): P2P,
}


def _rule(direction, kind):
    if kind == "ANY":
        return PolicyRule(direction, PEER, (), True)
    return PolicyRule(direction, PEER, (OWN,) if direction == "export" else (PEER,), False)


@pytest.mark.parametrize("imp", ["ANY", "specific", None])
@pytest.mark.parametrize("exp", ["ANY", "specific", None])
@pytest.mark.parametrize("counts", [(3, 1), (1, 3), (2, 2), (0, 0)])
def test_import_export_table(imp, exp, counts):
    policies = []
    if imp:
        policies.append(_rule("import", imp))
    if exp:
        policies.append(_rule("export", exp))
    obj = AutNumObject(OWN, policies=policies)
    stats = Counter()
    out = infer_import_export(obj, {OWN: counts[0], PEER: counts[1]}, stats)
    if imp is None or exp is None:
        assert out == [] and stats["ie_one_direction"] == (1 if (imp or exp) else 0)
        return
    if (imp, exp) == ("ANY", "ANY"):
        expected = P2C if counts[0] > counts[1] else C2P if counts[0] < counts[1] else P2P
    else:
        expected = TABLE[(imp, exp)]
    assert [(o.from_asn, o.to_asn, o.relation) for o in out] == [(OWN, PEER, expected)]
    assert out[0].entity_id == "AS100" and out[0].heuristic is Heuristic.IMPORT_EXPORT


def test_resolve_any_any_is_dual_under_swap():
    counts = {1: 5, 2: 3}
    assert resolve_any_any(1, 2, counts).relation is P2C
    assert resolve_any_any(2, 1, counts).relation is C2P
    assert resolve_any_any(1, 3, {}).relation is P2P


def test_export_any_counted_per_statement():
    corpus = corpus_from_text(
        "aut-num: AS1\nexport: to AS2 announce ANY\nmp-export: to AS3 announce ANY\nexport: to AS4 announce AS1\n\n"
        "aut-num: AS2\nexport: to AS1 announce AS2\n"
    )
    assert export_any_counts(corpus) == {1: 2}


def test_any_on_either_rule_dominates_peer_side():
    obj = AutNumObject(OWN, policies=[
        PolicyRule("import", PEER, (PEER,), False), PolicyRule("import", PEER, (), True),
        PolicyRule("export", PEER, (OWN,), False)])
    assert infer_import_export(obj, {})[0].relation is C2P


def test_relation_reverse_is_involution():
    for rel in Relation:
        assert rel.reverse().reverse() is rel
    assert P2C.reverse() is C2P and P2P.reverse() is P2P and Relation.S2S.reverse() is Relation.S2S


# ---------------------------------------------------------------------------
# remarks

PUBLISHED_REMARKS = {
    "p2c": ["downstream", "downlink", "customer", "client"],
    "c2p": ["provider", "upstream", "uplink", "transit"],
    "p2p": ["peer"],
}
PUBLISHED_SETS = {
    "p2c": ["downstream", "downlink", "customer", "client", "custs"],
    "c2p": ["provider", "upstream", "uplink", "backbone"],
    "p2p": ["peer"],
}


def test_keyword_tables_match_published_lists():
    cfg = PipelineConfig()
    assert cfg.remark_keywords.as_dict() == PUBLISHED_REMARKS
    assert cfg.set_keywords.as_dict() == PUBLISHED_SETS
    assert REMARK_KEYWORDS.solo == ("transit",) and REMARK_KEYWORDS.gated
    assert not SET_KEYWORDS.gated and "transit" not in SET_KEYWORDS.c2p


def test_keyword_tables_configurable():
    cfg = config_from_dict({"registries": [], "keywords": {"remarks": {"p2c": ["kunde"], "c2p": ["lieferant"]}}})
    assert cfg.remark_keywords.hits("Kunde:") == [("kunde", P2C)]
    assert cfg.remark_keywords.p2p == ("peer",)


@pytest.mark.parametrize(
    "text, hits",
    [
        ("Customers", [("customer", P2C)]),
        ("UPLINKS:", [("uplink", C2P)]),
        ("uplinked networks", []),
        ("--- peering partners (peers) ---", [("peer", P2P)]),
        ("customer/provider", [("customer", P2C), ("provider", C2P)]),
        ("transit-providers", [("transit", C2P), ("provider", C2P)]),
    ],
)
def test_token_matching(text, hits):
    assert REMARK_KEYWORDS.hits(text) == hits


OPTIONS = ["customer", "Upstreams", "peer", "transit", "Peering", "end", "NOC contact", "Clients:"]


def _script_object(script):
    """One remark per script entry, each followed by a policy to a fresh peer."""
    obj = AutNumObject(OWN)
    line = 1
    for i, text in enumerate(script):
        obj.remark_lines.append((line, text))
        obj.policies.append(PolicyRule("import", 1000 + i, (), True, line + 1))
        obj.policies.append(PolicyRule("export", 1000 + i, (OWN,), False, line + 2))
        line += 3
    return obj


def gating_oracle(script):
    table = {
        "customer": P2C, "customers": P2C, "clients": P2C,
        "upstreams": C2P, "transit": C2P, "peer": P2P,
    }

    def words(text):
        return ["".join(ch for ch in w if ch.isalpha()) for w in text.lower().split()]

    keywords = [[w for w in words(t) if w in table] for t in script]
    others = any(w != "transit" for ks in keywords for w in ks)
    seen, out, current = set(), [], None
    for i, text in enumerate(script):
        w = words(text)
        if w and w[0] == "end":
            current = None
        elif keywords[i]:
            word = keywords[i][0]
            rel = table[word]
            usable = not (word == "transit" and others) and not (rel is P2P and not {P2C, C2P} <= seen)
            if usable and rel is not P2P:
                seen.add(rel)
            current = rel if usable else None
        if current is not None:
            out.append((OWN, 1000 + i, current))
    return out


def test_remark_gating_permutations():
    start = time.perf_counter()
    checked = 0
    for n in range(1, 5):
        for script in itertools.product(OPTIONS, repeat=n):
            obj = _script_object(script)
            got = [(o.from_asn, o.to_asn, o.relation) for o in infer_remarks(segment_remarks(obj))]
            assert sorted(got) == sorted(gating_oracle(script)), script
            checked += 1
    assert checked == sum(len(OPTIONS) ** n for n in range(1, 5))
    assert time.perf_counter() - start < 5


def test_transit_alone_is_c2p():
    obj = _script_object(["Transit"])
    assert [o.relation for o in infer_remarks(segment_remarks(obj))] == [C2P]


def test_peer_needs_both_earlier_roles():
    obj = _script_object(["customers", "peers", "upstreams", "peers"])
    rels = {o.to_asn: o.relation for o in infer_remarks(segment_remarks(obj))}
    assert rels == {1000: P2C, 1002: C2P, 1003: P2P}


def test_block_entities_and_indices():
    obj = _script_object(["customers", "hello", "upstreams"])
    blocks = segment_remarks(obj)
    assert [b.entity_id for b in blocks] == ["AS100#0", "AS100#1"]
    assert blocks[0].peer_asns == [1000, 1001]


def test_remarks_from_rpsl_text_use_unparsed_peer_hint():
    corpus = corpus_from_text(
        "aut-num: AS10\nremarks: Customers\nimport: from AS11 accept AS11\nexport: to AS11 announce { 10.0.0.0/8 }\n"
        "remarks: upstream\nimport: from AS12 accept ANY\nremarks: end\nimport: from AS13 accept ANY\n"
    )
    obs = infer_remarks(segment_remarks(corpus.autnums[10]))
    assert [(o.to_asn, o.relation) for o in obs] == [(11, P2C), (12, C2P)]


# ---------------------------------------------------------------------------
# sets


@pytest.mark.parametrize(
    "name, rel",
    [
        ("AS247:AS-Customers", P2C),
        ("AS-FOO-CUSTS", P2C),
        ("AS-BACKBONE", C2P),
        ("AS1:AS-UPSTREAMS", C2P),
        ("AS-PEERS", P2P),
        ("AS-TRANSIT", None),
        ("AS-PEERS-AND-CUSTOMERS", None),
        ("AS-UPLINKED", None),
        ("AS-FOO", None),
    ],
)
def test_set_relation(name, rel):
    assert set_relation(name) is rel


def test_set_owner():
    index = {"MNT-A": {1}, "MNT-B": {2, 3}}
    assert set_owner("AS247:AS-CUSTOMERS", ["MNT-B"], index) == 247
    assert set_owner("AS-CUSTOMERS", ["mnt-a"], index) == 1
    assert set_owner("AS-CUSTOMERS", ["MNT-B"], index) is None
    assert set_owner("AS-CUSTOMERS", [], index) is None


def test_infer_sets_expands_nested_members():
    corpus = corpus_from_text(
        "aut-num: AS5\nmnt-by: MNT-FIVE\n",
        "as-set: AS247:AS-Customers\nmembers: AS1, AS-INNER, AS247\n",
        "as-set: AS-INNER\nmembers: AS2, AS247:AS-CUSTOMERS\n",
        "as-set: AS-MY-UPSTREAMS\nmembers: AS7\nmnt-by: MNT-FIVE\n",
        "as-set: AS-ORPHAN-PEERS\nmembers: AS9\nmnt-by: MNT-NOBODY\n",
    )
    stats = Counter()
    got = {(o.from_asn, o.to_asn, o.relation, o.entity_id) for o in infer_sets(corpus, stats=stats)}
    assert got == {
        (247, 1, P2C, "AS247:AS-CUSTOMERS"),
        (247, 2, P2C, "AS247:AS-CUSTOMERS"),
        (5, 7, C2P, "AS-MY-UPSTREAMS"),
    }
    assert stats["sets_no_owner"] == 1


def test_run_heuristics_is_order_independent():
    texts = [
        "aut-num: AS1\nimport: from AS2 accept ANY\nexport: to AS2 announce AS1\n",
        "aut-num: AS2\nremarks: customers\nimport: from AS1 accept AS1\nexport: to AS1 announce ANY\n",
        "as-set: AS2:AS-CUSTOMERS\nmembers: AS1\n",
    ]
    a = run_heuristics(corpus_from_text(*texts))
    b = run_heuristics(corpus_from_text(*reversed(texts)))
    assert a == b
    assert [o.relation for o in a[Heuristic.IMPORT_EXPORT]] == [C2P, P2C]


def test_custom_table_plural_off():
    table = KeywordTable(p2c=("customer",), c2p=(), p2p=(), plural=False)
    assert table.hits("customers") == [] and table.hits("customer") == [("customer", P2C)]
