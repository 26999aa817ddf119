import itertools
import random
import time
from math import comb

from irrtor.model import Relation

from irrtor.siblings import (
    FieldAssertion,
    extract_assertions,
    field_report,
    filter_assertions,
    infer_siblings,
    run_siblings,
)

from conftest import corpus_from_text


def autnum(asn, **fields):
    lines = [f"aut-num: AS{asn}"]
    for key, value in fields.items():
        lines.append(f"{key.replace('_', '-')}: {value}")
    return "\n".join(lines) + "\n"


def test_four_asns_sharing_an_org_give_six_pairs():
    corpus = corpus_from_text(*(autnum(a, org="ORG-SHARED") for a in (10, 20, 30, 40)))
    result = run_siblings(corpus)
    assert [(p.a, p.b) for p in result.pairs] == list(itertools.combinations((10, 20, 30, 40), 2))
    assert result.discoveries == {"org": 6}


def test_six_asns_are_cut_five_are_kept():
    five = corpus_from_text(*(autnum(a, mnt_by="MNT-FIVE") for a in range(1, 6)))
    six = corpus_from_text(*(autnum(a, mnt_by="MNT-SIX") for a in range(1, 7)))
    assert run_siblings(five).discoveries == {"mnt-by": 10}
    assert run_siblings(six).pairs == []


def test_cutoff_counts_distinct_asns_not_occurrences():
    text = [autnum(a, tech_c="TC1 TC1") for a in (1, 2)]
    assert len([x for x in extract_assertions(corpus_from_text(*text)) if x.field == "tech"]) == 2


def test_dum_values_dropped():
    corpus = corpus_from_text(autnum(1, admin_c="DUMY-RIPE"), autnum(2, admin_c="dummy-ripe"), autnum(3, admin_c="dumy-ripe"))
    assert run_siblings(corpus).pairs == []


def test_unspecified_as_name_dropped():
    corpus = corpus_from_text(autnum(1, as_name="UNSPECIFIED"), autnum(2, as_name="unspecified"))
    assert run_siblings(corpus).pairs == []
    corpus = corpus_from_text(autnum(1, as_name="ACME"), autnum(2, as_name="acme"))
    assert [(p.a, p.b) for p in run_siblings(corpus).pairs] == [(1, 2)]


def test_top_domains_dropped():
    texts = []
    asn = 1
    # 21 popular domains with 3 ASes each, then one rarer domain with 2
    for d in range(21):
        for _ in range(3):
            texts.append(autnum(asn, changed=f"noc@pop{d:02d}.example 20200101"))
            asn += 1
    texts += [autnum(900, changed="a@rare.example"), autnum(901, changed="b@rare.example")]
    result = run_siblings(corpus_from_text(*texts))
    # the 20 top domains go; the 21st popular one and the rare one survive
    assert result.discoveries == {"changed-domain": 3 + 1}
    assert (900, 901) in result.pairs_by_field["changed-domain"]
    assert (61, 62) in result.pairs_by_field["changed-domain"]


def test_mnt_by_on_sets_attributed_to_owner():
    corpus = corpus_from_text(
        autnum(1, mnt_by="MNT-ONE"),
        "as-set: AS7:AS-CUSTOMERS\nmnt-by: MNT-SHARED\n",
        "as-set: AS-STUFF\nmnt-by: MNT-SHARED, MNT-ONE\n",
    )
    assert {x for x in extract_assertions(corpus) if x.field == "mnt-by-as"} == {
        FieldAssertion("mnt-by-as", "mnt-shared", 7),
        # AS-STUFF has no ASN prefix; MNT-ONE maintains only AS1, so AS1 owns it
        FieldAssertion("mnt-by-as", "mnt-shared", 1),
        FieldAssertion("mnt-by-as", "mnt-one", 1),
    }


def test_discoveries_match_brute_force():
    start = time.perf_counter()
    rng = random.Random(11)
    fields = ("org", "mnt-by", "admin", "tech", "notify", "as-name", "changed-domain")
    for _ in range(100):
        assertions = {
            FieldAssertion(rng.choice(fields), f"v{rng.randint(0, 12)}", rng.randint(1, 25))
            for _ in range(rng.randint(0, 120))
        }
        kept = filter_assertions(assertions, top_k=2, max_asns=5)
        result = infer_siblings(kept)
        groups = {}
        for a in kept:
            groups.setdefault((a.field, a.value), set()).add(a.asn)
        expected = {}
        for (f, _), asns in groups.items():
            if len(asns) >= 2:
                expected[f] = expected.get(f, 0) + comb(len(asns), 2)
        assert result.discoveries == expected
        assert all(len(g) <= 5 for g in groups.values())
        pairs = {(p.a, p.b) for p in result.pairs}
        assert all(a < b for a, b in pairs) and len(pairs) == len(result.pairs)
        unique_total = sum(len(result.unique(f)) for f in fields)
        assert unique_total <= len(pairs)
        for f in fields:
            for other in fields:
                if other != f:
                    assert not result.unique(f) & result.pairs_by_field.get(other, set())
    assert time.perf_counter() - start < 5


def test_field_report_with_reference():
    corpus = corpus_from_text(*(autnum(a, org="ORG-X") for a in (1, 2, 3)), autnum(4, notify="a@b"), autnum(5, notify="a@b"))
    result = run_siblings(corpus)
    rows = {r.field: r for r in field_report(result, {(1, 2): Relation.S2S, (4, 5): Relation.P2P})}
    assert rows["org"].discoveries == 3 and rows["org"].overlap == 1 and rows["org"].match == 1
    assert rows["notify"].overlap == 1 and rows["notify"].match == 0
    assert rows["total"].discoveries == 4
