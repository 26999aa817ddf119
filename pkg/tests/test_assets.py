import random
import time

from hypothesis import given, settings
from hypothesis import strategies as st

from irrtor.assets import AsSetResolver
from irrtor.rpsl import AsSetObject, AutNumObject, Corpus

from conftest import corpus_from_text


def make_corpus(sets, names=None):
    corpus = Corpus()
    for name, members in sets.items():
        corpus.assets[name] = AsSetObject(name, tuple(members))
    for asn, as_name in (names or {}).items():
        corpus.autnums[asn] = AutNumObject(asn, as_name)
    return corpus


def bfs_oracle(sets, root):
    """Naive reachability: every ASN member of every set reachable from root."""
    if root not in sets:
        return set()
    seen, queue, out = {root}, [root], set()
    while queue:
        name = queue.pop()
        for m in sets[name]:
            if isinstance(m, int):
                out.add(m)
            elif m in sets and m not in seen:
                seen.add(m)
                queue.append(m)
    return out


def test_two_level_nesting():
    r = AsSetResolver(make_corpus({"AS-A": [1, "AS-B"], "AS-B": [2, "AS-C"], "AS-C": [3]}))
    assert r.expand_set("AS-A").asns == {1, 2, 3}
    assert r.expand_set("as-b").asns == {2, 3}


def test_cycle_from_rpsl_text():
    corpus = corpus_from_text("as-set: AS-A\nmembers: AS1, AS-B\n\nas-set: AS-B\nmembers: AS2, AS-A\n")
    r = AsSetResolver(corpus)
    assert r.expand_set("AS-A").asns == {1, 2}
    assert r.expand_set("AS-B").asns == {1, 2}
    assert r.expand_set("AS-A").sets_visited == 2


def test_self_loop_and_empty():
    r = AsSetResolver(make_corpus({"AS-SELF": ["AS-SELF", 5], "AS-EMPTY": []}))
    assert r.expand_set("AS-SELF").asns == {5}
    assert r.expand_set("AS-EMPTY").asns == frozenset()


def test_dangling_members_and_roots():
    r = AsSetResolver(make_corpus({"AS-A": [1, "AS-MISSING"]}))
    e = r.expand_set("AS-A")
    assert e.asns == {1} and e.dangling == {"AS-MISSING"}
    root = r.expand_set("AS-NOPE")
    assert root.asns == frozenset() and root.dangling == {"AS-NOPE"}


def test_as_name_takes_precedence_over_set():
    r = AsSetResolver(make_corpus({"AS-DUAL": [9], "AS-A": ["AS-DUAL"]}, {77: "as-dual"}))
    assert r.expand_reference("AS-DUAL") == {77}
    assert r.expand_set("AS-A").asns == {77}


def test_ambiguous_as_name_falls_through():
    r = AsSetResolver(make_corpus({"AS-DUAL": [9]}, {77: "AS-DUAL", 78: "AS-DUAL"}))
    assert r.expand_reference("AS-DUAL") == {9}


def test_reference_kinds():
    r = AsSetResolver(make_corpus({"AS1:AS-CUST": [3]}, {5: "FIVE"}))
    assert r.expand_reference(42) == {42}
    assert r.expand_reference("five") == {5}
    assert r.expand_reference("AS1:AS-CUST") == {3}
    assert r.expand_reference("AS1") == frozenset()
    assert r.unresolved == 1


def random_graph(rng, n_sets, density):
    names = [f"AS-S{i}" for i in range(n_sets)]
    sets = {}
    for name in names:
        members = [rng.randint(1, 5000) for _ in range(rng.randint(0, 3))]
        members += rng.sample(names, min(n_sets, rng.randint(0, density)))
        if rng.random() < 0.05:
            members.append("AS-DANGLING")
        rng.shuffle(members)
        sets[name] = members
    return sets


def test_random_graphs_match_oracle():
    start = time.perf_counter()
    rng = random.Random(7)
    for n_sets, density in ((10, 3), (100, 4), (400, 2), (1000, 3), (1000, 8)):
        sets = random_graph(rng, n_sets, density)
        r = AsSetResolver(make_corpus(sets))
        for name in sets:
            assert r.expand_set(name).asns == bfs_oracle(sets, name), name
    assert time.perf_counter() - start < 10


def test_long_chain_does_not_recurse():
    n = 20000
    sets = {f"AS-C{i}": [i, f"AS-C{i + 1}"] for i in range(n)}
    sets[f"AS-C{n}"] = ["AS-C0"]
    r = AsSetResolver(make_corpus(sets))
    assert len(r.expand_set("AS-C0").asns) == n


graphs = st.integers(1, 30).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.one_of(st.integers(0, n - 1), st.integers(100, 130))), max_size=80),
    )
)


def _sets_from(n, edges):
    sets = {f"AS-S{i}": [] for i in range(n)}
    for src, dst in edges:
        sets[f"AS-S{src}"].append(dst if dst >= 100 else f"AS-S{dst}")
    return sets


@settings(max_examples=150, deadline=None)
@given(graphs, st.randoms(use_true_random=False))
def test_order_independence_and_monotonicity(graph, rnd):
    n, edges = graph
    sets = _sets_from(n, edges)
    base = {k: AsSetResolver(make_corpus(sets)).expand_set(k).asns for k in sets}
    shuffled = {k: rnd.sample(v, len(v)) for k, v in sets.items()}
    r = AsSetResolver(make_corpus(shuffled))
    assert {k: r.expand_set(k).asns for k in sets} == base
    victim = f"AS-S{rnd.randrange(n)}"
    grown = dict(sets)
    grown[victim] = sets[victim] + [rnd.choice([999, f"AS-S{rnd.randrange(n)}"])]
    r = AsSetResolver(make_corpus(grown))
    for k in sets:
        assert base[k] <= r.expand_set(k).asns
