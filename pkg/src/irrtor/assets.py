"""Flatten AS-SET references into ASN sets, tolerating cycles and dangling names."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .rpsl import Corpus


@dataclass(frozen=True)
class Expansion:
    set_name: str
    asns: frozenset
    dangling: frozenset = frozenset()
    sets_visited: int = 0


@dataclass
class _Closure:
    asns: frozenset
    dangling: frozenset
    sets: frozenset


class AsSetResolver:
    """Resolve set names and AS-name references against a corpus.

    A set's expansion is the union of ASN members of every set reachable from
    it, each set visited once, so results are independent of traversal order
    and are memoized per strongly connected component.
    """

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self._cache: dict = {}
        self.unresolved = 0
        names: dict = {}
        for asn, obj in corpus.autnums.items():
            if obj.as_name:
                names.setdefault(obj.as_name.upper(), []).append(asn)
        # only unambiguous AS-names resolve to an ASN
        self._by_name = {name: asns[0] for name, asns in names.items() if len(asns) == 1}

    def as_name_lookup(self, name: str) -> Optional[int]:
        return self._by_name.get(name.upper())

    def expand_set(self, name: str) -> Expansion:
        name = name.upper()
        if name not in self.corpus.assets:
            return Expansion(name, frozenset(), frozenset({name}), 0)
        closure = self._closure(name)
        return Expansion(name, closure.asns, closure.dangling, len(closure.sets))

    def expand_reference(self, ref) -> frozenset:
        """ASN -> itself; name -> unique AS-name match, else AS-SET expansion."""
        if isinstance(ref, int):
            return frozenset((ref,))
        asn = self.as_name_lookup(ref)
        if asn is not None:
            return frozenset((asn,))
        name = ref.upper()
        if name in self.corpus.assets:
            return self._closure(name).asns
        self.unresolved += 1
        return frozenset()

    # -- internals ---------------------------------------------------------

    def _edges(self, name: str):
        """Split a set's members into (direct ASNs, child sets, dangling names)."""
        asns, children, dangling = set(), [], set()
        for member in self.corpus.assets[name].members:
            if isinstance(member, int):
                asns.add(member)
                continue
            asn = self._by_name.get(member)
            if asn is not None:
                asns.add(asn)
            elif member in self.corpus.assets:
                children.append(member)
            else:
                dangling.add(member)
        return asns, children, dangling

    def _closure(self, root: str) -> _Closure:
        cached = self._cache.get(root)
        if cached is not None:
            return cached
        # iterative Tarjan SCC; closures are assigned in reverse topological order
        index: dict = {}
        low: dict = {}
        on_stack: set = set()
        stack: list = []
        local: dict = {}
        counter = 0
        work = [(root, None)]
        while work:
            node, it = work[-1]
            if it is None:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
                local[node] = self._edges(node)
                it = iter(local[node][1])
                work[-1] = (node, it)
            advanced = False
            for child in it:
                if child in self._cache:
                    continue
                if child not in index:
                    work.append((child, None))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == node:
                        break
                asns, dangling, sets = set(), set(), set(component)
                for w in component:
                    direct, children, dang = local[w]
                    asns |= direct
                    dangling |= dang
                    for child in children:
                        if child not in sets:
                            sub = self._cache[child]
                            asns |= sub.asns
                            dangling |= sub.dangling
                            sets |= sub.sets
                closure = _Closure(frozenset(asns), frozenset(dangling), frozenset(sets))
                for w in component:
                    self._cache[w] = closure
        return self._cache[root]
