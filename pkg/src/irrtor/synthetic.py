"""Deterministic synthetic IRR corpus for tests, demos and benchmarks.

A tiered AS topology is generated first; every AS then publishes an AUT-NUM
describing its neighbours the way real operators do (with a controlled amount
of sloppiness), plus AS-SETs, remark blocks and administrative contacts.  The
ground-truth topology is written next to the dumps in as-rel format.
"""

from __future__ import annotations

import datetime as dt
import gzip
import random
from pathlib import Path

REGISTRIES = ("RADB", "RIPE", "ALTDB")
POPULAR_DOMAINS = ("gmail.com", "hotmail.com", "yahoo.com")
MAINT_COMPANY = "MAINT-HOSTCO"


class _Topology:
    def __init__(self, rng: random.Random, n_ases: int):
        self.rng = rng
        n_t1 = 6
        n_t2 = max(8, n_ases // 9)
        base = 1000
        self.asns = [base + 7 * i for i in range(n_ases)]
        self.tier1 = self.asns[:n_t1]
        self.tier2 = self.asns[n_t1 : n_t1 + n_t2]
        self.stubs = self.asns[n_t1 + n_t2 :]
        self.rel: dict = {}  # (provider_or_low, other) -> "P2C" | "P2P"
        for i, a in enumerate(self.tier1):
            for b in self.tier1[i + 1 :]:
                self._add(a, b, "P2P")
        for a in self.tier2:
            for p in rng.sample(self.tier1, rng.randint(1, 3)):
                self._add(p, a, "P2C")
        for i, a in enumerate(self.tier2):
            for b in self.tier2[i + 1 :]:
                if rng.random() < 0.08:
                    self._add(a, b, "P2P")
        for s in self.stubs:
            pool = self.tier2 if rng.random() < 0.9 else self.tier1
            for p in rng.sample(pool, rng.randint(1, 2)):
                self._add(p, s, "P2C")
        for _ in range(len(self.stubs) // 10):
            a, b = rng.sample(self.stubs, 2)
            if (a, b) not in self.rel and (b, a) not in self.rel:
                self._add(a, b, "P2P")

    def _add(self, a, b, kind):
        if (b, a) in self.rel:
            return
        self.rel[(a, b)] = kind

    def neighbours(self, asn):
        """(neighbour, role of neighbour relative to asn) for every link of asn."""
        out = []
        for (a, b), kind in self.rel.items():
            if asn == a:
                out.append((b, "customer" if kind == "P2C" else "peer"))
            elif asn == b:
                out.append((a, "provider" if kind == "P2C" else "peer"))
        return sorted(out)


def _date(rng, year_lo=2015, year_hi=2021):
    start = dt.date(year_lo, 1, 1).toordinal()
    end = dt.date(year_hi, 6, 30).toordinal()
    return dt.date.fromordinal(rng.randint(start, end))


def _autnum(asn, topo, rng, orgs, sloppy, registry_date, style):
    lines = [f"aut-num:        AS{asn}"]
    name = orgs["name"].get(asn, f"NET-{asn}")
    lines.append(f"as-name:        {name}")
    lines.append(f"descr:          Synthetic network {asn}")
    groups = {"provider": [], "customer": [], "peer": []}
    for nb, role in topo.neighbours(asn):
        groups[role].append(nb)

    def policy(nb, role):
        out = []
        imp_any = role == "provider"
        exp_any = role == "customer"
        if asn in sloppy and rng.random() < 0.5:
            imp_any = exp_any = True
        if rng.random() < 0.03:
            imp_any, exp_any = exp_any, imp_any  # operator error
        if role == "customer":
            target = f"AS{nb}" if rng.random() < 0.6 else f"AS-C{nb}"
        else:
            target = f"AS{nb}"
        imp = "ANY" if imp_any else target
        own = f"AS{asn}" if rng.random() < 0.5 else f"AS{asn}:AS-CUSTOMERS"
        exp = "ANY" if exp_any else own
        r = rng.random()
        if r < 0.08:
            out.append(f"mp-import:      afi ipv6.unicast from AS{nb} accept {imp}")
        elif r < 0.14:
            out.append(f"import:         from AS{nb}")
            out.append(f"                accept {imp}   # split over two lines")
        elif r < 0.18:
            out.append(f"import:         from AS{nb} action pref=100; accept {imp}")
        else:
            out.append(f"import:         from AS{nb} accept {imp}")
        if rng.random() < 0.05:
            return out  # only one direction published
        if rng.random() < 0.03:
            out.append(f"export:         to AS{nb} announce {{ 192.0.2.0/24 }}")
        else:
            out.append(f"export:         to AS{nb} announce {exp}")
        return out

    if style == "remarks":
        headers = {
            "provider": rng.choice(["--- Transit providers ---", "Upstreams:", "UPLINKS"]),
            "customer": rng.choice(["Customers", "--- downstream clients ---", "Customer links"]),
            "peer": rng.choice(["Peers", "--- peering partners (peers) ---"]),
        }
        order = ["provider", "customer", "peer"]
        if rng.random() < 0.2:
            order = ["peer", "customer", "provider"]  # peer keyword before the gate opens
        for role in order:
            if not groups[role]:
                continue
            lines.append(f"remarks:        {headers[role]}")
            for nb in groups[role]:
                lines.extend(policy(nb, role))
            if rng.random() < 0.3:
                lines.append("remarks:        end")
    elif style == "transit-only":
        lines.append("remarks:        transit")
        for role in ("provider", "customer", "peer"):
            for nb in groups[role]:
                lines.extend(policy(nb, role))
    elif style == "spurious":
        lines.append(f"remarks:        {name} Internet Solution Provider")
        for role in ("provider", "customer", "peer"):
            for nb in groups[role]:
                lines.extend(policy(nb, role))
    else:
        for role in ("provider", "customer", "peer"):
            for nb in groups[role]:
                lines.extend(policy(nb, role))
    if rng.random() < 0.04:
        lines.append(f"import:         from AS{asn + 1} AS{asn + 2} accept ANY")
    lines.append(f"org:            {orgs['org'][asn]}")
    lines.append(f"admin-c:        {orgs['admin'][asn]}")
    lines.append(f"tech-c:         {orgs['tech'][asn]}")
    lines.append(f"notify:         {orgs['notify'][asn]}")
    for mnt in orgs["mnt"][asn]:
        lines.append(f"mnt-by:         {mnt}")
    lines.append(f"changed:        noc@{orgs['domain'][asn]} {registry_date.strftime('%Y%m%d')}")
    if rng.random() < 0.85:
        lines.append(f"last-modified:  {registry_date.isoformat()}T10:00:00Z")
    lines.append("source:         SYNTH")
    return "\n".join(lines) + "\n"


def _orgs(topo, rng):
    orgs = {k: {} for k in ("org", "admin", "tech", "notify", "mnt", "domain", "name")}
    orgs["groups"] = []
    asns = list(topo.asns)
    rng.shuffle(asns)
    i = 0
    group_id = 0
    while i < len(asns):
        size = rng.choice([1, 1, 1, 1, 2, 2, 3, 4])
        members = asns[i : i + size]
        i += size
        group_id += 1
        org = f"ORG-S{group_id}-SYNTH"
        domain = f"net{group_id}.example"
        if size > 1:
            orgs["groups"].append(sorted(members))

        def shared(p, group_value, own_value):
            return group_value if rng.random() < p else own_value

        for asn in members:
            orgs["org"][asn] = shared(0.8, org, f"ORG-A{asn}-SYNTH")
            orgs["admin"][asn] = shared(0.6, f"AD{group_id}-SYNTH", f"AD{asn}-SYNTH")
            orgs["tech"][asn] = shared(0.7, f"TC{group_id}-SYNTH", f"TC{asn}-SYNTH")
            orgs["notify"][asn] = shared(0.6, f"noc@{domain}", f"noc@as{asn}.{domain}")
            orgs["mnt"][asn] = [shared(0.7, f"MNT-S{group_id}", f"MNT-A{asn}")]
            orgs["domain"][asn] = shared(0.8, domain, f"as{asn}.{domain}")
            if size > 1 and rng.random() < 0.5:
                orgs["name"][asn] = f"GROUP{group_id}-NET"
    # noise the sibling filters must remove
    for asn in rng.sample(topo.asns, 40):
        orgs["domain"][asn] = rng.choice(POPULAR_DOMAINS)
    for asn in rng.sample(topo.asns, 12):
        orgs["mnt"][asn] = orgs["mnt"][asn] + [MAINT_COMPANY]
    for k in range(4):
        # a consultant handling a few unrelated networks: plausible false siblings
        for asn in rng.sample(topo.asns, 3):
            orgs["tech"][asn] = f"CONSULT{k}-SYNTH"
    for asn in rng.sample(topo.asns, 8):
        orgs["admin"][asn] = "DUMY-RIPE"
    for asn in rng.sample(topo.asns, 6):
        orgs["name"][asn] = "UNSPECIFIED"
    return orgs


def _assets(topo, rng, orgs):
    blocks = []
    for asn in topo.tier1 + topo.tier2:
        customers = [nb for nb, role in topo.neighbours(asn) if role == "customer"]
        providers = [nb for nb, role in topo.neighbours(asn) if role == "provider"]
        peers = [nb for nb, role in topo.neighbours(asn) if role == "peer"]
        date = _date(rng)
        if customers:
            members = [f"AS-C{c}" if rng.random() < 0.3 else f"AS{c}" for c in customers]
            if rng.random() < 0.2:
                members.append("AS-NOSUCH-SET")
            blocks.append(_asset(f"AS{asn}:AS-CUSTOMERS", members, orgs["mnt"][asn][0], date))
        if providers and rng.random() < 0.3:
            blocks.append(_asset(f"AS-NET{asn}-UPSTREAMS", [f"AS{p}" for p in providers], f"MNT-ONLY{asn}", date))
        if peers and rng.random() < 0.3:
            blocks.append(_asset(f"AS{asn}:AS-PEERS", [f"AS{p}" for p in peers], orgs["mnt"][asn][0], date))
    # per-customer sets; some nest back into their provider's customer set (cycles)
    for asn in topo.tier2 + topo.stubs:
        if rng.random() > 0.3:
            continue
        members = [f"AS{asn}"]
        down = [nb for nb, role in topo.neighbours(asn) if role == "customer"]
        members += [f"AS-C{d}" for d in down[:3]]
        ups = [nb for nb, role in topo.neighbours(asn) if role == "provider"]
        if ups and rng.random() < 0.1:
            members.append(f"AS{ups[0]}:AS-CUSTOMERS")
        blocks.append(_asset(f"AS-C{asn}", members, orgs["mnt"][asn][0], _date(rng)))
    blocks.append(_asset("AS-LOOP-A", ["AS1", "AS-LOOP-B"], "MNT-LOOP", _date(rng)))
    blocks.append(_asset("AS-LOOP-B", ["AS2", "AS-LOOP-A"], "MNT-LOOP", _date(rng)))
    blocks.append(_asset("AS-EMPTY", [], "MNT-LOOP", _date(rng)))
    return blocks


def _asset(name, members, mnt, date):
    lines = [f"as-set:         {name}", "descr:          synthetic set"]
    if members:
        lines.append("members:        " + ", ".join(members[:4]))
        for i in range(4, len(members), 4):
            lines.append("members:        " + ", ".join(members[i : i + 4]))
    lines.append(f"mnt-by:         {mnt}")
    lines.append(f"last-modified:  {date.isoformat()}T00:00:00Z")
    lines.append("source:         SYNTH")
    return "\n".join(lines) + "\n"


def _tie_cluster(base: int, extra_links: bool) -> list:
    """Hand-built ASes whose import/export and remark views of a link tie on grade.

    The owner's two entities both end at grade 0.8 with one disagreement each,
    so the union falls through to the |B| rule (``extra_links``) or to the
    import/export default.
    """
    x = base
    ys = list(range(base + 1, base + 6))
    outside = list(range(base + 6, base + 11)) if extra_links else []
    zs = [base + 20, base + 21]

    def obj(asn, policies, remarks_at=None):
        lines = [f"aut-num:        AS{asn}", f"as-name:        TIE{asn}"]
        for i, (peer, imp, exp) in enumerate(policies):
            if i == remarks_at:
                lines.append("remarks:        Our customers")
            lines.append(f"import:         from AS{peer} accept {imp}")
            lines.append(f"export:         to AS{peer} announce {exp}")
        lines += [f"mnt-by:         MNT-TIE{asn}", "source:         SYNTH"]
        return "\n".join(lines) + "\n"

    owner = [(y, f"AS{y}", "ANY") for y in outside[:4]]
    owner += [(y, f"AS{y}", f"AS{x}") for y in outside[4:]]
    owner += [(ys[0], f"AS{ys[0]}", f"AS{x}"), (ys[1], f"AS{ys[1]}", f"AS{x}")]
    owner += [(y, f"AS{y}", "ANY") for y in ys[2:]]
    blocks = [obj(x, owner, remarks_at=len(outside))]
    blocks.append(obj(ys[0], [(x, f"AS{x}", f"AS{ys[0]}")] + [(z, "ANY", f"AS{ys[0]}") for z in zs]))
    for y in ys[1:] + outside:
        blocks.append(obj(y, [(x, "ANY", f"AS{y}")]))
    for z in zs:
        blocks.append(obj(z, [(ys[0], "ANY", f"AS{z}")]))
    return blocks


NOISE_BLOCKS = [
    "route:          192.0.2.0/24\norigin:         AS1000\nsource:         SYNTH\n",
    "person:         Jane Operator\nnic-hdl:        JO1-SYNTH\nsource:         SYNTH\n",
    "aut-num:        banana\nas-name:        BROKEN\n",
    "   continuation without an attribute\nfoo: bar\n",
    "this line has no colon\naut-num: AS99\n",
]


def generate(seed: int = 2021, n_ases: int = 340) -> dict:
    """Build dump texts per registry plus the ground truth. Pure function of its arguments."""
    rng = random.Random(seed)
    topo = _Topology(rng, n_ases)
    orgs = _orgs(topo, rng)
    sloppy = set(rng.sample(topo.stubs, max(1, len(topo.stubs) // 12)))
    dumps = {r: [f"% synthetic {r} dump, seed {seed}\n"] for r in REGISTRIES}

    publishing = [a for a in topo.asns if rng.random() < 0.88]
    for asn in publishing:
        registry = rng.choice(REGISTRIES)
        r = rng.random()
        if asn in topo.tier1 or asn in topo.tier2:
            style = "remarks" if r < 0.45 else "transit-only" if r < 0.5 else "spurious" if r < 0.55 else "plain"
        else:
            style = "remarks" if r < 0.1 else "plain"
        date = _date(rng)
        dumps[registry].append(_autnum(asn, topo, rng, orgs, sloppy, date, style))
        if rng.random() < 0.08:
            # an older, stale copy in another registry that must lose the dedup
            other = rng.choice([x for x in REGISTRIES if x != registry])
            stale = date - dt.timedelta(days=rng.randint(30, 900))
            stale_topo_rng = random.Random(rng.random())
            dumps[other].append(_autnum(asn, topo, stale_topo_rng, orgs, set(topo.asns), stale, "plain"))
    for block in _assets(topo, rng, orgs):
        dumps[rng.choice(REGISTRIES)].append(block)
    for block in _tie_cluster(64600, False) + _tie_cluster(64700, True):
        dumps["RADB"].append(block)
    for block in NOISE_BLOCKS:
        dumps[rng.choice(REGISTRIES)].append(block)

    truth = []
    for (a, b), kind in sorted(topo.rel.items()):
        truth.append(f"{a}|{b}|{-1 if kind == 'P2C' else 0}")
    siblings = [f"{a}|{b}|1" for group in orgs["groups"] for i, a in enumerate(group) for b in group[i + 1 :]]
    return {
        "dumps": {r: "\n".join(blocks) for r, blocks in dumps.items()},
        "truth": "# synthetic ground truth (as-rel)\n" + "\n".join(truth) + "\n",
        "siblings": "# synthetic sibling ground truth (problink codes)\n" + "\n".join(siblings + truth) + "\n",
    }


def write_synthetic(directory: Path, seed: int = 2021, n_ases: int = 340) -> list:
    """Write the three dumps (ALTDB gzipped), ground-truth files and a config file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data = generate(seed, n_ases)
    paths = []
    entries = []
    for registry, text in data["dumps"].items():
        if registry == "ALTDB":
            path = directory / f"{registry.lower()}.db.gz"
            with gzip.GzipFile(path, "wb", mtime=0) as fh:
                fh.write(text.encode())
        else:
            path = directory / f"{registry.lower()}.db"
            path.write_text(text, encoding="utf-8")
        paths.append(path)
        entries.append((path.name, registry))
    truth = directory / "ground_truth.as-rel.txt"
    truth.write_text(data["truth"], encoding="utf-8")
    paths.append(truth)
    siblings = directory / "ground_truth.problink.txt"
    siblings.write_text(data["siblings"], encoding="utf-8")
    paths.append(siblings)
    cfg = directory / "config.yaml"
    lines = ["registries:"]
    for name, registry in entries:
        lines += [f"  - path: {name}", f"    registry: {registry}"]
    lines += ["output_dir: out", ""]
    cfg.write_text("\n".join(lines), encoding="utf-8")
    paths.append(cfg)
    return paths
