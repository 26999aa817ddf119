"""Ingest throughput: compiled kernel vs the pure-Python parser.

The bundled synthetic corpus is replicated to the requested size and fed
through ``rpsl.parse_bytes`` in 32 MB chunks, the same way ``load_dump``
reads a dump. Parsed objects are dropped after each chunk so the run does
not need memory proportional to the input.

    python3 benchmarks/bench_ingest.py                  # both backends
    python3 benchmarks/bench_ingest.py --size-mb 1024 --backend cython
"""

from __future__ import annotations

import argparse
import gzip
import json
import os
import subprocess
import sys
import time
from pathlib import Path

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic"


def corpus_bytes(directory: Path = CORPUS) -> bytes:
    parts = []
    for path in sorted(directory.glob("*.db*")):
        raw = path.read_bytes()
        parts.append(gzip.decompress(raw) if path.suffix == ".gz" else raw)
    return b"\n\n".join(p.rstrip(b"\n") for p in parts) + b"\n\n"


def replicated_chunks(raw: bytes, total: int, chunk: int = 32 << 20):
    """Yield copies of ``raw`` glued into chunks of about ``chunk`` bytes until ``total`` is reached."""
    block = raw * max(1, chunk // len(raw))
    sent = 0
    while sent < total:
        piece = block if total - sent >= len(block) else raw * max(1, (total - sent) // len(raw))
        sent += len(piece)
        yield piece


def measure(size_mb: float, chunk_mb: int = 32) -> dict:
    from irrtor import rpsl, scan

    raw = corpus_bytes()
    total = int(size_mb * (1 << 20))
    nbytes = objects = 0
    elapsed = 0.0
    for piece in replicated_chunks(raw, total, chunk_mb << 20):
        t0 = time.perf_counter()
        autnums, assets, _ = rpsl.parse_bytes(piece, "BENCH")
        elapsed += time.perf_counter() - t0
        nbytes += len(piece)
        objects += len(autnums) + len(assets)
        del autnums, assets
    return {
        "backend": scan.BACKEND,
        "bytes": nbytes,
        "objects": objects,
        "seconds": round(elapsed, 3),
        "mb_per_s": round(nbytes / elapsed / 1e6, 1),
    }


def _run_backend(backend: str, size_mb: float) -> dict:
    env = dict(os.environ)
    env.pop("IRRTOR_PURE_PYTHON", None)
    if backend == "python":
        env["IRRTOR_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, __file__, "--backend", "current", "--size-mb", str(size_mb)],
        env=env, check=True, capture_output=True, text=True,
    )
    return json.loads(out.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size-mb", type=float, default=1024, help="input size for the compiled backend")
    ap.add_argument("--python-size-mb", type=float, default=64, help="input size for the pure-Python backend")
    ap.add_argument("--backend", choices=["both", "cython", "python", "current"], default="both")
    args = ap.parse_args(argv)

    if args.backend == "current":
        print(json.dumps(measure(args.size_mb)))
        return 0
    rows = []
    if args.backend in ("both", "cython"):
        rows.append(_run_backend("cython", args.size_mb))
    if args.backend in ("both", "python"):
        rows.append(_run_backend("python", args.python_size_mb))
    print(f"{'backend':<8} {'MB':>8} {'objects':>9} {'seconds':>8} {'MB/s':>7}")
    for r in rows:
        print(f"{r['backend']:<8} {r['bytes'] / 1e6:>8.0f} {r['objects']:>9} {r['seconds']:>8.2f} {r['mb_per_s']:>7.1f}")
    if len(rows) == 2 and rows[1]["mb_per_s"]:
        print(f"speed-up: {rows[0]['mb_per_s'] / rows[1]['mb_per_s']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
