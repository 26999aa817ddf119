"""Command-line entry point: ``irrtor {ingest,classify,sweep,siblings,eval,synth}``.

Exit codes: 0 success, 1 input/config error, 2 usage error,
3 evaluation accuracy below the configured floor.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, PipelineConfig, load_config
from .evaluation import FORMATS, MalformedDataset, agreement_report, confusion, parse_external
from .model import Heuristic
from .outputs import (
    agreement_tsv,
    confusion_tsv,
    fmt_ratio,
    render_agreement,
    render_confusion,
    write_database,
    write_graded,
    write_observations,
    write_sibling_report,
    write_siblings,
    write_sweep,
)
from .pipeline import classify, heuristic_summary, ingest, run_sweep
from .reliability import FilterParams
from .siblings import field_report, reference_links, run_siblings
from .union import summarize

log = logging.getLogger("irrtor")

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_BELOW_FLOOR = 0, 1, 2, 3


def _open_out(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


def _heuristic_overrides(values, cast):
    """Parse ``--t-r 0.7`` (all heuristics) or ``--t-r remarks=0.9``."""
    out = {}
    for item in values or []:
        if "=" in item:
            name, value = item.split("=", 1)
            try:
                h = Heuristic(name.strip())
            except ValueError:
                raise ConfigError(f"unknown heuristic {name!r}") from None
            out[h] = cast(value)
        else:
            for h in Heuristic:
                out[h] = cast(item)
    return out


def _apply_overrides(cfg: PipelineConfig, args) -> None:
    t_b = _heuristic_overrides(getattr(args, "t_b", None), int)
    t_r = _heuristic_overrides(getattr(args, "t_r", None), float)
    for h in Heuristic:
        cur = cfg.filters[h]
        cfg.filters[h] = FilterParams(t_b.get(h, cur.t_b), t_r.get(h, cur.t_r))
    if getattr(args, "jobs", None):
        cfg.jobs = args.jobs
    if getattr(args, "output_dir", None):
        cfg.output_dir = Path(args.output_dir).resolve()


# ---------------------------------------------------------------------------


def cmd_ingest(cfg: PipelineConfig, args) -> int:
    result = ingest(cfg, force=args.force)
    corpus = result.corpus
    if result.cached:
        print(f"corpus cache up to date: {result.path}")
    else:
        print(f"wrote corpus cache: {result.path}")
        print("registry\taut-num\tas-set\tmalformed_blocks\tother_objects\tunparsed_policies\tskipped")
        for registry in sorted(result.stats):
            st = result.stats[registry]
            print(
                f"{registry}\t{st.autnums}\t{st.assets}\t{st.malformed_blocks}\t"
                f"{st.other_classes}\t{st.unparsed_policies}\t{sum(st.skipped_autnums.values())}"
            )
        print(f"duplicates resolved by latest version: {corpus.duplicates}")
    print(f"corpus: {len(corpus.autnums)} aut-num, {len(corpus.assets)} as-set")
    return EXIT_OK


def cmd_classify(cfg: PipelineConfig, args) -> int:
    corpus = ingest(cfg).corpus
    result = classify(corpus, cfg)
    out = cfg.output_dir
    for h in Heuristic:
        with _open_out(out / f"observations_{h.value}.txt") as fh:
            write_observations(fh, result.observations[h])
        with _open_out(out / f"filtered_{h.value}.txt") as fh:
            write_graded(fh, result.filtered[h])
    with _open_out(out / "tor.txt") as fh:
        write_database(fh, result.records)

    rows = heuristic_summary(result, cfg)
    lines = ["heuristic\tT_b\tT_r\tentities\tpassing\tobservations\tR\tC\tfiltered_links"]
    for r in rows:
        lines.append(
            f"{r['heuristic'].value}\t{r['t_b']}\t{r['t_r']:g}\t{r['entities']}\t{r['passing']}\t"
            f"{r['observations']}\t{fmt_ratio(r['R'])}\t{fmt_ratio(r['C'])}\t{r['filtered_links']}"
        )
    summary = summarize(result.records)
    lines.append("")
    lines.append(f"links\t{summary['links']}")
    for n, count in summary["sources"].items():
        lines.append(f"sources_{n}\t{count}")
    for name, count in summary["decided_by"].items():
        lines.append(f"decided_by_{name}\t{count}")
    for name, count in summary["bands"].items():
        lines.append(f"reliability{name}\t{count}")
    lines.append(f"reliability_at_least_0.9\t{summary['at_least_0.9']}")
    text = "\n".join(lines) + "\n"
    with _open_out(out / "classify_summary.tsv") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(cfg: PipelineConfig, args) -> int:
    if args.grid_t_b:
        cfg.sweep_t_b = tuple(args.grid_t_b)
    if args.grid_t_r:
        cfg.sweep_t_r = tuple(args.grid_t_r)
    rows = run_sweep(ingest(cfg).corpus, cfg)
    with _open_out(cfg.output_dir / "sweep.tsv") as fh:
        write_sweep(fh, rows)
    write_sweep(sys.stdout, rows)
    return EXIT_OK


def cmd_siblings(cfg: PipelineConfig, args) -> int:
    corpus = ingest(cfg).corpus
    result = run_siblings(corpus, cfg.top_domains, cfg.max_sibling_asns)
    reference = None
    if args.compare:
        reference = reference_links(parse_external(args.compare, args.compare_format))
    rows = field_report(result, reference)
    with _open_out(cfg.output_dir / "siblings.txt") as fh:
        write_siblings(fh, result.pairs)
    with _open_out(cfg.output_dir / "siblings_report.tsv") as fh:
        write_sibling_report(fh, rows)
    write_sibling_report(sys.stdout, rows)
    return EXIT_OK


def cmd_eval(cfg: PipelineConfig, args) -> int:
    ours = parse_external(args.ours, args.ours_format, origin="ours")
    other = parse_external(args.other, args.format, origin="other")
    report = confusion(ours, other)
    agreement = agreement_report(ours, other)
    text = render_confusion(report, truth_name="Truth", pred_name="Ours") + "\n" + render_agreement(agreement)
    if "text" in cfg.report_formats:
        sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        with _open_out(out / "eval_report.txt") as fh:
            fh.write(text)
        if "tsv" in cfg.report_formats:
            with _open_out(out / "eval_confusion.tsv") as fh:
                fh.write(confusion_tsv(report))
            with _open_out(out / "eval_agreement.tsv") as fh:
                fh.write(agreement_tsv(agreement))
    floor = args.accuracy_floor if args.accuracy_floor is not None else cfg.accuracy_floor
    if floor and (report.accuracy is None or report.accuracy < floor):
        print(f"accuracy below floor {floor:.1%}", file=sys.stderr)
        return EXIT_BELOW_FLOOR
    return EXIT_OK


def cmd_synth(cfg, args) -> int:
    from .synthetic import write_synthetic

    paths = write_synthetic(Path(args.directory), seed=args.seed, n_ases=args.ases)
    for p in paths:
        print(p)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irrtor", description="Infer AS relationships and siblings from IRR dumps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p, required=True):
        p.add_argument("-c", "--config", required=required, help="pipeline YAML file")
        p.add_argument("-o", "--output-dir", help="override output_dir")
        p.add_argument("-j", "--jobs", type=int, help="parallel ingest workers")
        return p

    p = with_config(sub.add_parser("ingest", help="parse dumps into the corpus cache"))
    p.add_argument("--force", action="store_true", help="re-parse even if the cache is current")
    p.set_defaults(func=cmd_ingest)

    p = with_config(sub.add_parser("classify", help="run heuristics, filtering and union"))
    p.add_argument("--t-b", action="append", metavar="[HEURISTIC=]N")
    p.add_argument("--t-r", action="append", metavar="[HEURISTIC=]X")
    p.set_defaults(func=cmd_classify)

    p = with_config(sub.add_parser("sweep", help="agreement ratio / coverage trade-off table"))
    p.add_argument("--grid-t-b", type=int, nargs="+")
    p.add_argument("--grid-t-r", type=float, nargs="+")
    p.set_defaults(func=cmd_sweep)

    p = with_config(sub.add_parser("siblings", help="infer sibling pairs"))
    p.add_argument("--compare", help="reference dataset for the per-field report")
    p.add_argument("--compare-format", choices=FORMATS, default="problink")
    p.set_defaults(func=cmd_siblings)

    p = with_config(sub.add_parser("eval", help="compare two ToR datasets"), required=False)
    p.add_argument("ours")
    p.add_argument("other")
    p.add_argument("--ours-format", choices=FORMATS, default="internal")
    p.add_argument("--format", choices=FORMATS, default="caida-asrel", help="format of OTHER")
    p.add_argument("--out", help="directory for report files")
    p.add_argument("--accuracy-floor", type=float)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write the synthetic IRR corpus")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=2021)
    p.add_argument("--ases", type=int, default=340)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if getattr(args, "config", None):
            cfg = load_config(args.config)
        else:
            cfg = PipelineConfig()
        _apply_overrides(cfg, args)
        return args.func(cfg, args)
    except (ConfigError, MalformedDataset, ValueError, OSError) as exc:
        print(f"irrtor: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
