import os

import pytest

from irrtor.cli import EXIT_BELOW_FLOOR, EXIT_ERROR, EXIT_OK, main

from conftest import GOLDEN, SYNTHETIC

OUTPUTS = sorted(p.name for p in GOLDEN.iterdir())


def run_pipeline(workdir, out, jobs=1):
    cfg = str(workdir / "config.yaml")
    common = ["-c", cfg, "-o", str(out), "-j", str(jobs)]
    assert main(["ingest", *common]) == EXIT_OK
    assert main(["classify", *common]) == EXIT_OK
    assert main(["sweep", *common]) == EXIT_OK
    assert main(["siblings", *common, "--compare", str(workdir / "ground_truth.problink.txt")]) == EXIT_OK
    assert main(["eval", str(out / "tor.txt"), str(workdir / "ground_truth.as-rel.txt"), "--out", str(out)]) == EXIT_OK
    return {name: (out / name).read_bytes() for name in OUTPUTS}


def test_outputs_match_golden(synthetic_copy, capsys):
    got = run_pipeline(synthetic_copy, synthetic_copy / "out")
    for name in OUTPUTS:
        assert got[name] == (GOLDEN / name).read_bytes(), name


def test_bundled_corpus_regenerates_identically(tmp_path, capsys):
    assert main(["synth", str(tmp_path / "syn")]) == EXIT_OK
    for path in SYNTHETIC.iterdir():
        assert (tmp_path / "syn" / path.name).read_bytes() == path.read_bytes(), path.name


def test_ingest_cache_is_reused_and_content_addressed(synthetic_copy, capsys):
    cfg = str(synthetic_copy / "config.yaml")
    assert main(["ingest", "-c", cfg]) == EXIT_OK
    assert "wrote corpus cache" in capsys.readouterr().out
    assert main(["ingest", "-c", cfg]) == EXIT_OK
    assert "up to date" in capsys.readouterr().out
    with open(synthetic_copy / "ripe.db", "a") as fh:
        fh.write("\naut-num: AS64999\nas-name: LATE\n")
    assert main(["ingest", "-c", cfg]) == EXIT_OK
    assert "wrote corpus cache" in capsys.readouterr().out
    assert len(list((synthetic_copy / "out" / "cache").glob("corpus-*.txt"))) == 2


def test_cache_dir_from_environment(synthetic_copy, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("IRRTOR_CACHE_DIR", str(tmp_path / "elsewhere"))
    assert main(["ingest", "-c", str(synthetic_copy / "config.yaml")]) == EXIT_OK
    assert list((tmp_path / "elsewhere").glob("corpus-*.txt"))


def test_threshold_overrides(synthetic_copy, capsys):
    cfg = str(synthetic_copy / "config.yaml")
    assert main(["classify", "-c", cfg, "--t-r", "remarks=1.0", "--t-b", "2"]) == EXIT_OK
    summary = (synthetic_copy / "out" / "classify_summary.tsv").read_text().splitlines()
    rows = {line.split("\t")[0]: line.split("\t") for line in summary[1:4]}
    assert rows["remarks"][1:3] == ["2", "1"]
    assert rows["import_export"][1:3] == ["2", "0.6"]
    assert main(["classify", "-c", cfg, "--t-r", "bogus=0.5"]) == EXIT_ERROR


def test_empty_manifest_is_an_error(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("registries: []\n")
    assert main(["ingest", "-c", str(cfg)]) == EXIT_ERROR
    assert "empty" in capsys.readouterr().err


def test_bad_config_is_an_error(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("registries:\n  - path: x.db\n    registry: X\nfilter:\n  remarks:\n    t_r: 7\n")
    assert main(["ingest", "-c", str(cfg)]) == EXIT_ERROR


def test_unknown_format_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["eval", "a", "b", "--format", "nope"])
    assert exc.value.code == 2


def _unified_fixture(tmp_path):
    ours, truth = [], []
    asn = 1
    for n, t, p in ((30, "0", "0"), (253, "-1", "-1"), (11, "-1", "0"), (8, "-1", "C2P")):
        for _ in range(n):
            truth.append(f"{asn}|{asn + 1}|{t}")
            ours.append(f"{asn}|{asn + 1}|{p}")
            asn += 2
    (tmp_path / "ours.txt").write_text("\n".join(ours) + "\n")
    (tmp_path / "truth.txt").write_text("\n".join(truth) + "\n")
    return str(tmp_path / "ours.txt"), str(tmp_path / "truth.txt")


def test_eval_prints_unified_accuracy(tmp_path, capsys):
    ours, truth = _unified_fixture(tmp_path)
    assert main(["eval", ours, truth, "--out", str(tmp_path / "rep")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "accuracy: 93.7%" in out and "73.2%" in out and "96.9%" in out
    tsv = (tmp_path / "rep" / "eval_confusion.tsv").read_text()
    assert "P2P\t60\t0\t0\t1.000000" in tsv


def test_eval_accuracy_floor(tmp_path, capsys):
    ours, truth = _unified_fixture(tmp_path)
    assert main(["eval", ours, truth, "--accuracy-floor", "0.95"]) == EXIT_BELOW_FLOOR
    assert main(["eval", ours, truth, "--accuracy-floor", "0.90"]) == EXIT_OK


def test_eval_missing_file(tmp_path, capsys):
    assert main(["eval", str(tmp_path / "none"), str(tmp_path / "none2")]) == EXIT_ERROR


def test_pure_python_backend_gives_same_corpus(synthetic_copy, tmp_path):
    import subprocess
    import sys

    code = (
        "import sys; from irrtor import scan, rpsl;"
        "entries=[(sys.argv[1]+'/'+n, r) for n, r in (('radb.db','RADB'),('ripe.db','RIPE'),('altdb.db.gz','ALTDB'))];"
        "c,_=rpsl.load_manifest(entries); rpsl.dump_corpus(c, sys.stdout); print(scan.BACKEND, file=sys.stderr)"
    )
    outs = {}
    for flag in ("", "1"):
        env = dict(os.environ, IRRTOR_PURE_PYTHON=flag)
        if not flag:
            env.pop("IRRTOR_PURE_PYTHON")
        res = subprocess.run([sys.executable, "-c", code, str(synthetic_copy)], env=env, capture_output=True, check=True)
        outs[res.stderr.decode().strip()] = res.stdout
    assert "python" in outs
    assert len(set(outs.values())) == 1
