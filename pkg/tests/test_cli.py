from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from urbanlore.cli import main
from urbanlore.corpus import dump_corpus, load_corpus
from urbanlore.features import read_feature_csv


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--seed", "0", "--count", "40", "--out", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def corpus_path(synth_dir):
    return str(synth_dir / "corpus.jsonl")


def test_synth_outputs(synth_dir):
    recs = load_corpus(synth_dir / "corpus.jsonl")
    assert len(recs) == 120
    meta = json.loads((synth_dir / "synth.json").read_text())
    assert meta["schema_version"] == "1" and meta["documents"] == 120


def test_extract(tmp_path, corpus_path):
    out = tmp_path / "ex"
    assert main(["extract", "--seed", "1", "--corpus", corpus_path, "--groups", "ne,read",
                 "--out", str(out)]) == 0
    lines = (out / "features.csv").read_text().splitlines()
    assert lines[0].startswith("# schema_version=1 config_hash=")
    assert lines[1].split(",")[:3] == ["doc_id", "label", "PER"]
    assert len(lines) == 122
    meta = json.loads((out / "features.meta.json").read_text())
    assert meta["config_hash"] in lines[0] and meta["config"]["seed"] == 1
    assert json.loads((out / "dropped.json").read_text())["dropped"] == []


def test_extract_builds_and_reuses_emotion_space(tmp_path, corpus_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["extract", "--seed", "0", "--corpus", corpus_path, "--groups", "aff", "--emotion-dims", "20",
                 "--out", str(a)]) == 0
    assert (a / "emotion_space.bin").is_file()
    assert main(["extract", "--seed", "0", "--corpus", corpus_path, "--groups", "aff",
                 "--emotion-space", str(a / "emotion_space.bin"), "--out", str(b)]) == 0
    # the saved space is float32, so values agree to single precision only
    ids_a, _, names, xa = read_feature_csv(a / "features.csv")
    ids_b, _, _, xb = read_feature_csv(b / "features.csv")
    assert ids_a == ids_b and names[0] == "POS_sent"
    np.testing.assert_allclose(xa, xb, rtol=1e-5, atol=1e-6)


def test_describe_single_label(tmp_path, corpus_path):
    ft = [r for r in load_corpus(corpus_path) if r.label == "FT"]
    path = tmp_path / "ft.jsonl"
    dump_corpus(ft, path)
    out = tmp_path / "d"
    assert main(["describe", "--seed", "0", "--corpus", str(path), "--groups", "ne,timex,read",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "describe.json").read_text())
    assert summary["labels"] == ["FT"]
    assert "FT" in (out / "describe.txt").read_text()


def test_crossval_k_too_large_is_config_error(tmp_path, corpus_path, capsys):
    out = tmp_path / "cv"
    assert main(["crossval", "--seed", "0", "--corpus", corpus_path, "--k", "41", "--out", str(out)]) == 1
    assert "k" in capsys.readouterr().err
    assert not (out / "crossval.json").exists()


def test_two_files_label_by_stem(tmp_path, corpus_path):
    recs = load_corpus(corpus_path)
    for name, label in (("wwn", "FT"), ("nyt", "GN")):
        dump_corpus([r for r in recs if r.label == label], tmp_path / f"{name}.jsonl")
    # strip labels so the file name supplies them
    for name in ("wwn", "nyt"):
        p = tmp_path / f"{name}.jsonl"
        rows = [json.loads(line) for line in p.read_text().splitlines()]
        p.write_text("".join(json.dumps({"id": r["id"], "text": r["text"]}) + "\n" for r in rows))
    out = tmp_path / "cv"
    assert main(["crossval", "--seed", "0", "--corpus", str(tmp_path / "wwn.jsonl"),
                 "--corpus", str(tmp_path / "nyt.jsonl"), "--groups", "ne", "--k", "5", "--out", str(out)]) == 0
    runs = json.loads((out / "crossval.json").read_text())["runs"]
    assert runs["NE"]["classes"] == ["nyt", "wwn"]


@pytest.mark.parametrize(
    "argv, code",
    [
        (["crossval", "--corpus", "x.jsonl", "--out", "o"], 1),  # no seed
        (["describe", "--seed", "0", "--corpus", "missing.jsonl", "--out", "o"], 1),
        (["bogus"], 1),
        (["crossval", "--seed", "0", "--corpus", "{corpus}", "--groups", "nope", "--out", "{out}"], 1),
        (["crossval", "--seed", "0", "--corpus", "{corpus}", "--scaler", "sometimes", "--out", "{out}"], 1),
        (["synth", "--seed", "0", "--count", "0", "--out", "{out}"], 1),
        (["describe", "--seed", "0", "--corpus", "{bad}", "--out", "{out}"], 2),
    ],
)
def test_exit_codes(tmp_path, corpus_path, argv, code):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a", "text": "t", "label": "X"}\n{oops\n')
    argv = [a.format(corpus=corpus_path, out=tmp_path / "o", bad=bad) for a in argv]
    assert main(argv) == code


def test_crossval_and_report_reproducible(tmp_path, corpus_path):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert main(["crossval", "--seed", "5", "--corpus", corpus_path, "--groups", "ne,timex,read",
                     "--k", "5", "--out", str(out)]) == 0
        outs.append(out)
    for f in ("crossval.json", "crossval.csv", "crossval.txt", "predictions.csv"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()
        assert "config_hash" in (outs[0] / f).read_text().splitlines()[0] or f == "crossval.json"
    data = json.loads((outs[0] / "crossval.json").read_text())
    assert set(data["runs"]) == {"NE", "TIMEX", "READ", "NE+TIMEX+READ", "ZeroR"}
    assert data["schema_version"] == "1" and len(data["config_hash"]) == 16
    rep = tmp_path / "rep"
    assert main(["report", "--out", str(rep), str(outs[0])]) == 0
    assert "crossval.txt" in (rep / "report.md").read_text()


def test_significance(tmp_path, corpus_path):
    out = tmp_path / "sig"
    assert main(["significance", "--seed", "0", "--corpus", corpus_path, "--groups", "ne,read", "--k", "4",
                 "--rounds", "200", "--out", str(out)]) == 0
    data = json.loads((out / "significance.json").read_text())
    assert data["feature_tests"] and data["system_tests"]
    assert all(0 < t["p"] <= 1 for t in data["system_tests"])
    assert (out / "feature_tests.csv").read_text().startswith("# schema_version=1")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "urbanlore", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "crossval" in proc.stdout
