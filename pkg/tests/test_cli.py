import json
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import write_chat
from viddial.cli import content_hash, load_config, main, model_overrides
from viddial.corpus.features import write_features
from viddial.encoders import build_vocab
from viddial.models import build_model
from viddial.corpus.pipeline import read_triples
from viddial.models.checkpoint import read_checkpoint

TINY = {
    "discriminative": {"d_emb": 4, "hidden": 4, "proj_dim": 4},
    "generative": {"d_emb": 4, "hidden": 4, "proj_dim": 4, "enc_layers": 1, "dec_layers": 1},
    "lm": {"d_emb": 4, "hidden": 4},
    "train": {"lr": 0.01, "batch_size": 4, "epochs": 1},
}


def cli(argv):
    return main([str(a) for a in argv])


def run(capsys, *argv):
    code = cli([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert cli(["synth", "--out", root / "train_src", "--videos", 4, "--feat-dim", 4, "--seed", 1]) == 0
    assert cli(["synth", "--out", root / "test_src", "--videos", 3, "--feat-dim", 4, "--seed", 2,
                 "--prefix", "test"]) == 0
    cfg = root / "tiny.json"
    cfg.write_text(json.dumps(TINY))
    train = root / "train.jsonl"
    assert cli(["build-dataset", "--chat", root / "train_src/chat", "--features", root / "train_src/features",
                 "--out", train, "--config", cfg]) == 0
    test = root / "test.jsonl"
    assert cli(["build-dataset", "--chat", root / "test_src/chat", "--features", root / "test_src/features",
                 "--out", test, "--config", cfg, "--split", "test", "--frequent", str(train) + ".frequent.json"]) == 0
    return {"root": root, "cfg": cfg, "train": train, "test": test}


@pytest.fixture(scope="module")
def checkpoints(workspace):
    ws = workspace
    out = {}
    for name in ("tridaf", "bidaf"):
        path = ws["root"] / f"{name}.ckpt"
        assert cli(["train", "--dataset", ws["train"], "--model", name, "--config", ws["cfg"],
                     "--out", path, "--epochs", 2]) == 0
        out[name] = path
    return out


def _manifest(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- build-dataset ------------------------------------------------------------

def test_build_dataset_outputs(workspace):
    train = workspace["train"]
    triples = read_triples(train)
    assert len(triples) == 8
    for suffix in (".frequent.json", ".stats.json", ".manifest.json"):
        assert os.path.exists(str(train) + suffix)
    m = _manifest(str(train) + ".manifest.json")
    assert m["command"] == "build-dataset" and m["seed"] == 0
    assert str(train) in m["outputs"] and m["inputs"]


def test_build_dataset_rerun_has_equal_hashes(workspace, tmp_path):
    ws = workspace
    hashes = []
    for _ in range(2):
        out = tmp_path / "again.jsonl"
        assert cli(["build-dataset", "--chat", ws["root"] / "train_src/chat",
                     "--features", ws["root"] / "train_src/features", "--out", out, "--config", ws["cfg"]]) == 0
        hashes.append(_manifest(str(out) + ".manifest.json")["outputs"])
    assert hashes[0] == hashes[1]


def test_content_hash_is_git_blob_sha1():
    # `git hash-object` of "hello\n"
    assert content_hash(b"hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"


def test_eval_split_needs_frequent_list(workspace, capsys):
    ws = workspace
    code, _, err = run(capsys, "build-dataset", "--chat", ws["root"] / "test_src/chat", "--features",
                       ws["root"] / "test_src/features", "--out", ws["root"] / "x.jsonl", "--split", "val")
    assert code == 2 and "--frequent" in err


def _utts(start, n, text="nice goal"):
    return [{"time": start + i, "user": f"u{i % 3}", "text": text} for i in range(n)]


def test_missing_features_name_the_interval(tmp_path, capsys):
    chat = tmp_path / "chat"
    feats = tmp_path / "features"
    chat.mkdir()
    feats.mkdir()
    write_chat(chat / "v.jsonl", _utts(1, 5) + [{"time": 25, "user": "u1", "text": "nice goal"},
                                                {"time": 59, "user": "u2", "text": "end"}])
    code, _, err = run(capsys, "build-dataset", "--chat", chat, "--features", feats, "--out", tmp_path / "o.jsonl")
    assert code == 2 and "[0,20)" in err


def test_malformed_log_names_the_line(tmp_path, capsys):
    chat = tmp_path / "chat"
    chat.mkdir()
    (tmp_path / "features").mkdir()
    (chat / "v.jsonl").write_text('{"time": 1, "user": "a", "text": "hi"}\nnot json\n')
    code, _, err = run(capsys, "build-dataset", "--chat", chat, "--features", tmp_path / "features",
                       "--out", tmp_path / "o.jsonl")
    assert code == 2 and "line 2" in err


def test_unknown_config_key(workspace, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"train": {"learning_rate": 1}}))
    code, _, err = run(capsys, "train", "--dataset", workspace["train"], "--model", "tridaf", "--config", bad,
                       "--out", tmp_path / "m.ckpt")
    assert code == 2 and "learning_rate" in err


def test_stats_and_default_config(workspace, capsys):
    code, out, _ = run(capsys, "stats", "--dataset", workspace["train"])
    assert code == 0 and json.loads(out)["instances"] == 8
    code, out, _ = run(capsys, "default-config")
    assert json.loads(out)["train"]["lr"] == 0.0001


# -- train ------------------------------------------------------------------

def test_invalid_model_is_usage_error(workspace, tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli(["train", "--dataset", str(workspace["train"]), "--model", "gpt", "--out", str(tmp_path / "m")])
    assert exc.value.code == 2


def test_zero_epochs_checkpoint_equals_init(workspace, tmp_path):
    ws = workspace
    ckpt = tmp_path / "zero.ckpt"
    assert cli(["train", "--dataset", ws["train"], "--model", "triple", "--config", ws["cfg"],
                 "--out", ckpt, "--epochs", 0, "--seed", 3]) == 0
    _, params = read_checkpoint(ckpt)
    triples = read_triples(ws["train"])
    cfg = load_config(str(ws["cfg"]))
    overrides = model_overrides(cfg, "triple")
    table = build_vocab(triples, cfg["vocab"]["max_size"], overrides["d_emb"], 3)
    model = build_model("triple", table.vocab, 4, overrides, 3, table.weight)
    assert set(params) == set(model.store.names())
    for name, p in model.store:
        assert np.array_equal(params[name], p.data)


def test_train_writes_checkpoint_trace_and_manifest(checkpoints):
    path = str(checkpoints["tridaf"])
    with open(path + ".trace.json", encoding="utf-8") as fh:
        trace = json.load(fh)
    assert len(trace["loss_trace"]) == 2
    m = _manifest(path + ".manifest.json")
    assert m["command"] == "train" and path in m["outputs"]


def test_train_is_deterministic(workspace, checkpoints, tmp_path):
    again = tmp_path / "again.ckpt"
    assert cli(["train", "--dataset", workspace["train"], "--model", "tridaf", "--config", workspace["cfg"],
                 "--out", again, "--epochs", 2]) == 0
    assert open(again, "rb").read() == open(checkpoints["tridaf"], "rb").read()


def test_nan_features_exit_three(tmp_path, capsys):
    assert cli(["synth", "--out", tmp_path / "src", "--videos", 2, "--feat-dim", 3]) == 0
    vfea = sorted((tmp_path / "src/features").iterdir())[0]
    from viddial.corpus.features import read_features

    frames = read_features(vfea)
    frames[:] = np.nan
    write_features(vfea, frames)
    data = tmp_path / "d.jsonl"
    assert cli(["build-dataset", "--chat", tmp_path / "src/chat", "--features", tmp_path / "src/features",
                 "--out", data]) == 0
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(TINY))
    with pytest.warns(RuntimeWarning):
        code, _, err = run(capsys, "train", "--dataset", data, "--model", "dual_video", "--config", cfg,
                           "--out", tmp_path / "m.ckpt")
    assert code == 3 and "numeric error" in err


# -- evaluate / rank / generate -------------------------------------------------

def test_evaluate_oracle_scorer(workspace, capsys, tmp_path):
    out = tmp_path / "oracle.jsonl"
    code, text, _ = run(capsys, "evaluate", "--dataset", workspace["test"], "--scorer", "oracle", "--out", out)
    assert code == 0
    assert "r@1 1.0000" in text and "r@2 1.0000" in text and "r@5 1.0000" in text
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(records) == 6 and all(len(r["scores"]) == 10 for r in records)
    assert os.path.exists(str(out) + ".manifest.json")


def test_evaluate_checkpoint_and_compare(workspace, checkpoints, capsys, tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    code, text, _ = run(capsys, "evaluate", "--dataset", workspace["test"], "--ckpt", checkpoints["bidaf"],
                        "--out", a)
    assert code == 0 and "rouge_l" in text and "meteor_lite" in text
    assert run(capsys, "evaluate", "--dataset", workspace["test"], "--scorer", "oracle", "--out", b)[0] == 0
    code, text, err = run(capsys, "compare", b, a, "--samples", 2000)
    assert code == 0 and "p" in text
    assert json.loads(err)["command"] == "compare"


def test_evaluate_baseline_needs_training_data(workspace, capsys):
    code, _, err = run(capsys, "evaluate", "--dataset", workspace["test"], "--scorer", "most_frequent")
    assert code == 2 and "--train-dataset" in err


def test_feature_dim_mismatch_is_usage_error(workspace, checkpoints, tmp_path, capsys):
    assert cli(["synth", "--out", tmp_path / "src", "--videos", 2, "--feat-dim", 6]) == 0
    other = tmp_path / "other.jsonl"
    assert cli(["build-dataset", "--chat", tmp_path / "src/chat", "--features", tmp_path / "src/features",
                 "--out", other]) == 0
    code, _, err = run(capsys, "evaluate", "--dataset", other, "--ckpt", checkpoints["tridaf"])
    assert code == 2 and "6" in err


def test_rank_marks_the_positive(workspace, checkpoints, capsys):
    instance = read_triples(workspace["test"])[0].instance_id
    code, out, err = run(capsys, "rank", "--dataset", workspace["test"], "--ckpt", checkpoints["tridaf"],
                         "--instance", instance)
    assert code == 0
    rows = [line for line in out.splitlines() if line.strip()]
    assert rows[0].startswith("instance ") and len(rows) == 11
    assert sum(1 for line in rows[1:] if line[2] == "*") == 1
    assert json.loads(err)["command"] == "rank"


def test_unknown_instance(workspace, checkpoints, capsys):
    code, _, err = run(capsys, "generate", "--dataset", workspace["test"], "--ckpt", checkpoints["bidaf"],
                       "--instance", "nope:9")
    assert code == 2 and "nope:9" in err


def test_generate_respects_length(workspace, checkpoints, capsys):
    instance = read_triples(workspace["test"])[0].instance_id
    outs = []
    for max_len in ("3", None):
        argv = ["generate", "--dataset", workspace["test"], "--ckpt", checkpoints["bidaf"], "--instance", instance]
        if max_len:
            argv += ["--max-len", max_len]
        code, out, _ = run(capsys, *argv)
        assert code == 0
        outs.append(out.split("\n")[0].split())
    assert len(outs[0]) <= 3 and len(outs[1]) <= 10


# -- visualize-attention --------------------------------------------------------

def _tsv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split("\t")
    rows = [line.split("\t") for line in lines[1:]]
    return header, rows


def test_visualize_attention_outputs(workspace, checkpoints, tmp_path, capsys):
    instance = read_triples(workspace["test"])[0].instance_id
    out = tmp_path / "viz"
    code, _, _ = run(capsys, "visualize-attention", "--dataset", workspace["test"], "--ckpt", checkpoints["bidaf"],
                     "--instance", instance, "--out", out, "--max-len", 4)
    assert code == 0
    for name in ("video_attention.tsv", "chat_attention.tsv"):
        header, rows = _tsv(out / name)
        assert header[0] == "token"
        for row in rows:
            assert abs(sum(float(w) for w in row[1:]) - 1.0) <= 1e-6
    svg = (out / "attention.svg").read_text()
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert (out / "manifest.json").exists()
    first = (out / "video_attention.tsv").read_text()
    run(capsys, "visualize-attention", "--dataset", workspace["test"], "--ckpt", checkpoints["bidaf"],
        "--instance", instance, "--out", out, "--max-len", 4)
    assert (out / "video_attention.tsv").read_text() == first


def test_visualize_rejects_discriminative_checkpoint(workspace, checkpoints, tmp_path, capsys):
    instance = read_triples(workspace["test"])[0].instance_id
    code, _, err = run(capsys, "visualize-attention", "--dataset", workspace["test"], "--ckpt",
                       checkpoints["tridaf"], "--instance", instance, "--out", tmp_path / "v")
    assert code == 2 and "generative" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "viddial", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("viddial ")
