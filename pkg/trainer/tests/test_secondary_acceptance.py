"""Trainer acceptance checks, one printed PASS/FAIL/SKIP line per criterion.

Checks that need the pretrained backbone skip with provisioning instructions
when its weights cannot be loaded on this host (no network access); once the
weights file is provisioned offline they run for real. The prediction-format
check runs regardless, with a randomly initialized backbone.
"""
import csv
import json
import random
from collections import defaultdict
from pathlib import Path

import pytest

from synth import write_corpus, write_reduced
from traclet_trainer import (
    TrainConfig,
    TrainerError,
    build_model,
    fine_tune,
    predict_to_file,
    read_manifest,
)
from traclet_trainer.manifest_io import ENTRY_HEADER

WEIGHTS_REASON = (
    "pretrained backbone weights unavailable on this host; download "
    "'vgg16_weights_tf_dim_ordering_tf_kernels_notop.h5' on a connected machine, "
    "place it under ~/.keras/models/ (or pass --weights PATH), then rerun"
)


def report(ok, name, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def skip(name, reason):
    print(f"SKIP {name}: {reason}")
    pytest.skip(reason)


def find_starkey(data_dir):
    if not data_dir.is_dir():
        return None
    hits = sorted(data_dir.glob("*tarkey*"))
    if hits:
        return hits[0]
    sub = data_dir / "starkey"
    if sub.is_dir():
        files = sorted(p for p in sub.iterdir() if p.is_file())
        if files:
            return files[0]
    return None


def write_reduced_manifest(src_path, dst_path, fraction, seed):
    """Stratified (label x split) subsample of a manifest, same directory."""
    man = read_manifest(src_path)
    head = Path(src_path).read_text().splitlines()[:2]
    groups = defaultdict(list)
    for e in man.entries:
        groups[(e.label, e.split)].append(e)
    rng = random.Random(seed)
    keep = set()
    for key in sorted(groups):
        entries = groups[key]
        rng.shuffle(entries)
        keep.update(e.path for e in entries[: max(1, round(fraction * len(entries)))])
    with open(dst_path, "w", newline="", encoding="utf-8") as f:
        f.write(head[0] + "\n")
        f.write(head[1] + "\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(list(ENTRY_HEADER))
        for e in man.entries:
            if e.path in keep:
                w.writerow([e.path, e.traj_id, e.label, e.split])


@pytest.fixture(scope="module")
def weights_error():
    """None when the pretrained backbone loads; the error otherwise."""
    try:
        build_model(2, TrainConfig(input_size=32), weights="imagenet")
        return None
    except TrainerError as e:
        return e


@pytest.fixture(scope="module")
def reduced_run(weights_error, data_dir, tmp_path_factory, run_builder):
    """15-epoch pretrained run on a reduced (~20% of trajectories) corpus.

    Uses the real animal-telemetry corpus when present, else the synthetic
    speed-class corpus; either way the dataset is built by the builder CLI
    and scored by its evaluator.
    """
    if weights_error is not None:
        return None
    root = tmp_path_factory.mktemp("reduced_run")
    starkey = find_starkey(data_dir)
    if starkey is not None:
        ds = root / "ds_full"
        proc = run_builder("build", "--dataset", "starkey", "--input", str(starkey),
                           "--out", str(ds), "--seed", "13")
        assert proc.returncode == 0, proc.stderr
        manifest = ds / "manifest_reduced.txt"
        write_reduced_manifest(ds / "manifest.txt", manifest, fraction=0.2, seed=13)
    else:
        corpus = root / "corpus.csv"
        write_corpus(corpus, seed=29, per_class=100, n_points=40)
        reduced_csv = root / "corpus_reduced.csv"
        write_reduced(corpus, reduced_csv, seed=29, fraction=0.2)
        ds = root / "ds"
        proc = run_builder("build", "--dataset", "canonical-csv",
                           "--input", str(reduced_csv), "--out", str(ds),
                           "--seed", "13")
        assert proc.returncode == 0, proc.stderr
        manifest = ds / "manifest.txt"

    cfg = TrainConfig(epochs=15, seed=0)
    model, classes, history = fine_tune(manifest, cfg, weights="imagenet")
    pred = root / "predictions.csv"
    predict_to_file(model, manifest, classes, pred, cfg.input_size)
    report_path = root / "report.json"
    ev = run_builder("evaluate", "--predictions", str(pred),
                     "--manifest", str(manifest), "--json", str(report_path))
    assert ev.returncode == 0, ev.stderr
    accuracy = json.loads(report_path.read_text())["accuracy"]
    return {"history": history, "accuracy": accuracy}


def test_reduced_corpus_test_accuracy_reaches_threshold(reduced_run):
    name = "trainer reduced-corpus test accuracy"
    if reduced_run is None:
        skip(name, WEIGHTS_REASON)
    acc = reduced_run["accuracy"]
    report(acc >= 0.75, name, f"accuracy {acc:.4f} >= 0.75 after 15 epochs")


def test_training_loss_decreases_over_first_five_epochs(reduced_run):
    name = "trainer early loss descent"
    if reduced_run is None:
        skip(name, WEIGHTS_REASON)
    losses = reduced_run["history"]["loss"][:5]
    ok = all(b < a for a, b in zip(losses, losses[1:]))
    report(ok, name, f"first five train losses {[round(x, 4) for x in losses]}")


def test_train_val_accuracy_gap_stays_small(reduced_run):
    name = "trainer train/val accuracy gap"
    if reduced_run is None:
        skip(name, WEIGHTS_REASON)
    gap = abs(reduced_run["history"]["accuracy"][-1]
              - reduced_run["history"]["val_accuracy"][-1])
    report(gap < 0.15, name, f"final |train - val| accuracy gap {gap:.4f} < 0.15")


def test_prediction_file_is_scored_by_dataset_evaluator(small_manifest, tmp_path, run_builder):
    name = "trainer prediction-file interchange"
    cfg = TrainConfig(epochs=2, batch_size=8, input_size=32, seed=6, augment=False)
    model, classes, _ = fine_tune(small_manifest, cfg, weights="none")
    pred = tmp_path / "predictions.csv"
    predict_to_file(model, small_manifest, classes, pred, cfg.input_size)
    ev = run_builder("evaluate", "--predictions", str(pred),
                     "--manifest", str(small_manifest))
    report(ev.returncode == 0 and "accuracy" in ev.stdout, name,
           "evaluator scored the trainer's prediction file unmodified (exit 0)")
