import json

import numpy as np
import pytest

from traclet_trainer import TrainConfig, TrainerError, fine_tune
from traclet_trainer.train import CLASSES_NAME, HISTORY_NAME, MODEL_NAME

SMOKE = TrainConfig(
    epochs=2, batch_size=24, dropout=0.0, input_size=32, seed=1, augment=False
)


@pytest.fixture(scope="module")
def smoke_run(small_manifest, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    model, classes, history = fine_tune(
        small_manifest, SMOKE, weights="none", out_dir=out
    )
    return model, classes, history, out


def test_history_shape(smoke_run):
    _, classes, history, _ = smoke_run
    assert classes == ("fast", "medium", "slow")
    assert set(history) == {"loss", "accuracy", "val_loss", "val_accuracy"}
    assert all(len(v) == SMOKE.epochs for v in history.values())
    assert all(isinstance(x, float) for v in history.values() for x in v)


def test_full_batch_loss_decreases(smoke_run):
    _, _, history, _ = smoke_run
    assert history["loss"][1] < history["loss"][0]


def test_artifacts_saved_and_model_reloads(smoke_run):
    import keras

    model, classes, history, out = smoke_run
    assert (out / MODEL_NAME).is_file()
    assert json.loads((out / CLASSES_NAME).read_text()) == list(classes)
    saved = json.loads((out / HISTORY_NAME).read_text())
    assert saved["history"] == history
    assert saved["config"] == SMOKE.to_dict()
    assert saved["weights"] == "none"
    reloaded = keras.models.load_model(out / MODEL_NAME)
    x = np.zeros((2, 32, 32, 3), dtype="float32")
    a = model.predict(x, verbose=0)
    b = reloaded.predict(x, verbose=0)
    assert np.allclose(a, b, atol=1e-6)


def test_deterministic_first_epoch_loss(small_manifest):
    cfg = TrainConfig(epochs=1, batch_size=8, input_size=32, seed=5, augment=False)
    _, _, h1 = fine_tune(small_manifest, cfg, weights="none")
    _, _, h2 = fine_tune(small_manifest, cfg, weights="none")
    assert abs(h1["loss"][0] - h2["loss"][0]) <= 1e-4


def test_augmented_pipeline_trains(small_manifest):
    cfg = TrainConfig(epochs=1, batch_size=8, input_size=32, seed=2, augment=True)
    _, _, history = fine_tune(small_manifest, cfg, weights="none")
    assert len(history["loss"]) == 1
    assert np.isfinite(history["loss"][0])


def test_single_class_manifest_rejected(tmp_path):
    p = tmp_path / "manifest.txt"
    p.write_text(
        "#% traclet-manifest v1\n"
        '#% meta {"seed":0}\n'
        "path,traj_id,label,split\n"
        "walk/a.png,a,walk,train\n"
        "walk/b.png,b,walk,test\n"
    )
    with pytest.raises(TrainerError) as exc:
        fine_tune(p, SMOKE, weights="none")
    assert exc.value.reason == "need_two_classes"


def test_missing_train_split_rejected(tmp_path):
    p = tmp_path / "manifest.txt"
    p.write_text(
        "#% traclet-manifest v1\n"
        '#% meta {"seed":0}\n'
        "path,traj_id,label,split\n"
        "walk/a.png,a,walk,test\n"
        "bike/b.png,b,bike,test\n"
    )
    with pytest.raises(TrainerError) as exc:
        fine_tune(p, SMOKE, weights="none")
    assert exc.value.reason == "empty_split"
