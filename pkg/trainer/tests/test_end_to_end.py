"""End-to-end learned guidance: train on a desk-scale export, feed predicted
masks to the corner-guided planner through the CLI, and compare against
oracle guidance on held-out maps.

This is the slow test (dataset export + training + 200 planner runs,
roughly 12 minutes); run it with ``pytest tests/test_end_to_end.py -v -s``.
"""

import json
import subprocess
import sys

import pytest
import torch
from torch.utils.data import DataLoader

from trainer import TrainConfig, iou_score, load_model, predict_to_pgm, train
from trainer.data import MaskDataset, read_manifest
from trainer.train import _split

from conftest import export_dataset

TRAIN_MAPS = 200
PAIRS = 10
EVAL_MAPS = 20
SEEDS_PER_MAP = 5
MAP_SIZE = 64  # desk scale; keeps 2000-sample training tractable on CPU


@pytest.fixture(scope="module")
def datasets(tmp_path_factory):
    root = tmp_path_factory.mktemp("e2e")
    train_manifest = export_dataset(
        root / "train", seed=11, count=TRAIN_MAPS, pairs=PAIRS, size=MAP_SIZE
    )
    eval_manifest = export_dataset(
        root / "eval", seed=99, count=EVAL_MAPS, pairs=1, size=MAP_SIZE
    )
    return train_manifest, eval_manifest


def _plan(map_path, seed, mask=None):
    cmd = [
        sys.executable, "-m", "gridplan.cli", "plan", "--map", str(map_path),
        "--planner", "convex_neural", "--seed", str(seed),
    ]
    cmd += ["--mask", str(mask)] if mask is not None else ["--oracle"]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode in (0, 1), proc.stderr
    record = json.loads(proc.stdout)["record"]
    return record.get("success", False), record.get("length")


def test_c14_end_to_end_learned_guidance(datasets):
    train_manifest, eval_manifest = datasets
    model_path = train_manifest.parent / "model.pt"
    config = TrainConfig(
        manifest=str(train_manifest),
        epochs=14,
        batch_size=64,
        seed=7,
        model_out=str(model_path),
    )
    _, history = train(config)

    # learned predictor must beat the trivial all-zero baseline when both are
    # scored the same way on the same validation split
    dataset = MaskDataset(train_manifest)
    _, val_set = _split(dataset, config.val_fraction, config.seed)
    val_loader = DataLoader(val_set, batch_size=config.batch_size)
    trivial = [iou_score(torch.full_like(y, -100.0), y) for _, y in val_loader]
    trivial_iou = sum(trivial) / len(trivial)
    assert history[-1]["val_iou"] > trivial_iou

    model = load_model(model_path)
    eval_root = eval_manifest.parent
    _, records = read_manifest(eval_manifest)
    assert len(records) == EVAL_MAPS

    predicted_ok = oracle_ok = 0
    predicted_lengths = []
    oracle_lengths = []
    for rec in records:
        map_path = eval_root / rec["input"]
        mask_path = eval_root / rec["input"].replace(".ppm", "_pred.pgm")
        predict_to_pgm(model, map_path, mask_path, threshold=0.5)
        for seed in range(SEEDS_PER_MAP):
            success, length = _plan(map_path, seed, mask=mask_path)
            predicted_ok += success
            if success:
                predicted_lengths.append(length)
            success, length = _plan(map_path, seed)
            oracle_ok += success
            if success:
                oracle_lengths.append(length)

    trials = EVAL_MAPS * SEEDS_PER_MAP
    success_rate = 100.0 * predicted_ok / trials
    ratio = (sum(predicted_lengths) / len(predicted_lengths)) / (
        sum(oracle_lengths) / len(oracle_lengths)
    )
    print(
        f"\n[C14] {'PASS' if success_rate >= 90 and ratio <= 1.10 else 'FAIL'}: "
        f"learned guidance on {EVAL_MAPS} held-out maps: success "
        f"{predicted_ok}/{trials} = {success_rate:.0f}% (limit 90%), length ratio "
        f"vs oracle guidance {ratio:.4f} (limit 1.10); "
        f"val IoU {history[-1]['val_iou']:.3f} > trivial {trivial_iou:.3f}"
    )
    assert success_rate >= 90.0
    assert ratio <= 1.10
