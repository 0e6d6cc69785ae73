"""Training loop: class-weighted cross-entropy on exported mask datasets."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn
from torch.utils.data import DataLoader, Subset

from .data import MaskDataset
from .model import FrozenEncoderUNet, build_model

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    manifest: str
    epochs: int = 100
    batch_size: int = 128
    learning_rate: float = 1e-3
    pos_weight: float | None = None  # None: derived from label statistics
    seed: int = 0
    model_out: str = "model.pt"
    base_channels: int = 16
    val_fraction: float = 0.1
    metrics_out: str | None = None

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.val_fraction < 1:
            raise ValueError("val_fraction must be in [0, 1)")


def iou_score(logits: torch.Tensor, target: torch.Tensor, threshold: float = 0.5) -> float:
    pred = torch.sigmoid(logits) >= threshold
    truth = target >= 0.5
    inter = (pred & truth).sum().item()
    union = (pred | truth).sum().item()
    return inter / union if union else 1.0


def _split(dataset: MaskDataset, val_fraction: float, seed: int):
    n = len(dataset)
    n_val = int(n * val_fraction)
    gen = torch.Generator().manual_seed(seed)
    order = torch.randperm(n, generator=gen).tolist()
    val_idx, train_idx = order[:n_val], order[n_val:]
    return Subset(dataset, train_idx), Subset(dataset, val_idx)


def train(config: TrainConfig) -> tuple[Path, list[dict]]:
    """Train the predictor; returns (model path, per-epoch metrics)."""
    torch.manual_seed(config.seed)
    dataset = MaskDataset(config.manifest)
    train_set, val_set = _split(dataset, config.val_fraction, config.seed)
    loader = DataLoader(train_set, batch_size=config.batch_size, shuffle=True,
                        generator=torch.Generator().manual_seed(config.seed))
    val_loader = DataLoader(val_set, batch_size=config.batch_size) if len(val_set) else None

    model = build_model(config.seed, base=config.base_channels)
    model.train()

    if config.pos_weight is None:
        pos = dataset.positive_fraction()
        pos_weight = (1.0 - pos) / max(pos, 1e-6)
    else:
        pos_weight = config.pos_weight
    criterion = nn.BCEWithLogitsLoss(pos_weight=torch.tensor(float(pos_weight)))
    trainable = [p for p in model.parameters() if p.requires_grad]
    optimizer = torch.optim.Adam(trainable, lr=config.learning_rate)

    history: list[dict] = []
    for epoch in range(config.epochs):
        model.train()
        total = 0.0
        batches = 0
        for x, y in loader:
            optimizer.zero_grad()
            loss = criterion(model(x), y)
            if not math.isfinite(loss.item()):
                raise RuntimeError(f"non-finite loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            total += loss.item()
            batches += 1
        entry = {"epoch": epoch, "loss": total / max(batches, 1)}
        if val_loader is not None:
            model.eval()
            with torch.no_grad():
                scores = [iou_score(model(x), y) for x, y in val_loader]
            entry["val_iou"] = sum(scores) / len(scores)
        history.append(entry)
        logger.info("epoch %d: %s", epoch, entry)

    out = Path(config.model_out)
    out.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "state_dict": model.state_dict(),
            "base_channels": config.base_channels,
            "seed": config.seed,
            "pos_weight": pos_weight,
        },
        out,
    )
    if config.metrics_out:
        with open(config.metrics_out, "w", encoding="utf-8") as fh:
            for entry in history:
                fh.write(json.dumps(entry) + "\n")
    return out, history


def load_model(path) -> FrozenEncoderUNet:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    model = FrozenEncoderUNet(base=payload["base_channels"])
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
