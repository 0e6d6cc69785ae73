"""Dataset loading: manifest parsing and tensor encoding.

Inputs are encoded as three channels (free space, occupied space,
start/goal cells) matching the exporter's PPM convention; labels are the
binary PGM masks.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset

from .netpbm import read_pgm, read_ppm


def read_manifest(manifest_path) -> tuple[dict, list[dict]]:
    meta: dict = {}
    records: list[dict] = []
    for line in Path(manifest_path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if "meta" in obj:
            meta = obj["meta"]
        else:
            records.append(obj)
    if not records:
        raise ValueError(f"manifest {manifest_path} holds no samples")
    return meta, records


def encode_input(rgb: np.ndarray) -> np.ndarray:
    """(h, w, 3) PPM pixels -> (3, h, w) float32 planes.

    Channel 0: free space, channel 1: occupied space, channel 2: the start
    and goal cells.
    """
    occupied = rgb[:, :, 0] == 255
    endpoints = (rgb[:, :, 1] == 255) | (rgb[:, :, 2] == 255)
    planes = np.stack(
        [(~occupied).astype(np.float32), occupied.astype(np.float32),
         endpoints.astype(np.float32)]
    )
    return planes


class MaskDataset(Dataset):
    """(input planes, label mask) pairs from an exported manifest."""

    def __init__(self, manifest_path):
        self.root = Path(manifest_path).parent
        self.meta, self.records = read_manifest(manifest_path)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, idx: int):
        rec = self.records[idx]
        rgb = read_ppm(self.root / rec["input"])
        label = read_pgm(self.root / rec["label"]) == 255
        x = torch.from_numpy(encode_input(rgb))
        y = torch.from_numpy(label.astype(np.float32)).unsqueeze(0)
        return x, y

    def positive_fraction(self) -> float:
        pos = 0
        total = 0
        for rec in self.records:
            label = read_pgm(self.root / rec["label"]) == 255
            pos += int(label.sum())
            total += label.size
        return pos / total
