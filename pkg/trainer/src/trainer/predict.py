"""Prediction: map PPM in, thresholded guidance mask PGM out."""

from __future__ import annotations

import numpy as np
import torch

from .data import encode_input
from .netpbm import FormatError, read_ppm, write_pgm


def predict_mask(model, map_ppm, threshold: float = 0.5) -> np.ndarray:
    """Boolean prediction mask for one map file."""
    rgb = read_ppm(map_ppm)
    h, w = rgb.shape[:2]
    if h % 8 or w % 8:
        raise FormatError(f"map dimensions {w}x{h} must be divisible by 8")
    x = torch.from_numpy(encode_input(rgb)).unsqueeze(0)
    model.eval()
    with torch.no_grad():
        prob = torch.sigmoid(model(x))[0, 0].numpy()
    return prob >= threshold


def predict_to_pgm(model, map_ppm, out_path, threshold: float = 0.5) -> None:
    bits = predict_mask(model, map_ppm, threshold)
    write_pgm(out_path, np.where(bits, np.uint8(255), np.uint8(0)))
