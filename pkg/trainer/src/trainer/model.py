"""Encoder-frozen U-Net for waypoint-region prediction.

The downsampling path is a fixed feature extractor: its weights are
deterministically initialized from the seed and never trained (pretrained
weights are not available in this environment).  The bottleneck and the
upsampling path with skip connections are the trainable decoder.
"""

from __future__ import annotations

import torch
from torch import nn


def _block(cin: int, cout: int) -> nn.Sequential:
    # GroupNorm keeps the frozen encoder truly fixed (no running statistics)
    return nn.Sequential(
        nn.Conv2d(cin, cout, 3, padding=1),
        nn.GroupNorm(4, cout),
        nn.ReLU(inplace=True),
        nn.Conv2d(cout, cout, 3, padding=1),
        nn.GroupNorm(4, cout),
        nn.ReLU(inplace=True),
    )


class FrozenEncoderUNet(nn.Module):
    def __init__(self, base: int = 16, in_channels: int = 3):
        super().__init__()
        self.base = base
        self.enc1 = _block(in_channels, base)
        self.enc2 = _block(base, base * 2)
        self.enc3 = _block(base * 2, base * 4)
        self.pool = nn.MaxPool2d(2)
        self.bottleneck = _block(base * 4, base * 8)
        self.up3 = nn.ConvTranspose2d(base * 8, base * 4, 2, stride=2)
        self.dec3 = _block(base * 8, base * 4)
        self.up2 = nn.ConvTranspose2d(base * 4, base * 2, 2, stride=2)
        self.dec2 = _block(base * 4, base * 2)
        self.up1 = nn.ConvTranspose2d(base * 2, base, 2, stride=2)
        self.dec1 = _block(base * 2, base)
        self.head = nn.Conv2d(base, 1, 1)
        self.freeze_encoder()

    def freeze_encoder(self) -> None:
        for module in (self.enc1, self.enc2, self.enc3):
            for p in module.parameters():
                p.requires_grad = False

    def encoder_parameters(self):
        for module in (self.enc1, self.enc2, self.enc3):
            yield from module.parameters()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        e1 = self.enc1(x)
        e2 = self.enc2(self.pool(e1))
        e3 = self.enc3(self.pool(e2))
        b = self.bottleneck(self.pool(e3))
        d3 = self.dec3(torch.cat([self.up3(b), e3], dim=1))
        d2 = self.dec2(torch.cat([self.up2(d3), e2], dim=1))
        d1 = self.dec1(torch.cat([self.up1(d2), e1], dim=1))
        return self.head(d1)


def build_model(seed: int, base: int = 16) -> FrozenEncoderUNet:
    """Deterministically initialized model with a frozen encoder."""
    torch.manual_seed(seed)
    return FrozenEncoderUNet(base=base)
