"""Waypoint-region predictor for grid planning datasets.

Trains an encoder-frozen U-Net on (map PPM, mask PGM) pairs exported by the
planning toolkit and writes prediction masks in the same PGM format.  The
file formats and the dataset manifest are the only contracts shared with
the planning side.
"""

from .data import MaskDataset, encode_input, read_manifest
from .model import FrozenEncoderUNet, build_model
from .predict import predict_mask, predict_to_pgm
from .train import TrainConfig, iou_score, load_model, train

__version__ = "0.1.0"
