"""Image loading, mask rasterization and the extraction pipeline."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image, UnidentifiedImageError

from .encoders import get_encoder
from .errors import UndecodableImageError
from .tensorfile import write_tensor


@dataclass(frozen=True)
class AdapterConfig:
    input_image: str
    slice_images: tuple[str, ...]
    output_dir: str
    encoder: str = "vgg16"

    def __post_init__(self):
        if len(self.slice_images) < 1:
            raise ValueError("need at least one slice image")


def _load_image(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Decode to (rgb float32 in [0,1] over white, foreground bool mask)."""
    try:
        with Image.open(path) as img:
            img.load()
            has_alpha = "A" in img.getbands()
            rgba = np.asarray(img.convert("RGBA"), dtype=np.float32) / 255.0
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise UndecodableImageError(f"{path}: {exc}") from exc
    alpha = rgba[:, :, 3:4]
    rgb = rgba[:, :, :3] * alpha + (1.0 - alpha)  # composite over white
    if has_alpha:
        mask = alpha[:, :, 0] > 0.0
    else:
        # background-removed RGB convention: background is pure white
        mask = np.any(rgba[:, :, :3] < 250.0 / 255.0, axis=2)
    return rgb, mask


def _resize(rgb: np.ndarray, size: int) -> np.ndarray:
    img = Image.fromarray((rgb * 255.0 + 0.5).astype(np.uint8))
    out = np.asarray(img.resize((size, size), Image.BILINEAR), dtype=np.float32)
    return np.ascontiguousarray(out.transpose(2, 0, 1)) / 255.0  # (3, S, S)


def downsample_any(mask: np.ndarray, grid: tuple[int, int]) -> np.ndarray:
    """Grid cell is foreground when any covered pixel is foreground."""
    big_h, big_w = mask.shape
    h, w = grid
    rows = (np.arange(big_h) * h) // big_h
    cols = (np.arange(big_w) * w) // big_w
    out = np.zeros(grid, dtype=bool)
    np.logical_or.at(out, (rows[:, None], cols[None, :]), mask)
    return out


def extract(config: AdapterConfig) -> dict:
    """Run the encoder on the input and slice images and write TensorFiles.

    Emits input features, one feature file per slice, the input-image
    foreground mask at grid resolution, and per-slice occupancy (true
    where the slice has any foreground in the cell).  Returns the written
    paths.
    """
    encoder = get_encoder(config.encoder)
    images = [config.input_image, *config.slice_images]
    rgbs, masks = [], []
    for path in images:
        if not os.path.exists(path):
            raise UndecodableImageError(f"{path}: no such file")
        rgb, mask = _load_image(path)
        rgbs.append(_resize(rgb, encoder.input_size))
        masks.append(mask)

    feats = encoder.run(np.stack(rgbs))
    expected = (len(images), encoder.channels, *encoder.grid)
    assert feats.shape == expected, f"encoder returned {feats.shape}, wanted {expected}"

    os.makedirs(config.output_dir, exist_ok=True)
    out = lambda name: os.path.join(config.output_dir, name)
    paths = {
        "input_features": out("input-features.actr"),
        "slice_features": [],
        "mask": out("mask.actr"),
        "occupancy": out("occupancy.actr"),
    }
    write_tensor(paths["input_features"], feats[0],
                 meta={"role": "input-features", "encoder": encoder.name})
    for i, feat in enumerate(feats[1:]):
        path = out(f"slice-{i:02d}-features.actr")
        write_tensor(path, feat,
                     meta={"role": "slice-features", "slice_index": i,
                           "encoder": encoder.name})
        paths["slice_features"].append(path)
    write_tensor(paths["mask"],
                 downsample_any(masks[0], encoder.grid).astype(np.float32),
                 meta={"role": "mask"})
    occupancy = np.stack([downsample_any(m, encoder.grid) for m in masks[1:]])
    write_tensor(paths["occupancy"], occupancy.astype(np.float32),
                 meta={"role": "occupancy"})
    return paths
