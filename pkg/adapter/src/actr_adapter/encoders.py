"""Encoder registry.

``vgg16``        pretrained torchvision VGG16, features from the final
                 pooling layer: (512, 7, 7) per image.  Raises
                 MissingEncoderWeightsError when the checkpoint cannot be
                 fetched (offline environments).
``vgg16-random`` the same architecture with a seed-0 random
                 initialization: deterministic, correct shapes, no
                 checkpoint needed.  Meant for tests and pipelines that
                 only exercise shapes and identities.
``random-CxHxW`` a seeded random projection of the resized image onto a
                 (C, H, W) grid, for exercising alternative encoder
                 shapes (e.g. random-1536x16x16) without their weights.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
import torch

from .errors import MissingEncoderWeightsError

IMAGENET_MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
IMAGENET_STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)


@dataclass(frozen=True)
class Encoder:
    name: str
    channels: int
    grid: tuple[int, int]
    input_size: int
    run: Callable[[np.ndarray], np.ndarray]  # (N,3,S,S) float32 -> (N,C,h,w)


def _vgg16_features(pretrained: bool) -> torch.nn.Module:
    import torchvision.models as models

    if pretrained:
        try:
            model = models.vgg16(weights=models.VGG16_Weights.IMAGENET1K_V1)
        except Exception as exc:
            raise MissingEncoderWeightsError(
                "could not load pretrained vgg16 weights; use encoder "
                "'vgg16-random' for a deterministic weightless run"
            ) from exc
    else:
        torch.manual_seed(0)
        model = models.vgg16(weights=None)
    model.eval()
    return model.features


def _make_vgg16(name: str, pretrained: bool) -> Encoder:
    features: list = []  # lazy: torchvision import and init deferred to first use

    def run(batch: np.ndarray) -> np.ndarray:
        if not features:
            features.append(_vgg16_features(pretrained))
        x = (batch - IMAGENET_MEAN[:, None, None]) / IMAGENET_STD[:, None, None]
        with torch.no_grad():
            out = features[0](torch.from_numpy(x))
        return out.numpy()

    return Encoder(name=name, channels=512, grid=(7, 7), input_size=224, run=run)


def _make_random_projection(name: str, channels: int, grid: tuple[int, int]) -> Encoder:
    def run(batch: np.ndarray) -> np.ndarray:
        n, _, size, _ = batch.shape
        h, w = grid
        # average-pool the image onto the grid, then apply a fixed random
        # channel mixing seeded by the requested dims
        ph, pw = size // h, size // w
        pooled = batch[:, :, : ph * h, : pw * w]
        pooled = pooled.reshape(n, 3, h, ph, w, pw).mean(axis=(3, 5))
        rng = np.random.default_rng(abs(hash((channels, h, w))) % (2**32))
        mix = rng.normal(size=(channels, 3)).astype(np.float32)
        return np.einsum("cd,ndhw->nchw", mix, pooled)

    size = max(224, 14 * max(grid))
    return Encoder(name=name, channels=channels, grid=grid, input_size=size, run=run)


def get_encoder(name: str) -> Encoder:
    if name == "vgg16":
        return _make_vgg16(name, pretrained=True)
    if name == "vgg16-random":
        return _make_vgg16(name, pretrained=False)
    match = re.fullmatch(r"random-(\d+)x(\d+)x(\d+)", name)
    if match:
        c, h, w = (int(g) for g in match.groups())
        return _make_random_projection(name, c, (h, w))
    raise ValueError(
        f"unknown encoder {name!r}; expected vgg16, vgg16-random or random-CxHxW"
    )
