"""Synthetic datasets and lesion images for self-contained verification."""

from __future__ import annotations

from importlib import resources
from typing import Sequence

import numpy as np

from .data import Dataset, make_rng, read_rankings, validate_dataset
from .errors import InvalidIndex, InvalidValue


def synthesize(n: int = 200, d: int = 15, informative: Sequence[int] = (2, 7, 13),
               noise: float = 1.0, seed: int = 42, positive_fraction: float = 1 / 3) -> Dataset:
    """Standard-normal features; labels threshold the sum of the informative ones plus noise.

    The threshold is the (1 - positive_fraction) quantile of the latent score,
    so about ``positive_fraction`` of the samples are positive.
    """
    informative = sorted({int(i) for i in informative})
    if not informative:
        raise InvalidIndex("need at least one informative feature")
    bad = [i for i in informative if not 1 <= i <= d]
    if bad:
        raise InvalidIndex(f"informative indices {bad} outside 1..{d}")
    if n < 4 or noise < 0 or not 0 < positive_fraction < 1:
        raise InvalidValue("need n >= 4, noise >= 0 and 0 < positive_fraction < 1")
    rng = make_rng(seed)
    x = rng.standard_normal((n, d))
    latent = x[:, [i - 1 for i in informative]].sum(axis=1) + noise * rng.standard_normal(n)
    threshold = np.quantile(latent, 1 - positive_fraction)
    y = (latent > threshold).astype(int)
    return validate_dataset(x, y, [f"f{j}" for j in range(1, d + 1)])


def disk_mask(shape, center, radius) -> np.ndarray:
    yy, xx = np.mgrid[:shape[0], :shape[1]]
    return (((yy - center[0]) ** 2 + (xx - center[1]) ** 2) <= radius ** 2).astype(np.int8)


def synthetic_lesion(seed: int, shape=(64, 64), radius: float = 18.0):
    """Speckled disk on a darker background, as (pixels, mask)."""
    rng = make_rng(seed)
    mask = disk_mask(shape, (shape[0] / 2, shape[1] / 2), radius)
    base = rng.uniform(40, 80)
    pixels = base + rng.gamma(2.0, 10.0, size=shape)
    pixels[mask == 1] += rng.uniform(40, 100)
    return np.clip(pixels, 0, 255), mask


def published_rankings():
    """The 30 published UDIAT rankings bundled with the package."""
    with resources.as_file(resources.files("firank") / "fixtures" / "published_rankings.csv") as path:
        return read_rankings(path)


PUBLISHED_OPTIMAL = (2, 7, 13)
