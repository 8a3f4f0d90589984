"""Fifteen lesion descriptors: 7 intensity, 5 shape, 3 GLCM texture.

Feature k (1-based) of :data:`FEATURE_NAMES` is the k-th column of every
extraction CSV, so published rankings can refer to features by index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy import ndimage

from .errors import DegenerateDistribution, EmptyGlcm, InvalidMask, InvalidValue, ShapeError

FEATURE_NAMES = (
    "i_mean", "i_median", "i_std_dev", "i_maximum", "i_minimum", "i_kurtosis", "i_skewness",
    "s_area", "s_perimeter", "s_circularity", "s_elongation", "s_form",
    "t_contrast", "t_correlation", "t_entropy",
)

MIN_MASK_PIXELS = 16
_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class LesionImage:
    pixels: np.ndarray
    mask: np.ndarray
    pixel_spacing: float | None = None

    def __post_init__(self):
        pixels = np.array(self.pixels, dtype=float)
        mask = np.asarray(self.mask)
        if pixels.ndim != 2 or mask.shape != pixels.shape:
            raise ShapeError(f"image {pixels.shape} and mask {mask.shape} must be matching 2-D grids")
        if not np.all(np.isfinite(pixels)):
            raise InvalidValue("image contains non-finite intensities")
        if not np.isin(mask, (0, 1)).all():
            raise InvalidMask("mask values must be 0 or 1")
        mask = mask.astype(bool)
        validate_mask(mask)
        if self.pixel_spacing is not None and not self.pixel_spacing > 0:
            raise InvalidValue(f"pixel_spacing must be positive, got {self.pixel_spacing}")
        pixels.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)
        object.__setattr__(self, "mask", mask)

    @property
    def masked_pixels(self) -> np.ndarray:
        return self.pixels[self.mask]


def validate_mask(mask) -> np.ndarray:
    mask = np.asarray(mask).astype(bool)
    if mask.ndim != 2:
        raise InvalidMask(f"mask must be 2-D, got {mask.ndim}-D")
    count = int(mask.sum())
    if count < MIN_MASK_PIXELS:
        raise InvalidMask(f"mask has {count} foreground pixels, need >= {MIN_MASK_PIXELS}")
    _, ncomp = ndimage.label(mask, structure=_EIGHT)
    if ncomp != 1:
        raise InvalidMask(f"mask has {ncomp} 8-connected components, expected 1")
    return mask


@dataclass(frozen=True)
class FeatureVector:
    i_mean: float
    i_median: float
    i_std_dev: float
    i_maximum: float
    i_minimum: float
    i_kurtosis: float
    i_skewness: float
    s_area: float
    s_perimeter: float
    s_circularity: float
    s_elongation: float
    s_form: float
    t_contrast: float
    t_correlation: float
    t_entropy: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    def __getitem__(self, index: int) -> float:
        """1-based access matching the feature numbering."""
        if not 1 <= index <= len(FEATURE_NAMES):
            raise IndexError(index)
        return getattr(self, FEATURE_NAMES[index - 1])


# -- intensity -------------------------------------------------------------------

def intensity_features(values) -> tuple[float, ...]:
    """Mean, median, sample std, max, min, kurtosis, skewness of masked intensities.

    Kurtosis and skewness use population central moments (m4/m2**2, m3/m2**1.5).
    """
    x = np.asarray(values, dtype=float).ravel()
    if x.size < 2:
        raise DegenerateDistribution(f"need at least 2 pixels, got {x.size}")
    if np.all(x == x[0]):
        raise DegenerateDistribution("all intensities identical; kurtosis and skewness undefined")
    mu = x.mean()
    beta = x - mu
    m2 = np.mean(beta ** 2)
    m3 = np.mean(beta ** 3)
    m4 = np.mean(beta ** 4)
    std = math.sqrt(np.sum(beta ** 2) / (x.size - 1))
    return (float(mu), float(np.median(x)), std, float(x.max()), float(x.min()),
            float(m4 / m2 ** 2), float(m3 / m2 ** 1.5))


# -- shape -----------------------------------------------------------------------

def fit_moment_ellipse(mask) -> tuple[float, float, tuple[float, float]]:
    """Ellipse with the region's normalized second central moments.

    Returns (major, minor, (row, col) centroid). Each pixel is treated as a unit
    square, which adds 1/12 to both coordinate variances.
    """
    rows, cols = np.nonzero(np.asarray(mask).astype(bool))
    if rows.size == 0:
        raise InvalidMask("empty mask")
    r0, c0 = rows.mean(), cols.mean()
    dr, dc = rows - r0, cols - c0
    cov = np.array([[np.mean(dr * dr) + 1 / 12, np.mean(dr * dc)],
                    [np.mean(dr * dc), np.mean(dc * dc) + 1 / 12]])
    lam = np.linalg.eigvalsh(cov)  # ascending
    return 4 * math.sqrt(lam[1]), 4 * math.sqrt(lam[0]), (float(r0), float(c0))


# clockwise in image coordinates (row axis points down)
_MOORE = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_MOORE_DIR = {off: k for k, off in enumerate(_MOORE)}


def trace_boundary(mask) -> list[tuple[int, int]]:
    """Outer boundary of a single 8-connected region by Moore-neighbour tracing.

    Returns the closed pixel chain starting at the top-left foreground pixel
    (the start is not repeated at the end). Jacob's stopping criterion is used:
    tracing ends when the start pixel is about to be left by its first move.
    """
    m = np.pad(np.asarray(mask).astype(bool), 1)
    fg = np.argwhere(m)
    if fg.size == 0:
        raise InvalidMask("empty mask")
    start = (int(fg[0][0]), int(fg[0][1]))
    chain = [start]
    cur, back = start, 4  # west of the first raster pixel is background
    first_move = None
    while True:
        for k in range(1, 9):
            d = (back + k) % 8
            q = (cur[0] + _MOORE[d][0], cur[1] + _MOORE[d][1])
            if m[q]:
                break
        else:
            return [(start[0] - 1, start[1] - 1)]  # isolated pixel
        prev = (back + k - 1) % 8
        b = (cur[0] + _MOORE[prev][0], cur[1] + _MOORE[prev][1])
        if first_move is None:
            first_move = q
        elif cur == start and q == first_move:
            break
        back = _MOORE_DIR[(b[0] - q[0], b[1] - q[1])]
        cur = q
        chain.append(q)
    if len(chain) > 1 and chain[-1] == start:
        chain.pop()
    return [(r - 1, c - 1) for r, c in chain]


def traced_perimeter(mask) -> float:
    """Length of the closed boundary chain: 1 per axis step, sqrt(2) per diagonal."""
    chain = trace_boundary(mask)
    if len(chain) < 2:
        return 0.0
    pts = np.array(chain + chain[:1])
    steps = np.abs(np.diff(pts, axis=0)).sum(axis=1)
    return float(np.sum(np.where(steps == 2, math.sqrt(2.0), 1.0)))


def shape_features(mask, pixel_spacing: float | None = None) -> tuple[float, ...]:
    """Area, perimeter, circularity, elongation, form.

    Area and perimeter are in pixels unless ``pixel_spacing`` (length per pixel)
    is given, in which case they are in squared and plain physical units.
    """
    mask = validate_mask(mask)
    area = float(mask.sum())
    perim = traced_perimeter(mask)
    if pixel_spacing is not None:
        area *= pixel_spacing ** 2
        perim *= pixel_spacing
    major, minor, _ = fit_moment_ellipse(mask)
    elong = minor / major
    circ = 4 * math.pi * area / perim ** 2
    form = perim * elong / (8 * area)
    return area, perim, circ, elong, form


# -- texture ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Glcm:
    table: np.ndarray
    levels: int
    distance: int
    angle_deg: int

    @property
    def px(self) -> np.ndarray:
        return self.table.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.table.sum(axis=0)


_ANGLE_STEP = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}


def quantize(values, levels: int, lo: float, hi: float) -> np.ndarray:
    """Linear binning of [lo, hi] into levels 1..L; a constant range maps to 1."""
    values = np.asarray(values, dtype=float)
    if hi <= lo:
        return np.ones(values.shape, dtype=np.int64)
    q = np.floor((values - lo) / (hi - lo) * levels).astype(np.int64) + 1
    return np.clip(q, 1, levels)


def build_glcm(image, mask=None, levels: int = 32, distance: int = 1, angle_deg: int = 0) -> Glcm:
    """Normalized, non-symmetric co-occurrence matrix over masked pixel pairs."""
    img = np.asarray(image, dtype=float)
    if img.ndim == 1:
        img = img[None, :]
    msk = np.ones(img.shape, dtype=bool) if mask is None else np.asarray(mask).astype(bool)
    if msk.ndim == 1:
        msk = msk[None, :]
    if msk.shape != img.shape:
        raise ShapeError(f"image {img.shape} and mask {msk.shape} differ")
    if levels < 1 or distance < 1:
        raise InvalidValue("levels and distance must be >= 1")
    if angle_deg not in _ANGLE_STEP:
        raise InvalidValue(f"angle must be one of {sorted(_ANGLE_STEP)}, got {angle_deg}")
    if not msk.any():
        raise EmptyGlcm("mask is empty")

    inside = img[msk]
    q = np.zeros(img.shape, dtype=np.int64)
    q[msk] = quantize(inside, levels, inside.min(), inside.max())

    dr, dc = (s * distance for s in _ANGLE_STEP[angle_deg])
    h, w = img.shape
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r0 >= r1 or c0 >= c1:
        raise EmptyGlcm("offset leaves no pixel pairs")
    a = q[r0:r1, c0:c1]
    b = q[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
    both = msk[r0:r1, c0:c1] & msk[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
    if not both.any():
        raise EmptyGlcm("no pixel pair with both ends inside the mask")
    table = np.zeros((levels, levels))
    np.add.at(table, (a[both] - 1, b[both] - 1), 1.0)
    table /= table.sum()
    table.setflags(write=False)
    return Glcm(table, levels, distance, angle_deg)


def texture_features(glcm: Glcm) -> tuple[float, float, float]:
    """Contrast, correlation and entropy (bits) of a normalized GLCM.

    Gray levels are numbered from 1. Correlation is 0 when either marginal
    has zero spread.
    """
    P = np.asarray(glcm.table if isinstance(glcm, Glcm) else glcm, dtype=float)
    L = P.shape[0]
    i = np.arange(1, L + 1, dtype=float)
    I, J = np.meshgrid(i, i, indexing="ij")
    contrast = float(np.sum((I - J) ** 2 * P))

    px, py = P.sum(axis=1), P.sum(axis=0)
    mx, my = float(i @ px), float(i @ py)
    sx = math.sqrt(max(float(((i - mx) ** 2) @ px), 0.0))
    sy = math.sqrt(max(float(((i - my) ** 2) @ py), 0.0))
    if sx <= 1e-12 or sy <= 1e-12:
        corr = 0.0
    else:
        corr = (float(np.sum(I * J * P)) - mx * my) / (sx * sy)

    nz = P[P > 0]
    entropy = float(-np.sum(nz * np.log2(nz))) + 0.0
    return contrast, corr, entropy


def extract_all(image, mask=None, *, levels: int = 32, distance: int = 1, angle_deg: int = 0,
                pixel_spacing: float | None = None) -> FeatureVector:
    """All fifteen features for one lesion.

    Accepts either a :class:`LesionImage` or an (image, mask) pair.
    """
    if isinstance(image, LesionImage):
        lesion = image
    else:
        lesion = LesionImage(image, mask, pixel_spacing)
    intensity = intensity_features(lesion.masked_pixels)
    shape = shape_features(lesion.mask, lesion.pixel_spacing)
    texture = texture_features(build_glcm(lesion.pixels, lesion.mask, levels, distance, angle_deg))
    return FeatureVector(*intensity, *shape, *texture)
