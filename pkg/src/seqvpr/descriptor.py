"""Whole-image descriptors and the cosine comparator.

HOG is computed natively. Descriptors from CNN techniques (NetVLAD, HybridNet,
RegionVLAD, ...) are produced by external tooling and ingested through the
VPRD file format in :mod:`seqvpr.vprd`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .dataset import ImageSet, to_gray
from .errors import ComparatorError, ConfigError, DimensionError

HOG_INPUT_SIDE = 256
NORM_EPS = 1e-12


@dataclass(frozen=True)
class HogConfig:
    """HOG layout. The default gives 15 x 15 blocks x 4 cells x 9 bins = 8100 dims."""

    cell: int = 16
    block: int = 2
    stride: int = 16
    bins: int = 9
    signed: bool = False

    def __post_init__(self):
        if min(self.cell, self.block, self.stride) < 1:
            raise ConfigError("cell, block and stride must be positive")
        if self.bins < 2:
            raise ConfigError("bins must be >= 2")
        span = HOG_INPUT_SIDE - self.block * self.cell
        if span < 0 or span % self.stride:
            raise ConfigError(
                f"{HOG_INPUT_SIDE} - block*cell = {span} is not a non-negative multiple "
                f"of stride {self.stride}"
            )

    @property
    def blocks_per_side(self) -> int:
        return (HOG_INPUT_SIDE - self.block * self.cell) // self.stride + 1

    @property
    def dim(self) -> int:
        return self.blocks_per_side**2 * self.block**2 * self.bins


def _orientation_votes(gray, bins, signed):
    padded = np.pad(gray, 1, mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    mag = np.hypot(gx, gy)
    span = 360.0 if signed else 180.0
    angle = np.mod(np.degrees(np.arctan2(gy, gx)), span)
    # bin b is centred at (b + 0.5) * width; votes split linearly between the two
    # nearest centres, wrapping around the orientation circle
    pos = angle / (span / bins) - 0.5
    lo = np.floor(pos)
    frac = pos - lo
    lo = lo.astype(np.int64) % bins
    hi = (lo + 1) % bins

    votes = np.zeros(gray.shape + (bins,))
    rows, cols = np.indices(gray.shape)
    votes[rows, cols, lo] = (1.0 - frac) * mag
    votes[rows, cols, hi] += frac * mag
    return votes


def compute_hog(image, cfg: HogConfig = HogConfig()) -> np.ndarray:
    """HOG descriptor of a 256x256 grayscale raster, as float32."""
    gray = np.asarray(image, dtype=np.float64)
    if gray.shape != (HOG_INPUT_SIDE, HOG_INPUT_SIDE):
        raise DimensionError(
            f"HOG expects a {HOG_INPUT_SIDE}x{HOG_INPUT_SIDE} single-channel image, "
            f"got shape {gray.shape}"
        )
    votes = _orientation_votes(gray, cfg.bins, cfg.signed)

    nb = cfg.blocks_per_side
    block_origins = np.arange(nb) * cfg.stride
    cell_origins = np.unique(
        (block_origins[:, None] + np.arange(cfg.block)[None, :] * cfg.cell).ravel()
    )
    # windows: (H - cell + 1, W - cell + 1, bins, cell, cell)
    windows = sliding_window_view(votes, (cfg.cell, cfg.cell), axis=(0, 1))
    cells = windows[np.ix_(cell_origins, cell_origins)].sum(axis=(-2, -1))

    lookup = {o: k for k, o in enumerate(cell_origins)}
    idx = np.array(
        [[lookup[o + a * cfg.cell] for a in range(cfg.block)] for o in block_origins]
    )
    # blocks[by, bx, a, b, bins] = cells[idx[by, a], idx[bx, b]]
    blocks = cells[idx[:, None, :, None], idx[None, :, None, :]]
    blocks = blocks.reshape(nb, nb, -1)
    norms = np.sqrt((blocks**2).sum(axis=-1, keepdims=True))
    blocks = blocks / (norms + NORM_EPS)
    return blocks.reshape(-1).astype(np.float32)


def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ComparatorError(f"descriptor dims differ: {a.size} vs {b.size}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


@dataclass(frozen=True)
class DescriptorSet:
    technique: str
    source_level: int
    vectors: np.ndarray = field(repr=False)
    role: str = "query"

    def __post_init__(self):
        v = np.ascontiguousarray(self.vectors, dtype=np.float32)
        if v.ndim != 2 or v.shape[1] < 1:
            raise DimensionError(f"descriptor matrix must be (count, dim), got {v.shape}")
        if not np.isfinite(v).all():
            raise ConfigError("descriptors contain NaN or Inf components")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def nominal_size_kb(self) -> float:
        return self.dim * 4 / 1024


def hog_descriptor_set(
    s: ImageSet, level: int, cfg: HogConfig = HogConfig(), role=None
) -> DescriptorSet:
    vectors = np.stack([compute_hog(to_gray(r.pixels), cfg) for r in s])
    return DescriptorSet("hog", level, vectors, role or s.role)


def measure_hog_time(s: ImageSet, cfg: HogConfig = HogConfig(), repeats=1) -> float:
    """Mean seconds for grayscale conversion plus HOG on one frame."""
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    compute_hog(to_gray(s[0].pixels), cfg)
    samples = []
    for _ in range(repeats):
        for r in s:
            t0 = time.perf_counter()
            compute_hog(to_gray(r.pixels), cfg)
            samples.append(time.perf_counter() - t0)
    return float(np.mean(samples))
