"""Frame-aligned query/reference image collections.

A dataset is described by two manifests (one per role). Each manifest is a
UTF-8 text file listing one image path per line, relative to the manifest's
directory, in frame order. Blank lines and lines starting with ``#`` are
skipped.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ConfigError, DecodeError, EmptySetError, LoadError

ROLES = ("query", "reference")
RESIZE_TARGETS = (224, 256)

# ITU-R BT.601 luma
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class ImageRecord:
    index: int
    pixels: np.ndarray
    source_path: str = ""

    @property
    def shape(self):
        return self.pixels.shape[:2]


@dataclass(frozen=True)
class ImageSet:
    role: str
    records: tuple
    resize_target: int | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ConfigError(f"unknown role {self.role!r}")
        object.__setattr__(self, "records", tuple(self.records))
        for k, rec in enumerate(self.records):
            if rec.index != k:
                raise ConfigError(f"record at position {k} has index {rec.index}")
        if self.records and self.resize_target is not None:
            shape = self.records[0].pixels.shape
            for rec in self.records:
                if rec.pixels.shape != shape:
                    raise DecodeError(
                        f"shape {rec.pixels.shape} differs from {shape}", rec.index
                    )

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def digest(self) -> str:
        """Content hash over role and pixel data, used as a cache key."""
        h = hashlib.sha256(self.role.encode())
        for rec in self.records:
            h.update(np.asarray(rec.pixels.shape, dtype=np.int64).tobytes())
            h.update(np.ascontiguousarray(rec.pixels).tobytes())
        return h.hexdigest()[:16]

    def truncated(self, n: int) -> "ImageSet":
        if n >= len(self):
            return self
        return ImageSet(self.role, self.records[:n], self.resize_target)


@dataclass(frozen=True)
class GroundTruth:
    """Frame-window correspondence: query i matches reference j iff |i - j| <= tolerance."""

    tolerance: int = 0

    def __post_init__(self):
        if int(self.tolerance) != self.tolerance or self.tolerance < 0:
            raise ConfigError(f"tolerance must be a non-negative integer, got {self.tolerance}")


def is_correct(gt: GroundTruth, query_index: int, ref_index: int) -> bool:
    if query_index < 0 or ref_index < 0:
        raise ConfigError("frame indices must be non-negative")
    return abs(query_index - ref_index) <= gt.tolerance


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    arr.setflags(write=False)
    return arr


def make_image_set(role, rasters, resize_target=None, paths=None) -> ImageSet:
    """Wrap in-memory RGB rasters as an ImageSet."""
    paths = paths or [""] * len(rasters)
    records = []
    for k, (px, p) in enumerate(zip(rasters, paths)):
        px = np.asarray(px)
        if px.ndim == 2:
            px = np.repeat(px[:, :, None], 3, axis=2)
        if px.ndim != 3 or px.shape[2] != 3:
            raise DecodeError(f"expected an HxWx3 raster, got shape {px.shape}", k)
        records.append(ImageRecord(k, _frozen(px), str(p)))
    return ImageSet(role, tuple(records), resize_target)


def read_manifest(manifest_path) -> list[Path]:
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise LoadError(manifest_path)
    base = manifest_path.parent
    entries = []
    for line in manifest_path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entries.append(base / line)
    return entries


def load_image_set(manifest_path, role) -> ImageSet:
    if role not in ROLES:
        raise ConfigError(f"unknown role {role!r}")
    paths = read_manifest(manifest_path)
    if not paths:
        raise EmptySetError(f"manifest {manifest_path} lists no images")
    rasters = []
    for k, p in enumerate(paths):
        if not p.is_file():
            raise LoadError(p, f"missing image for frame {k}")
        try:
            with Image.open(p) as im:
                rasters.append(np.asarray(im.convert("RGB")))
        except (UnidentifiedImageError, OSError, SyntaxError) as exc:
            raise DecodeError(f"cannot decode {p}: {exc}", k) from exc
    return make_image_set(role, rasters, paths=paths)


def resize_image(pixels: np.ndarray, target: int) -> np.ndarray:
    """Bilinear stretch to target x target; identity when already that size."""
    if pixels.shape[:2] == (target, target):
        return np.array(pixels, dtype=np.uint8)
    im = Image.fromarray(np.asarray(pixels, dtype=np.uint8), "RGB")
    return np.asarray(im.resize((target, target), Image.Resampling.BILINEAR))


def resize_set(s: ImageSet, target: int) -> ImageSet:
    if target not in RESIZE_TARGETS:
        raise ConfigError(f"resize target must be one of {RESIZE_TARGETS}, got {target}")
    records = tuple(
        ImageRecord(r.index, _frozen(resize_image(r.pixels, target)), r.source_path)
        for r in s.records
    )
    return ImageSet(s.role, records, target)


def to_gray(pixels: np.ndarray) -> np.ndarray:
    """Luma conversion to float64 in [0, 255]; no rounding."""
    px = np.asarray(pixels, dtype=np.float64)
    if px.ndim == 2:
        return px
    return px[..., :3] @ LUMA_WEIGHTS


def overlap(query: ImageSet, reference: ImageSet):
    """Restrict a pair to the common index range [0, min(Nq, Nr) - 1]."""
    n = min(len(query), len(reference))
    return query.truncated(n), reference.truncated(n)


def write_manifest(path, image_paths):
    path = Path(path)
    lines = []
    for p in image_paths:
        p = Path(p)
        try:
            p = p.relative_to(path.parent)
        except ValueError:
            pass
        lines.append(str(p))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
