"""JPEG compression at a [0, 99] compression level.

The compression level runs opposite to the usual encoder quality knob: 0 keeps
the most information, 99 discards the most. It maps to Pillow's quality as
``quality = 100 - level`` (clamped to [1, 100]). Chroma is always subsampled
4:2:0 and baseline (non-progressive, non-optimized) Huffman coding is used, so
output bytes are a pure function of (pixels, level).
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .dataset import ImageRecord, ImageSet
from .errors import ConfigError, DecodeError, EncodeError, EmptySetError

MIN_LEVEL, MAX_LEVEL = 0, 99
SOI = b"\xff\xd8"
SIZE_CURVE_HEADER = ("level", "mean_kb", "std_kb", "n")


def check_level(level) -> int:
    if isinstance(level, bool) or int(level) != level:
        raise ConfigError(f"compression level must be an integer, got {level!r}")
    level = int(level)
    if not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ConfigError(f"compression level must be in [0, 99], got {level}")
    return level


def encoder_quality(level: int) -> int:
    return min(100, max(1, 100 - check_level(level)))


@dataclass(frozen=True)
class EncodedImage:
    data: bytes
    level: int
    index: int = 0

    @property
    def size_kb(self) -> float:
        return len(self.data) / 1024


def encode_pixels(pixels: np.ndarray, level: int) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.asarray(pixels, dtype=np.uint8), "RGB").save(
        buf,
        format="JPEG",
        quality=encoder_quality(level),
        subsampling=2,
        optimize=False,
        progressive=False,
    )
    return buf.getvalue()


def compress(image: ImageRecord, level: int) -> EncodedImage:
    level = check_level(level)
    try:
        data = encode_pixels(image.pixels, level)
    except (OSError, ValueError, TypeError) as exc:
        raise EncodeError(str(exc), image.index) from exc
    return EncodedImage(data, level, image.index)


def decompress(e: EncodedImage | bytes) -> np.ndarray:
    data = e.data if isinstance(e, EncodedImage) else bytes(e)
    if not data.startswith(SOI):
        raise DecodeError("missing JPEG SOI marker")
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            return np.asarray(im.convert("RGB"))
    except (OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"corrupt JPEG bitstream: {exc}") from exc


def compress_set(s: ImageSet, level: int) -> list[EncodedImage]:
    return [compress(rec, level) for rec in s]


def decompress_set(encoded, role, resize_target=None) -> ImageSet:
    from .dataset import make_image_set

    return make_image_set(role, [decompress(e) for e in encoded], resize_target)


@dataclass(frozen=True)
class SizeCurve:
    levels: tuple
    mean_kb: tuple
    std_kb: tuple
    n: int

    def rows(self):
        for lv, m, sd in zip(self.levels, self.mean_kb, self.std_kb):
            yield lv, m, sd, self.n

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SIZE_CURVE_HEADER)
        for lv, m, sd, n in self.rows():
            w.writerow([lv, repr(m), repr(sd), n])


def size_curve(s: ImageSet, levels, encoded=None) -> SizeCurve:
    """Arithmetic mean (and population std) of encoded size per level.

    ``encoded`` may map level -> list[EncodedImage] to reuse earlier passes.
    """
    if len(s) == 0:
        raise EmptySetError("size curve of an empty image set")
    levels = [check_level(lv) for lv in levels]
    if not levels:
        raise ConfigError("size curve needs at least one level")
    means, stds = [], []
    for lv in levels:
        enc = (encoded or {}).get(lv) or compress_set(s, lv)
        sizes = np.array([e.size_kb for e in enc])
        means.append(float(sizes.mean()))
        stds.append(float(sizes.std()))
    return SizeCurve(tuple(levels), tuple(means), tuple(stds), len(s))


def compression_time_samples(s: ImageSet, level: int, repeats: int = 1) -> np.ndarray:
    """Per-encode wall-clock seconds, len(s) * repeats samples.

    One untimed warm-up encode per frame precedes the measurement.
    """
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    level = check_level(level)
    for rec in s:
        encode_pixels(rec.pixels, level)
    samples = []
    for _ in range(repeats):
        for rec in s:
            t0 = time.perf_counter()
            encode_pixels(rec.pixels, level)
            samples.append(time.perf_counter() - t0)
    return np.array(samples)


def measure_compression_time(s: ImageSet, level: int, repeats: int = 1) -> float:
    """Mean seconds to JPEG-compress one frame of ``s`` at ``level``."""
    return float(compression_time_samples(s, level, repeats).mean())
