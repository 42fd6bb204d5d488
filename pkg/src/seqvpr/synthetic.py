"""Synthetic frame-aligned datasets for tests, demos and the self-test.

Frames are windows sliding along one long panorama. The panorama's coarse
layout (smooth colour fields and filled shapes) repeats with a short period,
so distant places share their large-scale appearance; what tells places apart
is a fine, non-repeating texture. Strong JPEG compression removes that fine
texture first, which is what makes single-frame matching degrade with the
compression level. The query traverse is the reference traverse with a small
lateral offset, a global brightness gain and additive Gaussian noise.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, ImageDraw

from .dataset import RESIZE_TARGETS, make_image_set


def smooth_noise(rng, shape, scale):
    """RGB value noise: uniform samples every ``scale`` pixels, bicubic-upsampled."""
    coarse = rng.uniform(0, 255, (max(2, shape[0] // scale), max(2, shape[1] // scale), 3))
    im = Image.fromarray(coarse.astype(np.uint8), "RGB")
    return np.asarray(im.resize(shape[::-1], Image.Resampling.BICUBIC), dtype=np.float64)


def make_scene(height, width, rng, n_shapes=None):
    base = (
        0.5 * smooth_noise(rng, (height, width), 64)
        + 0.3 * smooth_noise(rng, (height, width), 16)
        + 0.2 * smooth_noise(rng, (height, width), 4)
    )
    im = Image.fromarray(np.clip(base, 0, 255).astype(np.uint8), "RGB")
    draw = ImageDraw.Draw(im)
    for _ in range(n_shapes or max(1, width // 12)):
        x0, y0 = rng.uniform(0, width), rng.uniform(0, height)
        w, h = rng.uniform(8, 90, 2)
        color = tuple(int(c) for c in rng.integers(0, 256, 3))
        box = [x0, y0, x0 + w, y0 + h]
        if rng.random() < 0.5:
            draw.rectangle(box, fill=color)
        else:
            draw.ellipse(box, fill=color)
    return np.asarray(im, dtype=np.float64)


def make_panorama(height, width, rng, period=256, fine_amp=0.2, fine_scale=3):
    tile = make_scene(height, period, rng)
    coarse = np.tile(tile, (1, width // period + 1, 1))[:, :width]
    fine = smooth_noise(rng, (height, width), fine_scale) - 127.5
    pano = coarse * (1 - fine_amp) + 2 * fine_amp * fine + 127.5 * fine_amp
    return np.clip(pano, 0, 255)


def make_synthetic_pair(
    n_frames=50,
    size=256,
    step=32,
    period=256,
    fine_amp=0.2,
    noise_sigma=20.0,
    brightness=1.1,
    shift=4,
    seed=0,
):
    """Return (query, reference) ImageSets of ``n_frames`` size x size RGB frames."""
    rng = np.random.default_rng(seed)
    width = size + step * (n_frames - 1) + shift
    pano = make_panorama(size, width, rng, period, fine_amp)
    ref, qry = [], []
    for k in range(n_frames):
        x = k * step
        ref.append(np.rint(pano[:, x : x + size]).astype(np.uint8))
        window = pano[:, x + shift : x + shift + size] * brightness
        noisy = window + rng.normal(0.0, noise_sigma, window.shape)
        qry.append(np.clip(np.rint(noisy), 0, 255).astype(np.uint8))
    target = size if size in RESIZE_TARGETS else None
    return make_image_set("query", qry, target), make_image_set("reference", ref, target)


def noisy_alignment_matrix(rng, nq, nr=None, signal=0.3, noise=1.0):
    """Random similarity matrix with a weak diagonal bonus.

    ``signal / noise`` controls how long a sequence is needed before every
    query start locks onto its own diagonal.
    """
    nr = nq if nr is None else nr
    m = rng.uniform(0.0, noise, (nq, nr))
    k = min(nq, nr)
    m[np.arange(k), np.arange(k)] += signal
    return m
