import numpy as np
import pytest
from PIL import Image

from seqvpr.dataset import make_image_set, write_manifest
from seqvpr.synthetic import make_synthetic_pair


def natural_photos():
    """At least 20 natural RGB photographs from scikit-image's bundled data."""
    skdata = pytest.importorskip("skimage.data")
    names = [
        "astronaut", "camera", "cat", "coffee", "coins", "rocket", "moon",
        "immunohistochemistry", "hubble_deep_field", "retina", "grass",
        "gravel", "brick", "clock", "microaneurysms",
    ]
    photos = []
    for n in names:
        img = getattr(skdata, n)()
        if img.ndim == 2:
            img = np.repeat(img[:, :, None], 3, axis=2)
        photos.append(np.ascontiguousarray(img[:, :, :3]))
    # quadrant crops of the larger colour photos are still natural photos
    for n in ("astronaut", "coffee", "rocket"):
        img = getattr(skdata, n)()
        h, w = img.shape[0] // 2, img.shape[1] // 2
        photos += [img[:h, :w], img[h:, w:]]
    return photos


@pytest.fixture(scope="session")
def photo_set():
    return make_image_set("query", natural_photos())


@pytest.fixture(scope="session")
def small_pair():
    return make_synthetic_pair(n_frames=12, seed=3)


@pytest.fixture(scope="session")
def synthetic50():
    return make_synthetic_pair(n_frames=50, seed=0)


def write_dataset(root, query, reference, fmt="png"):
    """Write an ImageSet pair plus manifests under ``root``; return manifest paths."""
    manifests = []
    for s in (query, reference):
        d = root / s.role
        d.mkdir(parents=True, exist_ok=True)
        paths = []
        for rec in s:
            p = d / f"{rec.index:04d}.{fmt}"
            Image.fromarray(rec.pixels).save(p)
            paths.append(p)
        m = root / f"{s.role}.txt"
        write_manifest(m, paths)
        manifests.append(m)
    return manifests


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, aggregated over its sub-cases."""
    import sys

    mod = sys.modules.get("test_acceptance")
    ledger = getattr(mod, "RESULTS", None)
    if not ledger:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, cases in ledger.items():
        failed = [name for name, ok, _ in cases if not ok]
        status = "PASS" if not failed else "FAIL"
        note = f"{len(cases) - len(failed)}/{len(cases)} cases"
        if failed:
            note += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(f"{status} {criterion}: {note}")
