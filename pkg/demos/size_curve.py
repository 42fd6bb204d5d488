"""
How much does JPEG save on a place-recognition frame?
=====================================================

Encode a handful of synthetic frames at increasing compression levels and
watch the mean encoded size fall. Level c maps to JPEG quality 100 - c.
"""

from seqvpr import compress, size_curve
from seqvpr.synthetic import make_synthetic_pair

# twenty 256x256 frames from a synthetic traverse
query, _ = make_synthetic_pair(n_frames=20, seed=1)

levels = [0, 50, 80, 90, 95, 99]
curve = size_curve(query, levels)
for lv, mean, std in zip(curve.levels, curve.mean_kb, curve.std_kb):
    print(f"level {lv:2d}  {mean:7.2f} KB  (std {std:.2f})")

# the raw frame for comparison: 256 * 256 * 3 bytes
print(f"raw        {256 * 256 * 3 / 1024:7.2f} KB")

# one frame at the two extremes
lo, hi = compress(query[0], 0), compress(query[0], 99)
print("size ratio, level 0 over level 99:", round(lo.size_kb / hi.size_kb, 1))
