"""Built-in property checks runnable without pytest (``seqvpr selftest``)."""

from __future__ import annotations

import math
import tempfile
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import analysis, matching, published
from .dataset import GroundTruth
from .descriptor import DescriptorSet, HogConfig, compute_hog, cosine
from .synthetic import noisy_alignment_matrix
from .vprd import load_descriptor_set, store_descriptor_set


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def brute_force_sequence_match(m, qi, K):
    """Enumerate every reference start; scalar mean in ascending frame order."""
    m = np.asarray(m, dtype=np.float64)
    best_ri, best = None, -math.inf
    for ri in range(m.shape[1] - K + 1):
        total = 0.0
        for t in range(K):
            total += float(m[qi + t, ri + t])
        score = total / K
        if score > best:
            best_ri, best = ri, score
    return best_ri, best


def check_sequence_oracle(trials=300, seed=0):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        nq, nr = rng.integers(1, 51, 2)
        K = int(rng.integers(1, min(10, nq, nr) + 1))
        m = rng.uniform(-1, 1, (nq, nr))
        qi = int(rng.integers(0, nq - K + 1))
        got = matching.best_match_sequence(m, qi, K)
        ri, score = brute_force_sequence_match(m, qi, K)
        if got.matched_ref_start != ri or got.score != score:
            bad += 1
    return CheckResult("sequence_oracle", bad == 0, f"{bad}/{trials} mismatches")


def check_single_frame_reduction(trials=50, seed=1):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        m = rng.uniform(0, 1, tuple(rng.integers(1, 30, 2)))
        for i in range(m.shape[0]):
            if matching.best_match_sequence(m, i, 1).matched_ref_start != matching.best_match_single(m, i):
                bad += 1
    return CheckResult("single_frame_reduction", bad == 0, f"{bad} disagreements")


def check_minimal_k(trials=60, seed=2):
    rng = np.random.default_rng(seed)
    gt = GroundTruth()
    bad = 0
    for _ in range(trials):
        n = int(rng.integers(5, 30))
        m = noisy_alignment_matrix(rng, n, signal=rng.uniform(0.05, 0.6))
        k = analysis.minimal_k(m, gt)
        scan = [matching.accuracy(m, K, gt) for K in range(1, n + 1)]
        expected = next((K for K, a in enumerate(scan, 1) if a == 1.0), None)
        if k != expected:
            bad += 1
    return CheckResult("minimal_k", bad == 0, f"{bad}/{trials} wrong minima")


def check_model_identities(trials=200, seed=3):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        K = int(rng.integers(1, 200))
        i_s, t_e, t_m, t_c = rng.uniform(0, 100, 4)
        p = analysis.make_sweep_point("x", 0, 0, K, i_s, t_e, t_m, t_c)
        ok = (
            p.d_kb == i_s * K
            and p.t_e_seq == t_e * K
            and p.t_vpr == t_m + p.t_e_seq
            and p.t_c_seq == t_c * K
            and p.t_total == p.t_vpr + p.t_c_seq
        )
        bad += not ok
    return CheckResult("model_identities", bad == 0, f"{bad}/{trials} violations")


def recompute_timing_row(row):
    t_e_seq = analysis.encoding_time_seq(row.t_e, row.K)
    t_vpr = analysis.vpr_time(row.t_m, t_e_seq)
    t_total = analysis.total_time(t_vpr, row.t_c_seq or 0.0)
    return {"t_e_seq": t_e_seq, "t_vpr": t_vpr, "t_total": t_total}


def check_published_timing(tol=published.TIMING_TOLERANCE):
    failures, errata = [], []
    for row in published.TIMING_ROWS:
        for name, value in recompute_timing_row(row).items():
            printed = getattr(row, name)
            if abs(value - printed) <= tol:
                continue
            key = (row.technique, row.q_level, row.map_level, name)
            if key in published.TIMING_ERRATA and abs(published.TIMING_ERRATA[key] - value) <= 1e-9:
                errata.append(f"{key}: printed {printed}, recomputed {value:.4f}")
            else:
                failures.append(f"{key}: printed {printed}, recomputed {value:.4f}")
    detail = f"{3 * len(published.TIMING_ROWS) - len(failures) - len(errata)} cells within {tol}"
    if errata:
        detail += "; printed value inconsistent with its own row: " + "; ".join(errata)
    if failures:
        detail += "; FAILED " + "; ".join(failures)
    return CheckResult("published_timing", not failures, detail)


def check_hog_size():
    cfg = HogConfig()
    d = compute_hog(np.zeros((256, 256)), cfg)
    kb = d.size * 4 / 1024
    ok = d.size == cfg.dim == 8100 and abs(kb - published.DESCRIPTOR_KB["HOG"]) <= 0.2
    return CheckResult("hog_size", ok, f"dim {d.size}, {kb:.2f} KB")


def check_cosine():
    ok = (
        cosine([1, 2, 3], [1, 2, 3]) == 1.0
        and cosine([1, 0], [0, 1]) == 0.0
        and abs(cosine([1, 1], [1, 0]) - 1 / math.sqrt(2)) < 1e-12
        and cosine([0, 0], [1, 1]) == 0.0
    )
    return CheckResult("cosine", ok, "self, orthogonal, 45 degree and zero-norm cases")


def check_descriptor_roundtrip(seed=4):
    rng = np.random.default_rng(seed)
    d = DescriptorSet("external:test", 95, rng.normal(size=(7, 13)).astype(np.float32))
    with tempfile.TemporaryDirectory() as tmp:
        p = Path(tmp) / "d.vprd"
        store_descriptor_set(d, p)
        back = load_descriptor_set(p)
    ok = (
        back.technique == d.technique
        and back.source_level == d.source_level
        and np.array_equal(back.vectors, d.vectors)
    )
    return CheckResult("descriptor_roundtrip", ok, "7x13 float32 set")


CHECKS = (
    check_sequence_oracle,
    check_single_frame_reduction,
    check_minimal_k,
    check_model_identities,
    check_published_timing,
    check_hog_size,
    check_cosine,
    check_descriptor_roundtrip,
)


def run_selftest(checks=CHECKS):
    results = []
    for check in checks:
        try:
            results.append(check())
        except Exception as exc:  # a crash is a failed property, not an abort
            results.append(CheckResult(check.__name__.removeprefix("check_"), False, repr(exc)))
    return results
