"""Similarity matrices, single-frame and sequence-based place matching.

A sequence of length K starting at query frame ``qi`` is paired element-wise
with K consecutive reference frames starting at ``ri``; its score is the mean
of the K paired cosine similarities. Only full-length sequences are scored, so
query starts run over ``[0, Nq - K]`` and reference starts over ``[0, Nr - K]``.
Ties resolve to the lowest reference index everywhere.

Window sums are accumulated in ascending t, the same order a scalar loop uses,
so vectorised and per-element results are bit-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .dataset import GroundTruth, is_correct
from .descriptor import DescriptorSet
from .errors import ComparatorError, InfeasibleError, RangeError


@dataclass(frozen=True)
class SequenceMatchResult:
    query_start: int
    matched_ref_start: int
    K: int
    score: float


def _vectors(d):
    if isinstance(d, DescriptorSet):
        return d.vectors
    return np.asarray(d)


def similarity_matrix(q, r) -> np.ndarray:
    """Nq x Nr cosine scores; rows with zero norm score 0 against everything."""
    qv = np.asarray(_vectors(q), dtype=np.float64)
    rv = np.asarray(_vectors(r), dtype=np.float64)
    if qv.ndim != 2 or rv.ndim != 2 or qv.shape[1] != rv.shape[1]:
        raise ComparatorError(f"descriptor dims differ: {qv.shape} vs {rv.shape}")

    def unit(v):
        n = np.linalg.norm(v, axis=1, keepdims=True)
        return np.divide(v, n, out=np.zeros_like(v), where=n > 0)

    return np.clip(unit(qv) @ unit(rv).T, -1.0, 1.0)


def _check_matrix(m):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"similarity matrix must be 2-D, got shape {m.shape}")
    return m


def best_match_single(m, i: int) -> int:
    m = _check_matrix(m)
    if not 0 <= i < m.shape[0]:
        raise RangeError(f"query index {i} outside [0, {m.shape[0]})")
    return int(np.argmax(m[i]))


def sequence_score(m, qi: int, ri: int, K: int) -> float:
    m = _check_matrix(m)
    nq, nr = m.shape
    if K < 1:
        raise RangeError(f"sequence length must be >= 1, got {K}")
    if qi < 0 or ri < 0 or qi + K > nq or ri + K > nr:
        raise RangeError(f"sequence q[{qi}:{qi + K}] r[{ri}:{ri + K}] exceeds {nq}x{nr}")
    total = 0.0
    for t in range(K):
        total += m[qi + t, ri + t]
    return total / K


def _window_means(sums, K):
    return sums / K


def _check_k(m, K):
    nq, nr = m.shape
    if K < 1:
        raise InfeasibleError(f"sequence length must be >= 1, got {K}")
    if K > nq or K > nr:
        raise InfeasibleError(f"sequence length {K} exceeds available frames ({nq}x{nr})")


def sequence_scores(m, K: int, query_starts=None) -> np.ndarray:
    """Mean window scores, shape (len(query_starts), Nr - K + 1).

    ``query_starts`` defaults to every valid start ``0..Nq-K``.
    """
    m = _check_matrix(m)
    _check_k(m, K)
    nq, nr = m.shape
    starts = np.arange(nq - K + 1) if query_starts is None else np.asarray(query_starts)
    n_ref = nr - K + 1
    sums = np.zeros((len(starts), n_ref))
    for t in range(K):
        sums += m[starts + t, t : t + n_ref]
    return _window_means(sums, K)


def best_match_sequence(m, qi: int, K: int) -> SequenceMatchResult:
    m = _check_matrix(m)
    _check_k(m, K)
    if not 0 <= qi <= m.shape[0] - K:
        raise RangeError(f"query start {qi} outside [0, {m.shape[0] - K}]")
    row = sequence_scores(m, K, [qi])[0]
    ri = int(np.argmax(row))
    return SequenceMatchResult(qi, ri, K, float(row[ri]))


def match_all(m, K: int) -> list[SequenceMatchResult]:
    scores = sequence_scores(m, K)
    best = np.argmax(scores, axis=1)
    return [
        SequenceMatchResult(qi, int(ri), K, float(scores[qi, ri])) for qi, ri in enumerate(best)
    ]


def _fraction_correct(best, tolerance):
    qi = np.arange(len(best))
    return float(np.mean(np.abs(qi - best) <= tolerance))


def accuracy(m, K: int, gt: GroundTruth = GroundTruth()) -> float:
    """Fraction of the Nq - K + 1 query sequences whose best start is correct."""
    best = np.argmax(sequence_scores(m, K), axis=1)
    return _fraction_correct(best, gt.tolerance)


def accuracy_curve(m, gt: GroundTruth = GroundTruth(), k_max=None):
    """Yield (K, accuracy) for K = 1..k_max with one incremental pass.

    Each step extends the previous window sums by one diagonal term, which
    keeps the ascending-t summation order of :func:`sequence_scores`.
    """
    m = _check_matrix(m)
    limit = min(m.shape)
    k_max = limit if k_max is None else min(k_max, limit)
    sums = None
    for K in range(1, k_max + 1):
        if sums is None:
            sums = np.zeros(m.shape) + m
        else:
            sums = sums[:-1, :-1] + m[K - 1 :, K - 1 :]
        best = np.argmax(_window_means(sums, K), axis=1)
        yield K, _fraction_correct(best, gt.tolerance)


def write_matrix_csv(m, fh):
    w = csv.writer(fh, lineterminator="\n")
    for row in np.asarray(m):
        w.writerow([repr(float(x)) for x in row])


def write_matches_jsonl(results, gt: GroundTruth, fh):
    for r in results:
        rec = {
            "qi": r.query_start,
            "ri": r.matched_ref_start,
            "K": r.K,
            "score": r.score,
            "correct": is_correct(gt, r.query_start, r.matched_ref_start),
        }
        fh.write(json.dumps(rec) + "\n")
