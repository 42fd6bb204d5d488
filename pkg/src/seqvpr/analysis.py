"""Sequence-length, data-transfer and timing models plus the sweep engine.

Per sweep cell (technique, query level, map level):

    d        = i_s * K            data transferred, KB
    t_e_seq  = t_e * K            feature encoding time for a sequence
    t_vpr    = t_m + t_e_seq
    t_c_seq  = t_c * K            JPEG compression time for a sequence
    t_total  = t_vpr + t_c_seq

where K is the minimal sequence length reaching 100% accuracy and i_s is the
mean encoded query-image size at the query level.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .dataset import GroundTruth, ImageSet, overlap
from .descriptor import DescriptorSet, HogConfig, hog_descriptor_set, measure_hog_time
from .errors import ConfigError, DependencyError, UndefinedRatioError
from .jpeg import check_level, compress_set, decompress_set, measure_compression_time
from .matching import accuracy_curve, sequence_scores, similarity_matrix

REPORT_COLUMNS = (
    "technique", "q_level", "map_level", "k_star", "i_s_kb", "d_kb",
    "t_e", "t_e_seq", "t_m", "t_vpr", "t_c", "t_c_seq", "t_total",
)
TIMING_COLUMNS = ("t_e", "t_e_seq", "t_m", "t_vpr", "t_c", "t_c_seq", "t_total")


def _nonneg(name, x):
    if not (x >= 0 and math.isfinite(x)):
        raise ConfigError(f"{name} must be finite and non-negative, got {x}")


def _seq_len(K):
    if int(K) != K or K < 1:
        raise ConfigError(f"sequence length must be a positive integer, got {K}")


def data_transferred(i_s: float, K: int) -> float:
    _nonneg("image size", i_s)
    _seq_len(K)
    return i_s * K


def encoding_time_seq(t_e: float, K: int) -> float:
    _nonneg("t_e", t_e)
    _seq_len(K)
    return t_e * K


def vpr_time(t_m: float, t_e_seq: float) -> float:
    _nonneg("t_m", t_m)
    _nonneg("t_e_seq", t_e_seq)
    return t_m + t_e_seq


def seq_compression_time(t_c: float, K: int) -> float:
    _nonneg("t_c", t_c)
    _seq_len(K)
    return t_c * K


def total_time(t_vpr: float, t_c_seq: float) -> float:
    _nonneg("t_vpr", t_vpr)
    _nonneg("t_c_seq", t_c_seq)
    return t_vpr + t_c_seq


def descriptor_image_ratio(descriptor_kb: float, image_kb: float) -> float:
    """Descriptor size as a percentage of image size."""
    if image_kb == 0:
        raise UndefinedRatioError("image size is zero")
    return 100.0 * descriptor_kb / image_kb


def minimal_k(m, gt: GroundTruth = GroundTruth(), k_max=None):
    """Smallest K in [1, k_max] with accuracy 1.0, or None.

    ``k_max`` defaults to Nq and is capped at min(Nq, Nr).
    """
    if k_max is not None and k_max < 1:
        raise ConfigError("k_max must be >= 1")
    for K, acc in accuracy_curve(m, gt, k_max):
        if acc == 1.0:
            return K
    return None


@dataclass(frozen=True)
class TimingProfile:
    """Fixed timings in seconds; a field left as None is measured during a sweep."""

    t_e: float | None = None
    t_m: float | None = None
    t_c: float | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                _nonneg(f.name, v)


@dataclass(frozen=True)
class SweepPoint:
    technique: str
    q_level: int
    map_level: int
    k_star: int | None
    i_s_kb: float
    d_kb: float | None = None
    t_e: float | None = None
    t_e_seq: float | None = None
    t_m: float | None = None
    t_vpr: float | None = None
    t_c: float | None = None
    t_c_seq: float | None = None
    t_total: float | None = None

    @property
    def uniform(self):
        return self.q_level == self.map_level


def make_sweep_point(technique, q_level, map_level, k_star, i_s_kb, t_e, t_m, t_c):
    """Fill derived fields from the model identities. No K means no derived values."""
    if k_star is None:
        return SweepPoint(technique, q_level, map_level, None, i_s_kb, t_e=t_e, t_c=t_c)
    t_e_seq = encoding_time_seq(t_e, k_star)
    t_c_seq = seq_compression_time(t_c, k_star)
    t_vpr = vpr_time(t_m, t_e_seq)
    return SweepPoint(
        technique, q_level, map_level, k_star, i_s_kb,
        d_kb=data_transferred(i_s_kb, k_star),
        t_e=t_e, t_e_seq=t_e_seq, t_m=t_m, t_vpr=t_vpr,
        t_c=t_c, t_c_seq=t_c_seq, t_total=total_time(t_vpr, t_c_seq),
    )


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class ExperimentReport:
    dataset: str
    points: list = field(default_factory=list)
    config_hash: str = ""
    timestamp: str = ""

    def to_dict(self, timing=True):
        pts = []
        for p in self.points:
            d = asdict(p)
            if not timing:
                for c in TIMING_COLUMNS:
                    d.pop(c)
            pts.append(d)
        out = {"dataset": self.dataset, "provenance": {"config_hash": self.config_hash}}
        if timing:
            out["provenance"]["timestamp"] = self.timestamp
        out["points"] = pts
        return out

    def to_json(self, timing=True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=False) + "\n"

    def to_csv(self, timing=True) -> str:
        cols = REPORT_COLUMNS if timing else tuple(
            c for c in REPORT_COLUMNS if c not in TIMING_COLUMNS
        )
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for p in self.points:
            w.writerow([_fmt(getattr(p, c)) for c in cols])
        return buf.getvalue()

    def plot_tables(self) -> dict:
        """Plot-ready CSV texts keyed by file stem."""
        uni = [p for p in self.points if p.uniform]
        non = [p for p in self.points if not p.uniform]
        specs = {
            "k_star_uniform": (("technique", "level", "k_star"), uni,
                               lambda p: (p.technique, p.q_level, p.k_star)),
            "data_transfer_uniform": (("technique", "level", "i_s_kb", "k_star", "d_kb"), uni,
                                      lambda p: (p.technique, p.q_level, p.i_s_kb, p.k_star, p.d_kb)),
            "k_star_nonuniform": (("technique", "q_level", "map_level", "k_star"), non,
                                  lambda p: (p.technique, p.q_level, p.map_level, p.k_star)),
            "vpr_time_uniform": (("technique", "level", "k_star", "t_vpr"), uni,
                                 lambda p: (p.technique, p.q_level, p.k_star, p.t_vpr)),
        }
        out = {}
        for name, (header, pts, row) in specs.items():
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for p in pts:
                w.writerow([_fmt(v) for v in row(p)])
            out[name] = buf.getvalue()
        return out


class SweepCache:
    """Compressed images and descriptors keyed by (set digest, level[, technique]).

    ``encode_passes`` counts full-set compression passes actually performed.
    """

    def __init__(self, hog_config: HogConfig = HogConfig()):
        self.hog_config = hog_config
        self._encoded = {}
        self._decoded = {}
        self._descriptors = {}
        self._digests = {}
        self.encode_passes = 0

    def digest(self, s: ImageSet):
        key = id(s)
        if key not in self._digests:
            self._digests[key] = (s, s.digest())
        return self._digests[key][1]

    def put_encoded(self, s, level, encoded):
        self._encoded[(self.digest(s), level)] = list(encoded)

    def encoded(self, s: ImageSet, level: int):
        key = (self.digest(s), level)
        if key not in self._encoded:
            self._encoded[key] = compress_set(s, level)
            self.encode_passes += 1
        return self._encoded[key]

    def decoded(self, s: ImageSet, level: int) -> ImageSet:
        key = (self.digest(s), level)
        if key not in self._decoded:
            self._decoded[key] = decompress_set(self.encoded(s, level), s.role, s.resize_target)
        return self._decoded[key]

    def mean_size_kb(self, s, level):
        return float(np.mean([e.size_kb for e in self.encoded(s, level)]))

    def put_descriptors(self, s, level, d: DescriptorSet):
        self._descriptors[(self.digest(s), level, d.technique)] = d

    def has_descriptors(self, s, level, technique):
        return (self.digest(s), level, technique) in self._descriptors

    def descriptors(self, s, level, technique) -> DescriptorSet:
        key = (self.digest(s), level, technique)
        if key not in self._descriptors:
            if technique != "hog":
                raise DependencyError(f"no descriptors for {technique}", [(technique, s.role, level)])
            self._descriptors[key] = hog_descriptor_set(
                self.decoded(s, level), level, self.hog_config
            )
        return self._descriptors[key]


def measure_matching_time(qd, rd, K: int, query_starts=None, repeats: int = 1) -> float:
    """Mean seconds to match one query sequence of length K against the map.

    Covers cosine scoring of the K query descriptors against every reference
    plus window aggregation and the argmax over reference starts.
    """
    qv = qd.vectors if isinstance(qd, DescriptorSet) else np.asarray(qd)
    rv = rd.vectors if isinstance(rd, DescriptorSet) else np.asarray(rd)
    nq = len(qv)
    if query_starts is None:
        query_starts = range(nq - K + 1)
    samples = []
    for _ in range(repeats):
        for qi in query_starts:
            t0 = time.perf_counter()
            block = similarity_matrix(qv[qi : qi + K], rv)
            int(np.argmax(sequence_scores(block, K, [0])[0]))
            samples.append(time.perf_counter() - t0)
    return float(np.mean(samples))


def _grid(q_levels, map_levels):
    q_levels = [check_level(x) for x in q_levels]
    map_levels = [check_level(x) for x in map_levels]
    if not q_levels or not map_levels:
        raise ConfigError("sweep grid is empty")
    return [(q, m) for q in q_levels for m in map_levels]


def run_sweep(
    query: ImageSet,
    reference: ImageSet,
    techniques,
    q_levels,
    map_levels,
    profile: TimingProfile = TimingProfile(),
    gt: GroundTruth = GroundTruth(),
    k_max=None,
    descriptors=None,
    cache: SweepCache | None = None,
    dataset_name: str = "dataset",
    repeats: int = 1,
    timing_starts: int | None = 5,
    config_hash: str = "",
) -> ExperimentReport:
    """Evaluate every (technique, q_level, map_level) cell of the grid.

    ``techniques`` is a name or list of names. ``hog`` descriptors are computed
    from the compressed-then-decoded images; any other technique needs
    precomputed descriptors in ``descriptors``, a mapping
    ``(technique, role, level) -> DescriptorSet``. Timing fields of
    ``profile`` that are None are measured; ``timing_starts`` bounds how many
    query starts the matching-time measurement samples.
    """
    if isinstance(techniques, str):
        techniques = [techniques]
    techniques = list(techniques)
    if not techniques:
        raise ConfigError("no techniques requested")
    grid = _grid(q_levels, map_levels)
    query, reference = overlap(query, reference)
    cache = cache or SweepCache()

    descriptors = dict(descriptors or {})
    missing = []
    for tech in techniques:
        if tech != "hog" and profile.t_e is None:
            raise ConfigError(f"t_e must be supplied for external technique {tech!r}")
        for role, levels in (("query", {q for q, _ in grid}), ("reference", {m for _, m in grid})):
            s = query if role == "query" else reference
            for lv in sorted(levels):
                if (tech, role, lv) in descriptors:
                    d = descriptors[(tech, role, lv)]
                    if len(d) < len(s):
                        raise DependencyError(
                            f"{tech} {role} level {lv} holds {len(d)} descriptors, "
                            f"need {len(s)}"
                        )
                    cache.put_descriptors(s, lv, DescriptorSet(
                        tech, lv, d.vectors[: len(s)], role))
                elif tech != "hog" and not cache.has_descriptors(s, lv, tech):
                    missing.append((tech, role, lv))
    if missing:
        raise DependencyError("missing descriptor artifacts", missing)

    t_c_by_level, t_e_by_key = {}, {}
    report = ExperimentReport(dataset_name, config_hash=config_hash,
                              timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"))
    for tech in techniques:
        for q_level, map_level in grid:
            qd = cache.descriptors(query, q_level, tech)
            rd = cache.descriptors(reference, map_level, tech)
            m = similarity_matrix(qd, rd)
            k_star = minimal_k(m, gt, k_max)
            i_s = cache.mean_size_kb(query, q_level)

            if profile.t_c is not None:
                t_c = profile.t_c
            else:
                if q_level not in t_c_by_level:
                    t_c_by_level[q_level] = measure_compression_time(query, q_level, repeats)
                t_c = t_c_by_level[q_level]
            if profile.t_e is not None:
                t_e = profile.t_e
            else:
                key = (tech, q_level)
                if key not in t_e_by_key:
                    t_e_by_key[key] = measure_hog_time(
                        cache.decoded(query, q_level), cache.hog_config, repeats)
                t_e = t_e_by_key[key]
            t_m = None
            if k_star is not None:
                if profile.t_m is not None:
                    t_m = profile.t_m
                else:
                    n_starts = len(qd) - k_star + 1
                    if timing_starts is not None:
                        n_starts = min(n_starts, timing_starts)
                    t_m = measure_matching_time(qd, rd, k_star, range(n_starts), repeats)
            report.points.append(
                make_sweep_point(tech, q_level, map_level, k_star, i_s, t_e, t_m, t_c)
            )
    return report
