"""Command-line entry point.

    seqvpr compress  --config run.yaml        encode caches + size_curve.csv
    seqvpr describe  --config run.yaml        VPRD descriptor files per level
    seqvpr match     --config run.yaml --k 5  similarity matrix + match lines
    seqvpr sweep     --config run.yaml        report + plot-ready CSVs
    seqvpr selftest

Exit codes: 0 success, 2 configuration error, 3 data or dependency error,
4 self-test failure.
"""

from __future__ import annotations

import argparse
import shutil
import sys
from pathlib import Path

from . import analysis, matching
from .config import RunConfig, load_config, parse_levels, parse_technique
from .dataset import GroundTruth, load_image_set, overlap, resize_set
from .descriptor import DescriptorSet, hog_descriptor_set
from .errors import (
    ComparatorError, ConfigError, DataError, DependencyError, DimensionError,
    InfeasibleError, RangeError,
)
from .jpeg import EncodedImage, compress_set, decompress_set, size_curve
from .selftest import run_selftest
from .vprd import load_descriptor_set, store_descriptor_set

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_SELFTEST = 0, 2, 3, 4


def technique_tag(technique):
    kind, name = parse_technique(technique)
    return "hog" if kind == "hog" else f"external-{name}"


def descriptor_path(cfg: RunConfig, technique, role, level) -> Path:
    return cfg.out_dir / "descriptors" / technique_tag(technique) / f"{role}_L{level:02d}.vprd"


def load_sets(cfg: RunConfig):
    if not cfg.query_manifest or not cfg.reference_manifest:
        raise ConfigError("query_manifest and reference_manifest are required")
    q = resize_set(load_image_set(cfg.query_manifest, "query"), cfg.resize)
    r = resize_set(load_image_set(cfg.reference_manifest, "reference"), cfg.resize)
    return overlap(q, r)


def _cache_level_dir(cfg, s, level):
    return cfg.cache_dir / s.digest() / f"L{level:02d}"


def write_cache(cfg, s, level, encoded):
    d = _cache_level_dir(cfg, s, level)
    d.mkdir(parents=True, exist_ok=True)
    for e in encoded:
        (d / f"{e.index:05d}.jpg").write_bytes(e.data)


def read_cache(cfg, s, level):
    d = _cache_level_dir(cfg, s, level)
    files = [d / f"{k:05d}.jpg" for k in range(len(s))]
    if not all(f.is_file() for f in files):
        return None
    return [EncodedImage(f.read_bytes(), level, k) for k, f in enumerate(files)]


def _all_levels(cfg):
    return sorted(set(cfg.levels) | set(cfg.grid_q_levels) | set(cfg.grid_map_levels))


def cmd_compress(cfg: RunConfig):
    q, r = load_sets(cfg)
    levels = list(cfg.levels)
    if not levels:
        raise ConfigError("no compression levels requested")
    encoded = {}
    for lv in _all_levels(cfg):
        for s in (q, r):
            enc = compress_set(s, lv)
            write_cache(cfg, s, lv, enc)
            if s is q:
                encoded[lv] = enc
    curve = size_curve(q, levels, encoded)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    with open(cfg.out_dir / "size_curve.csv", "w", newline="") as fh:
        curve.to_csv(fh)
    for lv, mean in zip(curve.levels, curve.mean_kb):
        print(f"level {lv:2d}: mean {mean:.2f} KB over {curve.n} query frames")


def _decoded(cfg, s, level):
    enc = read_cache(cfg, s, level)
    if enc is None:
        if level == 0:
            return s
        raise DependencyError(
            "no encoded cache; run `seqvpr compress` first", [(s.role, level)]
        )
    return decompress_set(enc, s.role, s.resize_target)


def _validated_external(cfg, name, s, level):
    if not cfg.external_dir:
        raise ConfigError(f"external_dir is required for technique external:{name}")
    src = Path(cfg.external_dir) / f"{name}_{s.role}_{level}.vprd"
    if not src.is_file():
        raise DependencyError("missing external descriptor file", [str(src)])
    d = load_descriptor_set(src, s.role)
    if len(d) != len(s):
        raise DependencyError(
            f"{src} holds {len(d)} descriptors but the {s.role} set has {len(s)} frames"
        )
    if d.source_level != level:
        raise DependencyError(f"{src} declares source level {d.source_level}, expected {level}")
    return src


def cmd_describe(cfg: RunConfig):
    q, r = load_sets(cfg)
    for tech in cfg.techniques:
        kind, name = parse_technique(tech)
        for lv in _all_levels(cfg):
            for s in (q, r):
                dest = descriptor_path(cfg, tech, s.role, lv)
                dest.parent.mkdir(parents=True, exist_ok=True)
                if kind == "hog":
                    d = hog_descriptor_set(_decoded(cfg, s, lv), lv)
                    store_descriptor_set(d, dest)
                else:
                    shutil.copyfile(_validated_external(cfg, name, s, lv), dest)
                print(f"wrote {dest}")


def _load_descriptors(cfg, grid_roles):
    found, missing = {}, []
    for tech, role, lv in grid_roles:
        p = descriptor_path(cfg, tech, role, lv)
        if p.is_file():
            d = load_descriptor_set(p, role)
            found[(tech, role, lv)] = DescriptorSet(tech, lv, d.vectors, role)
        else:
            missing.append((tech, role, lv))
    if missing:
        raise DependencyError("missing descriptor files; run `seqvpr describe`", missing)
    return found


def cmd_match(cfg: RunConfig):
    q, r = load_sets(cfg)
    tech = cfg.techniques[0]
    ql = cfg.q_level if cfg.q_level is not None else cfg.levels[0]
    ml = cfg.map_level if cfg.map_level is not None else ql
    ds = _load_descriptors(cfg, [(tech, "query", ql), (tech, "reference", ml)])
    qd, rd = ds[(tech, "query", ql)], ds[(tech, "reference", ml)]
    n = min(len(q), len(qd), len(rd))
    m = matching.similarity_matrix(qd.vectors[:n], rd.vectors[:n])
    gt = GroundTruth(cfg.tolerance)
    results = matching.match_all(m, cfg.k)
    out = cfg.out_dir / "match"
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{technique_tag(tech)}_q{ql:02d}_m{ml:02d}"
    with open(out / f"{stem}_matrix.csv", "w", newline="") as fh:
        matching.write_matrix_csv(m, fh)
    with open(out / f"{stem}_K{cfg.k}.jsonl", "w") as fh:
        matching.write_matches_jsonl(results, gt, fh)
    print(f"accuracy {matching.accuracy(m, cfg.k, gt):.4f} at K={cfg.k} "
          f"({len(results)} query sequences)")


def cmd_sweep(cfg: RunConfig):
    q_levels, map_levels = list(cfg.grid_q_levels), list(cfg.grid_map_levels)
    if not q_levels or not map_levels or not cfg.techniques:
        raise ConfigError("sweep grid is empty")
    q, r = load_sets(cfg)
    needed = []
    for tech in cfg.techniques:
        needed += [(tech, "query", lv) for lv in sorted(set(q_levels))]
        needed += [(tech, "reference", lv) for lv in sorted(set(map_levels))]
    descriptors = _load_descriptors(cfg, needed)

    cache = analysis.SweepCache()
    missing = []
    for lv in sorted(set(q_levels)):
        enc = read_cache(cfg, q, lv)
        if enc is None:
            missing.append(("query", lv))
        else:
            cache.put_encoded(q, lv, enc)
    if missing:
        raise DependencyError("no encoded cache; run `seqvpr compress` first", missing)

    profile = analysis.TimingProfile(cfg.t_e, cfg.t_m, cfg.t_c)
    report = analysis.run_sweep(
        q, r, list(cfg.techniques), q_levels, map_levels, profile,
        GroundTruth(cfg.tolerance), cfg.k_max, descriptors, cache,
        cfg.dataset_name, cfg.repeats, config_hash=cfg.config_hash(),
    )
    out = cfg.out_dir
    (out / "plots").mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    (out / "report.csv").write_text(report.to_csv())
    for name, text in report.plot_tables().items():
        (out / "plots" / f"{name}.csv").write_text(text)
    for p in report.points:
        k = "none" if p.k_star is None else p.k_star
        print(f"{p.technique} q={p.q_level:2d} map={p.map_level:2d} K*={k}")


def cmd_selftest():
    results = run_selftest()
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST


def build_parser():
    p = argparse.ArgumentParser(prog="seqvpr", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("compress", "describe", "match", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("--config")
        sp.add_argument("--query")
        sp.add_argument("--reference")
        sp.add_argument("--levels", type=parse_levels)
        sp.add_argument("--technique")
        sp.add_argument("--k-max", type=int)
        sp.add_argument("--tolerance", type=int)
        sp.add_argument("--out")
        sp.add_argument("--repeats", type=int)
        if name == "match":
            sp.add_argument("--k", type=int)
            sp.add_argument("--q-level", type=int)
            sp.add_argument("--map-level", type=int)
    sub.add_parser("selftest")
    return p


def config_from_args(args) -> RunConfig:
    techniques = None
    if args.technique:
        techniques = tuple(t.strip() for t in args.technique.split(",") if t.strip())
    return load_config(
        args.config,
        query_manifest=args.query,
        reference_manifest=args.reference,
        levels=args.levels,
        techniques=techniques,
        k_max=args.k_max,
        tolerance=args.tolerance,
        out=args.out,
        repeats=args.repeats,
        k=getattr(args, "k", None),
        q_level=getattr(args, "q_level", None),
        map_level=getattr(args, "map_level", None),
    )


COMMANDS = {
    "compress": cmd_compress,
    "describe": cmd_describe,
    "match": cmd_match,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors, including bad level lists
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        if args.command == "selftest":
            return cmd_selftest()
        cfg = config_from_args(args)
        COMMANDS[args.command](cfg)
    except (ConfigError, InfeasibleError, RangeError) as exc:
        print(f"seqvpr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, ComparatorError, DimensionError) as exc:
        print(f"seqvpr: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
