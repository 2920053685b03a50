"""Command-line front end: convert, group, eval, sweep, gen.

Exit codes: 0 success, 2 usage or input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import DistanceWeights
from .grouping import (
    SITE_ORDERS,
    GroupingConfig,
    cluster_report,
    dumps_clusters,
    read_clusters,
    resolve_threads,
    run_grouping,
)
from .ingest import DeviceProfile, NetlistDocument, dumps, parse_verilog_subset, read_json
from .ingest.jsonio import atomic_write_text
from .metrics import accuracy, metric_report, nmi, pairwise_counts
from .model import NetlistError
from .synth import SynthError, generate, load_spec, reference_to_json

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class InputError(Exception):
    """User-facing input problem; reported on stderr with exit code 2."""


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _threshold(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"threshold must be non-negative, got {text}")
    return value


def _load_netlist(path, profile_path=None) -> NetlistDocument:
    path = Path(path)
    if path.suffix.lower() == ".v":
        if not profile_path:
            raise InputError("Verilog input needs --device-profile")
        return parse_verilog_subset(path.read_text(encoding="utf-8"), DeviceProfile.load(profile_path))
    return read_json(path)


def _load_reference(path, level: str) -> dict[str, int]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        table = data[f"{level}_label"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: not a reference-labels file with '{level}_label' ({exc})") from None
    return {str(k): int(v) for k, v in table.items()}


def _config(args) -> GroupingConfig:
    return GroupingConfig(
        spatial_threshold=args.spatial_threshold,
        edit_threshold=args.edit_threshold,
        weights=DistanceWeights(args.w),
        site_order=args.site_order,
    )


def _manifest(command: str, inputs: list, cfg: dict, stages: dict, outputs: list) -> str:
    return json.dumps({
        "tool": "fpga-regroup",
        "version": __version__,
        "command": command,
        "inputs": [{"path": str(p), "sha256": sha256(p)} for p in inputs],
        "config": cfg,
        "stage_ms": {k: round(v * 1000, 3) for k, v in stages.items()},
        "outputs": [{"path": str(p), "sha256": sha256(p)} for p in outputs],
    }, indent=2) + "\n"


def cmd_convert(args) -> int:
    src = Path(args.input)
    if args.from_ == "verilog":
        if not args.device_profile:
            raise InputError("--device-profile is required for Verilog input")
        doc = parse_verilog_subset(src.read_text(encoding="utf-8"), DeviceProfile.load(args.device_profile))
        for w in doc.warnings:
            print(f"warning: {w}", file=sys.stderr)
    else:
        doc = read_json(src)
    atomic_write_text(args.output, dumps(doc))
    return EXIT_OK


def cmd_group(args) -> int:
    cfg = _config(args)
    threads = resolve_threads()
    stages = {}
    t0 = time.perf_counter()
    doc = _load_netlist(args.netlist, args.device_profile)
    stages["ingest"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    result = run_grouping(doc, cfg, threads)
    stages["group"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    atomic_write_text(args.out, dumps_clusters(cluster_report(doc, result, cfg)))
    stages["write"] = time.perf_counter() - t0
    manifest = Path(args.manifest) if args.manifest else Path(str(args.out) + ".manifest.json")
    atomic_write_text(manifest, _manifest("group", [args.netlist], cfg.to_dict(), stages, [args.out]))
    print(f"{len(result.sites)} site groups -> {len(result.higher)} higher groups, "
          f"{len(result.words)} word groups", file=sys.stderr)
    return EXIT_OK


def _aligned(pred: dict[str, int], ref: dict[str, int]) -> tuple[list[int], list[int]]:
    missing = [name for name in ref if name not in pred]
    if missing:
        raise InputError("clusters do not cover reference cells: " + ", ".join(missing))
    names = list(ref)
    return [pred[n] for n in names], [ref[n] for n in names]


def cmd_eval(args) -> int:
    ref = _load_reference(args.reference, args.level)
    try:
        pred = read_clusters(args.clusters)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"{args.clusters}: not a cluster output file ({exc})") from None
    if not ref:
        raise InputError("reference labels are empty")
    p, r = _aligned(pred, ref)
    print(json.dumps(metric_report(p, r, args.pair_convention), indent=2))
    return EXIT_OK


def parse_grid(text: str) -> list[tuple[float, float]]:
    out = []
    for item in (text or "").split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 2:
            raise InputError(f"malformed grid entry {item!r}; expected spatial:edit")
        try:
            s, e = float(parts[0]), float(parts[1])
        except ValueError:
            raise InputError(f"malformed grid entry {item!r}; expected numbers") from None
        if s < 0 or e < 0:
            raise InputError(f"grid entry {item!r} has a negative threshold")
        out.append((s, e))
    if not out:
        raise InputError("empty threshold grid")
    return out


SWEEP_COLUMNS = ["spatial_threshold", "edit_threshold", "nmi", "accuracy", "group_count", "runtime_ms"]


def sweep_rows(doc: NetlistDocument, ref: dict[str, int], grid, weights=DistanceWeights(),
               site_order: str = "lexicographic_site_name", threads=None) -> list[dict]:
    names = [c.name for c in doc.cells]
    rows = []
    for s, e in grid:
        cfg = GroupingConfig(s, e, weights=weights, site_order=site_order)
        t0 = time.perf_counter()
        result = run_grouping(doc, cfg, threads, with_words=False)
        ms = (time.perf_counter() - t0) * 1000
        p, r = _aligned(dict(zip(names, result.labels.tolist())), ref)
        rows.append({
            "spatial_threshold": s, "edit_threshold": e,
            "nmi": nmi(p, r), "accuracy": accuracy(pairwise_counts(p, r)) if len(p) > 1 else 1.0,
            "group_count": len(result.higher), "runtime_ms": round(ms, 3),
        })
    return rows


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    doc = _load_netlist(args.netlist, args.device_profile)
    ref = _load_reference(args.reference, args.level)
    rows = sweep_rows(doc, ref, grid, DistanceWeights(args.w), args.site_order, resolve_threads())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        atomic_write_text(args.out, buf.getvalue())
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = load_spec(args.spec)
    doc, ref = generate(spec)
    atomic_write_text(args.out, dumps(doc))
    atomic_write_text(args.reference, json.dumps(reference_to_json(doc, ref), indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpga-regroup", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="Verilog subset or JSON -> interchange JSON")
    p.add_argument("--from", dest="from_", choices=["verilog", "json"], required=True)
    p.add_argument("--to", choices=["json"], default="json")
    p.add_argument("--device-profile")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_convert)

    def grouping_flags(p):
        p.add_argument("--spatial-threshold", type=_threshold, default=100.0)
        p.add_argument("--edit-threshold", type=_threshold, default=3.0)
        p.add_argument("--w", type=int, default=5, help="base distance weight (site 1, tile w, region w^2)")
        p.add_argument("--site-order", choices=SITE_ORDERS, default="lexicographic_site_name")

    p = sub.add_parser("group", help="site-level and higher-level grouping")
    p.add_argument("--netlist", required=True)
    p.add_argument("--device-profile", help="needed only for .v netlists")
    grouping_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("eval", help="score a cluster file against reference labels")
    p.add_argument("--clusters", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--level", choices=["word", "module"], default="module")
    p.add_argument("--pair-convention", choices=["unordered", "doubled"], default="unordered")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="NMI / accuracy over a grid of threshold pairs (CSV)")
    p.add_argument("--netlist", required=True)
    p.add_argument("--device-profile")
    p.add_argument("--reference", required=True)
    p.add_argument("--level", choices=["word", "module"], default="module")
    p.add_argument("--grid", default="30:10,50:5,80:5,100:3,120:8")
    p.add_argument("--w", type=int, default=5)
    p.add_argument("--site-order", choices=SITE_ORDERS, default="lexicographic_site_name")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="generate a synthetic placed netlist with planted labels")
    p.add_argument("--spec", required=True, help="fixture spec JSON (SynthSpec fields)")
    p.add_argument("--out", required=True)
    p.add_argument("--reference", required=True)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors (2) and --help / --version (0)
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, NetlistError, SynthError, FileNotFoundError, IsADirectoryError,
            PermissionError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
