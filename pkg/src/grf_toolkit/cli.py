"""Command-line entry point: stats, gen-grf, fuse, merge-masks, eval, pipeline.

Exit codes: 0 success, 1 usage error, 2 input/ingestion error,
3 pairing/validation error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from ._backend import BACKEND
from .errors import DataError, FormatError, PairingError, RowError, SchemaError, ShapeError, ToolkitError
from .grfgen import (
    DEFAULT_HEIGHT,
    DEFAULT_WIDTH,
    category_value,
    field_to_greyscale,
    grf_params_for_record,
    synthesize_field,
)
from .imageio import IMAGE_SUFFIXES, list_images, read_grey_png, read_mask, read_rgb, write_grey_png, write_mask
from .maskfusion import MODES, SDF_MEAN, average_merge
from .metadata import Category, distribution_report, load_postcode_table, minmax_fit, parse_metadata_csv
from .metrics import evaluate_pair, summarize, write_report
from .tensorfuse import export_raw_tensor, merge_rgb_grf, write_fused_png

log = logging.getLogger("grf_toolkit")

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_PAIRING = 0, 1, 2, 3
CONTINUOUS = (Category.DOB, Category.HDD)

DEFAULTS = {
    "metadata_csv": None,
    "image_dir": None,
    "output_dir": "out",
    "postcode_table": None,
    "categories": ["dob", "gender", "hdd"],
    "i": 2,
    "width": DEFAULT_WIDTH,
    "height": DEFAULT_HEIGHT,
    "fusion_mode": SDF_MEAN,
    "bins": 20,
    "jobs": 1,
    "force": False,
    "fused_format": "both",
    "seed_overrides": {},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_seed_overrides(items) -> dict[str, int]:
    out = {}
    for item in items:
        for part in str(item).split(","):
            part = part.strip()
            if not part:
                continue
            cat, sep, value = part.partition("=")
            if not sep:
                raise UsageError(f"seed override {part!r} must look like CAT=U64")
            try:
                cat = Category(cat.strip().lower()).value
                seed = int(value.strip(), 0)
            except ValueError:
                raise UsageError(f"bad seed override {part!r}") from None
            if not 0 <= seed < 1 << 64:
                raise UsageError(f"seed override {part!r} is not an unsigned 64-bit integer")
            out[cat] = seed
    return out


def _parse_categories(value) -> list[str]:
    items = value if isinstance(value, list) else str(value).split(",")
    cats = []
    for item in items:
        item = item.strip().lower()
        if not item:
            continue
        try:
            cats.append(Category(item).value)
        except ValueError:
            raise UsageError(f"unknown category {item!r}") from None
    if not cats:
        raise UsageError("at least one category is required")
    return sorted(set(cats), key=cats.index)


def load_config_file(path) -> dict:
    """Read a flat ``key = value`` file; a leading section header is optional."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError:
        parser.read_string("[grf]\n" + text)
    raw = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            raw[key.replace("-", "_")] = value.strip().strip('"').strip("'")
    return raw


def _coerce(key, value):
    if key in ("i", "width", "height", "bins", "jobs"):
        return int(value)
    if key == "force":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes", "on")
    if key == "categories":
        return _parse_categories(value)
    if key == "seed_overrides":
        return value if isinstance(value, dict) else _parse_seed_overrides([value])
    return value


def effective_config(args) -> dict:
    """Defaults, then config file, then command-line flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, value in load_config_file(args.config).items():
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {key!r}")
            try:
                cfg[key] = _coerce(key, value)
            except ValueError:
                raise UsageError(f"bad value for {key}: {value!r}") from None
    flag_map = {
        "metadata": "metadata_csv",
        "images": "image_dir",
        "output": "output_dir",
        "postcode_table": "postcode_table",
        "categories": "categories",
        "i": "i",
        "width": "width",
        "height": "height",
        "mode": "fusion_mode",
        "bins": "bins",
        "jobs": "jobs",
        "force": "force",
        "format": "fused_format",
    }
    for flag, key in flag_map.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if args.command == "eval" and flag == "format":
            continue
        cfg[key] = _coerce(key, value)
    overrides = getattr(args, "seed_override", None)
    if overrides:
        cfg["seed_overrides"] = {**cfg["seed_overrides"], **_parse_seed_overrides(overrides)}

    if cfg["i"] < 1:
        raise UsageError("--i must be >= 1")
    if cfg["width"] < 2 or cfg["height"] < 2:
        raise UsageError("dimensions must be at least 2x2")
    if cfg["jobs"] < 1:
        raise UsageError("--jobs must be >= 1")
    if cfg["fusion_mode"] not in MODES:
        raise UsageError(f"--mode must be one of {MODES}")
    if cfg["fused_format"] not in ("png", "raw", "both"):
        raise UsageError("--format must be png, raw or both")
    return cfg


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _echo_config(cfg: dict, out: Path, command: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    doc = {k: (str(v) if isinstance(v, Path) else v) for k, v in cfg.items()}
    doc["command"] = command
    doc["version"] = __version__
    _write_json(out / "run_config.json", doc)


def _map(cfg, fn, items):
    if cfg["jobs"] == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cfg["jobs"]) as pool:
        return list(pool.map(fn, items))


def _load_records(cfg):
    path = cfg["metadata_csv"]
    if not path:
        raise UsageError("a metadata CSV is required (--metadata or metadata_csv in the config)")
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"metadata CSV not found: {path}")
    with path.open("rb") as fh:
        records = parse_metadata_csv(fh)
    table = None
    if cfg["postcode_table"]:
        tpath = Path(cfg["postcode_table"])
        if not tpath.is_file():
            raise FileNotFoundError(f"postcode table not found: {tpath}")
        with tpath.open("rb") as fh:
            table = load_postcode_table(fh)
    return records, table


def _fit_norms(records, table, categories):
    norms = {}
    for cat in categories:
        if Category(cat) in CONTINUOUS:
            norms[cat] = minmax_fit([category_value(cat, r, table) for r in records])
    return norms


def cmd_stats(cfg) -> int:
    records, table = _load_records(cfg)
    out = Path(cfg["output_dir"]) / "stats"
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for cat in cfg["categories"]:
        if Category(cat) not in CONTINUOUS:
            continue
        if not records:
            raise DataError("metadata CSV has no data rows")
        values = [category_value(cat, r, table) for r in records]
        report = distribution_report(values, cfg["bins"])
        _write_json(out / f"{cat}.histogram.json", {"category": cat, **report.to_dict()})
        summary[cat] = report.stats.to_dict()
    _write_json(out / "normalization.json", summary)
    print(f"stats: {len(records)} records, {len(summary)} histogram(s) -> {out}")
    return EXIT_OK


def cmd_gen_grf(cfg) -> int:
    records, table = _load_records(cfg)
    out = Path(cfg["output_dir"]) / "grf"
    out.mkdir(parents=True, exist_ok=True)
    cats = cfg["categories"]
    norms = _fit_norms(records, table, cats) if records else {}
    dims = (cfg["width"], cfg["height"])
    jobs = []
    for rec in records:
        for cat in cats:
            params = grf_params_for_record(
                cat, rec, norms.get(cat), cfg["i"], dims, cfg["seed_overrides"].get(cat), table
            )
            jobs.append((rec.image_id, cat, params))

    def work(job):
        image_id, cat, params = job
        png = out / f"{image_id}.{cat}.grf.png"
        sidecar = out / f"{image_id}.{cat}.grf.json"
        if png.exists() and sidecar.exists() and not cfg["force"]:
            return False
        write_grey_png(field_to_greyscale(synthesize_field(params)), png)
        _write_json(sidecar, {"image_id": image_id, "category": cat, **params.to_dict(), "version": __version__})
        return True

    written = sum(_map(cfg, work, jobs))
    print(f"gen-grf: {written} written, {len(jobs) - written} skipped -> {out}")
    return EXIT_OK


def _find_rgb(image_dir: Path, image_id: str):
    for suffix in IMAGE_SUFFIXES:
        for cand in (image_dir / f"{image_id}{suffix}", image_dir / f"{image_id}{suffix.upper()}"):
            if cand.is_file():
                return cand
    return None


def cmd_fuse(cfg) -> int:
    if not cfg["image_dir"]:
        raise UsageError("an RGB image directory is required (--images or image_dir in the config)")
    image_dir = Path(cfg["image_dir"])
    if not image_dir.is_dir():
        raise FileNotFoundError(f"image directory not found: {image_dir}")
    grf_dir = Path(cfg["output_dir"]) / "grf"
    if not grf_dir.is_dir():
        raise FileNotFoundError(f"GRF directory not found: {grf_dir} (run gen-grf first)")
    out = Path(cfg["output_dir"]) / "fused"
    out.mkdir(parents=True, exist_ok=True)

    pairs, unmatched = [], []
    for name in list_images(grf_dir):
        if not name.endswith(".grf.png"):
            continue
        image_id, _, cat = name[: -len(".grf.png")].rpartition(".")
        if cat not in cfg["categories"]:
            continue
        rgb = _find_rgb(image_dir, image_id)
        if rgb is None:
            unmatched.append(image_id)
            continue
        pairs.append((image_id, cat, rgb, grf_dir / name))

    def work(pair):
        image_id, cat, rgb_path, grf_path = pair
        try:
            tensor = merge_rgb_grf(read_rgb(rgb_path), read_grey_png(grf_path))
        except (ShapeError, OSError) as exc:
            return f"{image_id}.{cat}: {exc}"
        if cfg["fused_format"] in ("png", "both"):
            write_fused_png(tensor, out / f"{image_id}.{cat}.fused.png")
        if cfg["fused_format"] in ("raw", "both"):
            export_raw_tensor(tensor, out / f"{image_id}.{cat}.grf4")
        return None

    failures = [e for e in _map(cfg, work, pairs) if e]
    if unmatched:
        print(f"fuse: error: no RGB image in {image_dir} for: {', '.join(sorted(set(unmatched)))}", file=sys.stderr)
    for e in failures:
        print(f"fuse: error: {e}", file=sys.stderr)
    print(f"fuse: {len(pairs) - len(failures)} fused, {len(failures) + len(unmatched)} error(s) -> {out}")
    return EXIT_PAIRING if failures or unmatched else EXIT_OK


def _paired_names(dirs: list[Path]) -> list[str]:
    sets = [set(list_images(d)) for d in dirs]
    union = set().union(*sets)
    problems = []
    for d, names in zip(dirs, sets):
        missing = sorted(union - names)
        if missing:
            problems.append(f"{d}: missing {', '.join(missing)}")
    if problems:
        raise PairingError("filename sets differ: " + "; ".join(problems), union - set.intersection(*sets))
    return sorted(union)


def cmd_merge_masks(cfg, inputs) -> int:
    dirs = [Path(d) for d in inputs]
    for d in dirs:
        if not d.is_dir():
            raise FileNotFoundError(f"mask directory not found: {d}")
    names = _paired_names(dirs)
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    mode = cfg["fusion_mode"]

    def work(name):
        masks = [read_mask(d / name) for d in dirs]
        try:
            write_mask(average_merge(masks, mode), out / name)
        except ShapeError as exc:
            return f"{name}: {exc}"
        return None

    errors = [e for e in _map(cfg, work, names) if e]
    for e in errors:
        print(f"merge-masks: error: {e}", file=sys.stderr)
    print(f"merge-masks: {len(names) - len(errors)} mask(s) from {len(dirs)} input(s), mode={mode} -> {out}")
    return EXIT_PAIRING if errors else EXIT_OK


def cmd_eval(cfg, pred_dir, gt_dir, fmt, out_path) -> int:
    pred_dir, gt_dir = Path(pred_dir), Path(gt_dir)
    for d in (pred_dir, gt_dir):
        if not d.is_dir():
            raise FileNotFoundError(f"mask directory not found: {d}")
    names = _paired_names([pred_dir, gt_dir])
    if not names:
        raise PairingError(f"no masks found in {pred_dir} and {gt_dir}")

    def work(name):
        return evaluate_pair(Path(name).stem, read_mask(pred_dir / name), read_mask(gt_dir / name))

    try:
        report = summarize(_map(cfg, work, names))
    except ShapeError as exc:
        raise PairingError(str(exc)) from None
    out_path = Path(out_path) if out_path else Path(cfg["output_dir"]) / f"eval.{fmt}"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_report(report, fmt, out_path)
    print(json.dumps(report.summary(), sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS, help="flat key=value config file")
    g.add_argument("--output", default=argparse.SUPPRESS, help="output directory")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker threads")
    g.add_argument("--force", action="store_true", default=argparse.SUPPRESS, help="overwrite existing outputs")
    g.add_argument("--seed-override", action="append", default=argparse.SUPPRESS, metavar="CAT=U64")
    g.add_argument("--i", type=int, default=argparse.SUPPRESS, help="integer spectrum component (2 or 5 in practice)")
    g.add_argument("--mode", choices=MODES, default=argparse.SUPPRESS, help="mask fusion mode")

    parser = _Parser(prog="grf-toolkit", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def meta_args(p):
        p.add_argument("--metadata", help="metadata CSV")
        p.add_argument("--postcode-table", help="postcode,decile CSV for HDD lookup")
        p.add_argument("--categories", help="comma-separated subset of dob,gender,hdd")

    p = sub.add_parser("stats", parents=[common], help="histograms and normalisation stats")
    meta_args(p)
    p.add_argument("--bins", type=int)

    for name in ("gen-grf", "pipeline"):
        p = sub.add_parser(name, parents=[common], help="generate GRF images" if name == "gen-grf" else "stats, gen-grf, fuse")
        meta_args(p)
        p.add_argument("--width", type=int)
        p.add_argument("--height", type=int)
        if name == "pipeline":
            p.add_argument("--images", help="directory of RGB images named <image_id>.png/.jpg")
            p.add_argument("--bins", type=int)
            p.add_argument("--format", choices=("png", "raw", "both"))

    p = sub.add_parser("fuse", parents=[common], help="merge RGB images with GRFs into 4-channel tensors")
    p.add_argument("--images", help="directory of RGB images named <image_id>.png/.jpg")
    p.add_argument("--categories")
    p.add_argument("--format", choices=("png", "raw", "both"))

    p = sub.add_parser("merge-masks", parents=[common], help="fuse mask ensembles")
    p.add_argument("inputs", nargs="+", help="mask directories with matching filenames")

    p = sub.add_parser("eval", parents=[common], help="IoU/DSC/FPE/FNE report")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="report path (default <output>/eval.<format>)")
    return parser


def _setup_logging():
    level = os.environ.get("GRF_TOOLKIT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = effective_config(args)
        log.debug("%s with %s kernels", args.command, BACKEND)
        if args.command == "merge-masks":
            _echo_config(cfg, Path(cfg["output_dir"]), args.command)
            return cmd_merge_masks(cfg, args.inputs)
        if args.command == "eval":
            return cmd_eval(cfg, args.pred, args.gt, args.format, args.out)
        _echo_config(cfg, Path(cfg["output_dir"]), args.command)
        if args.command == "stats":
            return cmd_stats(cfg)
        if args.command == "gen-grf":
            return cmd_gen_grf(cfg)
        if args.command == "fuse":
            return cmd_fuse(cfg)
        code = cmd_stats(cfg) or cmd_gen_grf(cfg)
        return code or cmd_fuse(cfg)
    except UsageError as exc:
        print(f"grf-toolkit: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PairingError as exc:
        print(f"grf-toolkit: pairing error: {exc}", file=sys.stderr)
        return EXIT_PAIRING
    except (FileNotFoundError, SchemaError, RowError, DataError, FormatError, ShapeError) as exc:
        print(f"grf-toolkit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ToolkitError, OSError) as exc:
        print(f"grf-toolkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
