"""Command-line front end: compand, window, compare, params subcommands."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .core import (
    CompandError,
    CompandParams,
    HuSlice,
    ParamError,
    WindowSpec,
    validate_params,
)
from .ingest import RAW_FLOAT_MAGIC, load_dicom_slice, load_raw_float
from .paramfile import dump_params, params_hash, parse_params, parse_roi_file
from .render import WINDOW_PRESETS, Roi, compand, contrast_metrics, save_png, window_render

THREADS_ENV = "CT_COMPAND_THREADS"


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def load_slice(path: Path) -> HuSlice:
    """Sniff the container by magic: raw-float or DICOM."""
    with open(path, "rb") as fh:
        head = fh.read(len(RAW_FLOAT_MAGIC))
    if head == RAW_FLOAT_MAGIC:
        return load_raw_float(path)
    return load_dicom_slice(path)


def _load_params(path: str | None) -> CompandParams:
    if path is None:
        return CompandParams()
    p = parse_params(Path(path).read_text())
    errors = validate_params(p)
    if errors:
        raise ParamError("; ".join(errors))
    return p


def _expand_inputs(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            paths.extend(sorted(child for child in path.iterdir() if child.is_file()))
        else:
            paths.append(path)
    return paths


def _fit_natural_range(s: HuSlice, p: CompandParams) -> CompandParams:
    # natural-image inputs carry arbitrary units; span the clip range over the data
    lo = float(s.values.min())
    hi = float(s.values.max())
    if hi <= lo:
        hi = lo + 1.0
    return p.with_(hu_min_clip=lo, hu_max_clip=hi)


def cmd_compand(args) -> int:
    try:
        base = _load_params(args.params)
    except (OSError, CompandError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.mode:
        base = base.with_(mode=args.mode)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = _expand_inputs(args.inputs)
    if not files:
        print("error: no input files", file=sys.stderr)
        return 1

    def process(path: Path):
        s = load_slice(path)
        p = base
        if p.mode == "natural" and args.params is None:
            p = _fit_natural_range(s, p)
        img = compand(s, p, bit_depth=args.bit_depth)
        png_path = out_dir / f"{path.stem}.macc.png"
        save_png(img, png_path)
        whole = Roi(0, 0, img.width, img.height, "full")
        metrics = contrast_metrics(img, whole)
        report = "\n".join(
            [
                f"input: {path}",
                f"output: {png_path.name}",
                f"mode: {p.mode}",
                f"bit_depth: {args.bit_depth}",
                f"params_hash: {params_hash(p)}",
                f"rms_contrast: {metrics['rms_contrast']:.6f}",
                f"entropy_bits: {metrics['entropy']:.6f}",
                f"dynamic_range: {metrics['dynamic_range']:.0f}",
                "",
            ]
        )
        return png_path.with_suffix(".txt"), report

    failures: list[tuple[Path, str]] = []
    reports: dict[Path, str] = {}
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        futures = {pool.submit(process, path): path for path in files}
        for future, path in futures.items():
            try:
                report_path, text = future.result()
                reports[report_path] = text
            except (OSError, CompandError, ValueError) as exc:
                failures.append((path, str(exc)))
    # report writing is serialized and ordered so batch runs are reproducible
    for report_path in sorted(reports):
        report_path.write_text(reports[report_path])
    for path, message in sorted(failures):
        print(f"error: {path}: {message}", file=sys.stderr)
    return 2 if failures else 0


def cmd_window(args) -> int:
    explicit = args.level is not None or args.width is not None
    if args.preset and explicit:
        print("error: give either --preset or --level/--width, not both", file=sys.stderr)
        return 1
    if args.preset:
        spec = WINDOW_PRESETS[args.preset]
    elif args.level is not None and args.width is not None:
        if args.width <= 0:
            print("error: --width must be positive", file=sys.stderr)
            return 1
        spec = WindowSpec(level=args.level, width=args.width, name="custom")
    else:
        print("error: need --preset or both --level and --width", file=sys.stderr)
        return 1
    try:
        s = load_slice(Path(args.input))
        img = window_render(s, spec, bit_depth=args.bit_depth)
    except (OSError, CompandError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    save_png(img, args.output)
    return 0


def _metric_row(img, roi: Roi):
    try:
        return contrast_metrics(img, roi)
    except CompandError as exc:
        return {"error": str(exc)}


def cmd_compare(args) -> int:
    try:
        base = _load_params(args.params)
        rois = parse_roi_file(Path(args.rois).read_text())
        s = load_slice(Path(args.input))
        macc = compand(s, base, bit_depth=args.bit_depth)
    except (OSError, CompandError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    renders = {"macc": macc}
    for key, spec in WINDOW_PRESETS.items():
        renders[f"window_{key}"] = window_render(s, spec, bit_depth=args.bit_depth)

    table: dict[str, dict[str, dict]] = {}
    header = ["roi", "source", "rms_contrast", "entropy_bits", "dynamic_range"]
    print("\t".join(header))
    for roi in rois:
        table[roi.name] = {}
        for source, img in renders.items():
            row = _metric_row(img, roi)
            table[roi.name][source] = row
            if "error" in row:
                print(f"{roi.name}\t{source}\terror: {row['error']}")
            else:
                print(
                    f"{roi.name}\t{source}\t{row['rms_contrast']:.6f}"
                    f"\t{row['entropy']:.6f}\t{row['dynamic_range']:.0f}"
                )
    if args.out:
        payload = {
            "input": args.input,
            "params_hash": params_hash(base),
            "rois": table,
        }
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_params(args) -> int:
    if args.action == "dump":
        text = dump_params(CompandParams())
        if args.path:
            Path(args.path).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    # validate
    if not args.path:
        print("error: validate needs a file path", file=sys.stderr)
        return 1
    try:
        p = parse_params(Path(args.path).read_text())
    except (OSError, CompandError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    errors = validate_params(p)
    if errors:
        for message in errors:
            print(f"error: {message}", file=sys.stderr)
        return 1
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ct-compand",
        description="Compand HDR CT slices into single LDR display images",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compand", help="run the companding pipeline on files or directories")
    c.add_argument("inputs", nargs="+", help="DICOM or raw-float files, or directories")
    c.add_argument("-p", "--params", help="parameter file (defaults used if omitted)")
    c.add_argument("-o", "--out", default=".", help="output directory")
    c.add_argument("--mode", choices=["ct", "natural"], help="override the pipeline mode")
    c.add_argument("--bit-depth", type=int, choices=[8, 16], default=8)
    c.set_defaults(func=cmd_compand)

    w = sub.add_parser("window", help="render a conventional window setting")
    w.add_argument("input")
    w.add_argument("-o", "--output", required=True, help="output PNG path")
    w.add_argument("--preset", choices=sorted(WINDOW_PRESETS))
    w.add_argument("--level", type=float, help="window center in HU")
    w.add_argument("--width", type=float, help="window width in HU")
    w.add_argument("--bit-depth", type=int, choices=[8, 16], default=8)
    w.set_defaults(func=cmd_window)

    m = sub.add_parser("compare", help="per-ROI metrics of the companded image vs window presets")
    m.add_argument("input")
    m.add_argument("--rois", required=True, help="ROI file: one 'name x y w h' per line")
    m.add_argument("-p", "--params")
    m.add_argument("-o", "--out", help="also write the table as JSON")
    m.add_argument("--bit-depth", type=int, choices=[8, 16], default=8)
    m.set_defaults(func=cmd_compare)

    d = sub.add_parser("params", help="dump or validate parameter files")
    d.add_argument("action", choices=["dump", "validate"])
    d.add_argument("path", nargs="?", help="file to write (dump) or check (validate)")
    d.set_defaults(func=cmd_params)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
