"""Command-line entry point: ``firank {extract,rank,search,eff,synth,report}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import __version__
from .data import Dataset, dataset_to_csv, read_dataset, read_rankings, rankings_to_csv, validate_dataset
from .errors import FIRError, NoInput, ParseError, UnknownMethod
from .evaluation import build_report, exhaustive_search, format_search_result, stratified_folds
from .imageio import IMAGE_SUFFIXES, read_image, read_mask
from .imaging import FEATURE_NAMES, extract_all
from .rankers import METHOD_NAMES, MethodParams, rank
from .synth import synthesize, published_rankings

log = logging.getLogger("firank")


def _config_lines(args: argparse.Namespace) -> list[str]:
    skip = {"func"}
    return [f"config {k}={v}" for k, v in sorted(vars(args).items()) if k not in skip]


def _write(out: str | None, text: str) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _index_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read_labels(path: Path) -> dict[str, int]:
    labels = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#") or (lineno == 1 and row[0].strip() == "stem"):
                continue
            if len(row) != 2:
                raise ParseError(f"{path}: line {lineno}: expected 'stem,label'")
            try:
                labels[row[0].strip()] = int(row[1])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    return labels


def _files_by_stem(folder: Path) -> dict[str, Path]:
    return {p.stem: p for p in sorted(folder.iterdir()) if p.suffix.lower() in IMAGE_SUFFIXES}


# -- commands --------------------------------------------------------------------

def cmd_extract(args) -> int:
    images = _files_by_stem(Path(args.images))
    masks = _files_by_stem(Path(args.masks))
    labels = _read_labels(Path(args.labels))
    skipped = []
    rows, ys, stems = [], [], []
    for stem in sorted(images.keys() | masks.keys()):
        if stem not in images:
            skipped.append(f"{stem}: mask without image")
            continue
        if stem not in masks:
            skipped.append(f"{stem}: image without mask")
            continue
        if stem not in labels:
            skipped.append(f"{stem}: no label in {args.labels}")
            continue
        fv = extract_all(read_image(images[stem]), read_mask(masks[stem]),
                         levels=args.levels, distance=args.distance, angle_deg=args.angle,
                         pixel_spacing=args.spacing)
        rows.append(fv.as_array())
        ys.append(labels[stem])
        stems.append(stem)
    for line in skipped:
        print(f"skipped {line}", file=sys.stderr)
    if not rows:
        raise NoInput("no complete image/mask/label triple found")
    ds = validate_dataset(rows, ys, FEATURE_NAMES)
    comments = [*_config_lines(args), f"samples {','.join(stems)}", *(f"skipped {s}" for s in skipped)]
    _write(args.out, dataset_to_csv(ds, comments))
    return 0


def _params(args) -> MethodParams:
    return MethodParams(relieff_k=args.relieff_k, lap_k=args.lap_k, lap_t=args.lap_t,
                        gini_bins=args.gini_bins, graph_alpha=args.alpha)


def _methods(text: str) -> list[str]:
    if text.strip() == "all":
        return list(METHOD_NAMES)
    names = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in names if m not in METHOD_NAMES]
    if unknown:
        raise UnknownMethod(f"unknown method(s) {', '.join(unknown)}; valid: all, {', '.join(METHOD_NAMES)}")
    return names


def cmd_rank(args) -> int:
    methods = _methods(args.methods)
    ds = read_dataset(args.data)
    params = _params(args)
    rankings = [rank(ds, m, params) for m in methods]
    _write(args.out, rankings_to_csv(rankings, _config_lines(args)))
    return 0


def cmd_search(args) -> int:
    ds = read_dataset(args.data)
    folds = stratified_folds(ds.labels, args.folds, args.seed)
    result = exhaustive_search(ds, args.kmax, folds, args.C, threads=args.threads)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "threads")}
    _write(args.out, format_search_result(result, args.top, config))
    return 0


def _load_rankings(path: str | None):
    return published_rankings() if path in (None, "published") else read_rankings(path)


def cmd_eff(args) -> int:
    report = build_report(_load_rankings(args.rankings), args.optimal)
    lines = ["method,m,n,eff"] + [f"{r.method},{r.eff.m},{r.eff.n_prefix},{r.eff.fraction}"
                                  for r in report.rows]
    _write(args.out, "".join(f"# {c}\n" for c in _config_lines(args)) + "\n".join(lines) + "\n")
    return 0


def cmd_report(args) -> int:
    report = build_report(_load_rankings(args.rankings), args.optimal)
    if args.format == "csv":
        _write(args.out, report.to_csv(_config_lines(args)))
    else:
        _write(args.out, report.to_text())
    return 0


def cmd_synth(args) -> int:
    ds: Dataset = synthesize(args.n, args.d, args.informative, args.noise, args.seed,
                             args.positive_fraction)
    _write(args.out, dataset_to_csv(ds, _config_lines(args)))
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="firank", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("extract", help="15 lesion features from image/mask pairs")
    e.add_argument("--images", required=True)
    e.add_argument("--masks", required=True)
    e.add_argument("--labels", required=True, help="CSV of stem,label")
    e.add_argument("--out", default="-")
    e.add_argument("--levels", type=int, default=32)
    e.add_argument("--distance", type=int, default=1)
    e.add_argument("--angle", type=int, default=0, choices=(0, 45, 90, 135))
    e.add_argument("--spacing", type=float, default=None, help="pixel size, e.g. 0.084 (mm)")
    e.set_defaults(func=cmd_extract)

    r = sub.add_parser("rank", help="rank features with one or more methods")
    r.add_argument("--data", required=True)
    r.add_argument("--methods", default="all")
    r.add_argument("--out", default="-")
    r.add_argument("--relieff-k", type=int, default=10)
    r.add_argument("--lap-k", type=int, default=5)
    r.add_argument("--lap-t", type=float, default=None)
    r.add_argument("--gini-bins", type=int, default=10)
    r.add_argument("--alpha", type=float, default=0.5)
    r.set_defaults(func=cmd_rank)

    s = sub.add_parser("search", help="exhaustive subset search with CV linear-SVM AUC")
    s.add_argument("--data", required=True)
    s.add_argument("--kmax", type=int, default=8)
    s.add_argument("--folds", type=int, default=10)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--top", type=int, default=50)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_search)

    for name, func, helptext in (("eff", cmd_eff, "eff = m/n per ranking"),
                                 ("report", cmd_report, "ranking table with eff column")):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--rankings", default="published",
                       help="ranking CSV, or 'published' for the bundled published rankings")
        q.add_argument("--optimal", type=_index_list, default=[2, 7, 13])
        q.add_argument("--out", default="-")
        if name == "report":
            q.add_argument("--format", choices=("text", "csv"), default="text")
        q.set_defaults(func=func)

    y = sub.add_parser("synth", help="planted synthetic dataset")
    y.add_argument("--n", type=int, default=200)
    y.add_argument("--d", type=int, default=15)
    y.add_argument("--informative", type=_index_list, default=[2, 7, 13])
    y.add_argument("--noise", type=float, default=1.0)
    y.add_argument("--seed", type=int, default=42)
    y.add_argument("--positive-fraction", type=float, default=1 / 3)
    y.add_argument("--out", default="-")
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FIRError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
