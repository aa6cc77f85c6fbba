"""Command-line interface: ``cns detect | batch | eval | sweep | make-table``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from cns_saliency import colorname, evaluation
from cns_saliency.combine import PARAM_NAMES, PRESETS, ParamSet, detect
from cns_saliency.raster import ContractError, DecodeError, read_gray, read_image, write_gray_png

log = logging.getLogger("cns")

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp"}
TABLE_ENV = "CNS_TABLE"

# flag name -> ParamSet field
_PARAM_FLAGS = {
    "delta": "delta",
    "omega-c": "omega_c",
    "omega-r": "omega_r",
    "theta-r": "theta_r",
    "theta-g": "theta_g",
}


class UsageError(Exception):
    pass


def read_config(path: str | os.PathLike) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    conf = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        conf[key.strip().replace("-", "_")] = value.strip()
    return conf


def resolve_params(args: argparse.Namespace) -> ParamSet:
    """Preset, then config file, then explicit flags, later sources winning."""
    conf = read_config(args.config) if args.config else {}
    preset = args.preset or conf.pop("preset", None) or "common"
    conf.pop("preset", None)
    if preset not in PRESETS:
        raise UsageError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    values = PRESETS[preset].as_dict()
    for key, raw in conf.items():
        if key not in PARAM_NAMES:
            raise UsageError(f"{args.config}: unknown key {key!r}")
        try:
            values[key] = float(raw)
        except ValueError:
            raise UsageError(f"{args.config}: {key} = {raw!r} is not a number") from None
    for field in _PARAM_FLAGS.values():
        flag_value = getattr(args, field, None)
        if flag_value is not None:
            values[field] = flag_value
    try:
        return ParamSet(**values)
    except (ContractError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def resolve_table(args: argparse.Namespace) -> np.ndarray:
    path = args.table or os.environ.get(TABLE_ENV)
    if not path:
        log.info("no color-name table given; using the built-in fallback table")
        return colorname.fallback_table()
    if not Path(path).is_file():
        log.warning("color-name table %s not found; using the built-in fallback table", path)
        return colorname.fallback_table()
    return colorname.load_table(path)


def list_images(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file())


def match_stems(left: list[Path], right: list[Path]) -> tuple[list[tuple[Path, Path]], list[str]]:
    """Pair files by stem; returns pairs and a list of problems."""
    problems = []
    by_stem: dict[str, list[Path]] = {}
    for p in right:
        by_stem.setdefault(p.stem, []).append(p)
    pairs = []
    seen = set()
    for p in left:
        if p.stem in seen:
            problems.append(f"duplicate stem {p.stem}")
            continue
        seen.add(p.stem)
        matches = by_stem.get(p.stem, [])
        if len(matches) != 1:
            problems.append(f"{p.name}: {len(matches)} ground-truth matches")
            continue
        pairs.append((p, matches[0]))
    for stem in sorted(set(by_stem) - seen):
        problems.append(f"{stem}: ground truth without a map/image")
    return pairs, problems


def _format_params(params: ParamSet) -> str:
    return " ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in params.as_dict().items())


def _threads(args) -> int:
    return args.threads or os.cpu_count() or 1


def cmd_detect(args) -> int:
    params = resolve_params(args)
    table = resolve_table(args)
    img = read_image(args.input)
    out = detect(img, params, table, threads=_threads(args), channel_scaling=args.channel_scaling)
    write_gray_png(args.output, out)
    print(_format_params(params))
    return 0


def cmd_batch(args) -> int:
    params = resolve_params(args)
    table = resolve_table(args)
    src = Path(args.image_dir)
    dst = Path(args.output_dir)
    if not src.is_dir():
        raise UsageError(f"cannot read directory {src}")
    images = list_images(src)
    dst.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()

    def one(path: Path) -> bool:
        try:
            out = detect(read_image(path), params, table, threads=1, channel_scaling=args.channel_scaling)
            write_gray_png(dst / f"{path.stem}.png", out)
            return True
        except (DecodeError, OSError, ContractError) as exc:
            log.error("skipping %s: %s", path.name, exc)
            return False

    with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
        ok = list(pool.map(one, images))
    print(_format_params(params))
    print(f"{sum(ok)} processed, {len(ok) - sum(ok)} failed in {time.perf_counter() - start:.1f} s")
    return 0


def _load_pairs(left_dir: Path, gt_dir: Path) -> list[tuple[Path, Path]]:
    for d in (left_dir, gt_dir):
        if not d.is_dir():
            raise UsageError(f"cannot read directory {d}")
    pairs, problems = match_stems(list_images(left_dir), list_images(gt_dir))
    if problems:
        raise UsageError("unmatched stems:\n  " + "\n  ".join(problems))
    if not pairs:
        raise UsageError(f"no images found in {left_dir}")
    return pairs


def cmd_eval(args) -> int:
    pairs = _load_pairs(Path(args.maps_dir), Path(args.gt_dir))
    maps = [read_gray(m) for m, _ in pairs]
    gts = [read_gray(g) for _, g in pairs]
    curves, summary = evaluation.evaluate(maps, gts)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    evaluation.write_curves_csv(out / "curves.csv", curves)
    evaluation.write_summary(out / "summary.txt", summary)
    sys.stdout.write(summary.as_text())
    return 0


def cmd_sweep(args) -> int:
    base = resolve_params(args)
    table = resolve_table(args)
    try:
        grid = evaluation.parse_grid(args.grid) if args.grid else evaluation.DEFAULT_GRID
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    pairs = _load_pairs(Path(args.image_dir), Path(args.gt_dir))
    images = [read_image(i) for i, _ in pairs]
    gts = [read_gray(g) for _, g in pairs]

    def progress(name, value, f):
        log.info("%s=%g MaxF=%.4f", name, value, f)

    try:
        result = evaluation.parameter_sweep(
            images, gts, grid, base, table, channel_scaling=args.channel_scaling, progress=progress
        )
    except ContractError as exc:
        raise UsageError(str(exc)) from exc
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(result.to_csv())
    print(f"best MaxF = {result.best_max_f:.6f}")
    print(_format_params(result.best))
    return 0


def cmd_make_table(args) -> int:
    colorname.save_table(args.output, colorname.fallback_table())
    print(f"wrote {colorname.N_BINS} rows to {args.output}")
    return 0


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("parameters")
    g.add_argument("--preset", choices=sorted(PRESETS), help="base parameter preset (default: common)")
    g.add_argument("--config", help="file of 'key = value' lines; flags override it")
    g.add_argument("--delta", type=int, help="threshold sample step")
    g.add_argument("--omega-c", dest="omega_c", type=int, help="closing disk radius")
    g.add_argument("--omega-r", dest="omega_r", type=int, help="reconstruction disk radius")
    g.add_argument("--theta-r", dest="theta_r", type=float, help="saturation ratio")
    g.add_argument("--theta-g", dest="theta_g", type=float, help="gamma")
    g.add_argument("--channel-scaling", choices=("minmax", "fixed"), default="minmax",
                   help="how color-name channels are brought to [0, 255]")
    _add_common(p)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", help=f"color-name lookup table file (default: ${TABLE_ENV} or built-in fallback)")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: all cores)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cns", description="Color-name-space salient object detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="saliency map for one image")
    p.add_argument("input")
    p.add_argument("output")
    _add_param_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("batch", help="saliency maps for every image in a directory")
    p.add_argument("image_dir")
    p.add_argument("output_dir")
    _add_param_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("eval", help="score saliency maps against ground truth")
    p.add_argument("maps_dir")
    p.add_argument("gt_dir")
    p.add_argument("--out-dir", default=".", help="where curves.csv and summary.txt go")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="one-at-a-time parameter sweep scored by MaxF")
    p.add_argument("image_dir")
    p.add_argument("gt_dir")
    p.add_argument("--grid", action="append",
                   help="e.g. 'omega_r=1:1:20' or 'theta_g=1.5,2'; repeatable (default: full ranges)")
    p.add_argument("--out", default="sweep.csv")
    _add_param_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("make-table", help="write the built-in fallback lookup table to a file")
    p.add_argument("output")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_make_table)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, DecodeError, colorname.TableError, evaluation.EvalError, OSError) as exc:
        print(f"cns: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
