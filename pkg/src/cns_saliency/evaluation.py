"""Precision/recall/F-measure evaluation and the parameter sweep.

Binarization is strict everywhere: a pixel is foreground when its saliency
value exceeds the threshold.
"""
from __future__ import annotations

import csv
import io
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from cns_saliency.combine import PARAM_NAMES, ParamSet, detect

log = logging.getLogger(__name__)

BETA2 = 0.3
N_LEVELS = 256
GT_THRESHOLD = 127


class EvalError(ValueError):
    pass


def binarize_gt(gt: np.ndarray) -> np.ndarray:
    """Ground-truth masks ship as 8-bit images; foreground is ``> 127``."""
    gt = np.asarray(gt)
    if gt.dtype == bool:
        return gt
    return gt > GT_THRESHOLD


def _check_pair(s: np.ndarray, g: np.ndarray) -> None:
    if s.shape != g.shape:
        raise EvalError(f"saliency map {s.shape} and ground truth {g.shape} differ in shape")
    if not g.any():
        raise EvalError("ground truth is empty")


def pr_at_threshold(s: np.ndarray, gt: np.ndarray, t: float) -> tuple[float, float]:
    s = np.asarray(s)
    g = np.asarray(gt, dtype=bool)
    _check_pair(s, g)
    m = s > t
    hits = np.count_nonzero(m & g)
    selected = np.count_nonzero(m)
    precision = hits / selected if selected else 1.0
    return precision, hits / np.count_nonzero(g)


def f_beta(precision, recall, beta2: float = BETA2):
    """Weighted harmonic mean of precision and recall; 0 where both are 0."""
    p = np.asarray(precision, dtype=np.float64)
    r = np.asarray(recall, dtype=np.float64)
    denom = beta2 * p + r
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(denom > 0, (1 + beta2) * p * r / np.where(denom > 0, denom, 1.0), 0.0)
    return float(f) if f.ndim == 0 else f


def pr_curve(s: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Precision and recall of one map at every threshold 0..255."""
    s = np.asarray(s)
    g = np.asarray(gt, dtype=bool)
    _check_pair(s, g)
    # s > t  <=>  ceil(s) > t  for integer t
    levels = np.clip(np.ceil(s), 0, N_LEVELS).astype(np.int64)
    all_hist = np.bincount(levels.ravel(), minlength=N_LEVELS + 1)
    fg_hist = np.bincount(levels[g], minlength=N_LEVELS + 1)
    # pixels strictly above t: suffix sums starting at level t + 1
    above = np.cumsum(all_hist[::-1])[::-1][1:]
    hits = np.cumsum(fg_hist[::-1])[::-1][1:]
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(above > 0, hits / np.maximum(above, 1), 1.0)
    recall = hits / g.sum()
    return precision, recall


@dataclass
class EvalCurves:
    precision: np.ndarray
    recall: np.ndarray
    fmeasure: np.ndarray

    @property
    def avg_f(self) -> float:
        return float(self.fmeasure.mean())

    @property
    def max_f(self) -> float:
        return float(self.fmeasure.max())

    @property
    def max_f_threshold(self) -> int:
        return int(np.argmax(self.fmeasure))


@dataclass
class AdaptiveScores:
    precision: float
    recall: float
    adapt_f: float


@dataclass
class ScoreSummary:
    avg_f: float
    max_f: float
    max_f_threshold: int
    adapt_f: float
    adaptive_precision: float
    adaptive_recall: float
    n_images: int = 0

    def as_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.items())

    def items(self):
        return [
            ("AvgF", f"{self.avg_f:.6f}"),
            ("MaxF", f"{self.max_f:.6f}"),
            ("MaxF_threshold", str(self.max_f_threshold)),
            ("AdaptF", f"{self.adapt_f:.6f}"),
            ("adaptive_precision", f"{self.adaptive_precision:.6f}"),
            ("adaptive_recall", f"{self.adaptive_recall:.6f}"),
            ("images", str(self.n_images)),
        ]


def _aligned(maps: Sequence, gts: Sequence) -> None:
    if len(maps) != len(gts):
        raise EvalError(f"{len(maps)} maps but {len(gts)} ground truths")
    if not maps:
        raise EvalError("empty dataset")


def fixed_threshold_eval(maps: Sequence[np.ndarray], gts: Sequence[np.ndarray]) -> EvalCurves:
    """Dataset-mean precision and recall per threshold; F from the means."""
    _aligned(maps, gts)
    p_sum = np.zeros(N_LEVELS)
    r_sum = np.zeros(N_LEVELS)
    for s, g in zip(maps, gts):
        p, r = pr_curve(s, g)
        p_sum += p
        r_sum += r
    p_mean = p_sum / len(maps)
    r_mean = r_sum / len(maps)
    return EvalCurves(p_mean, r_mean, f_beta(p_mean, r_mean))


def adaptive_threshold(s: np.ndarray) -> float:
    """Twice the mean saliency value."""
    return 2.0 * float(np.mean(s))


def adaptive_eval(maps: Sequence[np.ndarray], gts: Sequence[np.ndarray]) -> AdaptiveScores:
    _aligned(maps, gts)
    ps, rs = [], []
    for s, g in zip(maps, gts):
        p, r = pr_at_threshold(s, g, adaptive_threshold(s))
        ps.append(p)
        rs.append(r)
    p_mean = float(np.mean(ps))
    r_mean = float(np.mean(rs))
    return AdaptiveScores(p_mean, r_mean, f_beta(p_mean, r_mean))


def evaluate(maps: Sequence[np.ndarray], gts: Sequence[np.ndarray]) -> tuple[EvalCurves, ScoreSummary]:
    gts = [binarize_gt(g) for g in gts]
    curves = fixed_threshold_eval(maps, gts)
    adaptive = adaptive_eval(maps, gts)
    summary = ScoreSummary(
        avg_f=curves.avg_f,
        max_f=curves.max_f,
        max_f_threshold=curves.max_f_threshold,
        adapt_f=adaptive.adapt_f,
        adaptive_precision=adaptive.precision,
        adaptive_recall=adaptive.recall,
        n_images=len(maps),
    )
    return curves, summary


def write_curves_csv(path: str | os.PathLike, curves: EvalCurves) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["threshold", "precision", "recall", "f_beta"])
        for t in range(N_LEVELS):
            w.writerow([t, f"{curves.precision[t]:.6f}", f"{curves.recall[t]:.6f}", f"{curves.fmeasure[t]:.6f}"])


def write_summary(path: str | os.PathLike, summary: ScoreSummary) -> None:
    Path(path).write_text(summary.as_text())


# --------------------------------------------------------------------------
# parameter sweep

# value ranges explored per parameter by default
DEFAULT_GRID = {
    "delta": list(range(4, 41, 4)),
    "omega_c": list(range(1, 21)),
    "omega_r": list(range(1, 21)),
    "theta_r": [round(0.001 * k, 3) for k in range(1, 10)] + [round(0.01 * k, 2) for k in range(1, 11)],
    "theta_g": [round(1.0 + 0.1 * k, 1) for k in range(21)],
}


def parse_range(text: str) -> list[float]:
    """Parse ``start:step:stop`` (inclusive), a comma list, or a single value."""
    text = text.strip()
    if not text:
        raise ValueError("empty range")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range {text!r} must be start:step:stop")
        start, step, stop = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"range {text!r} is empty or has a non-positive step")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 10) for k in range(n)]
    return [float(x) for x in text.split(",") if x.strip()]


def parse_grid(entries: Iterable[str]) -> dict[str, list]:
    """Parse entries like ``omega_r=1:1:20`` or ``theta_g=1.5,2`` into a grid."""
    grid: dict[str, list] = {}
    for text in entries:
        for item in text.split(";"):
            if not item.strip():
                continue
            name, sep, values = item.partition("=")
            name = name.strip().replace("-", "_")
            if not sep or name not in PARAM_NAMES:
                raise ValueError(f"bad grid entry {item!r}; expected <param>=<range> with param in {PARAM_NAMES}")
            grid[name] = parse_range(values)
    if not grid:
        raise ValueError("empty grid")
    return grid


@dataclass
class SweepResult:
    base: ParamSet
    rows: list[tuple[str, float, float]] = field(default_factory=list)
    scores: dict[ParamSet, float] = field(default_factory=dict)
    best: ParamSet | None = None
    best_max_f: float = float("nan")

    def curve(self, name: str) -> list[tuple[float, float]]:
        return [(v, f) for p, v, f in self.rows if p == name]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["parameter", "value", "MaxF"])
        for p, v, f in self.rows:
            w.writerow([p, _fmt_value(v), f"{f:.6f}"])
        return buf.getvalue()


def _fmt_value(v) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:g}"


def _best_per_parameter(curves: dict[str, list[tuple[float, float]]], base: ParamSet) -> ParamSet:
    changes = {}
    for name, curve in curves.items():
        best_value, _ = max(curve, key=lambda vf: vf[1])  # first maximum wins
        changes[name] = best_value
    return base.replace(**changes)


def parameter_sweep(
    images: Sequence[np.ndarray],
    gts: Sequence[np.ndarray],
    grid: dict[str, list] | None = None,
    base: ParamSet | None = None,
    table: np.ndarray | None = None,
    *,
    detector: Callable[..., np.ndarray] = detect,
    channel_scaling: str = "minmax",
    progress: Callable[[str, float, float], None] | None = None,
) -> SweepResult:
    """One-parameter-at-a-time sweep around ``base``, scored by MaxF.

    Every value of every gridded parameter is evaluated with the other four
    held at ``base``. The per-parameter argmax values are then combined into
    one ParamSet, which is scored as well; ``best`` is the top-scoring
    ParamSet among everything evaluated.
    """
    if not images:
        raise EvalError("empty dataset")
    grid = DEFAULT_GRID if grid is None else grid
    if not grid or not any(grid.values()):
        raise EvalError("empty grid")
    base = base or ParamSet()
    gts = [binarize_gt(g) for g in gts]
    result = SweepResult(base=base)

    def score(params: ParamSet) -> float:
        if params not in result.scores:
            maps = [detector(img, params, table, channel_scaling=channel_scaling) for img in images]
            result.scores[params] = fixed_threshold_eval(maps, gts).max_f
        return result.scores[params]

    for name, values in grid.items():
        if name not in PARAM_NAMES:
            raise EvalError(f"unknown parameter {name!r}")
        for v in values:
            f = score(base.replace(**{name: v}))
            result.rows.append((name, v, f))
            if progress:
                progress(name, v, f)

    combined = _best_per_parameter({n: result.curve(n) for n in grid}, base)
    score(combined)
    result.best, result.best_max_f = max(result.scores.items(), key=lambda kv: kv[1])
    return result


def select_common(sweeps: Sequence[SweepResult], base: ParamSet | None = None) -> ParamSet:
    """Average MaxF across datasets at each parameter value and take the argmax.

    All sweeps must share the same grid.
    """
    if not sweeps:
        raise EvalError("no sweeps to combine")
    names = list(dict.fromkeys(p for p, _, _ in sweeps[0].rows))
    averaged = {}
    for name in names:
        per_sweep = [s.curve(name) for s in sweeps]
        values = [v for v, _ in per_sweep[0]]
        if any([v for v, _ in c] != values for c in per_sweep):
            raise EvalError(f"sweeps disagree on the grid for {name}")
        mean = np.mean([[f for _, f in c] for c in per_sweep], axis=0)
        averaged[name] = list(zip(values, mean))
    return _best_per_parameter(averaged, base or sweeps[0].base)
