"""Batch experiments: generation, procedure runs, efficiency ratios, CSV and SVG output.

Config files are flat ``key = value`` text, optionally under an ``[experiment]``
section header::

    [experiment]
    cultures = ic-sp, up-sp
    procedures = ttc, crawler, c2-u, c2-pw
    sizes = 2:30:2          # start:stop:step (inclusive) or a list "4, 8, 16"
    reps = 200
    seed = 2024
    endowment = identity    # or random

Every (culture, n, rep) cell draws its instance from a 64-bit seed derived
with ``numpy.random.SeedSequence([seed, culture_index, n, rep])``; the
generator is numpy's PCG64.  Cells are therefore independent of run order.
"""

from __future__ import annotations

import configparser
import csv
import logging
import re
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .market import ark, is_individually_rational, is_stable, mrk
from .optimize import max_ark_value, max_mrk_value
from .procedures import DYNAMICS, PROCEDURES, solve
from .single_peaked import CULTURES, generate_instance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentConfig:
    cultures: tuple[str, ...] = CULTURES
    procedures: tuple[str, ...] = PROCEDURES
    sizes: tuple[int, ...] = tuple(range(2, 31, 2))
    reps: int = 200
    master_seed: int = 0
    output: Optional[str] = None
    endowment: str = "identity"

    def __post_init__(self):
        for c in self.cultures:
            if c not in CULTURES:
                raise ValueError(f"unknown culture {c!r}")
        for p in self.procedures:
            if p not in PROCEDURES:
                raise ValueError(f"unknown procedure {p!r}")
        if not self.sizes or min(self.sizes) < 2:
            raise ValueError("sizes must be non-empty and all >= 2")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.endowment not in ("identity", "random"):
            raise ValueError(f"unknown endowment mode {self.endowment!r}")


def _split(value: str) -> list[str]:
    return [tok for tok in value.replace(",", " ").split() if tok]


def parse_sizes(value: str) -> tuple[int, ...]:
    value = value.strip()
    if ":" in value:
        parts = [int(p) for p in value.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return tuple(range(start, stop + 1, step))
    return tuple(int(tok) for tok in _split(value))


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text(encoding="utf-8")
    if not re.search(r"^\s*\[", text, re.MULTILINE):
        text = "[experiment]\n" + text  # a bare key/value file is allowed
    parser.read_string(text, source=str(path))
    if "experiment" not in parser:
        raise ValueError(f"{path}: missing [experiment] section")
    sec = parser["experiment"]
    kwargs = {}
    if "cultures" in sec:
        kwargs["cultures"] = tuple(_split(sec["cultures"]))
    if "procedures" in sec:
        kwargs["procedures"] = tuple(_split(sec["procedures"]))
    if "sizes" in sec:
        kwargs["sizes"] = parse_sizes(sec["sizes"])
    if "reps" in sec:
        kwargs["reps"] = sec.getint("reps")
    if "seed" in sec:
        kwargs["master_seed"] = sec.getint("seed")
    if "output" in sec:
        kwargs["output"] = sec["output"]
    if "endowment" in sec:
        kwargs["endowment"] = sec["endowment"].strip()
    unknown = set(sec) - {"cultures", "procedures", "sizes", "reps", "seed", "output", "endowment"}
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    return ExperimentConfig(**kwargs)


def derive_seed(*entropy: int) -> int:
    return int(np.random.SeedSequence([int(e) for e in entropy]).generate_state(1, np.uint64)[0])


def _sig6(x: float) -> float:
    return float(f"{x:.6g}")


@dataclass(frozen=True)
class ResultRow:
    """One procedure run on one instance.  Floats are held at 6 significant digits,
    exactly as written to CSV."""

    culture: str
    procedure: str
    n: int
    rep: int
    seed: int
    ark: int
    mrk: int
    ark_opt_noir: int
    mrk_opt_noir: int
    ratio_ark: float
    ratio_mrk: float
    num_deals: int
    max_deal_size: int
    mean_deal_size: float

    def __post_init__(self):
        for f in fields(self):
            if f.type == "float":
                object.__setattr__(self, f.name, _sig6(float(getattr(self, f.name))))


HEADER = tuple(f.name for f in fields(ResultRow))


def run_cell(culture: str, n: int, rep: int, config: ExperimentConfig) -> list[ResultRow]:
    """Generate the cell's instance and run every configured procedure on it."""
    seed = derive_seed(config.master_seed, CULTURES.index(culture), n, rep)
    instance = generate_instance(n, culture, np.random.default_rng(seed), config.endowment)
    ark_opt = max_ark_value(instance)
    mrk_opt = max_mrk_value(instance)
    rows = []
    for procedure in config.procedures:
        proc_seed = derive_seed(seed, PROCEDURES.index(procedure))
        alloc, trace = solve(instance, procedure, proc_seed)
        if procedure in DYNAMICS:
            k_max = int(procedure[1])
            if not is_stable(instance, alloc, k_max):
                raise AssertionError(f"{procedure} stopped at an unstable allocation (seed {seed})")
        if not is_individually_rational(instance, alloc):
            raise AssertionError(f"{procedure} returned a non-IR allocation (seed {seed})")
        a, m = ark(instance, alloc), mrk(instance, alloc)
        rows.append(ResultRow(culture, procedure, n, rep, seed, a, m, ark_opt, mrk_opt,
                              a / ark_opt, m / mrk_opt, trace.num_deals, trace.max_size, trace.mean_size))
    return rows


def run_experiment(config: ExperimentConfig) -> Iterator[ResultRow]:
    """Rows in canonical order: culture, size, rep, then procedure as configured."""
    for culture in config.cultures:
        for n in config.sizes:
            log.info("culture=%s n=%d", culture, n)
            for rep in range(config.reps):
                yield from run_cell(culture, n, rep, config)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def emit_csv(rows: Iterable[ResultRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for row in rows:
            writer.writerow([_fmt(v) for v in astuple(row)])


def read_csv(path) -> list[ResultRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        out = []
        for rec in reader:
            vals = {}
            for f, text in zip(fields(ResultRow), rec):
                vals[f.name] = {"int": int, "float": float}.get(f.type, str)(text)
            out.append(ResultRow(**vals))
        return out


METRICS = ("ratio_ark", "ratio_mrk", "num_deals", "max_deal_size", "mean_deal_size", "ark", "mrk")


@dataclass
class GroupSummary:
    count: int = 0
    mean: dict = field(default_factory=dict)
    lo: dict = field(default_factory=dict)
    hi: dict = field(default_factory=dict)


def summarize(rows: Iterable[ResultRow]) -> dict[tuple[str, str, int], GroupSummary]:
    """Per (culture, procedure, n): means, minima and maxima of every metric.

    Sums are accumulated in row order.
    """
    acc: dict[tuple[str, str, int], list[ResultRow]] = {}
    for row in rows:
        acc.setdefault((row.culture, row.procedure, row.n), []).append(row)
    out = {}
    for key, group in acc.items():
        s = GroupSummary(count=len(group))
        for metric in METRICS:
            values = [getattr(r, metric) for r in group]
            total = 0.0
            for v in values:
                total += v
            s.mean[metric] = total / len(values)
            s.lo[metric] = min(values)
            s.hi[metric] = max(values)
        out[key] = s
    return out


def linreg(points: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Ordinary least squares ``y = b0 + b1 * x``; returns ``(b0, b1, r_squared)``."""
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0:
        raise ValueError("x is constant; the slope is undefined")
    b1 = float(dx @ (y - y.mean())) / sxx
    b0 = float(y.mean() - b1 * x.mean())
    resid = y - (b0 + b1 * x)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return b0, b1, r2


def max_size_points(rows: Iterable[ResultRow], culture: str, procedure: str) -> list[tuple[int, int]]:
    """``(n, largest deal size over all reps at n)`` for one culture and procedure."""
    best: dict[int, int] = {}
    for r in rows:
        if r.culture == culture and r.procedure == procedure:
            best[r.n] = max(best.get(r.n, 0), r.max_deal_size)
    return sorted(best.items())


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _svg_chart(title: str, series: dict[str, list[tuple[int, float, float, float]]]) -> str:
    width, height, pad = 640, 400, 50
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [v for pts in series.values() for p in pts for v in p[1:]]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<title>{title}</title>',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="black"/>',
           f'<text x="{width / 2}" y="{pad / 2}" text-anchor="middle" font-size="14">{title}</text>',
           f'<text x="{pad}" y="{height - pad / 3}" font-size="11">n = {x0}..{x1}</text>',
           f'<text x="4" y="{pad - 6}" font-size="11">{y0:.3g}..{y1:.3g}</text>']
    for k, (name, pts) in enumerate(series.items()):
        color = _PALETTE[k % len(_PALETTE)]
        band = [(sx(x), sy(hi)) for x, _, _, hi in pts] + [(sx(x), sy(lo)) for x, _, lo, _ in reversed(pts)]
        out.append(f'<polygon points="{" ".join(f"{a:.1f},{b:.1f}" for a, b in band)}" '
                   f'fill="{color}" fill-opacity="0.15" stroke="none"/>')
        line = " ".join(f"{sx(x):.1f},{sy(m):.1f}" for x, m, _, _ in pts)
        out.append(f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.5">'
                   f'<title>{name}</title></polyline>')
        out.append(f'<text x="{width - pad + 4}" y="{pad + 14 * k}" font-size="10" fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(summary: dict[tuple[str, str, int], GroupSummary], path,
              metrics: Sequence[str] = ("ratio_ark", "ratio_mrk", "num_deals", "max_deal_size")) -> list[Path]:
    """Write one SVG per (culture, metric) into directory ``path``: mean line plus min/max band per procedure."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    written = []
    cultures = sorted({k[0] for k in summary})
    for culture in cultures:
        procs = []
        for (c, p, _) in summary:
            if c == culture and p not in procs:
                procs.append(p)
        for metric in metrics:
            series = {}
            for p in procs:
                ns = sorted(n for (c, q, n) in summary if c == culture and q == p)
                series[p] = [(n, summary[culture, p, n].mean[metric], summary[culture, p, n].lo[metric],
                              summary[culture, p, n].hi[metric]) for n in ns]
            target = path / f"{culture}_{metric}.svg"
            target.write_text(_svg_chart(f"{culture}: {metric}", series), encoding="utf-8")
            written.append(target)
    return written
