"""Figures from seqshield result CSVs.

Two figure kinds:

* ``case_bars``: mean true cost per study case, with interquartile-range
  whiskers across replications.
* ``sweep_lines``: mean true cost versus a swept scenario column, one line
  per case.

All statistics are recomputed here from the raw rows (the harness emits no
aggregates). Rendering is deterministic for fixed input: a fixed SVG hash
salt and stripped date metadata make repeated SVG renders byte-identical.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SVG_HASH_SALT = "plotkit"

# Header contract of the seqshield results CSV.
RESULT_COLUMNS = (
    "case", "rep", "seed", "n", "s_min", "sigma", "epsilon", "m_size",
    "rule_w", "rule_kappa", "cost_true", "cost_reported", "max_delay",
    "kendall_tau", "deviator_gain", "bystander_harm", "br_converged",
    "inadmissible_count",
)

KINDS = ("case_bars", "sweep_lines")


class MissingColumnError(ValueError):
    def __init__(self, column: str, path: str):
        self.column = column
        super().__init__(f"column {column!r} missing from {path}")


@dataclass(frozen=True)
class FigureSpec:
    csv_paths: tuple[str, ...]
    kind: str  # "case_bars" | "sweep_lines"
    group_by: str | None = None  # swept column, required for sweep_lines
    out_dir: str = "."
    formats: tuple[str, ...] = ("png", "svg")
    stem: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "csv_paths", tuple(str(p) for p in self.csv_paths))
        object.__setattr__(self, "formats", tuple(self.formats))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "sweep_lines" and not self.group_by:
            raise ValueError("sweep_lines needs a group-by column")


@dataclass(frozen=True)
class CaseStats:
    mean: float
    q1: float
    q3: float
    count: int


def read_rows(paths: Sequence[str], required: Iterable[str]) -> list[dict]:
    """Load and concatenate result rows, checking the column contract."""
    needed = list(required)
    rows: list[dict] = []
    for path in paths:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for col in needed:
                if col not in header:
                    raise MissingColumnError(col, path)
            rows.extend(reader)
    if not rows:
        raise ValueError(f"no data rows in {', '.join(paths)}")
    return rows


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def _quartiles(values: Sequence[float]) -> tuple[float, float]:
    if len(values) == 1:
        return values[0], values[0]
    q1, _, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return q1, q3


def case_stats(rows: Sequence[dict]) -> dict[int, CaseStats]:
    """Mean and interquartile range of cost_true per case."""
    by_case: dict[int, list[float]] = {}
    for row in rows:
        by_case.setdefault(int(row["case"]), []).append(float(row["cost_true"]))
    out: dict[int, CaseStats] = {}
    for case in sorted(by_case):
        values = by_case[case]
        q1, q3 = _quartiles(values)
        out[case] = CaseStats(mean=_mean(values), q1=q1, q3=q3, count=len(values))
    return out


def sweep_stats(rows: Sequence[dict], column: str) -> dict[int, list[tuple[float, float]]]:
    """Mean cost_true per (case, swept value), values in ascending order."""
    cells: dict[tuple[int, float], list[float]] = {}
    for row in rows:
        key = (int(row["case"]), float(row[column]))
        cells.setdefault(key, []).append(float(row["cost_true"]))
    out: dict[int, list[tuple[float, float]]] = {}
    for case, x in sorted(cells):
        out.setdefault(case, []).append((x, _mean(cells[(case, x)])))
    return out


def _deterministic_figure() -> plt.Figure:
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    return plt.figure(figsize=(7.0, 4.5), dpi=100)


def _save(fig: plt.Figure, out_dir: Path, stem: str, formats: Sequence[str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for fmt in formats:
        path = out_dir / f"{stem}.{fmt}"
        fig.savefig(path, metadata={"Date": None} if fmt in ("svg", "png") else None)
        written.append(path)
    plt.close(fig)
    return written


def _render_case_bars(rows: Sequence[dict], spec: FigureSpec) -> list[Path]:
    stats = case_stats(rows)
    cases = sorted(stats)
    means = [stats[c].mean for c in cases]
    lower = [stats[c].mean - stats[c].q1 for c in cases]
    upper = [stats[c].q3 - stats[c].mean for c in cases]
    fig = _deterministic_figure()
    ax = fig.add_subplot(111)
    ax.bar(
        [str(c) for c in cases], means, yerr=[lower, upper],
        capsize=4, color="#4878a8", edgecolor="black", linewidth=0.6,
    )
    ax.set_xlabel("case")
    ax.set_ylabel("mean true cost")
    ax.set_title("True sequencing cost by case (whiskers: interquartile range)")
    fig.tight_layout()
    return _save(fig, Path(spec.out_dir), spec.stem or "case_bars", spec.formats)


def _render_sweep_lines(rows: Sequence[dict], spec: FigureSpec) -> list[Path]:
    assert spec.group_by is not None
    lines = sweep_stats(rows, spec.group_by)
    fig = _deterministic_figure()
    ax = fig.add_subplot(111)
    for case in sorted(lines):
        xs = [x for x, _ in lines[case]]
        ys = [y for _, y in lines[case]]
        ax.plot(xs, ys, marker="o", markersize=4, label=f"case {case}")
    ax.set_xlabel(spec.group_by)
    ax.set_ylabel("mean true cost")
    ax.set_title(f"True sequencing cost vs {spec.group_by}")
    ax.legend()
    fig.tight_layout()
    return _save(
        fig, Path(spec.out_dir), spec.stem or f"sweep_{spec.group_by}", spec.formats
    )


def render(spec: FigureSpec) -> list[Path]:
    """Render one figure per the spec; returns the written file paths."""
    required = ["case", "cost_true"]
    if spec.kind == "sweep_lines" and spec.group_by:
        required.append(spec.group_by)
    rows = read_rows(spec.csv_paths, required)
    if spec.kind == "case_bars":
        return _render_case_bars(rows, spec)
    return _render_sweep_lines(rows, spec)
