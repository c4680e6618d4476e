#!/usr/bin/env python3
"""Figure-style heatmaps and summary tables from sweep result CSVs.

This component is deliberately decoupled from the simulation package: it
consumes only the public CSV schema

    lambda,alpha,delta,beta,draws,
    pct_da_efficient,pct_seq_mbp,pct_gmbp,pct_da_eq_ttc

with `#`-prefixed metadata/summary lines, and renders either

* a (delta, beta) heatmap of one metric — or the green/blue/red overlay of
  DA efficiency, sequential-MBP and GMBP shares — for a fixed
  (lambda, alpha) selector, or
* a markdown summary table with one row per (lambda, alpha), averaging the
  three headline metrics over the (delta, beta) grid.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CSV_HEADER = (
    "lambda,alpha,delta,beta,draws,"
    "pct_da_efficient,pct_seq_mbp,pct_gmbp,pct_da_eq_ttc"
)
METRICS = ("pct_da_efficient", "pct_seq_mbp", "pct_gmbp", "pct_da_eq_ttc")
OVERLAY = "overlay"
#: Figure-1 colour convention: DA efficient green, sequential MBP blue,
#: GMBP red.
OVERLAY_CHANNELS = {
    "pct_gmbp": 0,          # red
    "pct_da_efficient": 1,  # green
    "pct_seq_mbp": 2,       # blue
}
SINGLE_METRIC_CMAPS = {
    "pct_da_efficient": "Greens",
    "pct_seq_mbp": "Blues",
    "pct_gmbp": "Reds",
    "pct_da_eq_ttc": "Greys",
}


class SchemaError(ValueError):
    """The CSV does not conform to the sweep result schema."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    metric: str
    lam: float
    alpha: float
    out_path: str
    grid_step: float | None = None

    def __post_init__(self):
        if self.metric != OVERLAY and self.metric not in METRICS:
            raise SchemaError(
                f"missing column: {self.metric!r} is not one of "
                f"{METRICS + (OVERLAY,)}"
            )


def read_results(csv_path: str | Path) -> list[dict]:
    """Parse the data rows of a sweep CSV into dicts keyed by column."""
    lines = Path(csv_path).read_text().splitlines()
    body = [l for l in lines if l and not l.startswith("#")]
    if not body or body[0] != CSV_HEADER:
        raise SchemaError(
            f"unexpected header {body[0] if body else '<empty>'!r}"
        )
    columns = body[0].split(",")
    rows = []
    for line in body[1:]:
        parts = line.split(",")
        if len(parts) != len(columns):
            raise SchemaError(f"malformed row: {line!r}")
        row = dict(zip(columns, (float(p) for p in parts)))
        row["draws"] = int(row["draws"])
        rows.append(row)
    if not rows:
        raise SchemaError("no data rows")
    return rows


def select_cells(rows: list[dict], lam: float, alpha: float) -> list[dict]:
    chosen = [
        r for r in rows
        if abs(r["lambda"] - lam) < 1e-9 and abs(r["alpha"] - alpha) < 1e-9
    ]
    if not chosen:
        raise SchemaError(
            f"empty selection: no rows with lambda={lam:g} alpha={alpha:g}"
        )
    return chosen


def _grid(cells: list[dict], metric: str):
    """(delta values, beta values, value matrix) for one (lambda, alpha)."""
    deltas = sorted({r["delta"] for r in cells})
    betas = sorted({r["beta"] for r in cells})
    grid = np.full((len(deltas), len(betas)), np.nan)
    di = {d: k for k, d in enumerate(deltas)}
    bi = {b: k for k, b in enumerate(betas)}
    for r in cells:
        grid[di[r["delta"]], bi[r["beta"]]] = r[metric]
    if np.isnan(grid).any():
        raise SchemaError("selection does not cover a full (delta, beta) grid")
    return np.asarray(deltas), np.asarray(betas), grid


def render_heatmap(spec: PlotSpec) -> dict[str, np.ndarray]:
    """Write the heatmap image and return the plotted grid(s) by metric."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = read_results(spec.csv_path)
    cells = select_cells(rows, spec.lam, spec.alpha)
    metrics = (
        tuple(OVERLAY_CHANNELS) if spec.metric == OVERLAY else (spec.metric,)
    )
    grids = {}
    for metric in metrics:
        deltas, betas, grids[metric] = _grid(cells, metric)

    fig, ax = plt.subplots(figsize=(5.2, 4.4), dpi=120)
    extent = (
        betas.min() - 1e-9, betas.max() + 1e-9,
        deltas.min() - 1e-9, deltas.max() + 1e-9,
    )
    if spec.metric == OVERLAY:
        rgb = np.zeros(grids[metrics[0]].shape + (3,))
        for metric, channel in OVERLAY_CHANNELS.items():
            rgb[:, :, channel] = grids[metric] / 100.0
        ax.imshow(rgb, origin="lower", extent=extent, aspect="auto")
        title = "DA efficient (G) / sequential MBP (B) / GMBP (R)"
    else:
        image = ax.imshow(
            grids[spec.metric],
            origin="lower",
            extent=extent,
            aspect="auto",
            cmap=SINGLE_METRIC_CMAPS[spec.metric],
            vmin=0.0,
            vmax=100.0,
        )
        fig.colorbar(image, ax=ax, label=f"{spec.metric} (%)")
        title = spec.metric
    ax.set_xlabel("beta (match-quality weight in priorities)")
    ax.set_ylabel("delta (match-quality weight in preferences)")
    ax.set_title(
        f"{title}\nlambda={spec.lam:g}, alpha={spec.alpha:g}", fontsize=10
    )
    fig.tight_layout()
    fig.savefig(spec.out_path, metadata={})
    plt.close(fig)
    return grids


def summarize_rows(rows: list[dict]) -> list[dict]:
    """Per-(lambda, alpha) means over the grid, in first-seen order."""
    keys: list[tuple[float, float]] = []
    for r in rows:
        key = (r["lambda"], r["alpha"])
        if key not in keys:
            keys.append(key)
    out = []
    for lam, alpha in keys:
        group = [
            r for r in rows if r["lambda"] == lam and r["alpha"] == alpha
        ]
        entry = {"lambda": lam, "alpha": alpha}
        for metric in METRICS:
            entry[metric] = float(np.mean([r[metric] for r in group]))
        out.append(entry)
    return out


def render_table3(csv_path: str | Path, out_path: str | Path | None = None) -> str:
    """Markdown summary table: (1) DA efficient, (2) sequential MBP, (3) GMBP."""
    rows = read_results(csv_path)
    summaries = summarize_rows(rows)
    lines = [
        "| lambda | alpha | (1) DA is efficient | (2) Sequential MBP | (3) GMBP |",
        "|---|---|---|---|---|",
    ]
    for s in summaries:
        lines.append(
            f"| {s['lambda']:g} | {s['alpha']:g} "
            f"| {s['pct_da_efficient']:.2f} | {s['pct_seq_mbp']:.2f} "
            f"| {s['pct_gmbp']:.2f} |"
        )
    text = "\n".join(lines) + "\n"
    if out_path is not None:
        Path(out_path).write_text(text)
    return text


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots.py",
        description="Render heatmaps or summary tables from sweep CSVs.",
    )
    parser.add_argument("--csv", required=True, help="sweep result CSV")
    parser.add_argument(
        "--metric",
        help=f"heatmap metric: one of {', '.join(METRICS)} or '{OVERLAY}'",
    )
    parser.add_argument("--lambda", dest="lam", type=float,
                        help="lambda selector for the heatmap")
    parser.add_argument("--alpha", type=float,
                        help="alpha selector for the heatmap")
    parser.add_argument("--table3", action="store_true",
                        help="write a markdown summary table instead")
    parser.add_argument("--out", required=True, help="output file")
    args = parser.parse_args(argv)
    try:
        if args.table3:
            render_table3(args.csv, args.out)
        else:
            if args.metric is None or args.lam is None or args.alpha is None:
                parser.error("heatmaps need --metric, --lambda and --alpha")
            render_heatmap(
                PlotSpec(
                    csv_path=args.csv,
                    metric=args.metric,
                    lam=args.lam,
                    alpha=args.alpha,
                    out_path=args.out,
                )
            )
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
