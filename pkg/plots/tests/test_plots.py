import re
from pathlib import Path

import numpy as np
import pytest

from plots import (
    CSV_HEADER,
    OVERLAY,
    PlotSpec,
    SchemaError,
    main,
    read_results,
    render_heatmap,
    render_table3,
    select_cells,
    summarize_rows,
)

RESULTS_DIR = Path(__file__).resolve().parent.parent.parent / "results"

try:
    # picked up when the main test suite runs alongside this one, so the
    # [SECONDARY] verdicts join the acceptance-criteria terminal summary
    from acceptance_log import record_acceptance
except ImportError:
    record_acceptance = None


def _report(line: str) -> None:
    if record_acceptance is not None:
        record_acceptance(line)
    print(line)


def write_csv(path, rows, summaries=()):
    lines = [
        "# generator = numpy-pcg64-seedsequence",
        "# master_seed = 1",
        "# version = mbp 0.1.0",
        CSV_HEADER,
    ]
    lines.extend(rows)
    lines.extend(summaries)
    path.write_text("\n".join(lines) + "\n")
    return path


TWO_GROUPS = [
    "1,1,0,0,10,100.0000,100.0000,100.0000,100.0000",
    "1,1,0,1,10,90.0000,80.0000,85.0000,70.0000",
    "1,1,1,0,10,50.0000,40.0000,45.0000,30.0000",
    "1,1,1,1,10,60.0000,20.0000,55.0000,10.0000",
    "0.5,1,0,0,10,40.0000,30.0000,35.0000,25.0000",
    "0.5,1,0,1,10,20.0000,10.0000,15.0000,5.0000",
    "0.5,1,1,0,10,10.0000,0.0000,5.0000,0.0000",
    "0.5,1,1,1,10,30.0000,20.0000,25.0000,15.0000",
]


def test_read_results_parses_rows_and_skips_comments(tmp_path):
    path = write_csv(tmp_path / "r.csv", TWO_GROUPS,
                     ["# summary lambda=1 alpha=1 ..."])
    rows = read_results(path)
    assert len(rows) == 8
    assert rows[0]["pct_da_efficient"] == 100.0
    assert rows[1]["beta"] == 1.0 and rows[1]["draws"] == 10


def test_read_results_rejects_bad_schema(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("lambda,alpha,delta,beta,draws,pct_da_efficient,"
                   "pct_seq_mbp,pct_da_eq_ttc\n1,1,0,0,1,1,1,1\n")
    with pytest.raises(SchemaError):
        read_results(bad)  # pct_gmbp column missing
    empty = tmp_path / "empty.csv"
    write_csv(empty, [])
    with pytest.raises(SchemaError):
        read_results(empty)


def test_select_cells_empty_selection(tmp_path):
    rows = read_results(write_csv(tmp_path / "r.csv", TWO_GROUPS))
    with pytest.raises(SchemaError, match="empty selection"):
        select_cells(rows, 0.25, 1.0)


def test_plotspec_rejects_unknown_metric(tmp_path):
    with pytest.raises(SchemaError, match="missing column"):
        PlotSpec(csv_path="x.csv", metric="pct_nonsense", lam=1, alpha=1,
                 out_path="x.png")


def test_table3_means_and_layout(tmp_path):
    path = write_csv(tmp_path / "r.csv", TWO_GROUPS)
    out = tmp_path / "table.md"
    text = render_table3(path, out)
    assert out.read_text() == text
    lines = text.splitlines()
    assert lines[0].startswith("| lambda | alpha | (1)")
    assert lines[2] == "| 1 | 1 | 75.00 | 60.00 | 71.25 |"
    assert lines[3] == "| 0.5 | 1 | 25.00 | 15.00 | 20.00 |"


def test_table3_single_cell_equals_cell(tmp_path):
    path = write_csv(
        tmp_path / "one.csv",
        ["0.75,0.95,0.5,0.25,100,12.0000,3.0000,9.0000,55.0000"],
    )
    text = render_table3(path)
    assert text.splitlines()[2] == "| 0.75 | 0.95 | 12.00 | 3.00 | 9.00 |"


def test_heatmap_single_cell(tmp_path):
    path = write_csv(
        tmp_path / "one.csv",
        ["0.75,0.95,0.5,0.25,100,12.0000,3.0000,9.0000,55.0000"],
    )
    out = tmp_path / "one.png"
    grids = render_heatmap(
        PlotSpec(csv_path=str(path), metric="pct_da_efficient",
                 lam=0.75, alpha=0.95, out_path=str(out))
    )
    assert out.exists()
    assert grids["pct_da_efficient"].shape == (1, 1)
    assert grids["pct_da_efficient"][0, 0] == 12.0


def test_heatmap_overlay_channels_and_determinism(tmp_path):
    path = write_csv(tmp_path / "r.csv", TWO_GROUPS)
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    grids = render_heatmap(
        PlotSpec(csv_path=str(path), metric=OVERLAY, lam=1.0, alpha=1.0,
                 out_path=str(a))
    )
    assert set(grids) == {"pct_da_efficient", "pct_seq_mbp", "pct_gmbp"}
    assert grids["pct_seq_mbp"][0, 1] == 80.0  # delta=0, beta=1 cell
    render_heatmap(
        PlotSpec(csv_path=str(path), metric=OVERLAY, lam=1.0, alpha=1.0,
                 out_path=str(b))
    )
    assert a.read_bytes() == b.read_bytes()


def test_cli_table_and_heatmap(tmp_path, capsys):
    path = write_csv(tmp_path / "r.csv", TWO_GROUPS)
    md = tmp_path / "t.md"
    assert main(["--csv", str(path), "--table3", "--out", str(md)]) == 0
    assert md.exists()
    png = tmp_path / "h.png"
    assert main([
        "--csv", str(path), "--metric", "pct_gmbp",
        "--lambda", "0.5", "--alpha", "1", "--out", str(png),
    ]) == 0
    assert png.exists()
    assert main([
        "--csv", str(path), "--metric", "pct_gmbp",
        "--lambda", "0.1", "--alpha", "1", "--out", str(png),
    ]) == 1
    assert "empty selection" in capsys.readouterr().err


def _summary_lines(csv_path):
    pattern = re.compile(
        r"# summary lambda=(\S+) alpha=(\S+) pct_da_efficient=(\S+) "
        r"pct_seq_mbp=(\S+) pct_gmbp=(\S+)"
    )
    out = {}
    for line in Path(csv_path).read_text().splitlines():
        match = pattern.match(line)
        if match:
            lam, alpha, eff, seq, gmbp = (float(g) for g in match.groups())
            out[(lam, alpha)] = (eff, seq, gmbp)
    return out


def test_secondary_table3_matches_harness_summary_exactly():
    csv_path = RESULTS_DIR / "table3-row1.csv"
    assert csv_path.exists(), "run the table3-row1 preset first"
    harness = _summary_lines(csv_path)
    computed = summarize_rows(read_results(csv_path))
    ok = len(computed) == len(harness) == 1
    if ok:
        for s in computed:
            want = harness[(s["lambda"], s["alpha"])]
            got = (s["pct_da_efficient"], s["pct_seq_mbp"], s["pct_gmbp"])
            ok = ok and tuple(round(v, 4) for v in got) == want
        line = render_table3(csv_path).splitlines()[2]
        eff, seq, gmbp = harness[(1.0, 1.0)]
        ok = ok and line == f"| 1 | 1 | {eff:.2f} | {seq:.2f} | {gmbp:.2f} |"
    verdict = "PASS" if ok else "FAIL"
    _report(f"[SECONDARY] table3 rendering matches harness summary: {verdict}")
    assert ok, (computed, harness)


def test_secondary_heatmap_gradient_direction(tmp_path):
    # The high-beta/low-delta corner must beat the low-beta/high-delta one.
    # Checked on the (lambda=1, alpha=0.95) panel: with alpha=1 the beta=0
    # column is exactly-common priorities, i.e. a serial dictatorship that is
    # always efficient, which degenerately inverts the corner comparison.
    csv_path = RESULTS_DIR / "table3-qualitative.csv"
    assert csv_path.exists(), "run the table3-qualitative preset first"
    out = tmp_path / "panel.png"
    grids = render_heatmap(
        PlotSpec(csv_path=str(csv_path), metric=OVERLAY, lam=1.0, alpha=0.95,
                 out_path=str(out))
    )
    grid = grids["pct_da_efficient"]
    n_delta, n_beta = grid.shape
    q_delta = max(1, n_delta // 4)
    q_beta = max(1, n_beta // 4)
    hi = grid[:q_delta, -q_beta:].mean()      # low delta, high beta
    lo = grid[-q_delta:, :q_beta].mean()      # high delta, low beta
    verdict = "PASS" if hi > lo else "FAIL"
    _report(
        f"[SECONDARY] heatmap gradient direction: {verdict} "
        f"(hi-beta/lo-delta mean {hi:.2f} vs lo-beta/hi-delta mean {lo:.2f})"
    )
    assert hi > lo, (hi, lo)
