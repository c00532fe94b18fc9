"""Schema validation, figure construction, and deterministic rendering,
all against synthetic CSV files; the simulator package is never imported."""

import filecmp
import math

import numpy as np
import pytest

from pulse_dicke_figures import (EmptyTableError, FigureDataError, PlotSpec,
                                 SchemaMismatchError, build_figure, render)
from pulse_dicke_figures.cli import main

FID_HEADER = ("n_attackers,upsilon,n_max_used,fidelity_final,entropy_final,"
              "entropy_max,truncation_tail,norm_drift")
ENT_HEADER = "n_attackers,upsilon,time,lam,entropy"
NEG_HEADER = ("n_attackers,upsilon,kappa,time,lam,negativity,log_negativity,"
              "purity,trace")


def _write(path, header, rows):
    lines = [header] + [",".join(str(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def _fidelity_csv(path, include_lone=True):
    rows = []
    speeds = np.logspace(np.log10(0.1), np.log10(2.0), 8)
    for u in speeds:
        rows.append([3, u, 40, 0.01 + 0.5 * (np.log(u / 0.25)) ** 2,
                     0.2, 0.9, 1e-12, 1e-10])
    if include_lone:
        for u in speeds:
            rows.append([1, u, 16, 0.55 + 0.3 * (np.log(u / 0.45)) ** 2,
                         0.1, 0.4, 1e-13, 1e-11])
    # one unconverged point, nan observables, must be skipped not fatal
    rows.append([3, 9.9, 1280, float("nan"), float("nan"), float("nan"),
                 float("nan"), float("nan")])
    return _write(path, FID_HEADER, rows)


def _entropy_csv(path, n_values=(3,), ragged=False):
    rows = []
    for n in n_values:
        for u in (0.1, 0.3, 1.0, 3.0):
            duration = 2.0 / u
            samples = 5 if not ragged or u != 1.0 else 4
            for t in np.linspace(0.0, duration, samples):
                lam = max(min(u * t, 2.0 - u * t), 0.0)
                s = 0.8 * math.log(n + 1) * lam
                rows.append([n, u, t, lam, s])
    return _write(path, ENT_HEADER, rows)


def _negativity_csv(path, speeds=(0.25,), n_values=(5, 11)):
    rows = []
    for n in n_values:
        for u in speeds:
            for kap in (0.0, 0.1):
                for t in np.linspace(0.0, 2.0 / u, 5):
                    neg = 0.4 * math.exp(-2.0 * kap * t) * (t / (2.0 / u))
                    rows.append([n, u, kap, t, 0.0, neg,
                                 math.log2(2 * neg + 1), 0.9, 1.0])
    return _write(path, NEG_HEADER, rows)


# ------------------------------------------------------------- schemas

def test_missing_column_is_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(FID_HEADER.replace(",norm_drift", "") + "\n1,0.5,16,0.9,0,0,0\n")
    spec = PlotSpec("fidelity-curves", str(bad), str(tmp_path / "fig"))
    with pytest.raises(SchemaMismatchError, match="norm_drift"):
        render(spec)
    assert not (tmp_path / "fig.png").exists()
    assert not (tmp_path / "fig.svg").exists()


def test_extra_column_is_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(FID_HEADER + ",comment\n")
    with pytest.raises(SchemaMismatchError, match="comment"):
        build_figure(PlotSpec("fidelity-curves", str(bad), "x"))


def test_reordered_header_rejected(tmp_path):
    cols = FID_HEADER.split(",")
    cols[0], cols[1] = cols[1], cols[0]
    bad = tmp_path / "bad.csv"
    bad.write_text(",".join(cols) + "\n")
    with pytest.raises(SchemaMismatchError, match="order"):
        build_figure(PlotSpec("fidelity-curves", str(bad), "x"))


def test_header_only_file_is_empty_error(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(FID_HEADER + "\n")
    spec = PlotSpec("fidelity-curves", str(empty), str(tmp_path / "fig"))
    with pytest.raises(EmptyTableError):
        render(spec)
    assert not (tmp_path / "fig.png").exists()


def test_short_row_and_bad_cell_are_schema_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(ENT_HEADER + "\n3,0.5,0.0,0.0\n")
    with pytest.raises(SchemaMismatchError, match=":2"):
        build_figure(PlotSpec("entropy-heatmap", str(bad), "x"))
    bad.write_text(ENT_HEADER + "\n3,0.5,0.0,zero,0.1\n")
    with pytest.raises(SchemaMismatchError, match=":2"):
        build_figure(PlotSpec("entropy-heatmap", str(bad), "x"))


# ------------------------------------------------------------- PlotSpec

def test_plotspec_validation(tmp_path):
    with pytest.raises(ValueError, match="kind"):
        PlotSpec("pie-chart", ("a.csv",), "out")
    with pytest.raises(ValueError, match="at least one"):
        PlotSpec("fidelity-curves", (), "out")
    spec = PlotSpec("fidelity-curves", "solo.csv", "out")
    assert spec.inputs == ("solo.csv",)


# ------------------------------------------------------------- figures

def test_fidelity_two_panel(tmp_path):
    csv = _fidelity_csv(tmp_path / "sweep.csv")
    fig = build_figure(PlotSpec("fidelity-curves", csv, "unused"))
    assert len(fig.axes) == 2
    left, right = fig.axes
    assert left.get_xscale() == "log" and left.get_yscale() == "log"
    # nan row dropped: 8 points per line survive
    assert all(len(line.get_xdata()) == 8
               for ax in (left, right) for line in ax.lines)


def test_fidelity_needs_both_panels(tmp_path):
    csv = _fidelity_csv(tmp_path / "sweep.csv", include_lone=False)
    with pytest.raises(FigureDataError, match="N=1"):
        build_figure(PlotSpec("fidelity-curves", csv, "x"))


def test_entropy_heatmap_color_scale_anchored(tmp_path):
    csv = _entropy_csv(tmp_path / "entropy.csv")
    fig = build_figure(PlotSpec("entropy-heatmap", csv, "unused"))
    mesh = fig.axes[0].collections[0]
    lo, hi = mesh.get_clim()
    assert lo == 0.0
    assert hi == pytest.approx(math.log(4.0))


def test_entropy_rejects_mixed_n(tmp_path):
    csv = _entropy_csv(tmp_path / "entropy.csv", n_values=(3, 5))
    with pytest.raises(FigureDataError, match="N = 3, 5"):
        build_figure(PlotSpec("entropy-heatmap", csv, "x"))


def test_entropy_rejects_ragged_table(tmp_path):
    csv = _entropy_csv(tmp_path / "entropy.csv", ragged=True)
    with pytest.raises(FigureDataError, match="ragged"):
        build_figure(PlotSpec("entropy-heatmap", csv, "x"))


def test_negativity_line_styles_by_n(tmp_path):
    csv = _negativity_csv(tmp_path / "neg.csv")
    fig = build_figure(PlotSpec("negativity-traces", csv, "unused"))
    styles = {}
    for line in fig.axes[0].lines:
        label = line.get_label()
        styles.setdefault(label.split(",")[0], set()).add(line.get_linestyle())
    assert styles["$N=5$"] == {"-"}
    assert styles["$N=11$"] == {"--"}


def test_negativity_rejects_mixed_speeds(tmp_path):
    csv = _negativity_csv(tmp_path / "neg.csv", speeds=(0.25, 0.5))
    with pytest.raises(FigureDataError, match="upsilon"):
        build_figure(PlotSpec("negativity-traces", csv, "x"))


def test_negativity_accepts_split_inputs(tmp_path):
    a = _negativity_csv(tmp_path / "n5.csv", n_values=(5,))
    b = _negativity_csv(tmp_path / "n11.csv", n_values=(11,))
    fig = build_figure(PlotSpec("negativity-traces", (a, b), "unused"))
    assert len(fig.axes[0].lines) == 4


# ------------------------------------------------------- deterministic io

def test_render_writes_png_and_svg_deterministically(tmp_path):
    csv = _entropy_csv(tmp_path / "entropy.csv")
    first = render(PlotSpec("entropy-heatmap", csv, str(tmp_path / "a.png")))
    second = render(PlotSpec("entropy-heatmap", csv, str(tmp_path / "b")))
    assert first == (str(tmp_path / "a.png"), str(tmp_path / "a.svg"))
    for got, again in zip(first, second):
        assert filecmp.cmp(got, again, shallow=False)


def test_cli_success_and_failure(tmp_path, capsys):
    csv = _fidelity_csv(tmp_path / "sweep.csv")
    out = tmp_path / "fig2"
    assert main(["--kind", "fidelity-curves", "--input", csv,
                 "--out", str(out)]) == 0
    assert (tmp_path / "fig2.png").stat().st_size > 0
    assert (tmp_path / "fig2.svg").stat().st_size > 0

    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    rc = main(["--kind", "fidelity-curves", "--input", str(bad),
               "--out", str(tmp_path / "nope")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
    assert not (tmp_path / "nope.png").exists()
