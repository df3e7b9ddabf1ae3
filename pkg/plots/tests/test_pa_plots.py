"""Unit tests for the figure package on synthetic, schema-conformant CSVs."""

import csv
import hashlib
import itertools
import math

import numpy as np
import pytest

from pa_plots import cli, figures, io


def write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)
    return str(path)


def hexagon_contour(path, base=(0.5, 0.3, 0.2)):
    """Closed 6-point loop with exactly constant xyz (coordinate permutations)."""
    points = np.array(sorted(set(itertools.permutations(base))), dtype=float)
    chart = figures.to_chart(points)
    order = np.argsort(np.arctan2(chart[:, 1], chart[:, 0]))
    loop = np.vstack([points[order], points[order][:1]])
    rows = [[i, p[0], p[1], p[2]] for i, p in enumerate(loop)]
    return write_rows(path, io.CONTOUR_COLUMNS, rows)


def summary_csv(path, m27_values):
    rows = [[i, v / 27.0, 1e-4, 12.5, 2, v] for i, v in enumerate(m27_values)]
    return write_rows(path, io.SUMMARY_COLUMNS, rows)


def trajectory_csv(path, n_values):
    rows = []
    for n in n_values:
        x = 1.0 / 3.0 + 0.1 * math.sin(0.3 * n)
        y = 1.0 / 3.0 + 0.1 * math.sin(0.3 * n + 2.0)
        z = 1.0 - x - y
        rows.append([n, 4 * n + 6, x, y, z, x * y * z, 0.05 * n])
    return write_rows(path, io.TRAJECTORY_COLUMNS, rows)


def file_digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# io ------------------------------------------------------------------------

def test_loaders_roundtrip(tmp_path):
    path = hexagon_contour(tmp_path / "c.csv")
    data = io.load_contour(path)
    assert data.shape == (7, 4)
    assert np.array_equal(data[0, 1:], data[-1, 1:])
    prod = data[:, 1] * data[:, 2] * data[:, 3]
    assert np.max(np.abs(prod - 0.03)) < 1e-15


def test_loader_rejects_wrong_header(tmp_path):
    path = write_rows(tmp_path / "bad.csv", ("a", "b"), [[1, 2]])
    with pytest.raises(ValueError, match="bad.csv.*schema"):
        io.load_summary(path)
    # A trajectory header is not a summary header even though both are valid.
    path = trajectory_csv(tmp_path / "t.csv", [0, 10])
    with pytest.raises(ValueError, match="schema"):
        io.load_summary(path)


def test_loader_rejects_empty(tmp_path):
    path = write_rows(tmp_path / "empty.csv", io.SUMMARY_COLUMNS, [])
    with pytest.raises(ValueError, match="no data rows"):
        io.load_summary(path)


def test_column_lookup(tmp_path):
    path = summary_csv(tmp_path / "s.csv", [0.25, 0.75])
    data = io.load_summary(path)
    m27 = io.column(data, io.SUMMARY_COLUMNS, "M27_final")
    assert m27.tolist() == [0.25, 0.75]


# chart ----------------------------------------------------------------------

def test_chart_matches_documented_basis():
    assert np.allclose(figures.B1 @ figures.B2, 0.0, atol=1e-15)
    assert math.isclose(figures.B1 @ figures.B1, 1.0, abs_tol=1e-15)
    assert math.isclose(figures.B2 @ figures.B2, 1.0, abs_tol=1e-15)
    # Center maps to the chart origin, and both basis rows sum to zero so the
    # chart lies in the simplex plane.
    assert np.allclose(figures.to_chart(figures.CENTER[None, :]), 0.0)
    assert abs(figures.B1.sum()) < 1e-15 and abs(figures.B2.sum()) < 1e-15


# spec validation -------------------------------------------------------------

def test_spec_validation(tmp_path):
    out = str(tmp_path / "fig.png")
    with pytest.raises(ValueError, match="unknown plot kind"):
        figures.PlotSpec("pie", (), out).validate()
    with pytest.raises(ValueError, match="at least one input"):
        figures.PlotSpec("histogram", (), out).validate()
    with pytest.raises(ValueError, match="single run"):
        figures.PlotSpec("evolution", ("a.csv", "b.csv"), out).validate()
    with pytest.raises(ValueError, match="dpi"):
        figures.PlotSpec("histogram", ("a.csv",), out, dpi=0).validate()
    figures.PlotSpec("simplex_contours", (), out).validate()


# simplex contours ------------------------------------------------------------

def test_contours_triangle_only(tmp_path):
    out = str(tmp_path / "triangle.png")
    result = figures.render(figures.PlotSpec("simplex_contours", (), out))
    assert result.path == out
    assert result.warnings == ()
    assert (tmp_path / "triangle.png").stat().st_size > 1000


def test_contours_clean_inputs_no_warning(tmp_path):
    paths = tuple(
        hexagon_contour(tmp_path / f"c{i}.csv", base)
        for i, base in enumerate([(0.5, 0.3, 0.2), (0.4, 0.35, 0.25)]))
    out = str(tmp_path / "contours.png")
    result = figures.render(figures.PlotSpec("simplex_contours", paths, out))
    assert result.warnings == ()


def test_contours_flag_broken_conservation(tmp_path):
    path = hexagon_contour(tmp_path / "c.csv")
    data = io.load_contour(path)
    data[2, 3] += 1e-3  # push one point off the level curve
    write_rows(tmp_path / "broken.csv", io.CONTOUR_COLUMNS, data.tolist())
    clean = hexagon_contour(tmp_path / "clean.csv", (0.4, 0.35, 0.25))
    out = str(tmp_path / "fig.png")
    spec = figures.PlotSpec(
        "simplex_contours", (clean, str(tmp_path / "broken.csv")), out)
    result = figures.render(spec)
    assert len(result.warnings) == 1
    assert "broken.csv" in result.warnings[0]
    assert "27xyz" in result.warnings[0]


# histogram -------------------------------------------------------------------

def test_histogram_interior_mass_no_warning(tmp_path):
    rng = np.random.default_rng(5)
    path = summary_csv(tmp_path / "s.csv", rng.uniform(0.02, 0.98, size=200))
    out = str(tmp_path / "hist.png")
    result = figures.render(figures.PlotSpec("histogram", (path,), out))
    assert result.warnings == ()
    assert (tmp_path / "hist.png").stat().st_size > 1000


def test_histogram_flags_mass_outside_open_interval(tmp_path):
    path = summary_csv(tmp_path / "s.csv", [0.4, 1.5, 0.6, 0.0])
    out = str(tmp_path / "hist.png")
    result = figures.render(figures.PlotSpec("histogram", (path,), out))
    assert len(result.warnings) == 1
    assert "2 of 4" in result.warnings[0]


def test_histogram_two_series(tmp_path):
    a = summary_csv(tmp_path / "a.csv", [0.2, 0.3, 0.4])
    b = summary_csv(tmp_path / "b.csv", [0.6, 0.7, 0.8])
    out = str(tmp_path / "hist2.png")
    result = figures.render(figures.PlotSpec("histogram", (a, b), out))
    assert result.warnings == ()


# evolution -------------------------------------------------------------------

def test_evolution_plain_run(tmp_path):
    path = trajectory_csv(tmp_path / "t.csv", [0, 1, 2, 4, 8, 16, 32, 64])
    out = str(tmp_path / "evo.png")
    result = figures.render(figures.PlotSpec("evolution", (path,), out))
    assert result.warnings == ()
    assert (tmp_path / "evo.png").stat().st_size > 1000


def test_evolution_single_checkpoint_no_crash(tmp_path):
    path = trajectory_csv(tmp_path / "t.csv", [0])
    out = str(tmp_path / "evo.png")
    result = figures.render(figures.PlotSpec("evolution", (path,), out))
    assert len(result.warnings) == 1
    assert "n=0" in result.warnings[0]
    assert (tmp_path / "evo.png").stat().st_size > 1000


def test_evolution_single_positive_checkpoint(tmp_path):
    path = trajectory_csv(tmp_path / "t.csv", [0, 10])
    out = str(tmp_path / "evo.png")
    result = figures.render(figures.PlotSpec("evolution", (path,), out))
    assert result.warnings == ()


# determinism and purity ------------------------------------------------------

def test_rerender_is_byte_identical(tmp_path):
    path = hexagon_contour(tmp_path / "c.csv")
    first = str(tmp_path / "one.png")
    second = str(tmp_path / "two.png")
    figures.render(figures.PlotSpec("simplex_contours", (path,), first))
    figures.render(figures.PlotSpec("simplex_contours", (path,), second))
    assert file_digest(first) == file_digest(second)


def test_inputs_not_mutated(tmp_path):
    path = summary_csv(tmp_path / "s.csv", [0.3, 0.5, 0.7])
    before = file_digest(path)
    figures.render(figures.PlotSpec("histogram", (path,),
                                    str(tmp_path / "h.png")))
    assert file_digest(path) == before


# cli -------------------------------------------------------------------------

def test_cli_renders_and_reports_warnings(tmp_path, capsys):
    path = summary_csv(tmp_path / "s.csv", [0.4, 1.5])
    out = str(tmp_path / "h.png")
    assert cli.main(["histogram", "--in", path, "--out", out]) == 0
    captured = capsys.readouterr()
    assert captured.out.strip() == out
    assert "warning:" in captured.err
    assert (tmp_path / "h.png").exists()


def test_cli_triangle_with_no_inputs(tmp_path, capsys):
    out = str(tmp_path / "tri.png")
    assert cli.main(["simplex_contours", "--out", out]) == 0
    assert capsys.readouterr().err == ""
    assert (tmp_path / "tri.png").exists()


def test_cli_requires_inputs_for_histogram(tmp_path):
    with pytest.raises(SystemExit) as err:
        cli.main(["histogram", "--out", str(tmp_path / "h.png")])
    assert err.value.code == 2
