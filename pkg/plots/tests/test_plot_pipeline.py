"""End-to-end: generate CSVs with the simulation CLI, render every figure.

The figure package must work from the documented external interfaces alone,
so everything here goes through subprocesses and files, never imports from
the simulation package.
"""

import os
import subprocess
import sys

import pytest


def run(cmd):
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def harness_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("harness")
    run([sys.executable, "-m", "typed_pa.cli", "--out",
         str(out / "runs"), "simulate", "--seeds", "2", "--n-max", "2000",
         "--name", "pipeline"])
    run([sys.executable, "-m", "typed_pa.cli", "--out",
         str(out / "contours"), "field", "--levels", "0.2,0.5,0.8",
         "--resolution", "128"])
    return out


def test_contour_overlay(harness_out, tmp_path):
    contours = sorted(
        str(p) for p in (harness_out / "contours").glob("contour_27M_*.csv"))
    assert len(contours) == 3
    fig = str(tmp_path / "contours.png")
    proc = run([sys.executable, "-m", "pa_plots.cli", "simplex_contours",
                "--in", *contours, "--out", fig])
    # The harness's own curves must pass the conservation re-check.
    assert "warning" not in proc.stderr.lower()
    assert os.path.getsize(fig) > 1000


def test_histogram_from_summary(harness_out, tmp_path):
    summary = str(harness_out / "runs" / "summary.csv")
    fig = str(tmp_path / "hist.png")
    proc = run([sys.executable, "-m", "pa_plots.cli", "histogram",
                "--in", summary, "--out", fig])
    assert "warning" not in proc.stderr.lower()
    assert os.path.getsize(fig) > 1000


def test_evolution_from_trajectory(harness_out, tmp_path):
    trajectory = str(harness_out / "runs" / "trajectory_seed0000.csv")
    fig = str(tmp_path / "evolution.png")
    proc = run([sys.executable, "-m", "pa_plots.cli", "evolution",
                "--in", trajectory, "--out", fig])
    assert "warning" not in proc.stderr.lower()
    assert os.path.getsize(fig) > 1000


def test_console_script_installed(tmp_path):
    proc = run(["pa-plot", "simplex_contours", "--out",
                str(tmp_path / "tri.png")])
    assert (tmp_path / "tri.png").exists()
