"""Reproducible experiment harness: flat-text configs, geometric checkpoint
schedules, multi-seed fan-out with per-seed CSVs, hashed manifests, canned
figure-data reproductions, and identity check suites.

Determinism contract: a config plus master_seed fixes every output byte.
Seed i runs on generator SeedSequence((master_seed, i)); workers only change
scheduling, never results. No timestamps are written anywhere.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .field import STATIONARY_POINTS, field_eval, field_norm, integrate, \
    level_curve
from .graph import GrowthEngine, init, resolve_start
from .observables import SUMMARY_COLUMNS, TRAJECTORY_COLUMNS, RunSummary, \
    TrajectoryRecord, convergence_report, record
from .oracles import drift_f, expected_M_next_affine, \
    expected_M_next_enumerated, verify_uniform_max
from .rules import make_rule


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a multi-seed run depends on. `seeds` holds explicit run
    indices; a bare count in a config file expands to range(count)."""
    name: str = "run"
    model: str = "rps"
    start: str = "k3"
    m: int = 2
    alpha: float = 0.0
    n_max: int = 10_000
    seeds: Tuple[int, ...] = (0,)
    master_seed: int = 0
    checkpoint_ratio: float = 1.01
    dense_windows: Tuple[Tuple[int, int], ...] = ()
    output_dir: str = "out"

    def validate(self) -> None:
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.checkpoint_ratio <= 1.0:
            raise ValueError("checkpoint_ratio must exceed 1")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not self.seeds:
            raise ValueError("need at least one seed")
        for lo, hi in self.dense_windows:
            if lo > hi:
                raise ValueError(f"bad dense window {lo}:{hi}")
        # resolves built-in names and checks referenced files exist
        try:
            resolve_start(self.start)
        except OSError as exc:
            raise ValueError(f"start {self.start!r} is neither built in nor "
                             "a readable file") from exc
        if self.model not in ("rps", "linear", "uniform_visible") \
                and not os.path.exists(self.model):
            raise ValueError(f"model {self.model!r} is neither built in nor "
                             "a table file")


def _format_value(key: str, value) -> str:
    if key == "seeds":
        return ",".join(str(s) for s in value)
    if key == "dense_windows":
        return ",".join(f"{lo}:{hi}" for lo, hi in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def canonical_config_text(cfg: ExperimentConfig) -> str:
    """One fixed serialization per config; its hash goes in the manifest."""
    lines = [f"{f.name} = {_format_value(f.name, getattr(cfg, f.name))}"
             for f in sorted(fields(cfg), key=lambda f: f.name)]
    return "\n".join(lines) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_config_text(cfg).encode()).hexdigest()


def _parse_seeds(text: str) -> Tuple[int, ...]:
    if "," in text:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    return tuple(range(int(text)))


def _parse_windows(text: str) -> Tuple[Tuple[int, int], ...]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        lo, hi = tok.split(":")
        out.append((int(lo), int(hi)))
    return tuple(out)


_PARSERS = {
    "name": str, "model": str, "start": str, "output_dir": str,
    "m": int, "n_max": int, "master_seed": int,
    "alpha": float, "checkpoint_ratio": float,
    "seeds": _parse_seeds, "dense_windows": _parse_windows,
}


def load_config(path, **overrides) -> ExperimentConfig:
    """Read `key = value` lines (# comments allowed), then apply overrides."""
    raw: Dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            raw[key.strip()] = value.strip()
    unknown = set(raw) - set(_PARSERS)
    if unknown:
        raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
    parsed = {k: _PARSERS[k](v) for k, v in raw.items()}
    parsed.update({k: v for k, v in overrides.items() if v is not None})
    cfg = ExperimentConfig(**parsed)
    cfg.validate()
    return cfg


def make_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig(**{k: v for k, v in overrides.items()
                              if v is not None})
    cfg.validate()
    return cfg


def checkpoint_steps(n_max: int, ratio: float = 1.01,
                     dense_windows: Sequence[Tuple[int, int]] = ()) -> List[int]:
    """Vertex counts at which to record: 0, a geometric ladder up to n_max,
    and every step inside the dense windows."""
    pts = {0, n_max}
    n = 1
    while n < n_max:
        pts.add(n)
        n = max(n + 1, math.ceil(n * ratio))
    for lo, hi in dense_windows:
        pts.update(range(max(lo, 0), min(hi, n_max) + 1))
    return sorted(pts)


def run_one(cfg: ExperimentConfig, run_index: int) \
        -> Tuple[List[TrajectoryRecord], RunSummary]:
    """Grow one seeded run, recording at the checkpoint schedule."""
    start = resolve_start(cfg.start)
    state = init(start, cfg.alpha)
    rule = make_rule(cfg.model, num_types=state.num_types, m=cfg.m)
    rng = np.random.default_rng(
        np.random.SeedSequence((cfg.master_seed, run_index)))
    engine = GrowthEngine(state, rule, cfg.m, rng)
    records: List[TrajectoryRecord] = []
    prev = None
    at = 0
    for n in checkpoint_steps(cfg.n_max, cfg.checkpoint_ratio,
                              cfg.dense_windows):
        if n > at:
            engine.advance(n - at)
            at = n
        prev = record(state, prev)
        records.append(prev)
    return records, convergence_report(records, seed=run_index)


FLOAT_FORMAT = ".17g"


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def write_csv(path, columns: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _trajectory_name(run_index: int) -> str:
    return f"trajectory_seed{run_index:04d}.csv"


def _seed_worker(args) -> Tuple[int, RunSummary]:
    cfg, run_index = args
    records, summary = run_one(cfg, run_index)
    path = os.path.join(cfg.output_dir, _trajectory_name(run_index))
    write_csv(path, TRAJECTORY_COLUMNS, (r.csv_row() for r in records))
    return run_index, summary


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> dict:
    """Run every seed, write per-seed trajectory CSVs, a merged summary CSV,
    and a manifest with content hashes. Returns the manifest."""
    cfg.validate()
    os.makedirs(cfg.output_dir, exist_ok=True)
    jobs = [(cfg, i) for i in cfg.seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_seed_worker, jobs))
    else:
        results = [_seed_worker(job) for job in jobs]
    results.sort(key=lambda item: item[0])
    summaries = [summary for _, summary in results]
    summary_path = os.path.join(cfg.output_dir, "summary.csv")
    write_csv(summary_path, SUMMARY_COLUMNS, (s.csv_row() for s in summaries))
    aliased = [s.seed for s in summaries if s.theta_aliased]
    if aliased:
        print(f"warning: theta step neared pi for seeds {aliased}; "
              "densify checkpoints before trusting winding counts",
              file=sys.stderr)
    file_names = [_trajectory_name(i) for i in cfg.seeds] + ["summary.csv"]
    manifest = {
        "name": cfg.name,
        "code_version": __version__,
        "config": canonical_config_text(cfg).splitlines(),
        "config_hash": config_hash(cfg),
        "rng": {
            "scheme": "numpy SeedSequence((master_seed, run_index))",
            "master_seed": cfg.master_seed,
            "run_indices": list(cfg.seeds),
        },
        "theta_aliased_seeds": aliased,
        "files": {name: _sha256(os.path.join(cfg.output_dir, name))
                  for name in sorted(file_names)},
    }
    manifest_path = os.path.join(cfg.output_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


# canned reproductions; master seeds are arbitrary fixed constants

DIST_SEEDS = 200
DIST_N_MAX = 10_000
DIST_MASTER_SEED = 11
CIRCLING_N_MAX = 10_000_000
CIRCLING_MASTER_SEED = 7
CONTOUR_LEVELS = tuple((i + 1) / 10 for i in range(9))  # of 27*xyz


def experiment_fig_dist(out_dir: str, workers: int = 1,
                        seeds: Optional[int] = None,
                        n_max: Optional[int] = None) -> List[dict]:
    """Histogram data behind the limit-distribution figure: 200 runs to
    n = 10^4 from each of the K3 and K6 starts."""
    manifests = []
    for tag in ("k3", "k6"):
        cfg = ExperimentConfig(
            name=f"fig_dist_{tag}", model="rps", start=tag,
            n_max=n_max or DIST_N_MAX,
            seeds=tuple(range(seeds or DIST_SEEDS)),
            master_seed=DIST_MASTER_SEED,
            output_dir=os.path.join(out_dir, f"fig_dist_{tag}"))
        manifests.append(run_experiment(cfg, workers))
    return manifests


def experiment_fig_circling(out_dir: str, workers: int = 1,
                            n_max: Optional[int] = None) -> dict:
    """One long run whose share evolution against log n shows the circling."""
    cfg = ExperimentConfig(
        name="fig_circling", model="rps", start="k3",
        n_max=n_max or CIRCLING_N_MAX, seeds=(0,),
        master_seed=CIRCLING_MASTER_SEED,
        output_dir=os.path.join(out_dir, "fig_circling"))
    return run_experiment(cfg, workers)


CONTOUR_COLUMNS = ("ray_index", "x", "y", "z")
CONTOUR_SUMMARY_COLUMNS = ("M", "L_M", "T", "A")


def write_contours(out_dir: str, levels: Sequence[float] = CONTOUR_LEVELS,
                   resolution: int = 512) -> dict:
    """Level curves of 27*xyz at the given levels: one polyline CSV per
    level plus a summary CSV (M, arc length, period, circuit ratio)."""
    os.makedirs(out_dir, exist_ok=True)
    names = []
    summary_rows = []
    for level in levels:
        curve = level_curve(level / 27.0, resolution)
        name = f"contour_27M_{level:g}.csv"
        rows = [(i, p[0], p[1], p[2]) for i, p in enumerate(curve.points)]
        write_csv(os.path.join(out_dir, name), CONTOUR_COLUMNS, rows)
        names.append(name)
        summary_rows.append((curve.M, curve.arc_length, curve.period,
                             math.exp(curve.period)))
    write_csv(os.path.join(out_dir, "contours.csv"),
              CONTOUR_SUMMARY_COLUMNS, summary_rows)
    names.append("contours.csv")
    manifest = {
        "name": "contours",
        "code_version": __version__,
        "levels_27M": [float(v) for v in levels],
        "resolution": resolution,
        "files": {name: _sha256(os.path.join(out_dir, name))
                  for name in sorted(names)},
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def experiment_trajectories(out_dir: str) -> dict:
    """Contour data behind the constant-27xyz trajectories figure."""
    return write_contours(os.path.join(out_dir, "fig_trajectories"))


@dataclass(frozen=True)
class CheckRow:
    check_name: str
    instance: str
    lhs: float
    rhs: float
    abs_err: float
    ok: bool


@dataclass(frozen=True)
class CheckReport:
    suite: str
    rows: List[CheckRow]

    @property
    def passed(self) -> bool:
        return all(row.ok for row in self.rows)

    def csv_rows(self):
        return ((r.check_name, r.instance, r.lhs, r.rhs, r.abs_err)
                for r in self.rows)


CHECK_COLUMNS = ("check_name", "instance", "lhs", "rhs", "abs_err")
CHECK_SUITES = ("drift_identities", "affine", "field_conservation",
                "visible_type", "lemma_max")


def _check_drift_identities(alphas: Sequence[float], count: int,
                            seed: int) -> List[CheckRow]:
    rng = np.random.default_rng(seed)
    rule = make_rule("rps")
    rows = []
    for alpha in alphas:
        name = "mg" if alpha == 0.0 else "mg_affine"
        for _ in range(count):
            shares = rng.dirichlet((1.0, 1.0, 1.0))
            gamma = 10.0 ** rng.uniform(math.log10(6.0), 6.0)
            m_now = float(shares.prod())
            lhs = expected_M_next_enumerated(shares, gamma, rule, alpha=alpha)
            rhs = expected_M_next_affine(m_now, gamma, alpha)
            err = abs(lhs - rhs)
            rows.append(CheckRow(
                name, f"alpha={alpha:g},gamma={gamma:.6g}",
                lhs, rhs, err, err <= 1e-12))
    return rows


def check_suite(name: str) -> CheckReport:
    """Run one named invariant battery and return its row-level report."""
    if name == "drift_identities":
        rows = _check_drift_identities([0.0], count=1000, seed=20)
    elif name == "affine":
        rows = _check_drift_identities([-1.0, -0.5, 0.5, 1.0, 2.0],
                                       count=200, seed=21)
    elif name == "field_conservation":
        rng = np.random.default_rng(22)
        rows = []
        for i in range(20):
            p0 = rng.dirichlet((1.0, 1.0, 1.0))
            m0 = 27.0 * p0.prod()
            _, path = integrate(p0, 100.0, 0.01)
            drift = float(np.abs(27.0 * path.prod(axis=1) - m0).max())
            rows.append(CheckRow("conservation", f"start_{i}", m0 + drift,
                                 m0, drift, drift <= 1e-8))
        for i, p in enumerate(STATIONARY_POINTS):
            norm = float(field_norm(p))
            rows.append(CheckRow("stationary", f"point_{i}", norm, 0.0,
                                 norm, norm <= 1e-15))
        pts = rng.dirichlet((1.0, 1.0, 1.0), size=10_000)
        tangency = float(np.abs(field_eval(pts).sum(axis=1)).max())
        rows.append(CheckRow("tangency", "random_10000", tangency, 0.0,
                             tangency, tangency <= 1e-15))
    elif name == "visible_type":
        rows = []
        for n in (2, 3, 4, 5):
            for m in (3, 4, 5, 6):
                ys = np.arange(0.01, 1.0 / n - 0.01 + 1e-12, 0.005)
                worst = min(drift_f(float(y), n, m) for y in ys)
                rows.append(CheckRow("drift_positive", f"N={n},m={m}",
                                     worst, 0.0, max(0.0, -worst),
                                     worst > 0.0))
    elif name == "lemma_max":
        rows = []
        for n in (2, 3, 4):
            for m in (2, 3, 4):
                for k in (2, 3, 4):
                    rep = verify_uniform_max(n, m, k, 0.02)
                    if min(n, m) < k:
                        ok = rep.identically_zero
                    else:
                        ok = rep.uniform_strictly_max
                    rows.append(CheckRow(
                        "uniform_max", f"n={n},m={m},k={k}",
                        rep.uniform_value, rep.max_other, rep.margin, ok))
    else:
        raise ValueError(f"unknown check suite {name!r}; "
                         f"choose from {CHECK_SUITES}")
    return CheckReport(suite=name, rows=rows)


def write_check_report(report: CheckReport, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"check_{report.suite}.csv")
    write_csv(path, CHECK_COLUMNS, report.csv_rows())
    return path
