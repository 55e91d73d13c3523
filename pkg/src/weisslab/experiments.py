"""Experiment definitions, configuration handling and report emission."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy

from . import __version__
from .capacity import CapacityProblem, Grid1D, SolverOptions, capacity_upper, parse_key_values
from .kernels import BACKEND
from .measures import (
    Interval,
    OpenSetUnion,
    cantor_cover,
    cantor_measure,
    critical_ratio,
    measure_of,
    one_box_constant,
    stacked_cantor,
)


class ConfigError(ValueError):
    """Invalid experiment configuration (exit status 2)."""


EXIT_PASS, EXIT_ASSERT, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2, 3


# -- parameter parsing -------------------------------------------------------

def _float_list(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _int_list(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def _opt_float(text):
    return None if str(text).strip().lower() in ("", "none", "auto") else float(text)


PARAMS: dict[str, dict[str, tuple[Callable, object]]] = {
    "capacity-scaling": {
        "alpha": (_opt_float, None),
        "betas": (_float_list, "0.25,0.3"),
        "lengths": (_float_list, "0.25,0.5,1"),
        "cells": (int, 4096),
        "layout": (str, "matched"),
        "tol": (float, 1e-4),
        "max_iter": (int, 20000),
        "rel_tol": (float, 0.15),
    },
    "onebox": {
        "alpha": (_opt_float, None),
        "ratio": (float, 0.25),
        "levels": (_int_list, "6,8,10"),
        "ambient": (str, "line"),
        "factor": (float, 2.0),
    },
    "halfplane-counterexample": {
        "alpha": (float, -0.5),
        "ratio": (_opt_float, None),
        "base_levels": (int, 8),
        "stacks": (int, 12),
        "levels": (_int_list, "2,3,4,5,6"),
        "cells": (int, 16384),
        "grid_left": (float, -0.5),
        "grid_right": (float, 1.5),
        "tol": (float, 1e-4),
        "max_iter": (int, 20000),
        "growth": (float, 3.0),
        "band": (float, 2.0),
    },
    "disk-counterexample": {
        "alpha": (float, -0.5),
        "ratio": (_opt_float, None),
        "levels": (_int_list, "4,6,8"),
        "degree": (int, 2048),
        "random_polys": (int, 16),
        "omega_depth": (int, 12),
        "omega_angles": (int, 64),
        "band": (float, 2.0),
    },
    "shift-counterexample": {
        "alpha": (float, 0.5),
        "ks": (_int_list, "4,8,16"),
        "N": (int, 8192),
        "omega_depth": (int, 10),
        "omega_angles": (int, 64),
        "iterations": (int, 300),
        "hankel_growth": (float, 1.5),
        "stable_tol": (float, 0.10),
        "beta_tol": (float, 0.15),
    },
    "verify": {
        "alpha": (_opt_float, None),
    },
}

ALPHA_RANGE = {
    "capacity-scaling": (-2.0, 0.0),
    "onebox": (-1.0, 1.0),
    "halfplane-counterexample": (-1.0, 0.0),
    "disk-counterexample": (-1.0, 0.0),
    "shift-counterexample": (0.0, 1.0),
    "verify": (-math.inf, math.inf),
}

EXPERIMENTS = tuple(PARAMS)


@dataclass
class ExperimentConfig:
    name: str
    params: dict
    seed: int = 0
    out: str = ""

    def echo(self) -> dict:
        return {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in self.params.items()}


def build_config(name: str, file_text: str | None = None, flags: dict | None = None) -> ExperimentConfig:
    """Merge defaults, command-line flags and a key-value config file (file wins)."""
    if name not in PARAMS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    spec = PARAMS[name]
    raw: dict = {k: d for k, (_, d) in spec.items()}
    seed, out = 0, f"{name}.csv"
    layers = [flags or {}]
    if file_text is not None:
        try:
            layers.append(parse_key_values(file_text))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    for layer in layers:
        for key, val in layer.items():
            if val is None:
                continue
            if key == "seed":
                seed = val
            elif key == "out":
                out = str(val)
            elif key in spec:
                raw[key] = val
            else:
                raise ConfigError(f"unknown parameter {key!r} for {name}")
    params = {}
    for key, (conv, _) in spec.items():
        val = raw[key]
        try:
            params[key] = val if (val is None or not isinstance(val, str)) else conv(val)
        except ValueError:
            raise ConfigError(f"bad value for {key}: {val!r}") from None
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an integer, got {seed!r}") from None
    if seed < 0:
        raise ConfigError("seed must be nonnegative")
    cfg = ExperimentConfig(name, params, seed, out)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig):
    p = cfg.params
    alpha = p.get("alpha")
    lo, hi = ALPHA_RANGE[cfg.name]
    if alpha is not None and not (lo < alpha < hi):
        raise ConfigError(f"alpha={alpha} outside ({lo}, {hi}) for {cfg.name}")
    for key in ("levels", "ks", "lengths", "betas"):
        if key in p and not p[key]:
            raise ConfigError(f"{key} must not be empty")
    for key in ("levels", "ks"):
        vals = p.get(key)
        if vals and any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigError(f"{key} must be strictly increasing")
        if vals and min(vals) < 1:
            raise ConfigError(f"{key} must be positive")
    for key in ("cells", "degree", "N", "iterations", "max_iter", "base_levels", "stacks"):
        if key in p and p[key] < 1:
            raise ConfigError(f"{key} must be positive")
    if "betas" in p and any(not 0 < b < 1 for b in p["betas"]):
        raise ConfigError("betas must lie in (0, 1)")
    if "lengths" in p and any(v <= 0 for v in p["lengths"]):
        raise ConfigError("lengths must be positive")
    if p.get("ratio") is not None and not 0 < p["ratio"] < 0.5:
        raise ConfigError("ratio must lie in (0, 1/2)")
    if cfg.name == "capacity-scaling" and p["layout"] not in ("matched", "fixed"):
        raise ConfigError("layout must be 'matched' or 'fixed'")
    if cfg.name == "onebox" and p["ambient"] not in ("line", "circle"):
        raise ConfigError("ambient must be 'line' or 'circle'")
    if cfg.name == "halfplane-counterexample" and not (p["grid_left"] < -0.01 and p["grid_right"] > 1.01):
        raise ConfigError("capacity grid must contain [-0.01, 1.01] (the widened Cantor covers)")
    if cfg.name == "shift-counterexample" and p["iterations"] < 50:
        raise ConfigError("iterations must be >= 50")


def thread_count() -> int:
    """Parallelism cap from ``WEISSLAB_THREADS`` (default 1)."""
    raw = os.environ.get("WEISSLAB_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"WEISSLAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"WEISSLAB_THREADS must be a positive integer, got {raw!r}")
    return n


def _sweep(func, points, threads):
    """Evaluate ``func`` on each sweep point; results come back in input order."""
    if threads <= 1 or len(points) <= 1:
        return [func(p) for p in points]
    with ThreadPoolExecutor(max_workers=min(threads, len(points))) as pool:
        return list(pool.map(func, points))


# -- reports -----------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ExperimentReport:
    name: str
    columns: tuple
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    converged: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        if not self.converged:
            return EXIT_NONCONVERGED
        return EXIT_PASS if self.passed else EXIT_ASSERT

    def column(self, name):
        return [r[name] for r in self.rows]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def emit(report: ExperimentReport, fmt: str = "csv") -> bytes:
    """Serialise ``report``: CSV with 17-digit floats, or JSON rows as objects."""
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(",".join(report.columns) + "\n")
        for row in report.rows:
            buf.write(",".join(_fmt(row[c]) for c in report.columns) + "\n")
        return buf.getvalue().encode("ascii")
    if fmt == "json":
        doc = dict(report.metadata)
        doc["experiment"] = report.name
        doc["columns"] = list(report.columns)
        doc["rows"] = [{c: _jsonable(r[c]) for c in report.columns} for r in report.rows]
        doc["checks"] = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks]
        doc["converged"] = report.converged
        doc["exit_code"] = report.exit_code
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def _jsonable(v):
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def parse_csv(data: bytes):
    """Inverse of the CSV emitter: ``(columns, rows)`` with numeric fields converted."""
    reader = csv.reader(io.StringIO(data.decode("ascii")))
    header = next(reader)
    rows = []
    for rec in reader:
        row = {}
        for key, val in zip(header, rec):
            try:
                row[key] = int(val)
            except ValueError:
                try:
                    row[key] = float(val)
                except ValueError:
                    row[key] = val
        rows.append(row)
    return header, rows


def write_outputs(report: ExperimentReport, out: str):
    """Write ``out`` (CSV) and its JSON sidecar next to it."""
    base, _ = os.path.splitext(out)
    side = base + ".json"
    for path, payload in ((out, emit(report, "csv")), (side, emit(report, "json"))):
        try:
            parent = os.path.dirname(os.path.abspath(path))
            os.makedirs(parent, exist_ok=True)
            with open(path, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return out, side


def _rel_change(a, b):
    return abs(b - a) / abs(a) if a else math.inf


def _within_band(values, band):
    v = np.asarray(values, dtype=float)
    return bool(v.min() > 0 and v.max() / v.min() < band)


# -- experiments -------------------------------------------------------------

def run_capacity_scaling(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    p = cfg.params
    betas = [-0.5 * p["alpha"]] if p["alpha"] is not None else p["betas"]
    rep = ExperimentReport("capacity-scaling", ("beta", "length", "capacity", "normalized", "gap", "residual", "iterations"))
    points = [(b, ell) for b in betas for ell in p["lengths"]]

    def one(pt):
        beta, ell = pt
        if p["layout"] == "matched":
            grid = Grid1D(-ell, 2.0 * ell, p["cells"])
        else:
            top = max(p["lengths"])
            grid = Grid1D(-top, 2.0 * top, p["cells"])
        prob = CapacityProblem(beta, OpenSetUnion((Interval(0.0, ell),)), grid,
                               SolverOptions(max_iter=p["max_iter"], tol=p["tol"]))
        return pt, capacity_upper(prob)

    for (beta, ell), res in sorted(_sweep(one, points, threads)):
        rep.converged &= res.converged
        rep.rows.append({
            "beta": beta, "length": ell, "capacity": res.value,
            "normalized": res.value / ell ** (1.0 - 2.0 * beta),
            "gap": res.gap, "residual": res.residual, "iterations": res.iterations,
        })
    for beta in betas:
        vals = [r["normalized"] for r in rep.rows if r["beta"] == beta]
        spread = max(vals) / min(vals) - 1.0
        rep.checks.append(Check(f"homogeneity beta={beta:g}", spread <= p["rel_tol"], f"spread={spread:.4g}"))
    return rep


def run_onebox(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    p = cfg.params
    r = p["ratio"]
    exponent = 1.0 + p["alpha"] if p["alpha"] is not None else math.log(2) / math.log(1 / r)
    rep = ExperimentReport("onebox", ("level", "exponent", "depth", "one_box_constant"))

    def one(level):
        mu = cantor_measure(r, level, p["ambient"])
        depth = int(math.ceil(level * math.log2(1.0 / r)))
        return level, depth, one_box_constant(mu, exponent, depth)

    for level, depth, val in _sweep(one, p["levels"], threads):
        rep.rows.append({"level": level, "exponent": exponent, "depth": depth, "one_box_constant": val})
    vals = rep.column("one_box_constant")
    rep.checks.append(Check("within factor 2 of first level", _within_band(vals, p["factor"] + 1e-12),
                            f"max/min={max(vals) / min(vals):.4g}" if min(vals) > 0 else "zero"))
    return rep


HALFPLANE_COLUMNS = ("n", "box_constant", "resolvent_sup", "capacity", "mass_ratio", "embedding_ratio")


def run_halfplane(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    from .halfplane import HalfPlaneSystem, ResolventGrid, resolvent_sup, witness_embedding_ratio

    p = cfg.params
    alpha = p["alpha"]
    beta = -0.5 * alpha
    r = p["ratio"] if p["ratio"] is not None else critical_ratio(1.0 + alpha)
    mu = stacked_cantor(r, p["base_levels"], p["stacks"], "halfplane")
    sys = HalfPlaneSystem(mu)
    grid = Grid1D(p["grid_left"], p["grid_right"], p["cells"])
    xs = np.unique(sys.z.real)
    rep = ExperimentReport("halfplane-counterexample", HALFPLANE_COLUMNS)

    def one(n):
        cover = cantor_cover(r, n)
        prob = CapacityProblem(beta, cover, grid, SolverOptions(max_iter=p["max_iter"], tol=p["tol"]))
        cap = capacity_upper(prob)
        mass = measure_of(mu, cover.region())
        # box and resolvent scans resolve the scale of the level-n cells
        depth = int(math.ceil(n * math.log2(1.0 / r))) + 2
        box = one_box_constant(mu, 1.0 + alpha, depth)
        rgrid = ResolventGrid.default(re_min=r**n / 8.0, extra_im=xs)
        res, _ = resolvent_sup(sys, alpha, rgrid)
        emb = witness_embedding_ratio(sys, cap.density, grid, alpha)
        return n, cap, {"n": n, "box_constant": box, "resolvent_sup": res, "capacity": cap.value,
                        "mass_ratio": mass / cap.value, "embedding_ratio": emb}

    for n, cap, row in _sweep(one, p["levels"], threads):
        rep.converged &= cap.converged
        rep.rows.append(row)
    ratios = rep.column("mass_ratio")
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    rep.checks.append(Check("mass_ratio strictly increasing", increasing, _series(ratios)))
    growth = ratios[-1] / ratios[0]
    rep.checks.append(Check(f"mass_ratio growth >= {p['growth']:g}", growth >= p["growth"], f"growth={growth:.4g}"))
    for col in ("box_constant", "resolvent_sup"):
        vals = rep.column(col)
        rep.checks.append(Check(f"{col} within factor {p['band']:g}", _within_band(vals, p["band"]), _series(vals)))
    rep.metadata["ratio"] = r
    return rep


DISK_COLUMNS = ("level", "box_constant", "resolvent_sup", "admissibility_constant_N", "embedding_sup")


def disk_test_family(sys, alpha, degree, random_polys, rng, levels_by_stack):
    """Extremal polynomial, reproducing-kernel sums over each stack, and random polynomials."""
    from .disk import discrete_admissibility, extremal_polynomial
    from .spaces import TaylorCoefficients

    m_n, h = discrete_admissibility(sys, alpha, degree)
    family = [extremal_polynomial(h, alpha)]
    n = np.arange(degree + 1)
    kern = (1.0 + n) ** alpha
    for stack in levels_by_stack:
        # sum of weighted reproducing kernels of D_{-alpha} at the atoms of one stack
        zs, ws = sys.z[stack], sys.w[stack]
        coef = kern * (ws[None, :] * np.conj(zs)[None, :] ** n[:, None]).sum(axis=1)
        family.append(TaylorCoefficients(coef))
    for _ in range(random_polys):
        deg = int(rng.integers(1, 65))
        family.append(TaylorCoefficients(rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)))
    return m_n, family


def run_disk(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    from .disk import DiskSystem, default_omega_grid, disk_embedding_ratio, disk_resolvent_sup

    p = cfg.params
    alpha = p["alpha"]
    r = p["ratio"] if p["ratio"] is not None else critical_ratio(1.0 + alpha)
    rep = ExperimentReport("disk-counterexample", DISK_COLUMNS)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(p["levels"]))

    def one(args):
        level, ss = args
        mu = stacked_cantor(r, level, level, "disk")
        sys = DiskSystem(mu)
        box = one_box_constant(mu, 1.0 + alpha, int(math.ceil(level * math.log2(1.0 / r))))
        res, _ = disk_resolvent_sup(sys, alpha, default_omega_grid(sys, p["omega_depth"], p["omega_angles"]))
        per = 2**level
        stacks = [np.arange(m * per, (m + 1) * per) for m in range(level)]
        m_n, family = disk_test_family(sys, alpha, p["degree"], p["random_polys"], np.random.default_rng(ss), stacks)
        emb = max(disk_embedding_ratio(sys, f, alpha) for f in family)
        return {"level": level, "box_constant": box, "resolvent_sup": res,
                "admissibility_constant_N": m_n, "embedding_sup": emb}

    rep.rows.extend(_sweep(one, list(zip(p["levels"], seeds)), threads))
    emb = rep.column("embedding_sup")
    rep.checks.append(Check("embedding_sup increasing", all(b > a for a, b in zip(emb, emb[1:])), _series(emb)))
    res = rep.column("resolvent_sup")
    rep.checks.append(Check(f"resolvent_sup within factor {p['band']:g}", _within_band(res, p["band"]), _series(res)))
    rep.metadata["ratio"] = r
    return rep


def run_shift(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    from .shift import SHIFT_COLUMNS, DiskOmegaGrid, shift_row

    p = cfg.params
    grid = DiskOmegaGrid(p["omega_depth"], p["omega_angles"])
    rep = ExperimentReport("shift-counterexample", SHIFT_COLUMNS)

    def one(K):
        return shift_row(p["alpha"], K, p["N"], omega_grid=grid, iterations=p["iterations"], seed=cfg.seed)

    rep.rows.extend(_sweep(one, p["ks"], threads))
    ks = p["ks"]
    ha = rep.column("hankel_alpha")
    rep.checks.append(Check("hankel_alpha increasing", all(b > a for a, b in zip(ha, ha[1:])), _series(ha)))
    rep.checks.append(Check(f"hankel_alpha last/first >= {p['hankel_growth']:g}", ha[-1] / ha[0] >= p["hankel_growth"],
                            f"ratio={ha[-1] / ha[0]:.4g}"))
    if len(ks) >= 2:
        for col, tol in (("resolvent_sup", p["stable_tol"]), ("bloch", p["stable_tol"]),
                         ("hankel_beta_half", p["beta_tol"])):
            vals = rep.column(col)
            ch = _rel_change(vals[-2], vals[-1])
            rep.checks.append(Check(f"{col} change K={ks[-2]}->{ks[-1]} < {tol:g}", ch < tol, f"change={ch:.4g}"))
    return rep


def run_verify(cfg: ExperimentConfig, threads: int) -> ExperimentReport:
    from .verify import oracle_suite

    rep = ExperimentReport("verify", ("check", "error", "tolerance", "passed"))
    for name, err, tol in oracle_suite(cfg.seed):
        ok = bool(err <= tol)
        rep.rows.append({"check": name, "error": float(err), "tolerance": float(tol), "passed": ok})
        rep.checks.append(Check(name, ok, f"error={err:.3g} tol={tol:.3g}"))
    return rep


RUNNERS = {
    "capacity-scaling": run_capacity_scaling,
    "onebox": run_onebox,
    "halfplane-counterexample": run_halfplane,
    "disk-counterexample": run_disk,
    "shift-counterexample": run_shift,
    "verify": run_verify,
}


def _series(vals):
    return " ".join(f"{v:.5g}" for v in vals)


def run(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentReport:
    """Run one experiment; the report carries rows, checks and metadata."""
    threads = thread_count() if threads is None else threads
    t0 = time.perf_counter()
    rep = RUNNERS[cfg.name](cfg, threads)
    rep.metadata.update({
        "config": cfg.echo(),
        "seed": cfg.seed,
        "versions": {
            "weisslab": __version__,
            "backend": BACKEND,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "threads": threads,
        "wall_time": time.perf_counter() - t0,
    })
    return rep


__all__ = [
    "ConfigError",
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentReport",
    "build_config",
    "emit",
    "parse_csv",
    "run",
    "thread_count",
    "write_outputs",
]
