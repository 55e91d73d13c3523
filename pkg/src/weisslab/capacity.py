"""Riesz capacity on the line, Poisson extension and the box lower bound.

The capacity of an open set ``O`` is

    inf { ||g||_2^2 : g >= 0, (|x|^(beta-1) * g)(x) >= 1 on O }.

Densities are piecewise constant on a uniform grid and the kernel is
integrated exactly over each cell. With collocation at cell midpoints the
discrete kernel matrix is Toeplitz, so matrix-vector products use the FFT.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kernels import riesz_cell_matrix
from .measures import Interval, OpenSetUnion


def _check_beta(beta):
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")


def _antiderivative(u, beta):
    return np.sign(u) * np.abs(u) ** beta / beta


def riesz_kernel(beta, x):
    """``|x|**(beta - 1)``, with ``inf`` at the origin."""
    _check_beta(beta)
    x = np.abs(np.asarray(x, dtype=float))
    with np.errstate(divide="ignore"):
        out = np.where(x == 0, np.inf, x ** (beta - 1.0))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Grid1D:
    left: float
    right: float
    cells: int

    def __post_init__(self):
        if self.cells < 2:
            raise ValueError("grid needs at least 2 cells")
        if not self.right > self.left:
            raise ValueError("grid needs right > left")

    @property
    def h(self) -> float:
        return (self.right - self.left) / self.cells

    @property
    def edges(self) -> np.ndarray:
        return self.left + self.h * np.arange(self.cells + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.left + self.h * (np.arange(self.cells) + 0.5)


def kernel_convolve(g, beta, grid: Grid1D, x):
    """``sum_cells g_cell * int_cell |x - t|**(beta-1) dt`` at the points ``x``."""
    _check_beta(beta)
    g = np.asarray(g, dtype=float)
    if g.shape != (grid.cells,):
        raise ValueError("density has wrong length")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = riesz_cell_matrix(xs, grid.edges, beta) @ g
    return out if np.ndim(x) else float(out[0])


class ToeplitzKernel:
    """Midpoint-collocation Riesz matrix on a uniform grid, applied by FFT.

    ``matvec(g)[i] = sum_j g_j int_{cell j} |m_i - t|**(beta-1) dt`` where
    ``m_i`` is the midpoint of cell ``i``. The matrix is symmetric.
    """

    def __init__(self, grid: Grid1D, beta: float):
        _check_beta(beta)
        n = grid.cells
        h = grid.h
        d = np.arange(-(n - 1), n, dtype=float)
        k = _antiderivative((d + 0.5) * h, beta) - _antiderivative((d - 0.5) * h, beta)
        self.size = n
        self._fft_len = 2 * n
        col = np.concatenate([k[n - 1:], np.zeros(1), k[: n - 1]])
        self._kf = np.fft.rfft(col, self._fft_len)

    def matvec(self, g):
        y = np.fft.irfft(np.fft.rfft(g, self._fft_len) * self._kf, self._fft_len)
        return y[: self.size]

    def dense(self):
        eye = np.eye(self.size)
        return np.column_stack([self.matvec(e) for e in eye])


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 20000
    step: float = 1.0
    tol: float = 1e-4
    check_every: int = 25


@dataclass(frozen=True)
class CapacityProblem:
    beta: float
    target: OpenSetUnion
    grid: Grid1D
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        _check_beta(self.beta)
        for iv in self.target.intervals:
            if iv.left < self.grid.left or iv.right > self.grid.right:
                raise ValueError("target must lie inside the grid")

    def constraint_cells(self) -> np.ndarray:
        return np.nonzero(self.target.contains(self.grid.midpoints))[0]

    def to_config(self) -> str:
        target = ";".join(f"{iv.left!r}:{iv.right!r}" for iv in self.target.intervals)
        rows = [
            ("beta", repr(float(self.beta))),
            ("target", target),
            ("grid.left", repr(float(self.grid.left))),
            ("grid.right", repr(float(self.grid.right))),
            ("grid.cells", str(self.grid.cells)),
            ("solver.max_iter", str(self.solver.max_iter)),
            ("solver.step", repr(float(self.solver.step))),
            ("solver.tol", repr(float(self.solver.tol))),
        ]
        return "".join(f"{k} = {v}\n" for k, v in rows)

    @classmethod
    def from_config(cls, text: str) -> "CapacityProblem":
        kv = parse_key_values(text)
        required = ("beta", "target", "grid.left", "grid.right", "grid.cells")
        missing = [k for k in required if k not in kv]
        if missing:
            raise ValueError(f"missing keys: {', '.join(missing)}")
        unknown = set(kv) - set(required) - {"solver.max_iter", "solver.step", "solver.tol"}
        if unknown:
            raise ValueError(f"unknown keys: {', '.join(sorted(unknown))}")
        defaults = SolverOptions()
        solver = SolverOptions(
            max_iter=int(kv.get("solver.max_iter", defaults.max_iter)),
            step=float(kv.get("solver.step", defaults.step)),
            tol=float(kv.get("solver.tol", defaults.tol)),
        )
        return cls(
            beta=float(kv["beta"]),
            target=parse_target(kv["target"]),
            grid=Grid1D(float(kv["grid.left"]), float(kv["grid.right"]), int(kv["grid.cells"])),
            solver=solver,
        )


def parse_key_values(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def parse_target(spec: str) -> OpenSetUnion:
    """``"a:b;c:d"`` -> union of open intervals (empty string -> empty set)."""
    spec = spec.strip()
    if not spec:
        return OpenSetUnion(())
    pairs = []
    for part in spec.split(";"):
        a, b = part.split(":")
        pairs.append((float(a), float(b)))
    return OpenSetUnion.from_pairs(pairs)


@dataclass
class CapacityResult:
    value: float
    density: np.ndarray
    residual: float
    iterations: int
    gap: float
    converged: bool
    dual_value: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {"value": self.value, "residual": self.residual, "iterations": self.iterations}
        )


def _power_norm(op, adj, size, iters=60, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.random(size) + 0.5
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(iters):
        w = op(adj(v))
        s = np.linalg.norm(w)
        if s == 0:
            return 0.0
        v = w / s
    return s


def capacity_upper(p: CapacityProblem, warm: Optional[np.ndarray] = None) -> CapacityResult:
    """Upper estimate of the capacity of ``p.target`` on ``p.grid``.

    Minimises ``h * sum(g**2)`` over ``g >= 0`` subject to the collocated
    constraints ``(K g)_q >= 1``. The iteration runs projected accelerated
    gradient ascent on the Lagrange multipliers ``lam >= 0`` (one per active
    constraint); the primal density is recovered as ``g = max(K^T lam, 0)/h``
    which is the projection onto the nonnegative orthant. At every check
    point ``g`` is rescaled to be exactly feasible, giving a certified
    discrete upper bound; the loop stops once the primal/dual gap falls below
    ``p.solver.tol``. ``warm`` optionally seeds the multipliers.
    """
    grid = p.grid
    h = grid.h
    idx = p.constraint_cells()
    zeros = np.zeros(grid.cells)
    if idx.size == 0:
        return CapacityResult(0.0, zeros, 0.0, 0, 0.0, True)

    kern = ToeplitzKernel(grid, p.beta)

    def forward(g):
        return kern.matvec(g)[idx]

    def adjoint(lam):
        full = np.zeros(grid.cells)
        full[idx] = lam
        return kern.matvec(full)

    # feasibility push: the uniform density scaled until every constraint holds
    ones = np.ones(grid.cells)
    best_g = ones / forward(ones).min()
    best = h * float(best_g @ best_g)
    best_dual = 0.0

    lip = _power_norm(forward, adjoint, idx.size) / h
    step = p.solver.step / lip
    lam = np.zeros(idx.size) if warm is None else np.maximum(np.asarray(warm, float), 0)
    y = lam.copy()
    t = 1.0
    gap = np.inf
    it = 0
    opts = p.solver

    def dual_of(m):
        g = np.maximum(adjoint(m), 0.0) / h
        return float(m.sum() - 0.5 * h * (g @ g)), g

    for it in range(1, opts.max_iter + 1):
        dy, gy = dual_of(y)
        grad = 1.0 - forward(gy)
        # backtracking: shrink the step until the quadratic model bounds the dual from below
        while True:
            cand = np.maximum(y + step * grad, 0.0)
            dc, _ = dual_of(cand)
            diff = cand - y
            if dc >= dy + grad @ diff - 0.5 / step * (diff @ diff) - 1e-14 * abs(dy):
                break
            step *= 0.5
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        if (cand - lam) @ (y - cand) > 0:  # adaptive restart
            t_new = 1.0
            y = cand.copy()
        else:
            y = cand + (t - 1.0) / t_new * (cand - lam)
        lam, t = cand, t_new

        if it % opts.check_every == 0 or it == opts.max_iter:
            dual, g = dual_of(lam)
            best_dual = max(best_dual, dual)
            c = forward(g)
            mn = c.min()
            if mn > 0:
                gs = g / mn
                primal = h * float(gs @ gs)
                if primal < best:
                    best, best_g = primal, gs
            gap = (best - 2.0 * best_dual) / best
            if gap < opts.tol:
                break

    resid = max(0.0, 1.0 - float(forward(best_g).min()))
    return CapacityResult(
        value=best,
        density=best_g,
        residual=resid,
        iterations=it,
        gap=float(gap),
        converged=bool(gap < opts.tol),
        dual_value=2.0 * best_dual,
    )


def capacity_of(target, beta, grid: Grid1D, tol=1e-4, max_iter=20000) -> CapacityResult:
    """Shortcut for :func:`capacity_upper` with default solver settings."""
    if not isinstance(target, OpenSetUnion):
        target = OpenSetUnion.from_pairs(target)
    return capacity_upper(CapacityProblem(beta, target, grid, SolverOptions(max_iter=max_iter, tol=tol)))


def poisson_extension(f, grid: Grid1D, x, y):
    """Poisson integral of the piecewise-constant ``f`` at ``x + iy``, cell by cell in closed form."""
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    xb, yb = np.broadcast_arrays(x, y)
    e = grid.edges
    u = (xb[..., None] - e) / yb[..., None]
    at = np.arctan(u)
    out = ((at[..., :-1] - at[..., 1:]) @ f) / np.pi
    return out if out.ndim else float(out)


def interval_poisson(interval: Interval, x, y):
    """Poisson extension of the indicator of ``interval``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (np.arctan((x - interval.left) / y) - np.arctan((x - interval.right) / y)) / np.pi


def indicator_box_lower_bound(interval: Interval, samples: int = 32) -> float:
    """Minimum of the Poisson extension of the indicator of ``I`` over a lattice of its box.

    The lattice includes the closure of the box (top corners are where the
    minimum ``arctan(2)/pi`` sits).
    """
    if samples < 4:
        raise ValueError("samples must be >= 4")
    ell = interval.length
    xs = np.linspace(interval.left, interval.right, samples)
    ys = np.linspace(0.5 * ell / samples, 0.5 * ell, samples)
    X, Y = np.meshgrid(xs, ys)
    return float(interval_poisson(interval, X, Y).min())
