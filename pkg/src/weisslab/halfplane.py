"""Diagonal continuous-time system on L^2(mu) over the upper half-plane.

The generator multiplies by ``iz``, so the semigroup acts by ``e^{izt}`` and
the observation functional integrates against ``mu``. With atomic ``mu``
every quantity reduces to finite sums over atoms:

* resolvent norm ``||C R(lam, A)||^2 = sum_j w_j / |lam - i z_j|^2``;
* admissibility constant ``M^2 = lambda_max`` of the Laplace Gram matrix
  ``sqrt(w_j w_k) Gamma(1+alpha) (-i (z_j - conj z_k))^{-(1+alpha)}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .capacity import Grid1D
from .kernels import witness_sum
from .measures import AtomicMeasure


def _check_alpha(alpha, lo=-1.0, hi=1.0):
    if not lo < alpha < hi:
        raise ValueError(f"alpha must lie in ({lo}, {hi})")


class HalfPlaneSystem:
    """Normal operator ``A = iz`` and functional ``C = integration`` on ``L^2(mu)``.

    Parameters
    ----------
    measure : AtomicMeasure
        Half-plane measure. Zero-weight atoms are dropped.
    """

    def __init__(self, measure: AtomicMeasure):
        if measure.ambient != "halfplane":
            raise ValueError("HalfPlaneSystem needs a half-plane measure")
        keep = measure.weights > 0
        self.measure = measure
        self.z = measure.points[keep]
        self.w = measure.weights[keep]

    def __len__(self):
        return self.z.size

    def state_norm(self, x) -> float:
        x = np.asarray(x, dtype=complex)
        return float(np.sqrt(np.sum(self.w * np.abs(x) ** 2)))


def semigroup_apply(sys: HalfPlaneSystem, t: float, x):
    """``T(t) x`` coordinatewise: ``e^{i z_j t} x_j``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return np.exp(1j * sys.z * t) * np.asarray(x, dtype=complex)


def observe(sys: HalfPlaneSystem, x) -> complex:
    """``C x = sum_j w_j x_j``."""
    return complex(np.sum(sys.w * np.asarray(x, dtype=complex)))


def resolvent_functional_norm(sys: HalfPlaneSystem, lam):
    """``sqrt(sum_j w_j / |lam - i z_j|^2)`` for ``Re lam > 0`` (vectorised over ``lam``)."""
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam.real <= 0):
        raise ValueError("resolvent needs Re lambda > 0")
    flat = lam.ravel()
    out = np.empty(flat.size)
    step = max(1, (1 << 21) // max(1, sys.z.size))
    for s in range(0, flat.size, step):
        d = flat[s:s + step, None] - 1j * sys.z[None, :]
        out[s:s + step] = (1.0 / (d.real**2 + d.imag**2)) @ sys.w
    out = np.sqrt(out).reshape(lam.shape)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ResolventGrid:
    """Log-spaced ``Re lam`` times symmetric log-spaced ``Im lam`` (plus extra abscissae)."""

    re: np.ndarray
    im: np.ndarray

    @classmethod
    def default(cls, re_min=1e-4, re_max=1e4, n_re=161, im_min=1e-4, im_max=1e4, n_im=81,
                extra_im=None) -> "ResolventGrid":
        re = np.geomspace(re_min, re_max, n_re)
        pos = np.geomspace(im_min, im_max, n_im)
        im = np.concatenate([-pos[::-1], [0.0], pos])
        if extra_im is not None:
            im = np.concatenate([im, np.asarray(extra_im, dtype=float).ravel()])
        return cls(re, np.unique(im))

    def points(self) -> np.ndarray:
        return self.re[:, None] + 1j * self.im[None, :]


def resolvent_sup(sys: HalfPlaneSystem, alpha: float, grid: Optional[ResolventGrid] = None):
    """``max (Re lam)^((1-alpha)/2) ||C R(lam, A)||`` over the grid.

    Returns ``(value, attaining lambda)``. The default grid adds the atom
    abscissae to the imaginary axis, where ``|lam - i z|`` is smallest.
    """
    _check_alpha(alpha)
    if grid is None:
        grid = ResolventGrid.default(extra_im=np.unique(sys.z.real))
    lam = grid.points()
    if lam.size == 0:
        raise ValueError("empty resolvent grid")
    if len(sys) == 0:
        return 0.0, complex(lam.flat[0])
    vals = lam.real ** (0.5 * (1.0 - alpha)) * resolvent_functional_norm(sys, lam)
    k = int(np.argmax(vals))
    return float(vals.flat[k]), complex(lam.flat[k])


def admissibility_gram(sys: HalfPlaneSystem, alpha: float) -> np.ndarray:
    """Hermitian Gram matrix whose top eigenvalue is the squared admissibility constant."""
    _check_alpha(alpha)
    s = -1j * (sys.z[:, None] - np.conj(sys.z)[None, :])
    sw = np.sqrt(sys.w)
    return math.gamma(1.0 + alpha) * s ** (-(1.0 + alpha)) * sw[:, None] * sw[None, :]


def admissibility_constant(sys: HalfPlaneSystem, alpha: float) -> float:
    """Smallest ``M`` with ``int_0^inf t^alpha |C T(t) x|^2 dt <= M^2 ||x||^2``."""
    if len(sys) == 0:
        _check_alpha(alpha)
        return 0.0
    top = np.linalg.eigvalsh(admissibility_gram(sys, alpha))[-1]
    return float(np.sqrt(max(top, 0.0)))


# -- time quadrature ---------------------------------------------------------

@dataclass(frozen=True)
class LogTimeGrid:
    """Log-uniform nodes on ``[t_min, t_max]``; integrals use the substitution ``t = e^s``."""

    t_min: float = 1e-6
    t_max: float = 1e3
    points: int = 4096

    @property
    def t(self) -> np.ndarray:
        return np.geomspace(self.t_min, self.t_max, self.points)

    def weights(self, power: float = 0.0) -> np.ndarray:
        """Weights ``q`` with ``sum q f(t) ~ int_0^t_max t^power f(t) dt`` for ``power > -1``.

        Trapezoid in ``s = log t`` plus the piece ``[0, t_min]`` with ``f`` frozen at ``f(t_min)``.
        """
        if power <= -1:
            raise ValueError("power must exceed -1")
        t = self.t
        ds = math.log(self.t_max / self.t_min) / (self.points - 1)
        q = t ** (power + 1.0) * ds
        q[0] *= 0.5
        q[-1] *= 0.5
        q[0] += self.t_min ** (power + 1.0) / (power + 1.0)
        return q


def output_matrix(sys: HalfPlaneSystem, times) -> np.ndarray:
    """Rows ``t``, columns ``j``: ``sqrt(w_j) e^{i z_j t}`` (maps normalised states to outputs)."""
    return np.exp(1j * np.outer(times, sys.z)) * np.sqrt(sys.w)[None, :]


def quadrature_gram(sys: HalfPlaneSystem, alpha: float, tgrid: Optional[LogTimeGrid] = None):
    """Time-quadrature version of :func:`admissibility_gram`."""
    _check_alpha(alpha)
    tgrid = tgrid or LogTimeGrid()
    e = output_matrix(sys, tgrid.t)
    q = tgrid.weights(alpha)
    return (e.conj().T * q) @ e


def weighted_output_energy(sys: HalfPlaneSystem, alpha: float, x, tgrid: Optional[LogTimeGrid] = None):
    """Quadrature of ``int t^alpha |C T(t) x|^2 dt``."""
    tgrid = tgrid or LogTimeGrid()
    t = tgrid.t
    y = np.exp(1j * np.outer(t, sys.z)) @ (sys.w * np.asarray(x, dtype=complex))
    return float(tgrid.weights(alpha) @ np.abs(y) ** 2)


def quadrature_admissibility(sys: HalfPlaneSystem, alpha: float, tgrid: Optional[LogTimeGrid] = None,
                             iterations: int = 500, seed: int = 0, tol: float = 1e-12) -> float:
    """Brute-force admissibility constant: power iteration on the quadrature Gram matrix."""
    if len(sys) == 0:
        return 0.0
    g = quadrature_gram(sys, alpha, tgrid)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(len(sys)) + 1j * rng.standard_normal(len(sys))
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iterations):
        u = g @ v
        new = float(np.real(np.vdot(v, u)))
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        v = u / nu
        if abs(new - lam) <= tol * abs(new):
            lam = new
            break
        lam = new
    return float(np.sqrt(max(lam, 0.0)))


# -- weighted signals, Laplace embedding and the analytic witness -------------

@dataclass(frozen=True)
class WeightedSignal:
    """Samples ``values`` of ``w(t)`` on a log time grid; ``alpha`` fixes the norm ``L^2(t^{-alpha} dt)``."""

    tgrid: LogTimeGrid
    values: np.ndarray
    alpha: float = 0.0

    def norm(self) -> float:
        q = self.tgrid.weights(-self.alpha)
        return float(np.sqrt(q @ np.abs(self.values) ** 2))


def laplace_embedding_ratio(sys: HalfPlaneSystem, alpha: float, v: WeightedSignal) -> float:
    """``(int |int_0^inf e^{izt} t^{alpha/2} v(t) dt|^2 dmu)^{1/2} / ||v||_2``.

    Bounded by the admissibility constant whenever the latter is finite.
    """
    _check_alpha(alpha)
    nv = v.norm()
    if nv == 0:
        raise ValueError("zero signal")
    if len(sys) == 0:
        return 0.0
    q = v.tgrid.weights(0.5 * alpha)
    inner = np.exp(1j * np.outer(sys.z, v.tgrid.t)) @ (q * v.values)
    return float(np.sqrt(np.sum(sys.w * np.abs(inner) ** 2)) / nv)


def fourier_multiplier(beta: float) -> float:
    """``c`` with ``F(|x|^{beta-1})(t) = c |t|^{-beta}`` for ``F f(t) = int f(x) e^{-ixt} dx``."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    return 2.0 * math.gamma(beta) * math.cos(0.5 * math.pi * beta)


def cell_fourier(g, grid: Grid1D, t):
    """Fourier transform of the piecewise-constant density ``g`` at ``t != 0``."""
    t = np.asarray(t, dtype=float)
    e = grid.edges
    g = np.asarray(g, dtype=float)
    nz = np.nonzero(g)[0]
    out = np.zeros(t.shape, dtype=complex)
    step = max(1, (1 << 21) // max(1, nz.size))
    flat_t = t.ravel()
    flat = out.ravel()
    for s in range(0, flat_t.size, step):
        tt = flat_t[s:s + step, None]
        diff = np.exp(-1j * tt * e[nz][None, :]) - np.exp(-1j * tt * e[nz + 1][None, :])
        flat[s:s + step] = (diff @ g[nz]) / (1j * flat_t[s:s + step])
    return flat.reshape(t.shape)


def analytic_witness(g, grid: Grid1D, alpha: float, tgrid: Optional[LogTimeGrid] = None) -> WeightedSignal:
    """Signal ``w`` whose Laplace transform ``G`` has ``Re G`` = Poisson extension of ``I_beta * g``.

    Here ``beta = -alpha/2``; ``w(t) = (c_beta/pi) t^{-beta} (F g)(t)`` with
    ``c_beta`` from :func:`fourier_multiplier`.
    """
    _check_alpha(alpha, -1.0, 0.0)
    beta = -0.5 * alpha
    tgrid = tgrid or LogTimeGrid()
    t = tgrid.t
    vals = fourier_multiplier(beta) / math.pi * t ** (-beta) * cell_fourier(g, grid, t)
    return WeightedSignal(tgrid, vals, alpha)


def witness_value(g, grid: Grid1D, alpha: float, z):
    """Closed form of ``G(z) = int_0^inf e^{izt} w(t) dt`` for the witness of ``g`` (``Im z > 0``)."""
    _check_alpha(alpha, -1.0, 0.0)
    beta = -0.5 * alpha
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("witness is evaluated in the open upper half-plane")
    g = np.asarray(g, dtype=float)
    jumps = np.diff(np.concatenate([[0.0], g, [0.0]]))
    keep = jumps != 0
    const = fourier_multiplier(beta) * math.gamma(-beta) / (1j * math.pi)
    vals = const * witness_sum(z.ravel(), grid.edges[keep], jumps[keep], beta)
    vals = vals.reshape(z.shape)
    return vals if vals.ndim else complex(vals)


def witness_norm(g, grid: Grid1D, alpha: float) -> float:
    """Exact ``||w||_{L^2(t^{-alpha} dt)} = (c_beta/sqrt(pi)) ||g||_2`` by Plancherel."""
    _check_alpha(alpha, -1.0, 0.0)
    g = np.asarray(g, dtype=float)
    return fourier_multiplier(-0.5 * alpha) / math.sqrt(math.pi) * math.sqrt(grid.h * float(g @ g))


def witness_embedding_ratio(sys: HalfPlaneSystem, g, grid: Grid1D, alpha: float) -> float:
    """``(int |G|^2 dmu)^{1/2} / ||w||`` for the analytic witness of ``g``."""
    nrm = witness_norm(g, grid, alpha)
    if nrm == 0:
        raise ValueError("zero density")
    if len(sys) == 0:
        return 0.0
    vals = witness_value(g, grid, alpha, sys.z)
    return float(np.sqrt(np.sum(sys.w * np.abs(vals) ** 2)) / nrm)
