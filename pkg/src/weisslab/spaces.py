"""Analytic function spaces on the unit disk at the level of Taylor coefficients.

Norms that are defined by coefficients (weighted Dirichlet norms, fractional
derivatives) are exact. Area-integral seminorms (Bloch, F(2,q,1), weighted
area norms) use a :class:`DiskGrid` of annular-sector cells whose radial
layers accumulate geometrically at the circle.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import beta as beta_fn, betainc

from .kernels import green_potential

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TaylorCoefficients:
    """Polynomial ``sum_{n<=N} f_n z^n``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).ravel()
        if c.size == 0:
            c = np.zeros(1, complex)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def support(self) -> np.ndarray:
        return np.nonzero(self.coeffs)[0]

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self.coeffs.size), complex)
        out[: self.coeffs.size] = self.coeffs
        return out

    def __call__(self, z):
        """Evaluate at ``z`` (sparse sum for lacunary data, Horner otherwise)."""
        z = np.asarray(z, dtype=complex)
        idx = self.support()
        if idx.size == 0:
            return np.zeros(z.shape, complex) if z.ndim else 0j
        if idx.size * 8 < self.coeffs.size:
            flat = z.ravel()
            out = np.zeros(flat.size, complex)
            step = max(1, (1 << 20) // idx.size)
            for s in range(0, flat.size, step):
                out[s:s + step] = (flat[s:s + step, None] ** idx[None, :]) @ self.coeffs[idx]
            out = out.reshape(z.shape)
        else:
            out = np.zeros(z.shape, complex)
            for c in self.coeffs[: idx[-1] + 1][::-1]:
                out = out * z + c
        return out if out.ndim else complex(out)

    def derivative(self) -> "TaylorCoefficients":
        n = np.arange(1, self.coeffs.size)
        return TaylorCoefficients(n * self.coeffs[1:] if n.size else np.zeros(1))

    def rotated(self, angle: float) -> "TaylorCoefficients":
        """Coefficients of ``f(e^{-i angle} z)``, i.e. the graph rotated by ``angle``."""
        n = np.arange(self.coeffs.size)
        return TaylorCoefficients(self.coeffs * np.exp(-1j * angle * n))

    def to_json(self) -> str:
        pairs = [[float(c.real), float(c.imag)] for c in self.coeffs]
        return json.dumps({"truncation": self.truncation, "coefficients": pairs})

    @classmethod
    def from_json(cls, text: str) -> "TaylorCoefficients":
        data = json.loads(text)
        arr = np.array(data["coefficients"], dtype=float).reshape(-1, 2)
        if arr.shape[0] != int(data["truncation"]) + 1:
            raise ValueError("truncation does not match the number of coefficients")
        return cls(arr[:, 0] + 1j * arr[:, 1])


def dirichlet_norm(f: TaylorCoefficients, alpha: float) -> float:
    """``sqrt(sum (1+n)^alpha |f_n|^2)``."""
    n = np.arange(len(f))
    return float(np.sqrt(np.sum((1.0 + n) ** alpha * np.abs(f.coeffs) ** 2)))


def fractional_derivative(f: TaylorCoefficients, beta: float) -> TaylorCoefficients:
    """``I_beta f`` with coefficients ``(1+n)^beta f_n``."""
    n = np.arange(len(f))
    return TaylorCoefficients((1.0 + n) ** beta * f.coeffs)


class DiskGrid:
    """Annular-sector cells covering the unit disk.

    Radial edges: ``inner`` uniform layers on ``[0, 1/2]``, then
    ``1 - 2^{-j/sub}`` for ``j = sub .. depth*sub``, and a last cell up to 1.
    Angles: ``angles`` uniform cells centred at ``2 pi k / angles``.
    Nodes sit at the equal-area radius of each cell, so ``areas`` sum to pi.
    """

    def __init__(self, depth: int = 12, angles: int = 256, sub: int = 4, inner: int = 8):
        if depth < 1 or angles < 1 or sub < 1 or inner < 1:
            raise ValueError("grid sizes must be positive")
        self.depth = depth
        self.sub = sub
        outer = 1.0 - 2.0 ** (-np.arange(sub, depth * sub + 1) / sub)
        edges = np.concatenate([np.linspace(0.0, 0.5, inner + 1)[:-1], outer, [1.0]])
        self.edges = edges
        r2 = edges**2
        self.radii = np.sqrt(0.5 * (r2[:-1] + r2[1:]))
        self.theta = TWO_PI * np.arange(angles) / angles
        self.dtheta = TWO_PI / angles
        ring_area = 0.5 * (r2[1:] - r2[:-1]) * self.dtheta
        self.nodes = (self.radii[:, None] * np.exp(1j * self.theta)[None, :]).ravel()
        self.areas = np.repeat(ring_area, angles)
        self.cell_radius = np.sqrt(self.areas / np.pi)

    @property
    def shape(self):
        return self.radii.size, self.theta.size

    def weighted(self, power: float) -> np.ndarray:
        """Exact per-cell integrals of ``(1 - |z|^2)^power dA`` (``power > -1``)."""
        if power <= -1:
            raise ValueError("power must exceed -1")
        u = 1.0 - self.edges**2
        ring = 0.5 * (u[:-1] ** (power + 1) - u[1:] ** (power + 1)) / (power + 1) * self.dtheta
        return np.repeat(ring, self.theta.size)

    def sup_points(self) -> np.ndarray:
        """Nodes plus the origin (where weights ``(1-|z|^2)^delta`` peak)."""
        return np.concatenate([[0j], self.nodes])


def area_dirichlet_norm(f: TaylorCoefficients, beta: float, grid: DiskGrid) -> float:
    """``sqrt(int |f|^2 (1-|z|^2)^{-(1+beta)} dA)`` for ``beta < 0`` by cell quadrature."""
    if beta >= 0:
        raise ValueError("beta must be negative")
    vals = f(grid.nodes)
    return float(np.sqrt(grid.weighted(-(1.0 + beta)) @ np.abs(vals) ** 2))


def monomial_area_integral(n: int, beta: float) -> float:
    """Closed form of ``int |z^n|^2 (1-|z|^2)^{-(1+beta)} dA = pi B(n+1, -beta)``."""
    return float(np.pi * beta_fn(n + 1.0, -beta))


def bloch_seminorm(f: TaylorCoefficients, delta: float, grid: DiskGrid) -> float:
    """``max |f'(z)| (1-|z|^2)^delta`` over the grid nodes and the origin."""
    if delta <= 1:
        raise ValueError("delta must exceed 1")
    pts = grid.sup_points()
    d = f.derivative()
    vals = np.abs(d(pts)) * (1.0 - np.abs(pts) ** 2) ** delta
    return float(vals.max())


def green_function(z, a):
    """``g(z, a) = -log |(a - z)/(1 - conj(a) z)|``."""
    z = np.asarray(z, dtype=complex)
    a = np.asarray(a, dtype=complex)
    return -np.log(np.abs(a - z)) + np.log(np.abs(1.0 - np.conj(a) * z))


def a_grid(depth: int = 6, angles: int = 32) -> np.ndarray:
    """Centres ``a`` on radii ``1 - 2^{-j}``, j = 0..depth-1, with uniform angles (plus offsets)."""
    pts = [0j]
    for j in range(1, depth):
        r = 1.0 - 2.0**-j
        pts.extend(r * np.exp(1j * (TWO_PI * (np.arange(angles) + 0.5) / angles)))
    return np.asarray(pts)


def f_space_seminorm(f: TaylorCoefficients, q: float, a_points, grid: DiskGrid):
    """``sup_a int |f'|^2 (1-|z|^2)^q g(z, a) dA`` over ``a_points``.

    Cells within their own equal-area radius of ``a`` use the exact average
    of ``-log|z - a|`` over a disk of that radius. Returns ``(value, a*)``.
    """
    if not 0 < q < 2:
        raise ValueError("q must lie in (0, 2)")
    a_points = np.atleast_1d(np.asarray(a_points, dtype=complex))
    dens = np.abs(f.derivative()(grid.nodes)) ** 2 * grid.weighted(q)
    keep = dens > 0
    if not np.any(keep):
        return 0.0, complex(a_points[0])
    vals = green_potential(grid.nodes[keep], dens[keep], grid.cell_radius[keep], a_points)
    k = int(np.argmax(vals))
    return float(vals[k]), complex(a_points[k])


def _arc_integrals(d, centers, width):
    """``int_arc e^{i d theta} d theta`` for arcs of ``width`` at ``centers``."""
    d = np.asarray(d, dtype=float)
    half = 0.5 * width
    with np.errstate(invalid="ignore", divide="ignore"):
        amp = np.where(d == 0, width, 2.0 * np.sin(d * half) / np.where(d == 0, 1, d))
    return amp[None, ...] * np.exp(1j * np.multiply.outer(centers, d))


def carleson_box_masses(f: TaylorCoefficients, beta: float, k: int, offset: float = 0.0) -> np.ndarray:
    """Exact masses of ``|I_beta f|^2 (1-|z|^2)^{2beta-1} dA`` on the generation-``k`` disk boxes.

    The arcs have width ``2 pi 2^{-k}``, start at ``offset`` and the boxes reach
    down to radius ``1 - 2^{-k}``. Uses the coefficient double sum with the
    radial factor as an incomplete Beta function.
    """
    a = fractional_derivative(f, beta)
    idx = a.support()
    width = TWO_PI * 2.0**-k
    count = 2**k
    if idx.size == 0:
        return np.zeros(count)
    coef = a.coeffs[idx]
    s = (idx[:, None] + idx[None, :]).astype(float)
    d = (idx[:, None] - idx[None, :]).astype(float)
    r0sq = (1.0 - 2.0**-k) ** 2 if k > 0 else 0.0
    rad = 0.5 * beta_fn(0.5 * s + 1.0, 2.0 * beta) * betainc(2.0 * beta, 0.5 * s + 1.0, 1.0 - r0sq)
    pair = coef[:, None] * np.conj(coef)[None, :] * rad
    centers = offset + width * (np.arange(count) + 0.5)
    out = np.empty(count)
    step = max(1, (1 << 21) // pair.size)
    for s0 in range(0, count, step):
        ang = _arc_integrals(d, centers[s0:s0 + step], width)
        out[s0:s0 + step] = np.real(np.einsum("cnm,nm->c", ang, pair))
    return np.maximum(out, 0.0)


def carleson_bmoa_test(f: TaylorCoefficients, beta: float, depth: int) -> float:
    """Dyadic one-box constant (exponent 1) of ``|I_beta f|^2 (1-|z|^2)^{2beta-1} dA``.

    Two arc families per generation (standard and shifted by a third of the
    width); box masses are exact.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    best = 0.0
    for k in range(depth + 1):
        width = TWO_PI * 2.0**-k
        offsets = (0.0,) if k == 0 else (0.0, width / 3.0)
        for off in offsets:
            m = carleson_box_masses(f, beta, k, off)
            best = max(best, float(m.max()) / width)
    return best


def lacunary_witness(alpha: float, blocks: int, length: Optional[int] = None) -> TaylorCoefficients:
    """``c`` with ``c_{2^k} = 2^{k(1-alpha/2)}/(1+2^k)``, k = 0..blocks-1."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if blocks < 1:
        raise ValueError("blocks must be >= 1")
    n = 2 ** np.arange(blocks)
    size = max(int(n[-1]) + 1, length or 0)
    c = np.zeros(size, complex)
    c[n] = 2.0 ** (np.arange(blocks) * (1.0 - 0.5 * alpha)) / (1.0 + n)
    return TaylorCoefficients(c)


def lacunary_series(amplitudes, length: Optional[int] = None) -> TaylorCoefficients:
    """``sum_k amplitudes[k] z^{2^k}``."""
    amp = np.asarray(amplitudes, dtype=complex)
    n = 2 ** np.arange(amp.size)
    c = np.zeros(max(int(n[-1]) + 1, length or 0), complex)
    c[n] = amp
    return TaylorCoefficients(c)


def bloch_radial_grid(depth: int, sub: int = 8, angles: int = 1) -> DiskGrid:
    """Grid for Bloch sups of positive-coefficient series (maximum on the positive axis)."""
    return DiskGrid(depth=depth, angles=angles, sub=sub, inner=16)

