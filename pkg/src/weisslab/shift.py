"""Unilateral shift on H^2: generalised Hankel matrices and resolvent norms.

The observation functional is ``C g = <g, c>`` for a coefficient vector
``c``. Its weighted output sum is a Hankel quadratic form,

    sum_n (1+n)^alpha |<S^n f, c>|^2 = || Gamma_c^alpha conj(f) ||^2,

with ``Gamma_c^alpha[n, m] = (1+n)^{alpha/2} c_{n+m}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .spaces import DiskGrid, TaylorCoefficients, bloch_radial_grid, bloch_seminorm, fractional_derivative, lacunary_witness

TWO_PI = 2.0 * np.pi


def _coeffs(c) -> np.ndarray:
    if isinstance(c, TaylorCoefficients):
        return c.coeffs
    return np.atleast_1d(np.asarray(c, dtype=complex))


def _padded(c, length):
    out = np.zeros(length, complex)
    n = min(length, c.size)
    out[:n] = c[:n]
    return out


def hankel_matrix(c, alpha: float, rows: int, cols: Optional[int] = None) -> np.ndarray:
    """Dense ``rows x cols`` matrix ``(1+n)^{alpha/2} c_{n+m}`` (zero beyond the data)."""
    c = _coeffs(c)
    cols = rows if cols is None else cols
    ext = _padded(c, rows + cols - 1)
    n = np.arange(rows)
    m = np.arange(cols)
    return (1.0 + n)[:, None] ** (0.5 * alpha) * ext[n[:, None] + m[None, :]]


class HankelOperator:
    """Matrix-free ``Gamma_c^alpha`` of size ``rows x cols`` using FFT correlation."""

    def __init__(self, c, alpha: float, rows: int, cols: Optional[int] = None):
        c = _coeffs(c)
        self.rows = rows
        self.cols = rows if cols is None else cols
        self.alpha = alpha
        span = self.rows + self.cols - 1
        self._c = _padded(c, span)
        self._scale = (1.0 + np.arange(self.rows)) ** (0.5 * alpha)
        self._len = 1 << int(np.ceil(np.log2(span + self.cols)))
        self._cf = np.fft.fft(self._c, self._len)
        self._ccf = np.fft.fft(np.conj(self._c), self._len)

    @property
    def shape(self):
        return self.rows, self.cols

    def _correlate(self, spec, x, out_len):
        # y_n = sum_m h_{n+m} x_m  via convolution with the reversed input
        xr = np.fft.fft(x[::-1], self._len)
        full = np.fft.ifft(spec * xr)
        k = x.size - 1
        return full[k:k + out_len]

    def matvec(self, x):
        x = np.asarray(x, dtype=complex)
        return self._scale * self._correlate(self._cf, x, self.rows)

    def rmatvec(self, y):
        y = np.asarray(y, dtype=complex) * self._scale
        return self._correlate(self._ccf, y, self.cols)

    def dense(self):
        return hankel_matrix(self._c, self.alpha, self.rows, self.cols)


def operator_norm(op, iterations: int = 300, seed: int = 0, tol: float = 1e-10) -> float:
    """Largest singular value by power iteration on ``op^H op``.

    ``op`` is a dense array or anything with ``matvec``/``rmatvec``/``shape``.
    Stops when the Rayleigh quotient changes by less than ``tol`` (relative).
    """
    if iterations < 1:
        raise ValueError("iterations must be positive")
    if isinstance(op, np.ndarray):
        mat = op
        fwd, adj, cols = (lambda v: mat @ v), (lambda v: mat.conj().T @ v), mat.shape[1]
    else:
        fwd, adj, cols = op.matvec, op.rmatvec, op.shape[1]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(cols) + 1j * rng.standard_normal(cols)
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(iterations):
        u = adj(fwd(v))
        rq = float(np.real(np.vdot(v, u)))
        nu = np.linalg.norm(u)
        if nu == 0:
            return 0.0
        v = u / nu
        if abs(rq - prev) <= tol * abs(rq):
            prev = rq
            break
        prev = rq
    return float(np.sqrt(max(prev, 0.0)))


def admissibility_sum(c, alpha: float, f, N: int) -> float:
    """``sum_{n=0}^N (1+n)^alpha |<S^n f, c>|^2`` with ``<S^n f, c> = sum_m f_m conj(c_{n+m})``."""
    c = _coeffs(c)
    f = _coeffs(f)
    ext = _padded(c, N + f.size)
    total = 0.0
    for n in range(N + 1):
        inner = np.sum(f * np.conj(ext[n:n + f.size]))
        total += (1.0 + n) ** alpha * abs(inner) ** 2
    return float(total)


def hankel_admissibility_sum(c, alpha: float, f, N: int) -> float:
    """``|| Gamma_c^alpha conj(f) ||^2`` with ``N+1`` rows (the Hankel side of the identity)."""
    f = _coeffs(f)
    y = hankel_matrix(c, alpha, N + 1, f.size) @ np.conj(f)
    return float(np.real(np.vdot(y, y)))


def resolvent_coefficients(c, omega) -> np.ndarray:
    """``a_k = sum_{m>=k} c_m omega^{m-k}`` by the backward recursion ``a_k = c_k + omega a_{k+1}``.

    ``omega`` may be an array; the result has shape ``(len(c),) + omega.shape``.
    """
    c = _coeffs(c)
    omega = np.asarray(omega, dtype=complex)
    if np.any(np.abs(omega) >= 1):
        raise ValueError("|omega| must be < 1")
    out = np.empty((c.size,) + omega.shape, complex)
    acc = np.zeros(omega.shape, complex)
    for k in range(c.size - 1, -1, -1):
        acc = c[k] + omega * acc
        out[k] = acc
    return out


def shift_resolvent_norm(c, omega, N: Optional[int] = None):
    """``||C (I - conj(omega) S)^{-1}||`` as ``sqrt(sum_{k<=N} |a_k|^2)`` (vectorised over ``omega``)."""
    c = _coeffs(c)
    N = c.size - 1 if N is None else N
    omega = np.asarray(omega, dtype=complex)
    if np.any(np.abs(omega) >= 1):
        raise ValueError("|omega| must be < 1")
    acc = np.zeros(omega.shape, complex)
    total = np.zeros(omega.shape)
    for k in range(c.size - 1, -1, -1):
        acc = c[k] + omega * acc
        if k <= N:
            total += acc.real**2 + acc.imag**2
    out = np.sqrt(total)
    return out if out.ndim else float(out)


def dense_resolvent_norm(c, omega: complex, N: int) -> float:
    """Oracle: ``|| c^H (I - conj(omega) S_N)^{-1} ||`` from a dense solve on ``N+1`` coordinates."""
    c = _padded(_coeffs(c), N + 1)
    shift = np.eye(N + 1, k=-1)
    a = np.linalg.solve(np.eye(N + 1) - omega * shift.T, c)
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class DiskOmegaGrid:
    """``omega`` on radii ``1 - 2^{-k}`` (k = 0..depth) times uniform angles."""

    depth: int = 10
    angles: int = 64

    def points(self) -> np.ndarray:
        r = 1.0 - 2.0 ** -np.arange(self.depth + 1, dtype=float)
        th = TWO_PI * np.arange(self.angles) / self.angles
        return (r[:, None] * np.exp(1j * th)[None, :]).ravel()


def shift_resolvent_sup(c, alpha: float, grid: Optional[DiskOmegaGrid] = None):
    """``max (1-|omega|^2)^{(1-alpha)/2} ||C (I - conj(omega) S)^{-1}||`` over the grid; ``(value, omega*)``."""
    grid = grid or DiskOmegaGrid()
    om = grid.points()
    vals = (1.0 - np.abs(om) ** 2) ** (0.5 * (1.0 - alpha)) * shift_resolvent_norm(c, om)
    k = int(np.argmax(vals))
    return float(vals[k]), complex(om[k])


def boundary_quotient_form(c, omega: complex, angles: Optional[int] = None) -> float:
    """``int_0^{2pi} |F(e^{it}) - F(omega)|^2 / |e^{it} - omega|^2 dt`` with ``F = z c(z)``.

    The integrand is ``|q|^2`` for a polynomial ``q`` of the same degree as
    ``c``, so the uniform rule with more than ``2 deg`` nodes is exact.
    """
    cf = TaylorCoefficients(np.concatenate([[0.0], _coeffs(c)]))
    angles = angles or 2 * len(cf) + 2
    e = np.exp(1j * TWO_PI * np.arange(angles) / angles)
    num = np.abs(cf(e) - cf(omega)) ** 2
    den = np.abs(e - omega) ** 2
    return float(TWO_PI * np.mean(num / den))


def area_quotient_form(c, omega: complex, grid: DiskGrid) -> float:
    """``int |F'(z)|^2 (1-|z|^2) / |1 - conj(omega) z|^2 dA`` with ``F' = (z c)' = I_1 c``."""
    d = fractional_derivative(TaylorCoefficients(_coeffs(c)), 1.0)
    z = grid.nodes
    vals = np.abs(d(z)) ** 2 / np.abs(1.0 - np.conj(omega) * z) ** 2
    return float(grid.weighted(1.0) @ vals)


SHIFT_COLUMNS = ("K", "bloch", "resolvent_sup", "hankel_alpha", "hankel_beta_half", "hankel_beta_zero")


def shift_row(alpha: float, K: int, N: int = 8192, omega_grid: Optional[DiskOmegaGrid] = None,
              iterations: int = 300, seed: int = 0) -> dict:
    """One row of the shift experiment for the lacunary witness with ``K`` blocks."""
    c = lacunary_witness(alpha, K)
    bloch = bloch_seminorm(fractional_derivative(c, 1.0), 2.0 - 0.5 * alpha, bloch_radial_grid(K + 4))
    res, _ = shift_resolvent_sup(c, alpha, omega_grid)
    norms = [operator_norm(HankelOperator(c, b, N), iterations, seed) for b in (alpha, 0.5 * alpha, 0.0)]
    return dict(zip(SHIFT_COLUMNS, (K, bloch, res, *norms)))


def shift_experiment(alpha: float, k_list: Sequence[int], N: int = 8192, **kw) -> list:
    """Rows ``K, bloch(I_1 c), resolvent_sup, |Gamma^alpha|, |Gamma^{alpha/2}|, |Gamma^0|`` per ``K``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    ks = list(k_list)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("K-list must be increasing")
    return [shift_row(alpha, K, N, **kw) for K in ks]
