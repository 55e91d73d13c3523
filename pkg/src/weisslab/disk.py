"""Diagonal discrete-time system on L^2(mu) over the unit disk.

``A`` multiplies by ``z`` and ``C`` integrates against ``mu``. For atomic
``mu`` the resolvent functional, the discrete admissibility constant and
the polynomial embedding ratio are finite sums over atoms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .kernels import power_gram
from .measures import AtomicMeasure
from .spaces import TaylorCoefficients, dirichlet_norm

TWO_PI = 2.0 * np.pi


class DiskSystem:
    """``A = z`` and ``C = integration`` on ``L^2(mu)`` for an atomic disk measure."""

    def __init__(self, measure: AtomicMeasure):
        if measure.ambient != "disk":
            raise ValueError("DiskSystem needs a disk measure")
        keep = measure.weights > 0
        self.measure = measure
        self.z = measure.points[keep]
        self.w = measure.weights[keep]

    def __len__(self):
        return self.z.size


def disk_resolvent_integral(sys: DiskSystem, omega):
    """``sum_j w_j / |1 - conj(omega) z_j|^2`` (vectorised over ``omega``)."""
    omega = np.asarray(omega, dtype=complex)
    if np.any(np.abs(omega) >= 1):
        raise ValueError("|omega| must be < 1")
    flat = omega.ravel()
    out = np.empty(flat.size)
    step = max(1, (1 << 21) // max(1, sys.z.size))
    for s in range(0, flat.size, step):
        d = 1.0 - np.conj(flat[s:s + step, None]) * sys.z[None, :]
        out[s:s + step] = (1.0 / (d.real**2 + d.imag**2)) @ sys.w
    out = out.reshape(omega.shape)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class OmegaGrid:
    """Radii ``1 - 2^{-k}`` (k = 0..depth) times uniform angles plus optional extra angles."""

    depth: int = 12
    angles: int = 64
    extra_angles: tuple = ()

    def points(self) -> np.ndarray:
        r = 1.0 - 2.0 ** -np.arange(self.depth + 1, dtype=float)
        th = np.concatenate([TWO_PI * np.arange(self.angles) / self.angles, np.asarray(self.extra_angles, float)])
        th = np.unique(np.mod(th, TWO_PI))
        return (r[:, None] * np.exp(1j * th)[None, :]).ravel()


def default_omega_grid(sys: DiskSystem, depth: int = 12, angles: int = 64, max_extra: int = 4096) -> OmegaGrid:
    """Grid whose angles include the atom arguments (where the integrand peaks)."""
    th = np.unique(np.round(np.mod(np.angle(sys.z), TWO_PI), 14))
    if th.size > max_extra:
        th = th[np.linspace(0, th.size - 1, max_extra).astype(int)]
    return OmegaGrid(depth, angles, tuple(th))


def weighted_resolvent_values(sys: DiskSystem, omega, power: float):
    """``(1-|omega|^2)^power * int dmu / |1 - conj(omega) z|^2`` on the given points."""
    omega = np.asarray(omega, dtype=complex)
    return (1.0 - np.abs(omega) ** 2) ** power * disk_resolvent_integral(sys, omega)


def disk_resolvent_sup(sys: DiskSystem, alpha: float, grid: Optional[OmegaGrid] = None):
    """``max (1-|omega|^2)^{(1-alpha)/2} ||C (I - conj(omega) A)^{-1}||``; returns ``(value, omega*)``."""
    grid = grid or default_omega_grid(sys)
    om = grid.points()
    if len(sys) == 0:
        return 0.0, complex(om[0])
    vals = np.sqrt(weighted_resolvent_values(sys, om, 1.0 - alpha))
    k = int(np.argmax(vals))
    return float(vals[k]), complex(om[k])


def carleson_integral_sup(sys: DiskSystem, alpha: float, grid: Optional[OmegaGrid] = None) -> float:
    """``sup (1-|omega|^2)^{1-alpha} int dmu / |1 - conj(omega) z|^2`` (the squared resolvent sup)."""
    return disk_resolvent_sup(sys, alpha, grid)[0] ** 2


def discrete_gram(sys: DiskSystem, alpha: float, N: int) -> np.ndarray:
    """``sqrt(w_j w_k) sum_{n<=N} (1+n)^alpha (z_j conj z_k)^n``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    return power_gram(sys.z, sys.w, alpha, N)


def power_matrix(sys: DiskSystem, alpha: float, N: int) -> np.ndarray:
    """``V[j, n] = sqrt(w_j) z_j^n (1+n)^{alpha/2}``, so that ``V V^H`` is the discrete Gram matrix."""
    n = np.arange(N + 1)
    logs = np.log(np.where(sys.z == 0, 1.0, sys.z))
    v = np.exp(np.outer(logs, n))
    v[sys.z == 0, 1:] = 0.0
    return v * np.sqrt(sys.w)[:, None] * ((1.0 + n) ** (0.5 * alpha))[None, :]


def _top_eig(apply, size, seed):
    if size <= 2:
        raise RuntimeError
    op = LinearOperator((size, size), matvec=apply, dtype=complex)
    v0 = np.random.default_rng(seed).standard_normal(size).astype(complex)
    vals, vecs = eigsh(op, k=1, which="LA", v0=v0, tol=1e-12)
    return float(vals[0]), vecs[:, 0]


def discrete_admissibility_constant(sys: DiskSystem, alpha: float, N: int, method: str = "auto",
                                    seed: int = 0) -> float:
    """``sqrt(lambda_max(G_N))`` for the truncated discrete admissibility Gram matrix.

    ``method="gram"`` forms ``G_N`` explicitly; ``"matrix_free"`` applies
    ``V V^H`` (or ``V^H V``) with Lanczos; ``"auto"`` picks the cheaper one.
    """
    return discrete_admissibility(sys, alpha, N, method, seed)[0]


def discrete_admissibility(sys: DiskSystem, alpha: float, N: int, method: str = "auto", seed: int = 0):
    """``(M_N, top right singular vector of V)``; the vector gives the extremal polynomial."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if len(sys) == 0:
        return 0.0, np.zeros(N + 1, complex)
    if method == "auto":
        method = "gram" if len(sys) <= 256 else "matrix_free"
    if method == "gram":
        g = discrete_gram(sys, alpha, N)
        vals, vecs = np.linalg.eigh(g)
        top = vecs[:, -1]
        v = power_matrix(sys, alpha, N)
        h = v.conj().T @ top
        nh = np.linalg.norm(h)
        return float(np.sqrt(max(vals[-1], 0.0))), (h / nh if nh else h)
    if method != "matrix_free":
        raise ValueError(f"unknown method {method!r}")
    v = power_matrix(sys, alpha, N)
    rows, cols = v.shape
    vh = v.conj().T
    try:
        if cols <= rows:
            lam, h = _top_eig(lambda x: vh @ (v @ x), cols, seed)
        else:
            lam, u = _top_eig(lambda x: v @ (vh @ x), rows, seed)
            h = vh @ u
            h /= np.linalg.norm(h)
    except RuntimeError:
        s, vec = np.linalg.eigh(vh @ v)
        lam, h = float(s[-1]), vec[:, -1]
    return float(np.sqrt(max(lam, 0.0))), h


def admissibility_convergence(sys: DiskSystem, alpha: float, N: int, **kw):
    """``(M_N, M_2N, relative change)`` as a truncation indicator."""
    a = discrete_admissibility_constant(sys, alpha, N, **kw)
    b = discrete_admissibility_constant(sys, alpha, 2 * N, **kw)
    return a, b, (b - a) / b if b else 0.0


def weighted_output_sum(sys: DiskSystem, alpha: float, x, N: int) -> float:
    """Direct ``sum_{n<=N} (1+n)^alpha |C A^n x|^2 / ||x||^2``."""
    x = np.asarray(x, dtype=complex)
    y = sys.w * x
    total = 0.0
    zn = np.ones_like(sys.z)
    for n in range(N + 1):
        total += (1.0 + n) ** alpha * abs(np.sum(zn * y)) ** 2
        zn = zn * sys.z
    return total / float(np.sum(sys.w * np.abs(x) ** 2))


def disk_embedding_ratio(sys: DiskSystem, f: TaylorCoefficients, alpha: float) -> float:
    """``(sum_j w_j |f(z_j)|^2)^{1/2} / ||f||_{-alpha}``."""
    nf = dirichlet_norm(f, -alpha)
    if nf == 0:
        raise ValueError("f must be nonzero")
    if len(sys) == 0:
        return 0.0
    return float(np.sqrt(np.sum(sys.w * np.abs(f(sys.z)) ** 2)) / nf)


def extremal_polynomial(h, alpha: float) -> TaylorCoefficients:
    """Turn a right singular vector of :func:`power_matrix` into polynomial coefficients.

    ``V h`` evaluates ``sum_n h_n (1+n)^{alpha/2} z^n`` at the atoms, so
    ``f_n = (1+n)^{alpha/2} h_n`` and ``||f||_{-alpha} = ||h||``.
    """
    h = np.asarray(h, dtype=complex)
    n = np.arange(h.size)
    return TaylorCoefficients((1.0 + n) ** (0.5 * alpha) * h)


def functional_calculus_vector(sys: DiskSystem, f: TaylorCoefficients) -> np.ndarray:
    """Representer of ``x -> C f(A) x = sum_n f_n C A^n x`` built term by term."""
    acc = np.zeros(sys.z.size, complex)
    zn = np.ones(sys.z.size, complex)
    for fn in f.coeffs:
        acc += fn * sys.w * zn
        zn = zn * sys.z
    return acc


def functional_calculus_norm(sys: DiskSystem, f: TaylorCoefficients, iterations: int = 50, seed: int = 0) -> float:
    """``||C f(A)||`` by power iteration on random states (rank-one functional, so it converges at once)."""
    ell = functional_calculus_vector(sys, f)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(sys.z.size) + 1j * rng.standard_normal(sys.z.size)
    best = 0.0
    # X = L^2(mu): <x, y> = sum w x conj(y); the functional x -> sum ell x has Riesz vector conj(ell)/w
    for _ in range(iterations):
        nx = np.sqrt(np.sum(sys.w * np.abs(x) ** 2))
        x = x / nx
        val = abs(np.sum(ell * x))
        best = max(best, val)
        x = np.conj(ell) / sys.w
    return float(best)


def direct_admissibility_max(sys: DiskSystem, alpha: float, N: int, starts: int = 200, steps: int = 60,
                             seed: int = 0) -> float:
    """Oracle for the admissibility constant that never forms a Gram matrix.

    Each random start is improved by power steps that evaluate the outputs
    ``C A^n x`` and their adjoint by direct summation over ``n``.
    """
    if len(sys) == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    n = np.arange(N + 1)
    zpow = sys.z[None, :] ** n[:, None]
    wt = (1.0 + n) ** alpha
    sw = np.sqrt(sys.w)
    best = 0.0
    x = rng.standard_normal((sys.z.size, starts)) + 1j * rng.standard_normal((sys.z.size, starts))
    for _ in range(steps):
        # normalised coordinates y = sqrt(w) x; outputs (C A^n x) = sum_j sqrt(w_j) z_j^n y_j
        y = x / np.linalg.norm(x, axis=0)
        out = zpow @ (sw[:, None] * y)
        energy = wt @ np.abs(out) ** 2
        best = max(best, float(energy.max()))
        x = sw[:, None] * (zpow.conj().T @ (wt[:, None] * out))
    return float(np.sqrt(best))
