"""Pure numpy implementations of the hot kernels.

Mirrors :mod:`weisslab._kernels` function for function; used when the
compiled extension is unavailable or ``WEISSLAB_PURE_PYTHON=1`` is set.
"""
import numpy as np

_CHUNK = 1 << 22  # elements per temporary block


def _rows_per_chunk(ncols):
    return max(1, _CHUNK // max(1, ncols))


def riesz_cell_matrix(x, edges, beta):
    """Integrals of ``|x_i - t|**(beta - 1)`` over each cell ``[edges[j], edges[j+1]]``."""
    x = np.ascontiguousarray(x, dtype=float)
    edges = np.ascontiguousarray(edges, dtype=float)
    out = np.empty((x.size, edges.size - 1))
    step = _rows_per_chunk(edges.size)
    for s in range(0, x.size, step):
        u = x[s:s + step, None] - edges[None, :]
        prim = np.sign(u) * np.abs(u) ** beta / beta
        out[s:s + step] = prim[:, :-1] - prim[:, 1:]
    return out


def power_gram(z, w, alpha, nterms):
    """Gram matrix ``sqrt(w_j w_k) * sum_{n<=nterms} (1+n)**alpha (z_j conj(z_k))**n``."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=float)
    x = z[:, None] * np.conj(z)[None, :]
    ax = np.abs(x)
    acc = np.zeros_like(x)
    term = np.ones_like(x)
    for n in range(nterms + 1):
        coef = (1.0 + n) ** alpha
        acc += coef * term
        # tail bound for the remaining terms; stop once every pair is converged
        if n % 16 == 15:
            amp = np.abs(term) * ax
            tail = amp * max(coef, 1.0) / np.maximum(1.0 - ax, 1e-300)
            if np.all(tail <= 1e-16 * (np.abs(acc) + 1e-300)):
                break
        term = term * x
    sw = np.sqrt(w)
    return acc * sw[:, None] * sw[None, :]


def green_potential(z, v, rho, a):
    """``sum_z v_z g(z, a)`` for every ``a``; cells with ``|z-a| < rho_z`` use the disk-averaged log."""
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=float)
    rho = np.asarray(rho, dtype=float)
    a = np.asarray(a, dtype=complex)
    out = np.empty(a.size)
    step = _rows_per_chunk(z.size)
    for s in range(0, a.size, step):
        aa = a[s:s + step, None]
        d = np.abs(z[None, :] - aa)
        near = d < rho[None, :]
        with np.errstate(divide="ignore"):
            sing = np.where(
                near,
                -np.log(rho)[None, :] + 0.5 * (1.0 - (d / rho[None, :]) ** 2),
                -np.log(d),
            )
        g = sing + np.log(np.abs(1.0 - np.conj(aa) * z[None, :]))
        out[s:s + step] = g @ v
    return out


def witness_sum(z, edges, jumps, beta):
    """``sum_e jumps_e * (-1j * (z - e))**beta`` (principal branch; requires Im z > 0)."""
    z = np.asarray(z, dtype=complex)
    edges = np.asarray(edges, dtype=float)
    jumps = np.asarray(jumps, dtype=float)
    out = np.empty(z.size, dtype=complex)
    step = _rows_per_chunk(edges.size)
    for s in range(0, z.size, step):
        p = -1j * (z[s:s + step, None] - edges[None, :])
        out[s:s + step] = np.power(p, beta) @ jumps
    return out
