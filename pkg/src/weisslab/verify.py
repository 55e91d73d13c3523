"""Quick oracle suite: every check compares two independent routes to the same number.

Each entry is ``(name, error, tolerance)``; the ``verify`` experiment passes
when every error is within its tolerance.
"""
from __future__ import annotations

import math

import numpy as np

from . import _kernels_py, kernels
from .capacity import (
    Grid1D,
    capacity_of,
    indicator_box_lower_bound,
    kernel_convolve,
    poisson_extension,
)
from .disk import (
    DiskSystem,
    direct_admissibility_max,
    discrete_admissibility_constant,
    disk_embedding_ratio,
    functional_calculus_norm,
)
from .halfplane import (
    HalfPlaneSystem,
    LogTimeGrid,
    WeightedSignal,
    admissibility_constant,
    laplace_embedding_ratio,
    quadrature_admissibility,
    witness_value,
)
from .measures import AtomicMeasure, Interval, one_box_constant
from .shift import (
    HankelOperator,
    admissibility_sum,
    dense_resolvent_norm,
    hankel_admissibility_sum,
    hankel_matrix,
    operator_norm,
    shift_resolvent_norm,
)
from .spaces import DiskGrid, TaylorCoefficients, area_dirichlet_norm, bloch_seminorm, monomial_area_integral


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def random_halfplane_system(rng, max_atoms=16):
    n = int(rng.integers(1, max_atoms + 1))
    z = rng.uniform(-1, 1, n) + 1j * rng.uniform(0.05, 1.0, n)
    w = rng.uniform(0.1, 1.0, n)
    return HalfPlaneSystem(AtomicMeasure(z, w, "halfplane"))


def random_disk_system(rng, atoms=6, rmax=0.9):
    z = rng.uniform(0, rmax, atoms) * np.exp(2j * np.pi * rng.uniform(size=atoms))
    w = rng.uniform(0.1, 1.0, atoms)
    return DiskSystem(AtomicMeasure(z, w, "disk"))


def oracle_suite(seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []

    # half-plane admissibility: Laplace Gram vs time quadrature
    err = 0.0
    for _ in range(5):
        sys = random_halfplane_system(rng)
        a = float(rng.uniform(-0.9, 0.9))
        err = max(err, _rel(quadrature_admissibility(sys, a), admissibility_constant(sys, a)))
    out.append(("halfplane gram vs quadrature", err, 5e-3))

    one = HalfPlaneSystem(AtomicMeasure([0.5j], [1.0]))
    out.append(("single atom closed form", _rel(admissibility_constant(one, -0.5), math.pi**0.25), 1e-12))

    tg = LogTimeGrid()
    v = WeightedSignal(tg, np.exp(-tg.t))
    lhs = laplace_embedding_ratio(one, -0.5, v) * v.norm()
    out.append(("laplace closed form", _rel(lhs, math.gamma(0.75) / 1.5**0.75), 1e-3))

    worst = 0.0
    sys = random_halfplane_system(rng)
    m = admissibility_constant(sys, -0.5)
    for _ in range(10):
        vals = np.exp(-tg.t * rng.uniform(0.1, 5)) * np.cos(tg.t * rng.uniform(0, 3))
        worst = max(worst, laplace_embedding_ratio(sys, -0.5, WeightedSignal(tg, vals)) / m - 1.0)
    out.append(("laplace ratio below admissibility", max(worst, 0.0), 1e-2))

    # analytic witness real part vs Poisson extension of the Riesz potential
    grid = Grid1D(-1.0, 2.0, 96)
    g = capacity_of([(0.0, 1.0)], 0.25, grid).density
    big = Grid1D(-100.0, 100.0, 20000)
    f = kernel_convolve(g, 0.25, grid, big.midpoints)
    pts = rng.uniform(-0.5, 1.5, 8) + 1j * rng.uniform(0.1, 1.0, 8)
    re = witness_value(g, grid, -0.5, pts).real
    u = poisson_extension(f, big, pts.real, pts.imag)
    out.append(("witness real part vs poisson", float(np.max(np.abs(re / u - 1))), 2e-2))

    # shift resolvent: backward recursion vs dense solve
    err = 0.0
    for _ in range(10):
        c = (rng.standard_normal(257) + 1j * rng.standard_normal(257)) / np.arange(1, 258)
        om = rng.uniform(0, 0.9) * np.exp(2j * np.pi * rng.uniform())
        err = max(err, abs(shift_resolvent_norm(c, om, 256) - dense_resolvent_norm(c, om, 256)))
    out.append(("shift resolvent vs dense solve", err, 1e-4))

    err = 0.0
    for _ in range(20):
        c = rng.standard_normal(int(rng.integers(1, 30))) + 0j
        fv = rng.standard_normal(int(rng.integers(1, 12))) + 1j * rng.standard_normal(1)
        N = int(rng.integers(0, 30))
        a = float(rng.uniform(0, 1))
        lhs, rhs = admissibility_sum(c, a, fv, N), hankel_admissibility_sum(c, a, fv, N)
        err = max(err, abs(lhs - rhs) / max(1.0, rhs))
    out.append(("hankel identity", err, 1e-10))

    mat = rng.standard_normal((50, 50))
    out.append(("operator norm vs svd", _rel(operator_norm(mat, 5000, tol=1e-15), np.linalg.svd(mat)[1][0]), 1e-6))
    c = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    op = HankelOperator(c, 0.5, 100)
    x = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    out.append(("fft hankel vs dense", float(np.max(np.abs(op.matvec(x) - hankel_matrix(c, 0.5, 100) @ x))), 1e-8))

    out.append(("poisson corner constant", abs(indicator_box_lower_bound(Interval(0, 1), 32) - math.atan(2) / math.pi), 1e-4))

    h = 0.01
    cell = Grid1D(0.0, 2 * h, 2)
    out.append(("single cell potential", _rel(kernel_convolve(np.array([1.0, 0.0]), 0.5, cell, 0.0), 2 * math.sqrt(h)), 1e-12))

    caps = [capacity_of([(0.0, ell)], 0.25, Grid1D(-ell, 2 * ell, 512)).value / ell**0.5 for ell in (0.25, 1.0)]
    out.append(("capacity homogeneity", abs(caps[0] / caps[1] - 1), 0.15))

    dsys = random_disk_system(rng)
    out.append(("disk gram vs direct maximisation",
                _rel(direct_admissibility_max(dsys, -0.5, 512), discrete_admissibility_constant(dsys, -0.5, 512)), 1e-2))
    poly = TaylorCoefficients(rng.standard_normal(12) + 1j * rng.standard_normal(12))
    direct = math.sqrt(float(np.sum(dsys.w * np.abs(poly(dsys.z)) ** 2)))
    out.append(("functional calculus identity", _rel(functional_calculus_norm(dsys, poly), direct), 1e-2))
    ratio = disk_embedding_ratio(dsys, poly, -0.5) / discrete_admissibility_constant(dsys, -0.5, 2048)
    out.append(("disk embedding below admissibility", max(ratio - 1.0, 0.0), 1e-2))

    dg = DiskGrid(depth=14, angles=32, sub=8)
    err = max(_rel(area_dirichlet_norm(TaylorCoefficients(np.eye(n + 1)[n]), -0.5, dg) ** 2,
                   monomial_area_integral(n, -0.5)) for n in (0, 4, 16, 32))
    out.append(("area norm vs beta integral", err, 1e-2))
    dg = DiskGrid(depth=10, angles=8, sub=32, inner=256)
    r = 1.0 / 2.0
    out.append(("bloch z^2 calculus", _rel(bloch_seminorm(TaylorCoefficients([0, 0, 1]), 1.5, dg), 2 * r * (1 - r * r) ** 1.5), 1e-3))

    atom = AtomicMeasure([0.25j], [1.0])
    out.append(("one box single atom", abs(one_box_constant(atom, 0.5, 6) - 1.0), 1e-12))

    # compiled kernels vs numpy fallback
    if kernels.BACKEND != "python":
        zz = rng.uniform(-1, 1, 40) + 1j * rng.uniform(0.05, 1, 40)
        e = np.linspace(-1, 1, 30)
        j = rng.standard_normal(30)
        d = np.max(np.abs(kernels.witness_sum(zz, e, j, 0.25) - _kernels_py.witness_sum(zz, e, j, 0.25)))
        dz = rng.uniform(0, 0.9, 20) * np.exp(2j * np.pi * rng.uniform(size=20))
        dw = rng.uniform(0.1, 1, 20)
        d = max(d, np.max(np.abs(kernels.power_gram(dz, dw, -0.5, 300) - _kernels_py.power_gram(dz, dw, -0.5, 300))))
        out.append(("compiled vs python kernels", float(d), 1e-10))
    return out
