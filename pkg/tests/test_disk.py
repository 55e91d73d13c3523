import numpy as np
import pytest

from weisslab.disk import (
    DiskSystem,
    OmegaGrid,
    admissibility_convergence,
    direct_admissibility_max,
    discrete_admissibility,
    discrete_admissibility_constant,
    disk_embedding_ratio,
    disk_resolvent_integral,
    disk_resolvent_sup,
    extremal_polynomial,
    functional_calculus_norm,
    weighted_output_sum,
)
from weisslab.measures import AtomicMeasure, empty_measure, one_box_constant, stacked_cantor
from weisslab.spaces import TaylorCoefficients


def atom(z, w=1.0):
    return DiskSystem(AtomicMeasure([z], [w], "disk"))


def random_system(rng, n=6, rmax=0.9):
    z = rng.uniform(0, rmax, n) * np.exp(2j * np.pi * rng.uniform(size=n))
    return DiskSystem(AtomicMeasure(z, rng.uniform(0.1, 1, n), "disk"))


def test_resolvent_integral_examples():
    rng = np.random.default_rng(0)
    s = random_system(rng)
    assert disk_resolvent_integral(s, 0.0) == pytest.approx(s.w.sum())
    assert disk_resolvent_integral(atom(0.0, 2.0), 0.7j) == pytest.approx(2.0)
    r = 0.6
    assert disk_resolvent_integral(atom(r, 1.5), r) == pytest.approx(1.5 / (1 - r * r) ** 2)
    with pytest.raises(ValueError):
        disk_resolvent_integral(s, 1.0)


def test_resolvent_sup_edge_cases():
    assert disk_resolvent_sup(DiskSystem(empty_measure("disk")), -0.5)[0] == 0.0
    rng = np.random.default_rng(1)
    s = random_system(rng)
    grid = OmegaGrid(10, 32)
    base = disk_resolvent_sup(s, -0.5, grid)[0]
    rot = DiskSystem(s.measure.rotated(2 * np.pi * 5 / 32))
    assert disk_resolvent_sup(rot, -0.5, grid)[0] == pytest.approx(base, rel=1e-12)


def test_admissibility_examples():
    assert discrete_admissibility_constant(atom(0.0), -0.5, 10) == pytest.approx(1.0)
    assert discrete_admissibility_constant(atom(0.0, 4.0), 0.3, 100) == pytest.approx(2.0)
    m = discrete_admissibility_constant(atom(2**-0.5), 0.0, 4000)
    assert m**2 == pytest.approx(2.0, rel=1e-12)


def test_admissibility_routes_agree():
    rng = np.random.default_rng(2)
    s = random_system(rng)
    gram = discrete_admissibility_constant(s, -0.5, 2048, method="gram")
    free = discrete_admissibility_constant(s, -0.5, 2048, method="matrix_free")
    direct = direct_admissibility_max(s, -0.5, 2048)
    assert free == pytest.approx(gram, rel=1e-10)
    assert direct == pytest.approx(gram, rel=1e-2)
    for _ in range(20):
        x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert weighted_output_sum(s, -0.5, x, 256) <= gram**2 * (1 + 1e-10)


def test_admissibility_monotone_in_truncation():
    rng = np.random.default_rng(3)
    s = random_system(rng, rmax=0.98)
    vals = [discrete_admissibility_constant(s, 0.5, n) for n in (8, 32, 128, 512)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    a, b, rel = admissibility_convergence(s, -0.5, 1024)
    assert b >= a and 0 <= rel < 1e-6


def test_embedding_ratio_examples():
    rng = np.random.default_rng(4)
    s = random_system(rng)
    assert disk_embedding_ratio(s, TaylorCoefficients([1.0]), -0.5) == pytest.approx(np.sqrt(s.w.sum()))
    r, w, n, alpha = 0.7, 2.0, 5, -0.5
    mono = TaylorCoefficients(np.eye(n + 1)[n])
    assert disk_embedding_ratio(atom(r, w), mono, alpha) == pytest.approx(np.sqrt(w) * r**n * (1 + n) ** (alpha / 2))
    with pytest.raises(ValueError):
        disk_embedding_ratio(s, TaylorCoefficients([0.0]), alpha)


def test_embedding_below_admissibility():
    rng = np.random.default_rng(5)
    s = random_system(rng)
    m = discrete_admissibility_constant(s, -0.5, 2048)
    for _ in range(100):
        deg = int(rng.integers(0, 65))
        f = TaylorCoefficients(rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1))
        assert disk_embedding_ratio(s, f, -0.5) <= m * 1.01


def test_extremal_polynomial_attains_constant():
    rng = np.random.default_rng(6)
    s = random_system(rng)
    m, h = discrete_admissibility(s, -0.5, 512)
    assert disk_embedding_ratio(s, extremal_polynomial(h, -0.5), -0.5) == pytest.approx(m, rel=1e-8)


def test_functional_calculus_identity():
    rng = np.random.default_rng(7)
    s = random_system(rng)
    for _ in range(5):
        f = TaylorCoefficients(rng.standard_normal(9) + 1j * rng.standard_normal(9))
        direct = np.sqrt(np.sum(s.w * np.abs(f(s.z)) ** 2))
        assert functional_calculus_norm(s, f) == pytest.approx(direct, rel=1e-2)


def test_stacked_disk_resolvent_tracks_box():
    vals = []
    for L in (3, 4, 5):
        mu = stacked_cantor(0.25, L, L, "disk")
        vals.append(disk_resolvent_sup(DiskSystem(mu), -0.5)[0] ** 2 / one_box_constant(mu, 0.5, 2 * L))
    assert max(vals) / min(vals) < 1.5
