import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from weisslab.capacity import Grid1D, capacity_of, kernel_convolve, poisson_extension
from weisslab.halfplane import (
    HalfPlaneSystem,
    LogTimeGrid,
    ResolventGrid,
    WeightedSignal,
    admissibility_constant,
    analytic_witness,
    fourier_multiplier,
    laplace_embedding_ratio,
    observe,
    quadrature_admissibility,
    resolvent_functional_norm,
    resolvent_sup,
    semigroup_apply,
    weighted_output_energy,
    witness_embedding_ratio,
    witness_norm,
    witness_value,
)
from weisslab.measures import AtomicMeasure, empty_measure, one_box_constant, stacked_cantor


def single(y0=1.0, w=1.0):
    return HalfPlaneSystem(AtomicMeasure([1j * y0], [w]))


def random_system(rng, n=8):
    z = rng.uniform(-1, 1, n) + 1j * rng.uniform(0.05, 1, n)
    return HalfPlaneSystem(AtomicMeasure(z, rng.uniform(0.1, 1, n)))


def test_semigroup_examples():
    sys = single()
    assert semigroup_apply(sys, 0.0, [1.0])[0] == 1.0
    assert semigroup_apply(sys, 1.0, [1.0])[0] == pytest.approx(math.exp(-1))
    rng = np.random.default_rng(1)
    s = random_system(rng)
    x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    np.testing.assert_allclose(semigroup_apply(s, 0.3, semigroup_apply(s, 0.7, x)), semigroup_apply(s, 1.0, x), atol=1e-12)
    for t in (0.1, 1.0, 10.0):
        assert s.state_norm(semigroup_apply(s, t, x)) <= s.state_norm(x) + 1e-15
    with pytest.raises(ValueError):
        semigroup_apply(s, -1.0, x)


def test_observe_examples():
    sys = HalfPlaneSystem(AtomicMeasure([1j, 2j], [1.0, 2.0]))
    assert observe(sys, [1, 1]) == 3
    assert observe(sys, [1, -0.5]) == 0


def test_resolvent_functional_norm():
    assert resolvent_functional_norm(single(), 1.0) == pytest.approx(0.5)
    assert resolvent_functional_norm(single(), 1e8) < 1e-7
    two = HalfPlaneSystem(AtomicMeasure([1j, 0.5 + 2j], [1.0, 3.0]))
    a = resolvent_functional_norm(HalfPlaneSystem(AtomicMeasure([1j], [1.0])), 0.7 + 0.2j)
    b = resolvent_functional_norm(HalfPlaneSystem(AtomicMeasure([0.5 + 2j], [3.0])), 0.7 + 0.2j)
    assert resolvent_functional_norm(two, 0.7 + 0.2j) ** 2 == pytest.approx(a**2 + b**2)
    with pytest.raises(ValueError):
        resolvent_functional_norm(single(), -1.0)


def test_resolvent_sup_single_atom_calculus():
    alpha, y0 = -0.5, 0.3
    opt = minimize_scalar(lambda lam: -(lam ** (0.5 * (1 - alpha)) / (lam + y0)), bounds=(1e-6, 1e3), method="bounded")
    val, lam = resolvent_sup(single(y0), alpha, ResolventGrid.default(n_re=4001))
    assert val == pytest.approx(-opt.fun, rel=1e-4)
    assert lam.real == pytest.approx(y0 * (1 - alpha) / (1 + alpha), rel=1e-2)


def test_resolvent_sup_edge_cases():
    assert resolvent_sup(HalfPlaneSystem(empty_measure()), 0.0)[0] == 0.0
    rng = np.random.default_rng(2)
    s = random_system(rng)
    d = HalfPlaneSystem(s.measure.scaled(2.0))
    assert resolvent_sup(d, -0.3)[0] == pytest.approx(math.sqrt(2) * resolvent_sup(s, -0.3)[0])


def test_admissibility_closed_forms():
    assert admissibility_constant(single(0.5), 0.0) == pytest.approx(1.0)
    assert admissibility_constant(single(0.5), -0.5) == pytest.approx(1.33134, abs=1e-5)
    far = HalfPlaneSystem(AtomicMeasure([1j, 1000 + 0.5j], [1.0, 1.0]))
    singles = [admissibility_constant(single(y), 0.2) ** 2 for y in (1.0, 0.5)]
    assert admissibility_constant(far, 0.2) ** 2 == pytest.approx(max(singles), rel=1e-2)
    with pytest.raises(ValueError):
        admissibility_constant(single(), 1.0)


def test_gram_vs_quadrature():
    rng = np.random.default_rng(3)
    for _ in range(5):
        s = random_system(rng, int(rng.integers(1, 17)))
        a = float(rng.uniform(-0.9, 0.9))
        assert quadrature_admissibility(s, a) == pytest.approx(admissibility_constant(s, a), rel=5e-3)


def test_admissibility_bound_realised():
    rng = np.random.default_rng(4)
    s = random_system(rng, 6)
    alpha = -0.4
    m2 = admissibility_constant(s, alpha) ** 2
    ratios = []
    for _ in range(100):
        x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        ratios.append(weighted_output_energy(s, alpha, x) / s.state_norm(x) ** 2)
    assert max(ratios) <= m2 * 1.01
    assert quadrature_admissibility(s, alpha) ** 2 >= 0.8 * m2


def test_laplace_closed_form():
    tg = LogTimeGrid()
    v = WeightedSignal(tg, np.exp(-tg.t))
    for alpha, y0 in ((-0.5, 0.5), (0.3, 2.0)):
        lhs = laplace_embedding_ratio(single(y0), alpha, v) * v.norm()
        exact = math.gamma(1 + alpha / 2) / (1 + y0) ** (1 + alpha / 2)
        assert lhs == pytest.approx(exact, rel=1e-3)


def test_laplace_ratio_below_admissibility():
    rng = np.random.default_rng(5)
    s = random_system(rng, 5)
    tg = LogTimeGrid()
    alpha = -0.5
    m = admissibility_constant(s, alpha)
    for _ in range(100):
        vals = np.exp(-rng.uniform(0.05, 5) * tg.t) * np.cos(rng.uniform(0, 4) * tg.t + rng.uniform(0, 6))
        assert laplace_embedding_ratio(s, alpha, WeightedSignal(tg, vals)) <= m * 1.01
    assert laplace_embedding_ratio(HalfPlaneSystem(empty_measure()), alpha, WeightedSignal(tg, np.exp(-tg.t))) == 0.0
    with pytest.raises(ValueError):
        laplace_embedding_ratio(s, alpha, WeightedSignal(tg, np.zeros(tg.points)))


def test_fourier_multiplier_of_riesz_kernel():
    # direct numerical Fourier transform of |x|^{beta-1} at t = 1
    from scipy.integrate import quad

    beta = 0.25
    near = quad(np.cos, 0, 1, weight="alg", wvar=(beta - 1, 0))[0]
    far = quad(lambda x: x ** (beta - 1), 1, np.inf, weight="cos", wvar=1.0)[0]
    val = 2 * (near + far)
    assert fourier_multiplier(beta) == pytest.approx(val, rel=1e-6)


@pytest.fixture(scope="module")
def witness_setup():
    grid = Grid1D(-1.0, 2.0, 120)
    g = capacity_of([(0.0, 1.0)], 0.25, grid).density
    return grid, g


def test_witness_real_part_is_poisson_extension(witness_setup):
    grid, g = witness_setup
    big = Grid1D(-150.0, 150.0, 30000)
    f = kernel_convolve(g, 0.25, grid, big.midpoints)
    rng = np.random.default_rng(6)
    pts = rng.uniform(-0.5, 1.5, 20) + 1j * rng.uniform(grid.h, 1.0, 20)
    re = witness_value(g, grid, -0.5, pts).real
    u = poisson_extension(f, big, pts.real, pts.imag)
    np.testing.assert_allclose(re, u, rtol=2e-2)


def test_witness_closed_form_matches_laplace_quadrature(witness_setup):
    grid, g = witness_setup
    w = analytic_witness(g, grid, -0.5)
    q = w.tgrid.weights(0.0)
    for z in (0.3 + 0.2j, -0.4 + 1.0j):
        quad_val = (np.exp(1j * z * w.tgrid.t) * q) @ w.values
        assert abs(quad_val - witness_value(g, grid, -0.5, z)) < 1e-3 * abs(quad_val)


def test_witness_norm_proportional(witness_setup):
    grid, g = witness_setup
    w = analytic_witness(g, grid, -0.5)
    assert w.norm() == pytest.approx(witness_norm(g, grid, -0.5), rel=1e-3)
    assert witness_norm(2 * g, grid, -0.5) == pytest.approx(2 * witness_norm(g, grid, -0.5))


def test_witness_decays_and_vanishes(witness_setup):
    grid, g = witness_setup
    peak = abs(witness_value(g, grid, -0.5, 0.5 + 0.01j))
    # |G(iy)| decays like y^(beta-1): check the rate and the size at y = 1e3
    ys = np.array([1e2, 1e3, 1e4])
    vals = np.abs(witness_value(g, grid, -0.5, 0.5 + 1j * ys))
    rate = np.diff(np.log(vals)) / np.diff(np.log(ys))
    np.testing.assert_allclose(rate, -0.75, atol=1e-3)
    assert vals[1] < 1e-2 * peak
    zero = analytic_witness(np.zeros(grid.cells), grid, -0.5)
    assert np.all(zero.values == 0)
    assert witness_value(np.zeros(grid.cells), grid, -0.5, 0.5 + 0.5j) == 0
    with pytest.raises(ValueError):
        analytic_witness(g, grid, 0.5)


def test_witness_embedding_ratio_below_admissibility(witness_setup):
    grid, g = witness_setup
    rng = np.random.default_rng(7)
    s = random_system(rng, 6)
    assert witness_embedding_ratio(s, g, grid, -0.5) <= admissibility_constant(s, -0.5) * 1.01


def test_resolvent_and_box_track_each_other():
    # resolvent_sup^2 / one_box_constant should be stable across the number of stacks
    factors = []
    for M in (4, 6, 8):
        mu = stacked_cantor(0.25, 6, M)
        s = HalfPlaneSystem(mu)
        factors.append(resolvent_sup(s, -0.5)[0] ** 2 / one_box_constant(mu, 0.5, 12))
    assert max(factors) / min(factors) < 1.5
