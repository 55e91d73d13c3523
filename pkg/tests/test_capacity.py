import math

import numpy as np
import pytest

from weisslab.capacity import (
    CapacityProblem,
    Grid1D,
    SolverOptions,
    ToeplitzKernel,
    capacity_of,
    capacity_upper,
    indicator_box_lower_bound,
    interval_poisson,
    kernel_convolve,
    parse_target,
    poisson_extension,
    riesz_kernel,
)
from weisslab.kernels import riesz_cell_matrix
from weisslab.measures import Interval, OpenSetUnion

ARCTAN2 = math.atan(2.0) / math.pi


def test_riesz_kernel_examples():
    assert riesz_kernel(0.5, 4.0) == pytest.approx(0.5)
    assert riesz_kernel(0.5, 1.0) == 1.0
    assert riesz_kernel(0.3, -2.5) == riesz_kernel(0.3, 2.5)
    assert riesz_kernel(0.5, 0.0) == math.inf
    with pytest.raises(ValueError):
        riesz_kernel(1.0, 1.0)


def test_kernel_convolve_examples():
    grid = Grid1D(0.0, 1.0, 10)
    assert kernel_convolve(np.zeros(10), 0.5, grid, 0.3) == 0.0
    h = grid.h
    g = np.zeros(10)
    g[0] = 1.0
    assert kernel_convolve(g, 0.5, grid, 0.0) == pytest.approx(2 * math.sqrt(h))
    rng = np.random.default_rng(0)
    g1, g2 = rng.random(10), rng.random(10)
    xs = rng.uniform(-1, 2, 7)
    np.testing.assert_allclose(
        kernel_convolve(g1 + g2, 0.4, grid, xs),
        kernel_convolve(g1, 0.4, grid, xs) + kernel_convolve(g2, 0.4, grid, xs),
    )


def test_kernel_convolve_vs_fine_riemann_sum():
    grid = Grid1D(0.0, 1.0, 20)
    g = np.sin(np.pi * grid.midpoints) + 0.5
    beta = 0.5
    xs = np.array([-0.5, 1.5, 2.0])  # away from the support
    fine = 10 * 20
    t = (np.arange(fine) + 0.5) / fine
    gf = np.repeat(g, 10)
    brute = [np.sum(gf * np.abs(x - t) ** (beta - 1)) / fine for x in xs]
    np.testing.assert_allclose(kernel_convolve(g, beta, grid, xs), brute, rtol=1e-2)


def test_toeplitz_matches_cell_matrix():
    grid = Grid1D(-1.0, 2.0, 37)
    kern = ToeplitzKernel(grid, 0.3)
    dense = riesz_cell_matrix(grid.midpoints, grid.edges, 0.3)
    np.testing.assert_allclose(kern.dense(), dense, rtol=1e-10, atol=1e-12)


def test_empty_target():
    res = capacity_upper(CapacityProblem(0.25, OpenSetUnion(()), Grid1D(0, 1, 16)))
    assert res.value == 0.0
    assert np.all(res.density == 0)


@pytest.mark.parametrize(
    "pairs,beta,grid,frozen",
    [
        # frozen from an SLSQP primal solve with the dense exact-cell matrix
        ([(0, 1)], 0.25, (-1, 2, 60), 0.02280769414799367),
        ([(0, 1)], 0.3, (-1, 2, 60), 0.03443245673666728),
        ([(0, 0.25), (0.75, 1)], 0.25, (-0.5, 1.5, 64), 0.018626237562979632),
    ],
)
def test_capacity_matches_primal_oracle(pairs, beta, grid, frozen):
    prob = CapacityProblem(beta, OpenSetUnion.from_pairs(pairs), Grid1D(*grid), SolverOptions(tol=1e-9, max_iter=200000))
    res = capacity_upper(prob)
    assert res.converged
    assert res.value == pytest.approx(frozen, rel=1e-7)
    assert res.dual_value <= res.value * (1 + 1e-12)


def test_capacity_feasible_and_nonnegative():
    res = capacity_of([(0.2, 0.7)], 0.3, Grid1D(-0.5, 1.5, 200))
    assert np.all(res.density >= 0)
    grid = Grid1D(-0.5, 1.5, 200)
    mids = grid.midpoints
    inside = (mids > 0.2) & (mids < 0.7)
    pot = ToeplitzKernel(grid, 0.3).matvec(res.density)[inside]
    assert pot.min() >= 1 - res.residual - 1e-12


def test_capacity_monotone_in_target():
    grid = Grid1D(-1, 2, 256)
    small = capacity_of([(0.2, 0.5)], 0.25, grid)
    big = capacity_of([(0.1, 0.9)], 0.25, grid)
    assert small.value <= big.value * (1 + 1e-4)


def test_capacity_homogeneity_matched_resolution():
    vals = []
    for ell in (0.25, 0.5, 1.0):
        res = capacity_of([(0, ell)], 0.25, Grid1D(-ell, 2 * ell, 512))
        vals.append(res.value / ell**0.5)
    assert max(vals) / min(vals) - 1 < 1e-6


def test_capacity_refinement_does_not_increase_much():
    coarse = capacity_of([(0, 1)], 0.25, Grid1D(-1, 2, 256), tol=1e-6)
    fine = capacity_of([(0, 1)], 0.25, Grid1D(-1, 2, 1024), tol=1e-6)
    assert fine.value <= coarse.value * (1 + 1e-4)


def test_nonconvergence_is_flagged():
    prob = CapacityProblem(0.25, OpenSetUnion.from_pairs([(0, 1)]), Grid1D(-1, 2, 512), SolverOptions(max_iter=3, tol=1e-12))
    res = capacity_upper(prob)
    assert not res.converged
    assert res.value > 0


def test_config_round_trip_and_json():
    prob = CapacityProblem(0.25, parse_target("0:0.25;0.75:1"), Grid1D(-0.5, 1.5, 64), SolverOptions(500, 0.9, 1e-5))
    back = CapacityProblem.from_config(prob.to_config())
    assert back == prob
    res = capacity_upper(back)
    import json

    doc = json.loads(res.to_json())
    assert set(doc) == {"value", "residual", "iterations"}
    with pytest.raises(ValueError):
        CapacityProblem.from_config("beta = 0.25\n")
    with pytest.raises(ValueError):
        CapacityProblem.from_config(prob.to_config() + "bogus = 1\n")


def test_target_outside_grid_rejected():
    with pytest.raises(ValueError):
        CapacityProblem(0.25, parse_target("0:3"), Grid1D(0, 1, 8))


def test_poisson_examples():
    grid = Grid1D(-2000, 2000, 40000)
    assert poisson_extension(np.ones(40000), grid, 0.0, 1.0) == pytest.approx(1.0, abs=1e-3)
    g2 = Grid1D(-1, 1, 2)
    assert poisson_extension(np.ones(2), g2, 0.0, 1.0) == pytest.approx(0.5)
    g3 = Grid1D(0, 1, 1 + 1)
    assert poisson_extension(np.ones(2), g3, 0.0, 0.5) == pytest.approx(ARCTAN2)
    with pytest.raises(ValueError):
        poisson_extension(np.ones(2), g3, 0.0, 0.0)


def test_poisson_decays_at_height():
    grid = Grid1D(0, 1, 10)
    assert poisson_extension(np.ones(10), grid, 0.5, 1e3) < 1e-2


def test_indicator_box_lower_bound():
    assert indicator_box_lower_bound(Interval(0, 1), 32) == pytest.approx(ARCTAN2, abs=1e-4)
    assert indicator_box_lower_bound(Interval(0, 1), 32) >= ARCTAN2 - 1e-6
    assert indicator_box_lower_bound(Interval(5, 6), 16) == pytest.approx(indicator_box_lower_bound(Interval(0, 1), 16))
    assert indicator_box_lower_bound(Interval(0, 4), 16) == pytest.approx(indicator_box_lower_bound(Interval(0, 1), 16))
    with pytest.raises(ValueError):
        indicator_box_lower_bound(Interval(0, 1), 3)


def test_interval_poisson_matches_grid_version():
    grid = Grid1D(-1, 2, 3)
    f = np.array([0.0, 1.0, 0.0])
    assert interval_poisson(Interval(0, 1), 0.3, 0.2) == pytest.approx(poisson_extension(f, grid, 0.3, 0.2))
