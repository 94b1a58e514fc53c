from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infconv import _backend
from infconv.errors import UsageError
from infconv.families import parse_family
from infconv.grid import GridFunction, even_defect, make_grid, sample
from infconv.transforms import (CostScale, H, inf_conv_brute, inf_conv_quadratic, legendre,
                                legendre_brute, moreau, polar, polar_brute, symmetrize,
                                symmetrize_brute, symmetrize_partial)

from conftest import random_grid_function


def at(f, x):
    nodes = f.spec.axis_nodes(0)
    i = int(np.argmin(np.abs(nodes - x)))
    assert abs(nodes[i] - x) < 1e-12
    return f.values[i]


# infimum convolution -------------------------------------------------------------

def test_zero_is_fixed(grid1, backend):
    f = GridFunction(grid1, np.zeros(241))
    assert np.all(inf_conv_quadratic(f, 1.0, backend).values == 0.0)


def test_quadratic_and_abs_examples(grid1, backend):
    q = H(sample(parse_family("quadratic:a=1"), grid1), backend)
    assert at(q, 2.0) == pytest.approx(1.0, abs=1e-12)
    x = grid1.axis_nodes(0)
    # exact where x/2 is a node, otherwise above by at most h^2/4
    np.testing.assert_allclose(q.values[::2], x[::2] ** 2 / 4, atol=1e-12)
    assert np.all(q.values >= x ** 2 / 4 - 1e-12)
    assert np.all(q.values <= x ** 2 / 4 + 0.05 ** 2 / 4 + 1e-12)
    a = H(sample(parse_family("abs"), grid1), backend)
    assert at(a, 2.0) == pytest.approx(1.5, abs=1e-12)
    assert at(a, 0.5) == pytest.approx(0.125, abs=1e-12)


def test_single_finite_value(grid1, backend):
    v = np.full(241, np.inf)
    v[37] = 1.25
    out = moreau(GridFunction(grid1, v), 2.0, backend)
    x = grid1.axis_nodes(0)
    np.testing.assert_allclose(out.values, 1.25 + (x - x[37]) ** 2 / 4.0, rtol=0, atol=1e-12)


def test_cost_scale_validation():
    with pytest.raises(UsageError):
        CostScale(0.0)
    with pytest.raises(UsageError):
        CostScale(-1.0)


@pytest.mark.parametrize("seed", range(25))
def test_fast_matches_brute_1d(seed, backend):
    rng = np.random.default_rng(seed)
    f = random_grid_function(rng, make_grid(1, 6.0, 241))
    t = float(rng.uniform(0.3, 3.0))
    np.testing.assert_allclose(inf_conv_quadratic(f, t, backend).values,
                               inf_conv_brute(f, t).values, rtol=0, atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_fast_matches_brute_nd(seed, backend):
    rng = np.random.default_rng(100 + seed)
    for spec in (make_grid(2, 4.0, 41), make_grid(3, 2.0, 11)):
        f = random_grid_function(rng, spec)
        np.testing.assert_allclose(inf_conv_quadratic(f, 1.0, backend).values,
                                   inf_conv_brute(f, 1.0).values, rtol=0, atol=1e-9)


def test_backends_agree_bitwise_on_ties():
    if len(_backend.BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    spec = make_grid(1, 2.0, 9)
    # symmetric data forces exact parabola intersections at nodes
    f = GridFunction(spec, np.array([0, 3, 1, 3, 0, 3, 1, 3, 0], float))
    a = inf_conv_quadratic(f, 1.0, "python").values
    b = inf_conv_quadratic(f, 1.0, "compiled").values
    assert np.array_equal(a, b)


@given(st.integers(0, 2 ** 31), st.floats(-5, 5))
@settings(max_examples=30, deadline=None)
def test_monotone_and_constant_shift(seed, c):
    rng = np.random.default_rng(seed)
    spec = make_grid(1, 3.0, 61)
    f = random_grid_function(rng, spec, kind="finite")
    g = GridFunction(spec, f.values + rng.uniform(0, 1, spec.shape))
    Hf, Hg = H(f), H(g)
    assert np.all(Hf.values <= Hg.values)
    assert np.all(Hf.values <= f.values)
    np.testing.assert_allclose(H(GridFunction(spec, f.values + c)).values, Hf.values + c,
                               rtol=0, atol=1e-12)


@pytest.mark.parametrize("fam", ["huber:delta=1", "cosine_bump:amplitude=0.5,frequency=1",
                                 "power4:a=1", "linear:b=1"])
def test_refinement_never_increases(fam):
    f = parse_family(fam)
    coarse, fine = make_grid(1, 6.0, 121), make_grid(1, 6.0, 241)
    hc = H(sample(f, coarse)).values
    hf = H(sample(f, fine)).values[::2]
    assert np.all(hf <= hc + 1e-12)


# Legendre and polar ---------------------------------------------------------------

def test_legendre_examples(grid1, backend):
    q = legendre(sample(parse_family("quadratic:a=1"), grid1), backend=backend)
    assert at(q, 1.0) == pytest.approx(0.5, abs=1e-12)
    p4 = legendre(sample(parse_family("power4:a=1"), grid1), backend=backend)
    assert at(p4, 1.0) == pytest.approx(0.75, abs=2e-3)
    a = legendre(sample(parse_family("abs"), grid1), backend=backend)
    s = grid1.axis_nodes(0)
    inside = np.abs(s) <= 1
    np.testing.assert_allclose(a.values[inside], 0.0, atol=1e-12)
    assert np.all(np.diff(a.values[s > 1]) > 0)


@pytest.mark.parametrize("seed", range(6))
def test_legendre_matches_brute(seed, backend):
    rng = np.random.default_rng(seed)
    for spec in (make_grid(1, 3.0, 61), make_grid(2, 2.0, 21)):
        f = random_grid_function(rng, spec)
        np.testing.assert_allclose(legendre(f, backend=backend).values,
                                   legendre_brute(f).values, rtol=1e-12, atol=1e-9)


def test_legendre_separate_dual_grid(backend):
    spec, dual = make_grid(1, 3.0, 61), make_grid(1, 1.5, 31)
    f = sample(parse_family("huber:delta=1"), spec)
    np.testing.assert_allclose(legendre(f, dual, backend).values,
                               legendre_brute(f, dual).values, atol=1e-9)


def test_polar_examples(grid1, backend):
    F = sample(parse_family("gaussian_density:a=1"), grid1)
    P = polar(F, backend=backend)
    assert at(P, 1.0) == pytest.approx(math.exp(-0.5), abs=1e-12)
    np.testing.assert_allclose(P.values, F.values, atol=1e-12)
    P4 = polar(sample(parse_family("gaussian_density:a=4"), grid1), backend=backend)
    assert at(P4, 2.0) == pytest.approx(math.exp(-0.5), abs=1e-12)
    x = grid1.axis_nodes(0)
    Pe = polar(GridFunction(grid1, np.exp(-np.abs(x))), backend=backend)
    np.testing.assert_allclose(Pe.values[np.abs(x) <= 1], 1.0, atol=1e-12)
    # outside [-1, 1] the infimum sits at the box edge: exp(L (1 - |s|))
    out = np.abs(x) > 1
    np.testing.assert_allclose(Pe.values[out], np.exp(6.0 * (1 - np.abs(x[out]))), rtol=1e-12)


def test_polar_matches_brute(backend):
    rng = np.random.default_rng(7)
    spec = make_grid(2, 2.0, 21)
    F = GridFunction(spec, np.exp(-random_grid_function(rng, spec, kind="finite").values))
    np.testing.assert_allclose(polar(F, backend=backend).values, polar_brute(F).values,
                               rtol=1e-10, atol=0)


def test_polar_rejects_bad_input(grid1):
    with pytest.raises(UsageError):
        polar(GridFunction(grid1, -np.ones(241)))
    with pytest.raises(UsageError):
        polar(GridFunction(grid1, np.zeros(241)))


# symmetrization ------------------------------------------------------------------

def test_symmetrize_examples(grid1, backend):
    assert np.all(symmetrize(GridFunction(grid1, np.zeros(241)), backend).values == 0.0)
    s = symmetrize(sample(parse_family("linear:b=1"), grid1), backend)
    x = grid1.axis_nodes(0)
    # interior nodes reach the optimal shift u = -1; near the edge the box cuts it off
    np.testing.assert_allclose(s.values[np.abs(x) <= 5], -0.5, atol=1e-12)
    q = sample(parse_family("quadratic:a=0.7"), grid1)
    np.testing.assert_allclose(symmetrize(q, backend).values, q.values, atol=1e-12)


def test_symmetrize_partial_examples(backend):
    spec = make_grid(2, 4.0, 81)
    g = sample(parse_family("quadratic:a=1"), spec)
    np.testing.assert_allclose(symmetrize_partial(g, 2, backend=backend).values, g.values,
                               atol=1e-12)
    x, y = spec.points()[..., 0], spec.points()[..., 1]
    g2 = GridFunction(spec, x * x / 2 + y)
    s2 = symmetrize_partial(g2, 2, backend=backend).values
    inner = np.abs(y) <= 3
    np.testing.assert_allclose(s2[inner], (x * x / 2 - 0.5)[inner], atol=1e-12)
    assert np.array_equal(s2, s2[:, ::-1])


@pytest.mark.parametrize("seed", range(4))
def test_symmetrize_matches_brute(seed, backend):
    rng = np.random.default_rng(seed)
    spec1 = make_grid(1, 3.0, 31)
    f = random_grid_function(rng, spec1)
    np.testing.assert_allclose(symmetrize(f, backend).values, symmetrize_brute(f).values,
                               atol=1e-12)
    spec2 = make_grid(2, 2.0, 9)
    g = random_grid_function(rng, spec2)
    np.testing.assert_allclose(symmetrize(g, backend).values, symmetrize_brute(g).values,
                               atol=1e-12)
    for block, axes in ((1, [0]), (2, [1])):
        np.testing.assert_allclose(symmetrize_partial(g, block, backend=backend).values,
                                   symmetrize_brute(g, axes).values, atol=1e-12)
    spec3 = make_grid(3, 1.0, 5)
    h = random_grid_function(rng, spec3)
    np.testing.assert_allclose(symmetrize_partial(h, 1, backend=backend).values,
                               symmetrize_brute(h, [0, 1]).values, atol=1e-12)


@given(st.integers(0, 2 ** 31))
@settings(max_examples=25, deadline=None)
def test_symmetrize_even_monotone_dominated(seed):
    rng = np.random.default_rng(seed)
    spec = make_grid(2, 2.0, 11)
    f = random_grid_function(rng, spec, kind="finite")
    Sf = symmetrize(f)
    assert even_defect(Sf) == 0.0
    g = GridFunction(spec, f.values + rng.uniform(0, 1, spec.shape))
    assert np.all(Sf.values <= symmetrize(g).values)
    even = GridFunction(spec, 0.5 * (f.values + f.values[::-1, ::-1]))
    assert np.all(symmetrize(even).values <= even.values)
    part = symmetrize_partial(f, 2)
    assert np.array_equal(part.values, part.values[:, ::-1])


def test_block_split_errors(grid2):
    g = GridFunction(grid2, np.zeros(grid2.shape))
    with pytest.raises(UsageError):
        symmetrize_partial(g, 3)
    with pytest.raises(UsageError):
        symmetrize_partial(GridFunction(make_grid(1, 1.0, 5), np.zeros(5)), 2)
