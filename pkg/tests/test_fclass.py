from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infconv.errors import UsageError
from infconv.families import FunctionFamily, parse_family
from infconv.fclass import (check_membership, class_closure_checks, lipschitz_estimate,
                            marginal_log_integral, marginal_membership, second_difference_ratio)
from infconv.grid import GridFunction, make_grid, sample


def test_lipschitz_examples(grid1):
    assert lipschitz_estimate(GridFunction(grid1, np.full(241, 3.0))) == 0.0
    assert lipschitz_estimate(sample(parse_family("linear:b=1"), grid1)) == pytest.approx(1.0)
    assert lipschitz_estimate(sample(parse_family("quadratic:a=1"), grid1)) == pytest.approx(5.975)


def test_second_difference_examples(grid1):
    assert abs(second_difference_ratio(sample(parse_family("linear:b=2"), grid1))) <= 1e-9
    # on the default grid the samples themselves carry rounding (x = k * 0.05 is inexact)
    assert second_difference_ratio(sample(parse_family("quadratic:a=3"), grid1)) == pytest.approx(3.0, abs=1e-10)
    x = grid1.axis_nodes(0)
    sd = second_difference_ratio(GridFunction(grid1, np.cos(x)))
    h = 0.05
    # the node x = pi is not on the lattice, so the scan sits just below the analytic value
    assert sd <= (2 - 2 * math.cos(h)) / h ** 2 + 1e-12
    assert sd == pytest.approx((2 - 2 * math.cos(h)) / h ** 2, abs=1e-3)


@pytest.mark.parametrize("a", [0.25, 0.5, 3.0, 0.8])
@pytest.mark.parametrize("dim", [1, 2])
def test_quadratic_exactness(a, dim):
    # dyadic spacing 1/16: every sample is exact, so the scan is exact too
    spec = make_grid(dim, 4.0, 129 if dim == 1 else 33)
    assert second_difference_ratio(sample(parse_family(f"quadratic:a={a}"), spec)) == pytest.approx(a, abs=1e-12)


def test_scan_rejects_inf(grid1):
    v = np.zeros(241)
    v[3] = np.inf
    with pytest.raises(UsageError):
        lipschitz_estimate(GridFunction(grid1, v))


def test_membership_examples(grid1):
    eps = 0.1
    f = sample(parse_family(f"cosine_bump:amplitude={eps ** 2}"), grid1)
    assert check_membership(f, 1.0, eps).member
    assert not check_membership(sample(parse_family("quadratic:a=1"), grid1), 1.0, 0.1).member
    assert check_membership(GridFunction(grid1, np.zeros(241)), 2.0, 0.3).member
    with pytest.raises(UsageError):
        check_membership(f, 0.0, 0.1)
    with pytest.raises(UsageError):
        check_membership(f, 1.0, 1.5)


@pytest.mark.parametrize("fam", ["cosine_bump:amplitude=0.3", "huber:delta=1", "abs",
                                 "random_even_poly:seed=2,degree=4"])
def test_scans_monotone_in_resolution(fam):
    f = parse_family(fam)
    coarse, fine = make_grid(1, 3.0, 31), make_grid(1, 3.0, 61)
    assert lipschitz_estimate(sample(f, fine)) >= lipschitz_estimate(sample(f, coarse)) - 1e-12
    assert (second_difference_ratio(sample(f, fine))
            >= second_difference_ratio(sample(f, coarse)) - 1e-12)


def test_diagonal_steps_matter():
    # x*y is affine along each axis; only the diagonal steps see its curvature
    spec = make_grid(2, 2.0, 21)
    p = spec.points()
    f = GridFunction(spec, p[..., 0] * p[..., 1])
    assert abs(check_membership(f, 1.0, 0.5, per_axis=True).second_diff) <= 1e-12
    assert second_difference_ratio(f) == pytest.approx(1.0, abs=1e-12)


def test_marginal_examples():
    spec = make_grid(2, 6.0, 121)
    x, y = spec.points()[..., 0], spec.points()[..., 1]
    g = np.cos(y) + y * y / 4
    phi = marginal_log_integral(GridFunction(spec, g))
    np.testing.assert_allclose(phi.values, g[0], atol=1e-6)
    spec4 = make_grid(2, 4.0, 81)
    x, y = spec4.points()[..., 0], spec4.points()[..., 1]
    phi = marginal_log_integral(GridFunction(spec4, x * x / 2 + y * y / 2))
    yy = spec4.axis_nodes(1)
    np.testing.assert_allclose(phi.values, yy ** 2 / 2 + 0.5 * math.log(2), atol=1e-4)


def test_marginal_is_stable_for_large_values():
    spec = make_grid(2, 3.0, 31)
    x, y = spec.points()[..., 0], spec.points()[..., 1]
    phi = marginal_log_integral(GridFunction(spec, x * x / 2 + y * y / 2 + 2000.0))
    assert np.all(np.isfinite(phi.values))


def test_marginal_membership_preserved():
    eps = 0.3
    spec = make_grid(2, 6.0, 121)
    f = FunctionFamily("c", {}, "even", lambda p: eps ** 2 * np.cos(p[..., 0] + p[..., 1]))
    slices, phi = marginal_membership(sample(f, spec), 1.0, eps)
    assert slices.member and phi.member
    assert phi.lip <= slices.lip + 1e-12


def test_closure_operations():
    g1, g2 = make_grid(1, 6.0, 241), make_grid(2, 6.0, 61)
    members = [parse_family("cosine_bump:amplitude=0.04,frequency=1"),
               parse_family("cosine_bump:amplitude=0.02,frequency=1.3,shift=0.4")]
    out = class_closure_checks(members, 1.0, 0.2, g1, parse_family("cosine_bump:amplitude=0.04"), g2)
    assert set(out) >= {"convex_combination", "translate", "reflection", "infimum",
                        "symmetrize_block2"}
    assert all(c.member for c in out.values())
    assert out["translate"].to_dict()["member"] is True


@given(st.floats(0.05, 0.5), st.floats(0.2, 1.0), st.floats(-2, 2))
@settings(max_examples=20, deadline=None)
def test_closure_property(eps, freq, shift):
    amp = eps ** 2 / max(freq, freq ** 2) * 0.9
    members = [parse_family(f"cosine_bump:amplitude={amp},frequency={freq}"),
               parse_family(f"cosine_bump:amplitude={amp},frequency={freq},shift={shift}")]
    out = class_closure_checks(members, 1.0, eps, make_grid(1, 6.0, 121))
    assert all(c.member for c in out.values())
