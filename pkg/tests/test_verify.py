from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infconv import verify as V
from infconv.errors import ClassMembershipError, HypothesisViolation, ParityError, UsageError
from infconv.families import parse_family
from infconv.grid import GridFunction, even_defect, make_grid, sample
from infconv.transforms import H, inf_conv_brute, symmetrize_brute


def test_report_pass_rule_and_dict():
    r = V.VerificationReport("x", {}, 1.0, 0.9, 0.2)
    assert r.passed and r.margin == pytest.approx(-0.1)
    d = r.to_dict()
    assert list(d) == ["id", "inequality_id", "inputs", "lhs", "rhs", "margin", "tolerance",
                       "pass", "integrator", "tail_mass", "notes"]
    assert not V.VerificationReport("x", {}, 1.0, 0.9, 0.05).passed


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 5))
def test_pass_iff_within_tolerance(lhs, rhs, tol):
    assert V.VerificationReport("x", {}, lhs, rhs, tol).passed == (lhs <= rhs + tol)


# product inequalities ---------------------------------------------------------------

@pytest.mark.parametrize("a", [0.25, 1.0, 2.0])
def test_symmetric_tau_quadratic(a):
    r = V.verify_product_inequality(f"quadratic:a={a}", "symmetric_tau", dim=1)
    closed = r.notes["closed_form"]
    assert closed["product"] == pytest.approx(1.0, abs=1e-14)
    assert r.notes["factor1"] == pytest.approx(closed["factor1"], rel=1e-12)
    assert r.notes["factor2"] == pytest.approx(closed["factor2"], rel=5e-3)
    assert r.lhs == pytest.approx(1.0, abs=5e-3)
    assert r.integrator["factor1"].startswith("gauss_hermite")


def test_symmetric_tau_zero_is_exact():
    r = V.verify_product_inequality("constant:c=0", "symmetric_tau")
    assert r.notes["factor1"] == pytest.approx(1.0, abs=1e-15)
    assert r.lhs == pytest.approx(1.0, abs=2e-8)


def test_symmetric_tau_rejects_odd():
    with pytest.raises(ParityError):
        V.verify_product_inequality("linear:b=1", "symmetric_tau")


def test_tau_quarter_linear_closed_form():
    r = V.verify_product_inequality("linear:b=1", "tau_quarter")
    assert r.notes["closed_form"]["product"] == pytest.approx(1.0)
    assert r.notes["factor1"] == pytest.approx(math.exp(0.5), rel=1e-12)
    assert r.notes["factor2"] == pytest.approx(math.exp(-0.5), rel=1e-4)
    assert r.lhs == pytest.approx(1.0, abs=5e-3) and r.passed


@pytest.mark.parametrize("d", [1, 2])
def test_ball_gaussian(d):
    r = V.verify_product_inequality("gaussian_density:a=1", "ball", dim=d)
    assert r.rhs == pytest.approx((2 * math.pi) ** d)
    assert r.lhs == pytest.approx(r.rhs, rel=1e-2)
    assert r.notes["factor1"] == pytest.approx(math.sqrt(2 * math.pi) ** d, rel=1e-6)


def test_ball_needs_nonnegative_even():
    with pytest.raises(UsageError):
        V.verify_product_inequality("quadratic:a=1,scale=-1", "ball")
    with pytest.raises(ParityError):
        V.verify_product_inequality("gaussian_density:a=1,shift=1", "ball")


def test_unknown_mode():
    with pytest.raises(UsageError):
        V.verify_product_inequality("quadratic", "nope")


# Prekopa-Leindler -------------------------------------------------------------------

def test_pl_examples():
    r = V.verify_prekopa_leindler("quadratic:a=1", "quadratic:a=1", "quadratic:a=1")
    assert r.lhs == pytest.approx(math.sqrt(2 * math.pi), abs=1e-4)
    assert r.rhs == pytest.approx(math.sqrt(2 * math.pi), abs=1e-4)
    r = V.verify_prekopa_leindler("quadratic:a=1,shift=1", "quadratic:a=1,shift=-1", "quadratic:a=1")
    assert r.lhs == pytest.approx(r.rhs, abs=1e-4) and r.passed
    r = V.verify_prekopa_leindler("constant:c=0", "constant:c=0", "constant:c=0")
    assert r.lhs == pytest.approx(12.0) and r.rhs == pytest.approx(12.0)


def test_pl_hypothesis_violation_has_witness():
    with pytest.raises(HypothesisViolation) as info:
        V.verify_prekopa_leindler("quadratic:a=1", "quadratic:a=1", "quadratic:a=2")
    x, y = info.value.witness
    w = lambda t: t * t  # a=2
    u = lambda t: t * t / 2
    assert w((x[0] + y[0]) / 2) > 0.5 * (u(x[0]) + u(y[0]))


def test_pl_hypothesis_scan_matches_brute():
    rng = np.random.default_rng(0)
    spec = make_grid(1, 1.0, 11)
    U, V_, W = (rng.normal(size=11) for _ in range(3))
    worst, _ = V.prekopa_leindler_hypothesis(U, V_, W, spec, slack=0.0)
    brute = max(W[(i + j) // 2] - 0.5 * (U[i] + V_[j])
                for i in range(11) for j in range(11) if (i + j) % 2 == 0)
    assert worst == pytest.approx(brute, abs=1e-15)


# symmetrization ------------------------------------------------------------------

def test_alpha_examples():
    r = V.verify_symmetrization("quadratic:a=1", "alpha")
    assert r.lhs == pytest.approx(r.rhs, rel=1e-12)
    r = V.verify_symmetrization("linear:b=1", "alpha")
    assert r.lhs == pytest.approx(math.exp(0.5), abs=1e-4)
    assert r.rhs == pytest.approx(math.exp(0.5), abs=1e-4)


def test_beta_quadratic_equality():
    r = V.verify_symmetrization("quadratic:a=1", "beta", dim=2)
    assert r.lhs == pytest.approx(r.rhs, rel=1e-12)


def test_beta_and_steiner_need_even():
    for mode in ("beta", "steiner_pointwise"):
        with pytest.raises(ParityError):
            V.verify_symmetrization("linear:b=1", mode, dim=2)


def test_random_even_grid_is_even_and_seeded():
    spec = make_grid(2, 3.0, 31)
    a, b = V.random_even_grid(spec, 5), V.random_even_grid(spec, 5)
    assert even_defect(a) == 0.0
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, V.random_even_grid(spec, 6).values)


@pytest.mark.parametrize("seed", range(3))
def test_steiner_pointwise_with_brute_transforms(seed):
    spec = make_grid(2, 2.0, 15)
    g = V.random_even_grid(spec, seed)
    r = V.verify_symmetrization(g, "steiner_pointwise")
    assert r.lhs <= 1e-9
    # recompute both sides with the oracles
    Hg = inf_conv_brute(g)
    left = -symmetrize_brute(GridFunction(spec, -Hg.values), [0]).values
    right = inf_conv_brute(symmetrize_brute(g, [1])).values
    assert float((left - right).max()) == pytest.approx(r.lhs, abs=1e-12)


# scaling ---------------------------------------------------------------------------

def test_scaling_zero_family():
    r = V.verify_scaling("constant:c=0", (0.3, 0.1), spec=make_grid(1, 6.0, 241))
    for row in r.notes["table"]:
        assert abs(row["excess"]) <= 1e-7
    assert r.notes["slope_vacuous"] and r.passed


def test_scaling_membership_enforced():
    with pytest.raises(ClassMembershipError):
        V.verify_scaling("cosine_bump:frequency=1", (0.5,), eps_power=1.0,
                         spec=make_grid(1, 6.0, 241))


def test_scaling_requires_even():
    with pytest.raises(ParityError):
        V.verify_scaling("linear:b=1", (0.1,), eps_power=3.0, spec=make_grid(1, 6.0, 241))


def test_tensorization_needs_K():
    with pytest.raises(UsageError):
        V.verify_scaling(mode="tensorization", eps_list=(0.2,), spec=make_grid(2, 6.0, 61))


def test_refined_moreau_bounds():
    fam = parse_family("cosine_bump:amplitude=0.1,frequency=1")
    spec = make_grid(1, 6.0, 121)
    lattice = H(sample(fam, spec)).values
    refined, resid = V.refined_moreau(fam, spec)
    assert np.all(refined.values <= lattice)
    assert resid < 1e-8
    # fine-lattice values are upper bounds too, and the refined ones sit below them
    fine = H(sample(fam, make_grid(1, 6.0, 24001))).values[::200]
    assert np.all(refined.values <= fine + 1e-12)
    assert np.max(fine - refined.values) < 1e-7


# dimension trick and volumes -------------------------------------------------------

def test_dimension_trick_examples():
    r = V.verify_dimension_trick("quadratic:a=1")
    assert r.passed and r.notes["nodes_beyond_slack"] == 0
    assert r.notes["strict_violation"] <= 1e-9
    r0 = V.verify_dimension_trick("constant:c=0")
    assert r0.lhs == 0.0 and r0.notes["interpolation_slack"] == 0.0
    with pytest.raises(ParityError):
        V.verify_dimension_trick("linear:b=1")


def test_ball_area_formula():
    assert V.lp_ball_area(2) == pytest.approx(math.pi)
    assert V.lp_ball_area(1) == pytest.approx(2.0)
    assert V.lp_ball_area(math.inf) == 4.0
    assert V.conjugate_exponent(1) == math.inf
    assert V.conjugate_exponent(3) == pytest.approx(1.5)
    assert V.unit_ball_volume(2) == pytest.approx(math.pi)


@pytest.mark.parametrize("p,product", [(2, math.pi ** 2), (1, 8.0), (math.inf, 8.0)])
def test_santalo_examples(p, product):
    r = V.verify_santalo_volume(p)
    assert r.lhs == pytest.approx(product, rel=1e-2)
    assert r.notes["exact_product"] == pytest.approx(product)
    assert r.passed


def test_symmetric_poincare_report():
    r = V.verify_symmetric_poincare(seed=1, count=5)
    assert r.notes["h2_ratio"] == pytest.approx(1.0, abs=1e-12)
    assert r.passed and len(r.notes["ratios"]) == 5


def test_determinism():
    a = V.verify_product_inequality("huber:delta=1", "symmetric_tau", dim=2).to_dict()
    b = V.verify_product_inequality("huber:delta=1", "symmetric_tau", dim=2).to_dict()
    assert a == b


@pytest.mark.parametrize("fam", ["quadratic:a=1", "huber:delta=1", "abs",
                                 "cosine_bump:amplitude=0.5,frequency=1"])
def test_refinement_keeps_passing(fam):
    coarse = V.verify_product_inequality(fam, "symmetric_tau", make_grid(1, 6.0, 121))
    fine = V.verify_product_inequality(fam, "symmetric_tau", make_grid(1, 6.0, 241))
    assert coarse.passed and fine.passed
    # transform values only drop under refinement; the trapezoid sum moves by ~1e-8
    assert fine.lhs <= coarse.lhs + 1e-7
