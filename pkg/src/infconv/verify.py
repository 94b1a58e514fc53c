"""Inequality checks.  Each check returns a :class:`VerificationReport`.

A report passes when ``lhs <= rhs + tolerance``.  Integral checks use a
relative tolerance (converted to absolute against ``rhs``); pointwise lattice
checks use an absolute slack.  Usage errors (wrong parity, violated hypotheses,
non-members) raise instead of producing a failing report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from . import hermite
from .errors import ClassMembershipError, HypothesisViolation, ParityError, UsageError
from .families import FunctionFamily, parse_family
from .fclass import check_membership
from .gauss import (QuadratureRule, expect_closed, expect_grid, gauss_hermite_rule,
                    integrate_box, tail_mass, concentration_moment_check)
from .grid import GridFunction, GridSpec, default_grid, even_defect, make_grid, sample
from .transforms import inf_conv_quadratic, polar, symmetrize, symmetrize_partial

INTEGRAL_REL_TOL = 1e-2
LATTICE_TOL = 1e-9
EVEN_TOL = 1e-9
DEFAULT_ORDER = 64

MODES = ("symmetric_tau", "tau_quarter", "ball", "prekopa_leindler", "alpha", "beta",
         "steiner_pointwise", "small_eps", "tensorization", "dimension_trick",
         "santalo_volume", "symmetric_poincare", "concentration")


@dataclass
class VerificationReport:
    inequality_id: str
    inputs: dict
    lhs: float
    rhs: float
    tolerance: float
    integrator: dict = field(default_factory=dict)
    tail_mass: float = 0.0
    notes: dict = field(default_factory=dict)
    check_id: str = ""
    extra_pass: bool = True

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.rhs + self.tolerance and self.extra_pass)

    def to_dict(self) -> dict:
        return {
            "id": self.check_id or self.inequality_id,
            "inequality_id": self.inequality_id,
            "inputs": self.inputs,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "integrator": self.integrator,
            "tail_mass": self.tail_mass,
            "notes": self.notes,
        }


# helpers -------------------------------------------------------------------------

def _family(f) -> FunctionFamily:
    return parse_family(f) if isinstance(f, str) else f


def _grid_inputs(spec: GridSpec) -> dict:
    return spec.to_dict()


def _require_even(g: GridFunction, what: str):
    defect = even_defect(g)
    if defect > EVEN_TOL:
        raise ParityError(f"{what} requires an even function (even defect {defect:.3g})")


def _exp_grid(vals: np.ndarray) -> np.ndarray:
    with np.errstate(over="raise"):
        return np.exp(vals)


def _rule(rule) -> QuadratureRule:
    if rule is None:
        return gauss_hermite_rule(DEFAULT_ORDER)
    if isinstance(rule, int):
        return gauss_hermite_rule(rule)
    return rule


def _closed_form_product(fam: FunctionFamily, mode: str, dim: int) -> dict | None:
    """Exact values for the quadratic / linear witnesses, else None."""
    if fam.name == "quadratic" and set(fam.params) == {"a"}:
        a = fam.params["a"]
        f1 = (1 + a) ** (-dim / 2)
        if mode == "symmetric_tau":
            f2 = (1 + a) ** (dim / 2)
        elif mode == "tau_quarter":
            f2 = ((1 + a) / (1 + 2 * a)) ** (-dim / 2)
        else:
            return None
        return {"factor1": f1, "factor2": f2, "product": f1 * f2}
    if fam.name == "linear" and mode == "tau_quarter" and set(fam.params) == {"b"}:
        b = fam.params["b"]
        f1 = math.exp(dim * b * b / 2)
        f2 = math.exp(-dim * b * b / 2)
        return {"factor1": f1, "factor2": f2, "product": f1 * f2}
    if fam.name == "gaussian_density" and mode == "ball":
        a = fam.params["a"]
        f1 = (2 * math.pi / a) ** (dim / 2)
        f2 = (2 * math.pi * a) ** (dim / 2)
        return {"factor1": f1, "factor2": f2, "product": f1 * f2}
    return None


# product inequalities ---------------------------------------------------------------

def verify_product_inequality(f, mode: str = "symmetric_tau", spec: GridSpec | None = None,
                              rule=None, dim: int = 1, rel_tol: float = INTEGRAL_REL_TOL,
                              backend: str | None = None) -> VerificationReport:
    """Product of the two integrals in the property-(tau) / functional Santalo form.

    ``symmetric_tau``: E e^{-f} E e^{Hf} <= 1 for even f (cost |y|^2/2).
    ``tau_quarter``:   E e^{-f} E e^{f [] |y|^2/4} <= 1, any parity.
    ``ball``:          int F int F deg <= (2 pi)^d for even F >= 0.
    """
    fam = _family(f)
    spec = spec or default_grid(dim)
    dim = spec.dim
    F = sample(fam, spec)
    inputs = {"family": fam.spec_string(), "mode": mode, "grid": _grid_inputs(spec)}
    if mode in ("symmetric_tau", "tau_quarter"):
        if mode == "symmetric_tau":
            _require_even(F, "symmetric_tau")
        rule = _rule(rule)
        t = 1.0 if mode == "symmetric_tau" else 2.0
        f1 = expect_closed(FunctionFamily("exp(-f)", {}, fam.parity,
                                          lambda x: np.exp(-fam.func(x))), rule, dim)
        Hf = inf_conv_quadratic(F, t, backend)
        e2 = expect_grid(_exp_grid(Hf.values), spec)
        lhs = f1 * e2.value
        integrator = {"factor1": f"gauss_hermite(m={rule.order})", "factor2": "trapezoid"}
        rhs = 1.0
        notes = {"factor1": f1, "factor2": e2.value, "cost_t": t}
        tm = e2.tail_mass
    elif mode == "ball":
        _require_even(F, "ball")
        if (F.values < 0).any():
            raise UsageError("ball mode needs a non-negative function")
        P = polar(F, backend=backend)
        f1 = integrate_box(F.values, spec)
        f2 = integrate_box(P.values, spec)
        lhs = f1 * f2
        rhs = (2 * math.pi) ** dim
        integrator = {"factor1": "lebesgue_trapezoid", "factor2": "lebesgue_trapezoid"}
        notes = {"factor1": f1, "factor2": f2}
        tm = tail_mass(spec)
    else:
        raise UsageError(f"unknown product mode {mode!r}")
    closed = _closed_form_product(fam, mode, dim)
    if closed is not None:
        notes["closed_form"] = closed
    return VerificationReport(mode, inputs, lhs, rhs, rel_tol * abs(rhs), integrator, tm, notes)


# Prekopa-Leindler ---------------------------------------------------------------

def prekopa_leindler_hypothesis(U, V, W, spec: GridSpec, slack: float = 1e-12):
    """Largest ``w((x+y)/2) - (u(x) + v(y))/2`` over node pairs with a node midpoint.

    Returns ``(violation, witness)`` where witness is ``(x, y)`` at the maximum.
    """
    halves = [(n - 1) // 2 for n in spec.counts]
    worst, witness = -np.inf, None
    for k in product(*[range(-m, m + 1) for m in halves]):
        mid = tuple(slice(abs(c), n - abs(c)) for c, n in zip(k, spec.counts))
        xs = tuple(slice(abs(c) + c, n - abs(c) + c) for c, n in zip(k, spec.counts))
        ys = tuple(slice(abs(c) - c, n - abs(c) - c) for c, n in zip(k, spec.counts))
        gap = W[mid] - 0.5 * (U[xs] + V[ys])
        scale = slack * (1.0 + np.abs(W[mid]) + 0.5 * (np.abs(U[xs]) + np.abs(V[ys])))
        excess = gap - scale
        j = int(np.argmax(excess))
        if excess.flat[j] > worst:
            worst = float(excess.flat[j])
            mi = np.unravel_index(j, excess.shape)
            m_idx = tuple(int(i) + abs(c) for i, c in zip(mi, k))
            witness = (m_idx, k)
    if witness is None:
        return worst, None
    m_idx, k = witness
    h = spec.spacings
    node = lambda idx: [((i - (n - 1) // 2) * hh) for i, n, hh in zip(idx, spec.counts, h)]
    x = node([i + c for i, c in zip(m_idx, k)])
    y = node([i - c for i, c in zip(m_idx, k)])
    return worst, (x, y)


def verify_prekopa_leindler(u, v, w, spec: GridSpec | None = None, dim: int = 1,
                            rel_tol: float = INTEGRAL_REL_TOL) -> VerificationReport:
    """(int e^-u)^(1/2) (int e^-v)^(1/2) <= int e^-w over the box (Lebesgue)."""
    fu, fv, fw = _family(u), _family(v), _family(w)
    spec = spec or default_grid(dim)
    U, V, W = (sample(f, spec).values for f in (fu, fv, fw))
    violation, witness = prekopa_leindler_hypothesis(U, V, W, spec)
    if violation > 0:
        raise HypothesisViolation(
            f"midpoint hypothesis fails at x={witness[0]}, y={witness[1]} "
            f"(excess {violation:.3g})", witness=witness)
    iu = integrate_box(np.exp(-U), spec)
    iv = integrate_box(np.exp(-V), spec)
    iw = integrate_box(np.exp(-W), spec)
    lhs = math.sqrt(iu) * math.sqrt(iv)
    inputs = {"u": fu.spec_string(), "v": fv.spec_string(), "w": fw.spec_string(),
              "grid": _grid_inputs(spec)}
    notes = {"int_exp_u": iu, "int_exp_v": iv, "hypothesis_max_gap": violation}
    return VerificationReport("prekopa_leindler", inputs, lhs, iw, rel_tol * iw,
                              {"all": "lebesgue_trapezoid"}, tail_mass(spec), notes)


# symmetrization -------------------------------------------------------------------

def random_even_grid(spec: GridSpec, seed: int, noise: float = 0.1) -> GridFunction:
    """Seeded even grid function: random bowl + even cosines + symmetrized noise."""
    rng = np.random.default_rng(seed)
    x = spec.points()
    a = rng.uniform(0.3, 1.5)
    vals = 0.5 * a * np.sum(x * x, axis=-1)
    for _ in range(3):
        omega = rng.normal(0.0, 1.0, spec.dim)
        vals = vals + rng.uniform(-0.5, 0.5) * np.cos(x @ omega)
    r = rng.normal(0.0, noise, spec.shape)
    vals = vals + r
    flipped = vals[(slice(None, None, -1),) * spec.dim]
    return GridFunction(spec, 0.5 * (vals + flipped), "even")


def _as_grid(f, spec: GridSpec | None, dim: int) -> tuple[GridFunction, str]:
    if isinstance(f, GridFunction):
        return f, "grid_function"
    fam = _family(f)
    spec = spec or default_grid(dim)
    return sample(fam, spec), fam.spec_string()


def verify_symmetrization(f, mode: str = "alpha", spec: GridSpec | None = None, dim: int = 1,
                          rel_tol: float = INTEGRAL_REL_TOL, split: int | None = None,
                          backend: str | None = None) -> VerificationReport:
    """``alpha``: E e^{-f} <= E e^{-Sf};  ``beta``: E e^{Hg} <= E e^{H S2 g};
    ``steiner_pointwise``: -S1(-Hg) <= H S2 g node-wise (g even on a product grid)."""
    if mode != "alpha" and dim == 1 and spec is None:
        dim = 2
    G, label = _as_grid(f, spec, dim)
    spec = G.spec
    inputs = {"function": label, "mode": mode, "grid": _grid_inputs(spec)}
    if mode == "alpha":
        Sf = symmetrize(G, backend)
        lhs_e = expect_grid(np.exp(-G.values), spec)
        rhs_e = expect_grid(np.exp(-Sf.values), spec)
        return VerificationReport("alpha", inputs, lhs_e.value, rhs_e.value,
                                  rel_tol * rhs_e.value,
                                  {"lhs": "trapezoid", "rhs": "trapezoid"}, lhs_e.tail_mass,
                                  {"even_defect_Sf": even_defect(Sf)})
    if spec.dim < 2:
        raise UsageError(f"{mode} needs a product grid (dim >= 2)")
    _require_even(G, mode)
    Hg = inf_conv_quadratic(G, 1.0, backend)
    HS2g = inf_conv_quadratic(symmetrize_partial(G, 2, split, backend), 1.0, backend)
    if mode == "beta":
        lhs_e = expect_grid(_exp_grid(Hg.values), spec)
        rhs_e = expect_grid(_exp_grid(HS2g.values), spec)
        return VerificationReport("beta", inputs, lhs_e.value, rhs_e.value,
                                  rel_tol * rhs_e.value,
                                  {"lhs": "trapezoid", "rhs": "trapezoid"}, lhs_e.tail_mass, {})
    if mode == "steiner_pointwise":
        neg = GridFunction(spec, -np.asarray(Hg.values))
        left = -np.asarray(symmetrize_partial(neg, 1, split, backend).values)
        gap = left - np.asarray(HS2g.values)
        worst = float(gap.max())
        notes = {"nodes": int(gap.size), "nodes_above_slack": int((gap > LATTICE_TOL).sum())}
        return VerificationReport("steiner_pointwise", inputs, worst, 0.0, LATTICE_TOL,
                                  {"pointwise": "lattice"}, tail_mass(spec), notes)
    raise UsageError(f"unknown symmetrization mode {mode!r}")


# scaling ----------------------------------------------------------------------------

SCALING_GRIDS = {1: (6.0, 65537), 2: (6.0, 601)}


def scaling_grid(dim: int) -> GridSpec:
    L, n = SCALING_GRIDS[dim]
    return make_grid(dim, L, n)


def _loglog_slope(eps: list[float], vals: list[float]) -> float:
    x = np.log(np.asarray(eps))
    y = np.log(np.asarray(vals))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class ScalingRow:
    eps: float
    product: float
    excess: float
    floor: float
    lip: float
    second_diff: float


def _numerical_gradient(fam: FunctionFamily, z: np.ndarray, step: float = 1e-5) -> np.ndarray:
    g = np.empty_like(z)
    for i in range(z.shape[-1]):
        e = np.zeros(z.shape[-1])
        e[i] = step
        g[..., i] = (fam.func(z + e) - fam.func(z - e)) / (2 * step)
    return g


def refined_moreau(fam: FunctionFamily, spec: GridSpec, t: float = 1.0, iters: int = 40,
                   backend: str | None = None) -> tuple[GridFunction, float]:
    """Lattice infimum convolution improved by off-lattice candidates.

    At every node x the proximal fixed point ``z = x - t grad f(z)`` is iterated
    from ``z = x``; ``f(z) + |z - x|^2 / (2t)`` is an upper bound on the true
    value for any z, so taking the minimum with the lattice result keeps the
    one-sided bias while removing most of the O(h^2) lattice error.  Returns the
    grid function and the largest final fixed-point residual.
    """
    lattice = inf_conv_quadratic(sample(fam, spec), t, backend)
    x = spec.points()
    z = x.copy()
    for _ in range(iters):
        z = x - t * _numerical_gradient(fam, z)
    resid = float(np.max(np.abs(z - (x - t * _numerical_gradient(fam, z)))))
    cand = fam.func(z) + np.sum((z - x) ** 2, axis=-1) / (2 * t)
    vals = np.minimum(np.asarray(lattice.values), cand)
    return GridFunction(spec, vals, lattice.parity), resid


def _scaling_rows(builder: Callable[[float], FunctionFamily], eps_list, C: float,
                  spec: GridSpec, membership_spec: GridSpec, per_axis: bool, backend,
                  refine: bool = False):
    rows = []
    for eps in eps_list:
        fam = builder(eps)
        M = sample(fam, membership_spec)
        _require_even(M, "scaling")
        cert = check_membership(M, C, eps, per_axis=per_axis)
        if not cert.member:
            raise ClassMembershipError(
                f"{fam.spec_string()} is not in F({C}, {eps}): lip={cert.lip:.4g}, "
                f"second_diff={cert.second_diff:.4g}")
        F = sample(fam, spec)
        e1 = expect_grid(np.exp(-F.values), spec)
        lam = max(cert.second_diff, 0.0)
        if refine:
            Hf, resid = refined_moreau(fam, spec, 1.0, backend=backend)
            # suboptimality of a point with fixed-point residual r is about r^2 / 2
            bias = (1.0 + lam) * resid ** 2 + 1e-12
        else:
            Hf = inf_conv_quadratic(F, 1.0, backend)
            bias = (1.0 + lam) * sum(h * h for h in spec.spacings) / 8.0
        e2 = expect_grid(_exp_grid(Hf.values), spec)
        prod = e1.value * e2.value
        floor = bias + 4.0 * e1.tail_mass
        rows.append(ScalingRow(float(eps), prod, prod - 1.0, floor, cert.lip, cert.second_diff))
    return rows


def _builder(family, eps_power: float) -> Callable[[float], FunctionFamily]:
    if callable(family) and not isinstance(family, FunctionFamily):
        return family
    base = _family(family)
    return lambda eps: base.scaled(eps ** eps_power)


def verify_scaling(family="cosine_bump:frequency=1", eps_list=(0.4, 0.2, 0.1, 0.05),
                   mode: str = "small_eps", eps_power: float = 2.0, C: float = 1.0,
                   spec: GridSpec | None = None, membership_spec: GridSpec | None = None,
                   K_fit: float | None = None, min_slope: float = 2.9,
                   refine: bool | None = None, backend: str | None = None) -> VerificationReport:
    """Scaling of ``E e^{-f_eps} E e^{H f_eps} - 1`` for ``f_eps = eps**eps_power * family``.

    ``small_eps`` (1-D): fits ``K_fit = max excess / eps^3``, checks every
    excess against ``K_fit eps^3`` and requires a log-log slope of
    ``|excess|`` against eps of at least ``min_slope`` over the points where
    ``|excess|`` exceeds ten times the discretization floor.

    ``tensorization`` (2-D): checks the product against ``(1 + K_fit eps^3)^2``
    with ``K_fit`` supplied (normally from a ``small_eps`` run), up to the floor.

    ``refine`` (default: on for tensorization) adds off-lattice proximal
    candidates to the transform, see :func:`refined_moreau`; without it the
    2-D lattice bias at affordable resolutions exceeds the effect being measured.
    """
    builder = _builder(family, eps_power)
    dim = 1 if mode == "small_eps" else 2
    spec = spec or scaling_grid(dim)
    membership_spec = membership_spec or default_grid(dim)
    eps_list = [float(e) for e in eps_list]
    label = family if isinstance(family, str) else getattr(family, "spec_string", lambda: "custom")()
    inputs = {"family": label, "eps_power": eps_power, "eps_list": eps_list, "C": C,
              "mode": mode, "grid": _grid_inputs(spec)}
    if refine is None:
        refine = mode == "tensorization"
    inputs["refine"] = bool(refine)
    rows = _scaling_rows(builder, eps_list, C, spec, membership_spec,
                         per_axis=(mode == "tensorization"), backend=backend, refine=refine)
    table = [{"eps": r.eps, "product": r.product, "excess": r.excess, "floor": r.floor,
              "lip": r.lip, "second_diff": r.second_diff} for r in rows]
    integrator = {"factor1": "trapezoid",
                  "factor2": "trapezoid" + (" (lattice + proximal refinement)" if refine else "")}
    tm = tail_mass(spec)
    if mode == "small_eps":
        if not rows:
            return VerificationReport("small_eps", inputs, 0.0, 0.0, 0.0, integrator, tm,
                                      {"table": [], "K_fit": 0.0})
        k_fit = max(r.excess / r.eps ** 3 for r in rows)
        bound_ok = all(r.excess <= k_fit * r.eps ** 3 + 1e-15 for r in rows)
        resolved = [r for r in rows if abs(r.excess) > 10.0 * r.floor]
        notes = {"table": table, "K_fit": k_fit, "bound_holds": bound_ok,
                 "resolved_eps": [r.eps for r in resolved],
                 "positive_excess_eps": [r.eps for r in rows if r.excess > 10.0 * r.floor],
                 "slope_kind": "log|excess| vs log eps (sanity check on the bound's form)"}
        if len(resolved) >= 2:
            slope = _loglog_slope([r.eps for r in resolved], [abs(r.excess) for r in resolved])
            notes["slope"] = slope
            lhs, rhs = min_slope, slope
        else:
            notes["slope"] = None
            notes["slope_vacuous"] = True
            lhs, rhs = min_slope, min_slope
        return VerificationReport("small_eps", inputs, lhs, rhs, 0.0, integrator, tm, notes,
                                  extra_pass=bound_ok)
    if mode == "tensorization":
        if K_fit is None:
            raise UsageError("tensorization needs K_fit (run small_eps first)")
        worst = None
        for r in rows:
            bound = (1.0 + K_fit * r.eps ** 3) ** 2
            r_gap = r.product - bound - r.floor
            if worst is None or r_gap > worst[0]:
                worst = (r_gap, r, bound)
        notes = {"table": table, "K_fit": K_fit}
        if worst is None:
            return VerificationReport("tensorization", inputs, 0.0, 0.0, 0.0, integrator, tm, notes)
        _gap, r, bound = worst
        notes["worst_eps"] = r.eps
        return VerificationReport("tensorization", inputs, r.product, bound, r.floor,
                                  integrator, tm, notes)
    raise UsageError(f"unknown scaling mode {mode!r}")


# dimension trick ---------------------------------------------------------------------

def verify_dimension_trick(f, spec: GridSpec | None = None,
                           backend: str | None = None) -> VerificationReport:
    """``Hg(x1, x2) >= Hf((x1 + x2)/sqrt 2)`` for ``g(x1, x2) = f((x1 + x2)/sqrt 2)``.

    Hf lives on a 1-D grid of spacing h/sqrt(2) covering [-sqrt(2) L, sqrt(2) L],
    which contains every projected 2-D node, and is read by linear interpolation.
    """
    fam = _family(f)
    spec = spec or make_grid(2, 4.0, 81)
    if spec.dim != 2 or spec.counts[0] != spec.counts[1] or spec.half_widths[0] != spec.half_widths[1]:
        raise UsageError("dimension trick needs a square 2-D grid")
    L, n = spec.half_widths[0], spec.counts[0]
    line = make_grid(1, math.sqrt(2.0) * L, 2 * (n - 1) + 1)
    F1 = sample(fam, line)
    _require_even(F1, "dimension_trick")
    gfam = FunctionFamily(f"{fam.name}∘sum", {}, fam.parity,
                          lambda x: fam.func(((x[..., 0] + x[..., 1]) / math.sqrt(2.0))[..., None]))
    G = sample(gfam, spec)
    Hg = inf_conv_quadratic(G, 1.0, backend).values
    Hf = inf_conv_quadratic(F1, 1.0, backend).values
    nodes = line.axis_nodes(0)
    pts = spec.points()
    s = (pts[..., 0] + pts[..., 1]) / math.sqrt(2.0)
    interp = np.interp(s, nodes, Hf)
    slack = float(np.max(np.abs(np.diff(Hf))))
    gap = interp - Hg
    worst = float(gap.max())
    notes = {"interpolation_slack": slack, "strict_violation": max(worst, 0.0),
             "nodes_beyond_slack": int((gap > LATTICE_TOL + slack).sum()),
             "line_grid": line.to_dict()}
    inputs = {"family": fam.spec_string(), "grid": _grid_inputs(spec)}
    return VerificationReport("dimension_trick", inputs, worst, 0.0, LATTICE_TOL + slack,
                              {"pointwise": "lattice+linear_interpolation"}, tail_mass(spec), notes)


# Blaschke-Santalo volumes ---------------------------------------------------------------

def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def lp_ball_area(p: float) -> float:
    """Area of the unit l_p ball in the plane."""
    if math.isinf(p):
        return 4.0
    return 4.0 * math.gamma(1 + 1 / p) ** 2 / math.gamma(1 + 2 / p)


def conjugate_exponent(p: float) -> float:
    if math.isinf(p):
        return 1.0
    if p == 1:
        return math.inf
    return p / (p - 1)


def verify_santalo_volume(p: float, spec: GridSpec | None = None,
                          rel_tol: float = INTEGRAL_REL_TOL,
                          backend: str | None = None) -> VerificationReport:
    """|K| |K deg| <= v_2^2 for K the unit l_p ball.

    |K| is read from v_d int F_K = (2 pi)^{d/2} |K| with F_K = exp(-N_K^2/2); |K deg|
    from the same identity applied to the grid polar of F_K.  Both must agree
    with the closed-form areas within ``rel_tol``.
    """
    from .families import lp_gauge_power

    p = float(p)
    spec = spec or default_grid(2)
    d = spec.dim
    q = conjugate_exponent(p)
    FK = GridFunction(spec, np.exp(-sample(lp_gauge_power(p), spec).values), "even")
    FKo = polar(FK, backend=backend)
    vd = unit_ball_volume(d)
    scale = vd / (2 * math.pi) ** (d / 2)
    vol_K = scale * integrate_box(FK.values, spec)
    vol_Ko = scale * integrate_box(FKo.values, spec)
    exact_K, exact_Ko = (lp_ball_area(p), lp_ball_area(q)) if d == 2 else (None, None)
    notes = {"p": p, "q": q, "vol_K": vol_K, "vol_K_polar": vol_Ko,
             "exact_vol_K": exact_K, "exact_vol_K_polar": exact_Ko}
    agree = True
    if exact_K is not None:
        notes["exact_product"] = exact_K * exact_Ko
        notes["rel_err_K"] = abs(vol_K / exact_K - 1)
        notes["rel_err_K_polar"] = abs(vol_Ko / exact_Ko - 1)
        agree = notes["rel_err_K"] <= rel_tol and notes["rel_err_K_polar"] <= rel_tol
    rhs = vd ** 2
    inputs = {"p": p, "grid": _grid_inputs(spec)}
    return VerificationReport("santalo_volume", inputs, vol_K * vol_Ko, rhs, rel_tol * rhs,
                              {"volumes": "lebesgue_trapezoid + polar transform"},
                              tail_mass(spec), notes, extra_pass=agree)


# spectral and concentration checks ----------------------------------------------------

def verify_symmetric_poincare(seed: int = 0, count: int = 50, degree: int = 8, dim: int = 1,
                              order: int = 40) -> VerificationReport:
    """Max ratio E f^2 / (E|grad f|^2 / 2) over random even mean-zero polynomials,
    plus the sharp case h_2 and the check that quadrature agrees with the spectral energy."""
    rng = np.random.default_rng(seed)
    rule = gauss_hermite_rule(order)
    ratios = []
    worst_energy_gap = 0.0
    for _ in range(count):
        e = hermite.random_even_expansion(rng, dim, degree)
        ratios.append(hermite.poincare_check(e).ratio)
        pts, w = rule.tensor(dim)
        quad = sum(float(np.sum(w * g(pts) ** 2)) for g in hermite.gradient(e))
        energy = hermite.dirichlet_energy(e)
        worst_energy_gap = max(worst_energy_gap, abs(quad - energy) / max(1.0, energy))
    h2 = hermite.HermiteExpansion.from_dict(dim, max(degree, 2), {(2,) + (0,) * (dim - 1): 1.0})
    notes = {"ratios": ratios, "h2_ratio": hermite.poincare_check(h2).ratio,
             "max_quadrature_energy_gap": worst_energy_gap}
    inputs = {"seed": seed, "count": count, "degree": degree, "dim": dim, "order": order}
    return VerificationReport("symmetric_poincare", inputs, max(ratios) if ratios else 0.0, 1.0,
                              LATTICE_TOL, {"coefficients": f"spectral; energy cross-check m={order}"},
                              0.0, notes, extra_pass=worst_energy_gap <= 1e-8)


def verify_concentration(families, p_list=(1, 2, 4, 8, 12, 16, 20), M_bound: float = 2.0,
                         dim: int = 1) -> VerificationReport:
    """Fitted M = max ratio (E|phi|^p)^(1/p) / sqrt(p) over 1-Lipschitz families."""
    fams = [_family(f) for f in families]
    fits = {}
    for fam in fams:
        fits[fam.spec_string()] = concentration_moment_check(fam, p_list, dim).M_fit
    M = max(fits.values()) if fits else 0.0
    inputs = {"families": list(fits), "p_list": list(p_list), "dim": dim}
    return VerificationReport("concentration", inputs, M, M_bound, 0.0,
                              {"moments": f"gauss_hermite(m={gauss_hermite_rule(128).order})"},
                              0.0, {"M_fit_by_family": fits})
