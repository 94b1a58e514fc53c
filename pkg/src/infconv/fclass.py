"""Measured membership in the class F(C, eps) and its closure properties.

F(C, eps) holds the functions that are (C eps)-Lipschitz and satisfy
``f(x+h) + f(x-h) - 2 f(x) <= C eps^2 |h|^2`` for all x, h.  Both constants are
measured on the grid (lattice x and h), which bounds the true suprema from below.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import product

import numpy as np
from scipy.special import logsumexp

from .errors import UsageError
from .families import FunctionFamily
from .gauss import trapezoid_weights
from .grid import GridFunction, GridSpec, sample
from .transforms import block_axes, symmetrize_partial

MEMBERSHIP_SLACK = 1e-9


def _require_finite(f: GridFunction):
    if not f.is_finite():
        raise UsageError("class scans need a function finite on the whole box")


def lipschitz_estimate(f: GridFunction) -> float:
    """Largest ``|f(x + h e_i) - f(x)| / h`` over adjacent nodes."""
    _require_finite(f)
    best = 0.0
    for axis, h in enumerate(f.spec.spacings):
        d = np.abs(np.diff(f.values, axis=axis)) / h
        best = max(best, float(d.max()))
    return best


def _steps(spec: GridSpec, axes, max_step):
    """Lattice steps over ``axes``, one representative of each pair ``{h, -h}``."""
    ranges = []
    for i in range(spec.dim):
        if i in axes:
            m = (spec.counts[i] - 1) // 2
            if max_step is not None:
                m = min(m, max_step)
            ranges.append(range(-m, m + 1))
        else:
            ranges.append(range(0, 1))
    for k in product(*ranges):
        nz = [c for c in k if c]
        if nz and nz[0] > 0:
            yield k


def second_difference_ratio(f: GridFunction, axes=None, max_step: int | None = None) -> float:
    """``max (f(x+h) + f(x-h) - 2 f(x)) / |h|^2`` over nodes x and lattice h with x +- h in the box.

    ``axes`` restricts h to a coordinate subspace; ``max_step`` caps |h| per axis
    in nodes (``None`` scans every admissible h).
    """
    _require_finite(f)
    spec = f.spec
    axes = list(range(spec.dim)) if axes is None else list(axes)
    v = f.values
    best = -np.inf
    for k in _steps(spec, axes, max_step):
        if any(2 * abs(c) >= n for c, n in zip(k, spec.counts)):
            continue
        mid = tuple(slice(abs(c), n - abs(c)) for c, n in zip(k, spec.counts))
        plus = tuple(slice(abs(c) + c, n - abs(c) + c) for c, n in zip(k, spec.counts))
        minus = tuple(slice(abs(c) - c, n - abs(c) - c) for c, n in zip(k, spec.counts))
        h2 = sum((c * h) ** 2 for c, h in zip(k, spec.spacings))
        ratio = float(np.max(v[plus] + v[minus] - 2.0 * v[mid])) / h2
        best = max(best, ratio)
    return float(best)


@dataclass(frozen=True)
class ClassCertificate:
    lip: float
    second_diff: float
    C: float
    eps: float
    member: bool

    def to_dict(self) -> dict:
        return asdict(self)


def certify(lip: float, second_diff: float, C: float, eps: float) -> ClassCertificate:
    if not C > 0 or not 0 < eps <= 1:
        raise UsageError(f"need C > 0 and eps in (0, 1], got C={C}, eps={eps}")
    member = (lip <= C * eps * (1 + MEMBERSHIP_SLACK)
              and second_diff <= C * eps ** 2 * (1 + MEMBERSHIP_SLACK))
    return ClassCertificate(lip, second_diff, C, eps, member)


def check_membership(f: GridFunction, C: float, eps: float, per_axis: bool = False,
                     max_step: int | None = None) -> ClassCertificate:
    """Certificate for F(C, eps); ``per_axis`` tests F_n (each coordinate separately)."""
    lip = lipschitz_estimate(f)
    if per_axis:
        sd = max(second_difference_ratio(f, [i], max_step) for i in range(f.spec.dim))
    else:
        sd = second_difference_ratio(f, None, max_step)
    return certify(lip, sd, C, eps)


def marginal_log_integral(f: GridFunction, split: int | None = None) -> GridFunction:
    """``phi(y) = -log sum_x w(x) exp(-f(x, y))`` with ``w`` the normalized Gaussian
    trapezoid weights on the first block ``E1`` (axes ``[0, split)``)."""
    _require_finite(f)
    e1 = block_axes(f.spec, 1, split)
    e2 = block_axes(f.spec, 2, split)
    w = trapezoid_weights(f.spec.sub(e1), gaussian=True)
    w = w / w.sum()
    logw = np.log(w).reshape(w.shape + (1,) * len(e2))
    phi = -logsumexp(-np.asarray(f.values) + logw, axis=tuple(range(len(e1))))
    return GridFunction(f.spec.sub(e2), phi)


def marginal_membership(f: GridFunction, C: float, eps: float,
                        split: int | None = None) -> tuple[ClassCertificate, ClassCertificate]:
    """(worst per-slice certificate of ``y -> f(x, y)``, certificate of the marginal phi)."""
    e2 = block_axes(f.spec, 2, split)
    lip = lipschitz_along(f, e2)
    sd = second_difference_ratio(f, e2)
    slices = certify(lip, sd, C, eps)
    phi = marginal_log_integral(f, split)
    return slices, check_membership(phi, C, eps)


def lipschitz_along(f: GridFunction, axes) -> float:
    _require_finite(f)
    return max(float((np.abs(np.diff(f.values, axis=a)) / f.spec.spacings[a]).max())
               for a in axes)


def _reflect_shift(family: FunctionFamily, u: float) -> FunctionFamily:
    return FunctionFamily(f"reflect({family.name})", {"u": u}, "neither",
                          lambda x: family.func(u - x))


def class_closure_checks(members: list[FunctionFamily], C: float, eps: float,
                         spec: GridSpec, member_2d: FunctionFamily | None = None,
                         spec_2d: GridSpec | None = None) -> dict[str, ClassCertificate]:
    """Membership of the images of class members under the stable operations.

    Convex combination, translate by one node, reflection ``x -> f(u - x)``,
    pointwise infimum of translates, and (given a 2-D member) the partial
    symmetrization in the second block, certified coordinate-wise.
    """
    if len(members) < 2:
        raise UsageError("need at least two members")
    f1, f2 = members[0], members[1]
    h = spec.spacings[0]
    out = {}
    for i, fam in enumerate(members):
        out[f"input[{i}]"] = check_membership(sample(fam, spec), C, eps)
    out["convex_combination"] = check_membership(
        sample(f1.scaled(0.3) + f2.scaled(0.7), spec), C, eps)
    out["translate"] = check_membership(sample(f1.shifted(-h), spec), C, eps)
    out["reflection"] = check_membership(sample(_reflect_shift(f1, 2 * h), spec), C, eps)
    translates = [sample(f1.shifted(k * h), spec).values for k in (-7, -2, 0, 3, 11)]
    translates.append(sample(f2, spec).values)
    out["infimum"] = check_membership(GridFunction(spec, np.min(translates, axis=0)), C, eps)
    if member_2d is not None:
        spec_2d = spec_2d or spec
        g = sample(member_2d, spec_2d)
        out["input_2d"] = check_membership(g, C, eps, per_axis=True)
        out["symmetrize_block2"] = check_membership(symmetrize_partial(g, 2), C, eps,
                                                    per_axis=True)
    return out
