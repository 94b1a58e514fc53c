"""Expectations against the standard Gaussian measure.

Two integrators: Gauss-Hermite quadrature for closed-form integrands and a
Gaussian-weighted trapezoid sum for functions that only exist on a grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import UsageError
from .families import FunctionFamily
from .grid import GridFunction, GridSpec

MAX_ORDER = 128
NEGLIGIBLE_WEIGHT = 1e-16


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights with ``sum_i w_i g(x_i) ~ E g(X)``, ``X ~ N(0, 1)``."""

    order: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def tensor(self, dim: int) -> tuple[np.ndarray, np.ndarray]:
        """Tensor-product nodes ``(m**dim, dim)`` and weights ``(m**dim,)``."""
        grids = np.meshgrid(*([self.nodes] * dim), indexing="ij")
        pts = np.stack(grids, axis=-1).reshape(-1, dim)
        w = self.weights
        for _ in range(dim - 1):
            w = np.multiply.outer(w, self.weights)
        return pts, np.asarray(w).reshape(-1)


def _orthonormal_hermite_pair(x: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(h_m(x), h_{m-1}(x), sum_{k<m} h_k(x)^2) for the orthonormal probabilists' basis."""
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    christoffel = np.zeros_like(x)
    for k in range(m):
        christoffel += cur * cur
        prev, cur = cur, (x * cur - math.sqrt(k) * prev) / math.sqrt(k + 1)
    return cur, prev, christoffel


@lru_cache(maxsize=None)
def gauss_hermite_rule(m: int) -> QuadratureRule:
    """Order-``m`` rule for the standard normal (Golub-Welsch nodes, Newton-polished).

    Nodes are eigenvalues of the Jacobi matrix with off-diagonal ``sqrt(k)``;
    one Newton step on the three-term recurrence polishes them and the
    weights come from the Christoffel function ``1 / sum_k h_k(x)^2``.
    """
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= MAX_ORDER:
        raise UsageError(f"quadrature order must be an integer in [1, {MAX_ORDER}], got {m!r}")
    m = int(m)
    if m == 1:
        return QuadratureRule(1, np.zeros(1), np.ones(1))
    x = eigh_tridiagonal(np.zeros(m), np.sqrt(np.arange(1.0, m)), eigvals_only=True)
    for _ in range(2):
        hm, hm1, _c = _orthonormal_hermite_pair(x, m)
        x = x - hm / (math.sqrt(m) * hm1)
    x = 0.5 * (x - x[::-1])
    if m % 2:
        x[m // 2] = 0.0
    _hm, _hm1, christoffel = _orthonormal_hermite_pair(x, m)
    w = 1.0 / christoffel
    w = 0.5 * (w + w[::-1])
    w = w / w.sum()
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(m, x, w)


def newton_rule(m: int) -> QuadratureRule:
    """Independent construction by Newton iteration from asymptotic root guesses.

    Works on the orthonormal physicists' recurrence and rescales to the
    standard normal; used to cross-check :func:`gauss_hermite_rule`.
    """
    if not 1 <= m <= MAX_ORDER:
        raise UsageError(f"quadrature order must be in [1, {MAX_ORDER}]")
    z_roots = np.zeros(m)
    w = np.zeros(m)
    pim4 = math.pi ** -0.25
    z = 0.0
    for i in range((m + 1) // 2):
        if i == 0:
            z = math.sqrt(2 * m + 1) - 1.85575 * (2 * m + 1) ** (-1 / 6)
        elif i == 1:
            z -= 1.14 * m ** 0.426 / z
        elif i == 2:
            z = 1.86 * z - 0.86 * z_roots[0]
        elif i == 3:
            z = 1.91 * z - 0.91 * z_roots[1]
        else:
            z = 2.0 * z - z_roots[i - 2]
        for _ in range(200):
            p1, p2 = pim4, 0.0
            for j in range(1, m + 1):
                p3, p2 = p2, p1
                p1 = z * math.sqrt(2.0 / j) * p2 - math.sqrt((j - 1) / j) * p3
            pp = math.sqrt(2.0 * m) * p2
            dz = p1 / pp
            z -= dz
            if abs(dz) <= 1e-15 * max(1.0, abs(z)):
                break
        else:
            raise RuntimeError(f"Newton iteration did not converge for root {i} of order {m}")
        z_roots[i], z_roots[m - 1 - i] = z, -z
        w[i] = w[m - 1 - i] = 2.0 / (pp * pp)
    if m % 2:
        z_roots[m // 2] = 0.0
    nodes = -math.sqrt(2.0) * z_roots  # ascending
    weights = w / math.sqrt(math.pi)
    return QuadratureRule(m, nodes, weights)


def expect_closed(family: FunctionFamily, rule: QuadratureRule, dim: int) -> float:
    """Tensor-product quadrature estimate of ``E family(X)``, ``X ~ N(0, I_dim)``."""
    pts, w = rule.tensor(dim)
    return float(np.sum(w * family(pts)))


# grid integrator -----------------------------------------------------------------

def tail_mass(spec: GridSpec) -> float:
    """Standard Gaussian mass outside the box of ``spec``."""
    inside = 1.0
    for L in spec.half_widths:
        inside *= 1.0 - math.erfc(L / math.sqrt(2.0))
    return 1.0 - inside


def trapezoid_weights(spec: GridSpec, gaussian: bool = True) -> np.ndarray:
    """Product trapezoid weights on the box, times the N(0, I) density if ``gaussian``."""
    w = np.ones(())
    for axis in range(spec.dim):
        x = spec.axis_nodes(axis)
        wa = np.full(x.shape, spec.spacings[axis])
        wa[[0, -1]] *= 0.5
        if gaussian:
            wa = wa * np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        w = np.multiply.outer(w, wa)
    return w


@dataclass(frozen=True)
class GridExpectation:
    value: float
    tail_mass: float
    truncated: bool
    path: str = "trapezoid"


def expect_grid(f: GridFunction | np.ndarray, spec: GridSpec | None = None) -> GridExpectation:
    """Trapezoid estimate of ``E f(X)`` over the box, with the neglected tail mass.

    ``+inf`` values at nodes of weight below 1e-16 contribute zero and set
    ``truncated``; elsewhere they are an error.
    """
    if isinstance(f, GridFunction):
        spec, vals = f.spec, f.values
    else:
        vals = np.asarray(f, dtype=float)
        if spec is None:
            raise UsageError("expect_grid needs a GridSpec for raw arrays")
    w = trapezoid_weights(spec, gaussian=True)
    bad = ~np.isfinite(vals)
    truncated = False
    if bad.any():
        if (w[bad] > NEGLIGIBLE_WEIGHT).any() or np.isnan(vals).any():
            raise UsageError("non-finite values where the Gaussian weight is not negligible")
        vals = np.where(bad, 0.0, vals)
        truncated = True
    return GridExpectation(float(np.sum(w * vals)), tail_mass(spec), truncated)


def integrate_box(vals: np.ndarray, spec: GridSpec) -> float:
    """Lebesgue trapezoid integral over the box."""
    return float(np.sum(trapezoid_weights(spec, gaussian=False) * vals))


# concentration -------------------------------------------------------------------

@dataclass(frozen=True)
class MomentCheck:
    ratios: dict
    M_fit: float
    lipschitz: float
    mean: float


def concentration_moment_check(family: FunctionFamily, p_list=(1, 2, 4, 8, 12, 16, 20),
                               dim: int = 1, rule: QuadratureRule | None = None,
                               spec: GridSpec | None = None) -> MomentCheck:
    """``max_p (E|phi - E phi|^p)^(1/p) / sqrt(p)`` for a 1-Lipschitz ``phi``.

    The Lipschitz constant is measured on ``spec`` (default grid for ``dim``)
    and must not exceed ``1 + 1e-9``.
    """
    from .fclass import lipschitz_estimate
    from .grid import default_grid, sample

    spec = spec or default_grid(dim)
    rule = rule or gauss_hermite_rule(MAX_ORDER)
    lip = lipschitz_estimate(sample(family, spec))
    if lip > 1.0 + 1e-9:
        raise UsageError(f"{family.spec_string()} is not 1-Lipschitz (measured {lip:.6g})")
    pts, w = rule.tensor(dim)
    vals = family(pts)
    mean = float(np.sum(w * vals))
    centered = vals - mean
    if abs(float(np.sum(w * centered))) > 1e-6:
        raise UsageError("centering failed")
    ratios = {}
    for p in p_list:
        moment = float(np.sum(w * np.abs(centered) ** p))
        ratios[p] = moment ** (1.0 / p) / math.sqrt(p)
    return MomentCheck(ratios, max(ratios.values()) if ratios else 0.0, lip, mean)
