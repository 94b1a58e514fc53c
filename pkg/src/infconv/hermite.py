"""Orthonormal Hermite expansions in L2(gamma_d) and the spectral Poincare checks.

Normalization is orthonormal throughout::

    h_0 = 1,  h_1 = x,  h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k + 1)

so ``h_k' = sqrt(k) h_{k-1}`` and the Ornstein-Uhlenbeck generator
``L = Laplacian - x . grad`` acts by ``L H_alpha = -|alpha| H_alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import HypothesisViolation, UsageError
from .families import FunctionFamily
from .gauss import QuadratureRule

DEFAULT_DEGREE = 12
STRUCTURAL_ZERO = 1e-12


@lru_cache(maxsize=None)
def multi_indices(dim: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All alpha with ``|alpha| <= degree`` in graded lexicographic order."""
    out = [a for a in product(range(degree + 1), repeat=dim) if sum(a) <= degree]
    out.sort(key=lambda a: (sum(a), tuple(-ai for ai in a)))
    return tuple(out)


def hermite_table(x, kmax: int) -> np.ndarray:
    """``h_0(x), ..., h_kmax(x)`` stacked on a new last axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (kmax + 1,))
    out[..., 0] = 1.0
    if kmax >= 1:
        out[..., 1] = x
    for k in range(1, kmax):
        out[..., k + 1] = (x * out[..., k] - math.sqrt(k) * out[..., k - 1]) / math.sqrt(k + 1)
    return out


def hermite_eval(alpha, x) -> np.ndarray:
    """``H_alpha(x) = prod_i h_{alpha_i}(x_i)``; ``x`` has shape ``(..., d)`` (or scalar for d=1)."""
    alpha = (int(alpha),) if np.isscalar(alpha) else tuple(int(a) for a in alpha)
    x = np.asarray(x, dtype=float)
    if len(alpha) == 1:
        if x.ndim and x.shape[-1] == 1:
            x = x[..., 0]
        x = x[..., None]
    elif x.shape[-1] != len(alpha):
        raise UsageError("point dimension does not match the multi-index")
    if max(alpha) > 64:
        raise UsageError("Hermite degree per axis is limited to 64")
    val = np.ones(x.shape[:-1])
    for i, a in enumerate(alpha):
        val = val * hermite_table(x[..., i], a)[..., a]
    return val


@dataclass(frozen=True)
class HermiteExpansion:
    """Coefficients ``f_alpha`` for ``|alpha| <= degree`` in graded lex order."""

    dim: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size != len(multi_indices(self.dim, self.degree)):
            raise UsageError("coefficient count does not match the multi-index set")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def alphas(self) -> tuple[tuple[int, ...], ...]:
        return multi_indices(self.dim, self.degree)

    @property
    def orders(self) -> np.ndarray:
        return np.array([sum(a) for a in self.alphas], dtype=float)

    def coeff(self, alpha) -> float:
        return float(self.coeffs[self.alphas.index(tuple(alpha))])

    @classmethod
    def from_dict(cls, dim: int, degree: int, coeffs: dict) -> "HermiteExpansion":
        alphas = multi_indices(dim, degree)
        c = np.zeros(len(alphas))
        for alpha, v in coeffs.items():
            alpha = (alpha,) if np.isscalar(alpha) else tuple(alpha)
            c[alphas.index(alpha)] = v
        return cls(dim, degree, c)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.dim == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        tables = [hermite_table(pts[..., i], self.degree) for i in range(self.dim)]
        out = np.zeros(pts.shape[:-1])
        for alpha, c in zip(self.alphas, self.coeffs):
            if c == 0.0:
                continue
            term = np.full(pts.shape[:-1], c)
            for i, a in enumerate(alpha):
                term = term * tables[i][..., a]
            out = out + term
        return out

    def to_list(self) -> list[dict]:
        return [{"alpha": list(a), "coeff": float(c)} for a, c in zip(self.alphas, self.coeffs)]


def expand(family, degree: int, rule: QuadratureRule, dim: int = 1) -> HermiteExpansion:
    """``f_alpha = E f(X) H_alpha(X)`` by tensor quadrature; needs ``rule.order >= degree + 1``."""
    if rule.order < degree + 1:
        raise UsageError(f"rule order {rule.order} too low for degree {degree}")
    pts, w = rule.tensor(dim)
    fw = w * np.asarray(family(pts), dtype=float)
    tables = [hermite_table(pts[:, i], degree) for i in range(dim)]
    coeffs = []
    for alpha in multi_indices(dim, degree):
        basis = np.ones(len(w))
        for i, a in enumerate(alpha):
            basis = basis * tables[i][:, a]
        coeffs.append(float(np.sum(fw * basis)))
    return HermiteExpansion(dim, degree, np.array(coeffs))


def apply_L(e: HermiteExpansion) -> HermiteExpansion:
    return HermiteExpansion(e.dim, e.degree, -e.orders * e.coeffs)


def gradient(e: HermiteExpansion) -> list[HermiteExpansion]:
    """Partial derivatives, using ``d/dx_i H_alpha = sqrt(alpha_i) H_{alpha - e_i}``."""
    alphas = e.alphas
    index = {a: k for k, a in enumerate(alphas)}
    out = []
    for i in range(e.dim):
        c = np.zeros(len(alphas))
        for a, coef in zip(alphas, e.coeffs):
            if a[i] > 0:
                lower = a[:i] + (a[i] - 1,) + a[i + 1:]
                c[index[lower]] += math.sqrt(a[i]) * coef
        out.append(HermiteExpansion(e.dim, e.degree, c))
    return out


def dirichlet_energy(e: HermiteExpansion) -> float:
    """``E |grad f|^2 = sum_alpha |alpha| f_alpha^2``."""
    return float(np.sum(e.orders * e.coeffs ** 2))


@dataclass(frozen=True)
class PoincareResult:
    variance: float
    energy: float
    ratio: float
    passed: bool


def poincare_check(e: HermiteExpansion, tol: float = 1e-9) -> PoincareResult:
    """Ratio ``E f^2 / (E|grad f|^2 / 2)`` for ``f`` orthogonal to constants and linear functions.

    Raises :class:`HypothesisViolation` naming the first offending coefficient.
    """
    for alpha, c in zip(e.alphas, e.coeffs):
        if sum(alpha) <= 1 and abs(c) > 1e-9:
            raise HypothesisViolation(
                f"hypothesis violated: coefficient {list(alpha)} = {c:.3g} is not zero",
                witness=list(alpha))
    var = float(np.sum(e.coeffs ** 2))
    energy = dirichlet_energy(e)
    ratio = var / (0.5 * energy) if energy > 0 else 0.0
    return PoincareResult(var, energy, ratio, ratio <= 1.0 + tol)


def general_poincare_check(e: HermiteExpansion, tol: float = 1e-9) -> PoincareResult:
    """Ratio ``E f^2 / E|grad f|^2`` for mean-zero ``f`` (no parity assumption)."""
    c0 = e.coeffs[0]
    if abs(c0) > 1e-9:
        raise HypothesisViolation(f"hypothesis violated: mean coefficient = {c0:.3g}",
                                  witness=list(e.alphas[0]))
    var = float(np.sum(e.coeffs ** 2))
    energy = dirichlet_energy(e)
    ratio = var / energy if energy > 0 else 0.0
    return PoincareResult(var, energy, ratio, ratio <= 1.0 + tol)


@dataclass(frozen=True)
class IBPResult:
    lhs: float
    rhs: float
    residual: float


def integration_by_parts_check(e1: HermiteExpansion, e2: HermiteExpansion,
                               rule: QuadratureRule) -> IBPResult:
    """Quadrature values of ``-E (Lf) g`` and ``E grad f . grad g`` and their gap."""
    if e1.dim != e2.dim:
        raise UsageError("expansions live in different dimensions")
    pts, w = rule.tensor(e1.dim)
    lhs = float(np.sum(w * -apply_L(e1)(pts) * e2(pts)))
    g1, g2 = gradient(e1), gradient(e2)
    rhs = float(sum(np.sum(w * a(pts) * b(pts)) for a, b in zip(g1, g2)))
    return IBPResult(lhs, rhs, abs(lhs - rhs))


def random_even_expansion(rng: np.random.Generator, dim: int = 1, degree: int = 8,
                          ) -> HermiteExpansion:
    """Random coefficients on even ``|alpha| >= 2``, zero elsewhere (mean zero, even)."""
    alphas = multi_indices(dim, degree)
    c = np.array([rng.standard_normal() if sum(a) >= 2 and sum(a) % 2 == 0 else 0.0
                  for a in alphas])
    return HermiteExpansion(dim, degree, c)


def expansion_family(e: HermiteExpansion, name: str = "hermite") -> FunctionFamily:
    """Wrap an expansion as a closed-form family (parity read off the coefficients)."""
    odd = any(sum(a) % 2 == 1 and abs(c) > STRUCTURAL_ZERO for a, c in zip(e.alphas, e.coeffs))
    even = any(sum(a) % 2 == 0 and abs(c) > STRUCTURAL_ZERO for a, c in zip(e.alphas, e.coeffs))
    parity = "odd" if odd and not even else "even" if not odd else "neither"
    return FunctionFamily(name, {"degree": e.degree}, parity, lambda x: e(x))
