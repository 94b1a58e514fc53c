"""Closed-form test functions on R^d and the compact ``name:key=val`` spec form.

Every family evaluates vectorized on an array of points with shape ``(..., d)``
and returns an array of shape ``(...)``.  Parity is one of ``"even"``,
``"odd"`` or ``"neither"``.

Spec strings::

    quadratic:a=1
    huber:delta=1,shift=0.5
    quadratic:a=1 + cosine_bump:amplitude=0.3,frequency=2

``scale`` and ``shift`` are accepted by every family: ``scale=c`` multiplies the
values by ``c`` and ``shift=s`` translates the argument by ``s`` along every
axis, i.e. ``x -> f(x - s)``.  Terms joined by ``+`` are summed.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from .errors import ConfigError

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FunctionFamily:
    """A named closed-form function with its parameters and parity."""

    name: str
    params: dict = field(default_factory=dict)
    parity: str = "neither"
    func: Evaluator = field(default=None, repr=False, compare=False)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1, 1)
        return np.asarray(self.func(pts), dtype=float)

    def spec_string(self) -> str:
        if self.name == "sum":
            return " + ".join(t.spec_string() for t in self.params["terms"])
        if not self.params:
            return self.name
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.name}:{body}"

    # combinators -----------------------------------------------------------
    def __add__(self, other: "FunctionFamily") -> "FunctionFamily":
        return sum_families([self, other])

    def scaled(self, c: float) -> "FunctionFamily":
        c = float(c)
        params = dict(self.params, scale=c * self.params.get("scale", 1.0))
        func = self.func
        return FunctionFamily(self.name, params, self.parity, lambda x: c * func(x))

    def shifted(self, s: float) -> "FunctionFamily":
        s = float(s)
        if s == 0.0:
            return self
        params = dict(self.params, shift=s + self.params.get("shift", 0.0))
        func = self.func
        return FunctionFamily(self.name, params, "neither", lambda x: func(x - s))


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def _norm(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(x * x, axis=-1))


def sum_families(terms: list[FunctionFamily]) -> FunctionFamily:
    flat: list[FunctionFamily] = []
    for t in terms:
        flat.extend(t.params["terms"] if t.name == "sum" else [t])
    parities = {t.parity for t in flat}
    parity = parities.pop() if len(parities) == 1 else "neither"
    funcs = [t.func for t in flat]

    def func(x):
        out = funcs[0](x)
        for g in funcs[1:]:
            out = out + g(x)
        return out

    return FunctionFamily("sum", {"terms": tuple(flat)}, parity, func)


# builtin constructors ---------------------------------------------------------

def constant(c: float = 0.0) -> FunctionFamily:
    c = float(c)
    return FunctionFamily("constant", {"c": c}, "even",
                          lambda x: np.full(x.shape[:-1], c))


def quadratic(a: float = 1.0) -> FunctionFamily:
    """``a |x|^2 / 2``."""
    a = float(a)
    return FunctionFamily("quadratic", {"a": a}, "even",
                          lambda x: 0.5 * a * np.sum(x * x, axis=-1))


def linear(b: float = 1.0) -> FunctionFamily:
    """``b * (x_1 + ... + x_d)``."""
    b = float(b)
    return FunctionFamily("linear", {"b": b}, "odd", lambda x: b * np.sum(x, axis=-1))


def abs_() -> FunctionFamily:
    return FunctionFamily("abs", {}, "even", _norm)


def huber(delta: float = 1.0) -> FunctionFamily:
    """Moreau envelope of the Euclidean norm: quadratic for |x| <= delta, affine beyond."""
    delta = float(delta)
    if delta <= 0:
        raise ConfigError("huber: delta must be positive")

    def func(x):
        r = _norm(x)
        return np.where(r <= delta, 0.5 * r * r / delta, r - 0.5 * delta)

    return FunctionFamily("huber", {"delta": delta}, "even", func)


def power4(a: float = 1.0) -> FunctionFamily:
    """``a |x|^4 / 4``."""
    a = float(a)

    def func(x):
        r2 = np.sum(x * x, axis=-1)
        return 0.25 * a * r2 * r2

    return FunctionFamily("power4", {"a": a}, "even", func)


def cosine_bump(amplitude: float = 1.0, frequency: float = 1.0) -> FunctionFamily:
    """``amplitude * prod_i cos(frequency * x_i)``."""
    amplitude, frequency = float(amplitude), float(frequency)
    return FunctionFamily(
        "cosine_bump", {"amplitude": amplitude, "frequency": frequency}, "even",
        lambda x: amplitude * np.prod(np.cos(frequency * x), axis=-1))


def gaussian_density(a: float = 1.0) -> FunctionFamily:
    """``exp(-a |x|^2 / 2)`` (unnormalized)."""
    a = float(a)
    return FunctionFamily("gaussian_density", {"a": a}, "even",
                          lambda x: np.exp(-0.5 * a * np.sum(x * x, axis=-1)))


def lp_norm(x: np.ndarray, p: float) -> np.ndarray:
    ax = np.abs(x)
    if math.isinf(p):
        return np.max(ax, axis=-1)
    if p == 1:
        return np.sum(ax, axis=-1)
    if p == 2:
        return _norm(x)
    return np.sum(ax ** p, axis=-1) ** (1.0 / p)


def lp_gauge_power(p: float = 2.0) -> FunctionFamily:
    """``N_K(x)^2 / 2`` where K is the unit l_p ball (``p`` may be ``inf``)."""
    p = float(p)
    if not p >= 1:
        raise ConfigError("lp_gauge_power: p must be >= 1")
    return FunctionFamily("lp_gauge_power", {"p": p}, "even",
                          lambda x: 0.5 * lp_norm(x, p) ** 2)


def random_even_poly(seed: int = 0, degree: int = 4, floor: float = -2.0) -> FunctionFamily:
    """Random polynomial built from even-degree monomials, clipped below at ``floor``.

    Monomials of total degree 2..degree get coefficients uniform in [-1, 1]
    divided by the total degree; a leading ``|x|^degree / degree`` term keeps
    the polynomial coercive.  The dimension is fixed at first evaluation.
    """
    seed, degree, floor = int(seed), int(degree), float(floor)
    if degree < 2 or degree % 2:
        raise ConfigError("random_even_poly: degree must be even and >= 2")
    cache: dict[int, list[tuple[tuple[int, ...], float]]] = {}

    def terms(dim):
        if dim not in cache:
            rng = np.random.default_rng([seed, dim])
            out = []
            for alpha in product(range(degree + 1), repeat=dim):
                k = sum(alpha)
                if k % 2 == 0 and 2 <= k <= degree:
                    out.append((alpha, float(rng.uniform(-1.0, 1.0)) / k))
            cache[dim] = out
        return cache[dim]

    def func(x):
        r2 = np.sum(x * x, axis=-1)
        val = r2 ** (degree // 2) / degree
        ax, sg = np.abs(x), np.sign(x)
        for alpha, c in terms(x.shape[-1]):
            # powers of |x| with the sign carried separately: bitwise even under x -> -x
            mono = np.ones(x.shape[:-1])
            for i, a in enumerate(alpha):
                if a:
                    mono = mono * ax[..., i] ** a
                    if a % 2:
                        mono = mono * sg[..., i]
            val = val + c * mono
        return np.maximum(val, floor)

    return FunctionFamily("random_even_poly",
                          {"seed": seed, "degree": degree, "floor": floor}, "even", func)


BUILTINS: dict[str, tuple[Callable[..., FunctionFamily], str, str]] = {
    "constant": (constant, "even", "c"),
    "quadratic": (quadratic, "even", "a |x|^2 / 2"),
    "linear": (linear, "odd", "b * sum(x)"),
    "abs": (abs_, "even", "|x|"),
    "huber": (huber, "even", "Moreau envelope of |x| with parameter delta"),
    "power4": (power4, "even", "a |x|^4 / 4"),
    "cosine_bump": (cosine_bump, "even", "amplitude * prod cos(frequency x_i)"),
    "gaussian_density": (gaussian_density, "even", "exp(-a |x|^2 / 2)"),
    "lp_gauge_power": (lp_gauge_power, "even", "||x||_p^2 / 2"),
    "random_even_poly": (random_even_poly, "even", "seeded even polynomial, clipped below"),
}

_INT_PARAMS = {"seed", "degree"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_PARAMS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"parameter {key!r} expects an integer, got {raw!r}") from None
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"parameter {key!r} expects a number, got {raw!r}") from None


def _parse_term(text: str) -> FunctionFamily:
    name, _, body = text.strip().partition(":")
    name = name.strip()
    if name not in BUILTINS:
        raise ConfigError(f"unknown family {name!r}")
    kwargs = {}
    if body.strip():
        for item in body.split(","):
            key, eq, raw = item.partition("=")
            key = key.strip()
            if not eq or not key:
                raise ConfigError(f"malformed parameter {item!r} in family {text!r}")
            kwargs[key] = _parse_value(key, raw)
    scale = kwargs.pop("scale", None)
    shift = kwargs.pop("shift", None)
    ctor = BUILTINS[name][0]
    try:
        fam = ctor(**kwargs)
    except TypeError:
        raise ConfigError(f"unknown parameter for family {name!r}: {sorted(kwargs)}") from None
    if scale is not None:
        fam = fam.scaled(scale)
    if shift is not None:
        fam = fam.shifted(shift)
    return fam


def parse_family(text: str) -> FunctionFamily:
    """Parse a compact family spec such as ``"huber:delta=1 + linear:b=0.5"``."""
    if not isinstance(text, str) or not text.strip():
        raise ConfigError("empty family spec")
    terms = [_parse_term(t) for t in re.split(r"(?<![eE])\+", text)]
    return terms[0] if len(terms) == 1 else sum_families(terms)
