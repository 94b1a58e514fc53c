"""Infimum convolution with quadratic cost, Legendre and polar transforms, and
the functional Steiner symmetrization, on grid functions.

All infima and suprema run over grid nodes only, and any value needed outside
the box reads ``+inf``.  Discrete results therefore bound the continuous
transforms from one side: infima from above, suprema from below.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import _backend
from .errors import UsageError
from .grid import GridFunction, GridSpec


@dataclass(frozen=True)
class CostScale:
    """Cost ``y -> |y|^2 / (2 t)``.  ``t = 1`` is the operator H, ``t = 2`` the cost |y|^2/4."""

    t: float = 1.0

    def __post_init__(self):
        if not self.t > 0:
            raise UsageError(f"cost scale t must be positive, got {self.t}")


def _as_t(cost) -> float:
    if isinstance(cost, CostScale):
        return cost.t
    return CostScale(float(cost)).t


def _along_axis(values: np.ndarray, axis: int, fn) -> np.ndarray:
    """Apply ``fn`` to every 1-D line of ``values`` along ``axis``.

    ``fn`` maps a 2-D ``(lines, n)`` array to ``(lines, m)``.
    """
    moved = np.moveaxis(values, axis, -1)
    lead = moved.shape[:-1]
    lines = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
    out = fn(lines)
    return np.moveaxis(out.reshape(lead + (out.shape[-1],)), -1, axis)


# infimum convolution ----------------------------------------------------------

def inf_conv_quadratic(f: GridFunction, cost=1.0, backend: str | None = None) -> GridFunction:
    """``x -> min_z f(z) + |z - x|^2 / (2 t)`` over grid nodes ``z``.

    Separable: one lower-envelope pass per axis, linear time per line.
    """
    t = _as_t(cost)
    kern = _backend.get(backend)
    vals = np.array(f.values, dtype=float)
    for axis in range(f.spec.dim):
        nodes = f.spec.axis_nodes(axis)
        vals = _along_axis(vals, axis,
                           lambda lines: kern.lower_envelope(lines, nodes, nodes, t))
    return GridFunction(f.spec, vals, f.parity)


def inf_conv_brute(f: GridFunction, cost=1.0) -> GridFunction:
    """Quadratic-time oracle for :func:`inf_conv_quadratic` (direct minimum per line)."""
    t = _as_t(cost)
    vals = np.array(f.values, dtype=float)
    for axis in range(f.spec.dim):
        nodes = f.spec.axis_nodes(axis)
        penalty = (nodes[None, :] - nodes[:, None]) ** 2 / (2.0 * t)  # [x, z]

        def line_min(lines):
            out = np.empty_like(lines)
            for start in range(0, lines.shape[0], 64):
                chunk = lines[start:start + 64]
                out[start:start + 64] = np.min(chunk[:, None, :] + penalty[None], axis=2)
            return out

        vals = _along_axis(vals, axis, line_min)
    return GridFunction(f.spec, vals, f.parity)


def moreau(f: GridFunction, t: float = 1.0, backend: str | None = None) -> GridFunction:
    return inf_conv_quadratic(f, CostScale(t), backend)


def H(f: GridFunction, backend: str | None = None) -> GridFunction:
    """The infimum convolution with cost ``|y|^2 / 2``."""
    return inf_conv_quadratic(f, 1.0, backend)


# Legendre and polar -----------------------------------------------------------

def _conjugate_axis(vals: np.ndarray, axis: int, primal: np.ndarray, dual: np.ndarray, kern):
    """``max_x s x - psi(x)`` along one axis, via a lower envelope of parabolas."""
    shape = [1] * vals.ndim
    shape[axis] = -1
    heights = vals - 0.5 * (primal ** 2).reshape(shape)
    env = _along_axis(heights, axis, lambda lines: kern.lower_envelope(lines, primal, dual, 1.0))
    dshape = [1] * vals.ndim
    dshape[axis] = -1
    return 0.5 * (dual ** 2).reshape(dshape) - env


def _legendre_values(values: np.ndarray, spec: GridSpec, dual_spec: GridSpec, backend):
    kern = _backend.get(backend)
    cur = np.array(values, dtype=float)
    for axis in range(spec.dim):
        psi = cur if axis == 0 else -cur
        cur = _conjugate_axis(psi, axis, spec.axis_nodes(axis), dual_spec.axis_nodes(axis), kern)
    return cur


def _check_dual(spec: GridSpec, dual_spec: GridSpec | None) -> GridSpec:
    if dual_spec is None:
        return spec
    if dual_spec.dim != spec.dim:
        raise UsageError("dual grid must have the primal dimension")
    return dual_spec


def legendre(f: GridFunction, dual_spec: GridSpec | None = None,
             backend: str | None = None) -> GridFunction:
    """Discrete conjugate ``s -> max_x s.x - f(x)`` over primal nodes.

    The sup of a sum of one-dimensional terms is taken one axis at a time,
    each pass being a lower envelope (``s.x - f = |s|^2/2 - (f - |x|^2/2 + |s-x|^2/2)``).
    The dual grid defaults to the primal one.
    """
    dual_spec = _check_dual(f.spec, dual_spec)
    return GridFunction(dual_spec, _legendre_values(f.values, f.spec, dual_spec, backend))


def legendre_brute(f: GridFunction, dual_spec: GridSpec | None = None) -> GridFunction:
    """Direct maximum over all primal nodes (quadratic in the node count)."""
    dual_spec = _check_dual(f.spec, dual_spec)
    x = f.spec.points().reshape(-1, f.spec.dim)
    fv = f.flat
    keep = np.isfinite(fv)
    x, fv = x[keep], fv[keep]
    s = dual_spec.points().reshape(-1, dual_spec.dim)
    out = np.empty(len(s))
    for start in range(0, len(s), 256):
        out[start:start + 256] = np.max(s[start:start + 256] @ x.T - fv[None, :], axis=1)
    return GridFunction(dual_spec, out)


def _log_potential(F: GridFunction) -> np.ndarray:
    vals = F.values
    if not np.isfinite(vals).all() or (vals < 0).any():
        raise UsageError("polar transform needs a finite non-negative function")
    if not (vals > 0).any():
        raise UsageError("polar transform of the zero function is undefined")
    with np.errstate(divide="ignore"):
        return -np.log(vals)


def polar(F: GridFunction, dual_spec: GridSpec | None = None,
          backend: str | None = None) -> GridFunction:
    """``x -> min_y exp(-x.y) / F(y)``, computed as ``exp(-psi*)`` with ``psi = -log F``."""
    dual_spec = _check_dual(F.spec, dual_spec)
    psi = _log_potential(F)
    conj = _legendre_values(psi, F.spec, dual_spec, backend)
    return GridFunction(dual_spec, np.exp(-conj), F.parity)


def polar_brute(F: GridFunction, dual_spec: GridSpec | None = None) -> GridFunction:
    dual_spec = _check_dual(F.spec, dual_spec)
    _log_potential(F)
    y = F.spec.points().reshape(-1, F.spec.dim)
    Fv = F.flat
    keep = Fv > 0
    y, Fv = y[keep], Fv[keep]
    x = dual_spec.points().reshape(-1, dual_spec.dim)
    out = np.empty(len(x))
    for start in range(0, len(x), 256):
        out[start:start + 256] = np.min(np.exp(-(x[start:start + 256] @ y.T)) / Fv[None, :], axis=1)
    return GridFunction(dual_spec, out)


# symmetrization ----------------------------------------------------------------

def _symmetrize_axes(values: np.ndarray, spec: GridSpec, axes: list[int], backend) -> np.ndarray:
    """min over lattice u in the selected axes of (f(x+u) + f(x~+u))/2 + |u|^2/2,
    where x~ reflects x in the selected axes only; out-of-box reads are +inf."""
    if len(axes) == 1:
        axis = axes[0]
        h = spec.spacings[axis]
        kern = _backend.get(backend)
        return _along_axis(values, axis, lambda lines: kern.symmetrize_lines(lines, h))
    flip = tuple(slice(None, None, -1) if i in axes else slice(None) for i in range(spec.dim))
    halves = [(spec.counts[i] - 1) // 2 if i in axes else 0 for i in range(spec.dim)]
    pad = [(m, m) for m in halves]
    A = np.pad(values, pad, constant_values=np.inf)
    B = np.pad(values[flip], pad, constant_values=np.inf)
    out = np.full(values.shape, np.inf)
    ranges = [range(-m, m + 1) for m in halves]
    for k in product(*ranges):
        sa = tuple(slice(m + ki, m + ki + n) for m, ki, n in zip(halves, k, spec.counts))
        # f(x~ + u) sits at flipped index i - k
        sb = tuple(slice(m - ki, m - ki + n) for m, ki, n in zip(halves, k, spec.counts))
        u2 = sum((ki * h) ** 2 for ki, h in zip(k, spec.spacings))
        cand = 0.5 * (A[sa] + B[sb]) + 0.5 * u2
        np.minimum(out, cand, out=out)
    return out


def symmetrize(f: GridFunction, backend: str | None = None) -> GridFunction:
    """``x -> min_u (f(u+x) + f(u-x))/2 + |u|^2/2`` over lattice ``u``; exactly even."""
    vals = _symmetrize_axes(np.asarray(f.values, float), f.spec, list(range(f.spec.dim)), backend)
    return GridFunction(f.spec, vals, "even")


def block_axes(spec: GridSpec, block: int, split: int | None = None) -> list[int]:
    """Axes of block 1 (``[0, split)``) or block 2 (``[split, dim)``); default split = dim - 1."""
    if split is None:
        split = spec.dim - 1
    if not 1 <= split < spec.dim:
        raise UsageError(f"cannot split a {spec.dim}-D grid at axis {split}")
    if block == 1:
        return list(range(split))
    if block == 2:
        return list(range(split, spec.dim))
    raise UsageError(f"block must be 1 or 2, got {block}")


def symmetrize_partial(g: GridFunction, block: int, split: int | None = None,
                       backend: str | None = None) -> GridFunction:
    """S applied in one block of the product ``E1 x E2``, other coordinates held fixed."""
    axes = block_axes(g.spec, block, split)
    vals = _symmetrize_axes(np.asarray(g.values, float), g.spec, axes, backend)
    return GridFunction(g.spec, vals)


def symmetrize_brute(f: GridFunction, axes: list[int] | None = None) -> GridFunction:
    """Node-by-node oracle for :func:`symmetrize` / :func:`symmetrize_partial`."""
    spec = f.spec
    axes = list(range(spec.dim)) if axes is None else list(axes)
    vals = f.values
    out = np.full(spec.shape, np.inf)
    h = spec.spacings
    for idx in np.ndindex(*spec.shape):
        ridx = tuple(n - 1 - i if a in axes else i for a, (n, i) in enumerate(zip(spec.counts, idx)))
        best = np.inf
        for k in product(*[range(-(spec.counts[a] - 1), spec.counts[a]) if a in axes else [0]
                           for a in range(spec.dim)]):
            p = tuple(i + ki for i, ki in zip(idx, k))
            q = tuple(i + ki for i, ki in zip(ridx, k))
            if all(0 <= c < n for c, n in zip(p + q, spec.counts * 2)):
                u2 = sum((ki * hh) ** 2 for ki, hh in zip(k, h))
                best = min(best, 0.5 * (vals[p] + vals[q]) + 0.5 * u2)
        out[idx] = best
    return GridFunction(spec, out)
