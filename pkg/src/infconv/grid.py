"""Symmetric uniform tensor grids and extended-real functions sampled on them."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GridInvariantError, UsageError
from .families import FunctionFamily

# (half_width, count) per dimension
DEFAULT_GRIDS = {1: (6.0, 241), 2: (6.0, 121), 3: (3.0, 41)}


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned box ``prod [-L_i, L_i]`` with ``n_i`` equispaced nodes per axis.

    Counts are odd so the origin is a node and the node set is closed under
    ``x -> -x``.  Node ``k`` on axis ``i`` sits at ``(k - (n_i - 1)/2) * h_i``,
    which is bitwise antisymmetric under ``k -> n_i - 1 - k``.
    """

    dim: int
    half_widths: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise GridInvariantError(f"dim must be 1, 2 or 3, got {self.dim}")
        if len(self.half_widths) != self.dim or len(self.counts) != self.dim:
            raise GridInvariantError("half_widths and counts need one entry per axis")
        for L in self.half_widths:
            if not (math.isfinite(L) and L > 0):
                raise GridInvariantError(f"half width must be positive and finite, got {L}")
        for n in self.counts:
            if n < 3 or n % 2 == 0:
                raise GridInvariantError(f"node count must be odd and >= 3, got {n}")

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(2.0 * L / (n - 1) for L, n in zip(self.half_widths, self.counts))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def axis_nodes(self, axis: int) -> np.ndarray:
        n = self.counts[axis]
        return (np.arange(n) - (n - 1) // 2) * self.spacings[axis]

    def points(self) -> np.ndarray:
        """All nodes as an array of shape ``counts + (dim,)``."""
        axes = np.meshgrid(*[self.axis_nodes(i) for i in range(self.dim)], indexing="ij")
        return np.stack(axes, axis=-1)

    def sub(self, axes: Sequence[int]) -> "GridSpec":
        axes = list(axes)
        return GridSpec(len(axes), tuple(self.half_widths[i] for i in axes),
                        tuple(self.counts[i] for i in axes))

    # row-major index helpers
    def multi_index(self, flat: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(flat, self.shape))

    def flat_index(self, multi: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.shape))

    def reflect_index(self, flat: int) -> int:
        mi = self.multi_index(flat)
        return self.flat_index([n - 1 - k for n, k in zip(self.counts, mi)])

    def to_dict(self) -> dict:
        return {"dim": self.dim, "half_widths": list(self.half_widths),
                "counts": list(self.counts)}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        try:
            return make_grid(int(d["dim"]), d["half_widths"], d["counts"])
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed grid spec: {d!r}") from exc


def make_grid(dim: int, half_widths, counts) -> GridSpec:
    """Validated grid; scalar ``half_widths``/``counts`` are broadcast to every axis."""
    if np.isscalar(half_widths):
        half_widths = [half_widths] * dim
    if np.isscalar(counts):
        counts = [counts] * dim
    if any(float(n) != int(n) for n in counts):
        raise GridInvariantError(f"counts must be integers, got {counts}")
    return GridSpec(int(dim), tuple(float(L) for L in half_widths),
                    tuple(int(n) for n in counts))


def default_grid(dim: int) -> GridSpec:
    if dim not in DEFAULT_GRIDS:
        raise GridInvariantError(f"no default grid for dim={dim}")
    L, n = DEFAULT_GRIDS[dim]
    return make_grid(dim, L, n)


def product_grid(a: GridSpec, b: GridSpec) -> GridSpec:
    return make_grid(a.dim + b.dim, a.half_widths + b.half_widths, a.counts + b.counts)


@dataclass(frozen=True)
class GridFunction:
    """Values on the nodes of ``spec`` in an ndarray of shape ``spec.shape``.

    Values are finite or ``+inf``; NaN and ``-inf`` are rejected.  The array is
    made read-only on construction.
    """

    spec: GridSpec
    values: np.ndarray
    parity: str | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.size != self.spec.size:
            raise GridInvariantError(
                f"expected {self.spec.size} values for grid {self.spec.shape}, got {vals.size}")
        vals = vals.reshape(self.spec.shape)
        if np.isnan(vals).any():
            raise GridInvariantError("grid function contains NaN")
        if np.isneginf(vals).any():
            raise GridInvariantError("grid function contains -inf")
        if not np.isfinite(vals).any():
            raise GridInvariantError("grid function has no finite value")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def reflected(self) -> "GridFunction":
        return GridFunction(self.spec, self.values[(slice(None, None, -1),) * self.spec.dim],
                            self.parity)

    def with_values(self, values, parity=None) -> "GridFunction":
        return GridFunction(self.spec, values, parity)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def to_dict(self) -> dict:
        vals = ["inf" if math.isinf(v) else float(v) for v in self.flat.tolist()]
        return {"spec": self.spec.to_dict(), "values": vals}

    @classmethod
    def from_dict(cls, d: dict) -> "GridFunction":
        if not isinstance(d, dict) or "spec" not in d or "values" not in d:
            raise UsageError("grid JSON needs 'spec' and 'values'")
        spec = GridSpec.from_dict(d["spec"])
        vals = []
        for v in d["values"]:
            if v == "inf":
                vals.append(math.inf)
            elif isinstance(v, (int, float)) and not isinstance(v, bool):
                vals.append(float(v))
            else:
                raise UsageError(f"bad grid value {v!r}")
        return cls(spec, np.array(vals))


def sample(family: FunctionFamily, spec: GridSpec) -> GridFunction:
    """Evaluate ``family`` at every node of ``spec``."""
    vals = family(spec.points())
    if vals.shape != spec.shape:
        raise GridInvariantError(f"family {family.name} returned shape {vals.shape}")
    if np.isnan(vals).any() or np.isneginf(vals).any():
        raise GridInvariantError(f"family {family.spec_string()} returned NaN or -inf")
    return GridFunction(spec, vals, family.parity)


def even_defect(f: GridFunction) -> float:
    """``max |f(x) - f(-x)|`` over nodes; an inf/finite pair gives ``inf``."""
    a = f.values
    b = f.reflected().values
    both_inf = np.isinf(a) & np.isinf(b)
    with np.errstate(invalid="ignore"):
        diff = np.abs(a - b)
    diff[both_inf] = 0.0
    return float(diff.max())


def dumps_grid(f: GridFunction) -> str:
    from .report import dumps  # 17-significant-digit renderer

    return dumps(f.to_dict())


def load_grid(path) -> GridFunction:
    with open(path) as fh:
        return GridFunction.from_dict(json.load(fh))
