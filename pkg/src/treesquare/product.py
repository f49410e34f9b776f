"""Cartesian products of trees: indexing, the summed colouring, wrapping, bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidParams, OutOfRange, SpanBoundViolated
from .spancol import SpanWindow, TreeSquareColouring, colour_tree_square
from .tree import Tree

DEFAULT_MATERIALIZE_CAP = 10**7


@dataclass(frozen=True)
class ProductInstance:
    trees: tuple[Tree, ...]

    def __post_init__(self):
        if len(self.trees) < 1:
            raise InvalidParams("a product needs at least one tree")
        object.__setattr__(self, "trees", tuple(self.trees))

    @property
    def d(self) -> int:
        return len(self.trees)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(t.n for t in self.trees)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(t.max_degree for t in self.trees)

    @property
    def strides(self) -> tuple[int, ...]:
        out, acc = [], 1
        for n in self.dims:
            out.append(acc)
            acc *= n
        return tuple(out)


def mixed_radix_encode(coords: Sequence[int], dims: Sequence[int]) -> int:
    """Flat index of ``coords``; the first coordinate varies fastest."""
    if len(coords) != len(dims):
        raise OutOfRange(f"{len(coords)} coordinates for {len(dims)} dimensions")
    flat, stride = 0, 1
    for x, n in zip(coords, dims):
        if not 0 <= x < n:
            raise OutOfRange(f"coordinate {x} outside [0, {n})")
        flat += x * stride
        stride *= n
    return flat


def mixed_radix_decode(flat: int, dims: Sequence[int]) -> tuple[int, ...]:
    if not 0 <= flat < math.prod(dims):
        raise OutOfRange(f"flat index {flat} outside [0, {math.prod(dims)})")
    coords = []
    for n in dims:
        flat, x = divmod(flat, n)
        coords.append(x)
    return tuple(coords)


def decode_array(flat: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Vectorised decode: returns shape ``(len(flat), d)``."""
    flat = np.asarray(flat, dtype=np.int64)
    out = np.empty((flat.size, len(dims)), dtype=np.int64)
    rest = flat.copy()
    for i, n in enumerate(dims):
        rest, out[:, i] = np.divmod(rest, n)
    return out


def span_offsets(instance: ProductInstance) -> list[int]:
    """Window base for each factor: factor ``i`` gets the spans right after factor ``i-1``."""
    out, acc = [], 0
    for delta in instance.degrees:
        out.append(acc)
        acc += (delta + 1) // 2
    return out


def total_span_bound(instance: ProductInstance) -> int:
    return sum((delta + 1) // 2 for delta in instance.degrees)


def lower_bound(instance: ProductInstance) -> int:
    return 1 + sum(instance.degrees)


def upper_bound(instance: ProductInstance) -> int:
    return 1 + 2 * total_span_bound(instance)


def jmv_bound(instance: ProductInstance) -> int | None:
    """The earlier ``1 + 2 * sum(D_i - 1)`` bound; only defined when every D_i >= 2."""
    degrees = instance.degrees
    if min(degrees) < 2:
        return None
    return 1 + 2 * sum(delta - 1 for delta in degrees)


@dataclass(frozen=True)
class Bounds:
    lower: int
    upper: int
    jmv: int | None


def bounds(instance: ProductInstance) -> Bounds:
    return Bounds(lower_bound(instance), upper_bound(instance), jmv_bound(instance))


@dataclass(frozen=True)
class ProductColouring:
    """Colours of the product's vertices, indexed by flat mixed-radix index.

    ``values`` is the dense colour array, or ``None`` when the product was too
    large to materialise; :meth:`colour_at` and :meth:`chunks` work either way.
    When ``wrapped`` is set every colour is reduced into ``[0, 2S]``.
    """

    instance: ProductInstance
    per_tree: tuple[TreeSquareColouring, ...]
    S: int
    wrapped: bool = False
    values: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def modulus(self) -> int:
        return 2 * self.S + 1

    @property
    def windows(self) -> list[SpanWindow]:
        return [c.window for c in self.per_tree]

    def colour_at(self, flat: int) -> int:
        if self.values is not None:
            return int(self.values[flat])
        coords = mixed_radix_decode(flat, self.instance.dims)
        c = sum(pt.colour[x] for pt, x in zip(self.per_tree, coords))
        return c % self.modulus if self.wrapped else c

    def chunks(self, size: int = 1 << 16) -> Iterator[np.ndarray]:
        """Colours over consecutive flat-index ranges, in order."""
        total = self.instance.total
        if self.values is not None:
            for start in range(0, total, size):
                yield self.values[start : start + size]
            return
        tables = [np.asarray(pt.colour, dtype=np.int64) for pt in self.per_tree]
        for start in range(0, total, size):
            coords = decode_array(np.arange(start, min(total, start + size)), self.instance.dims)
            c = sum(tab[coords[:, i]] for i, tab in enumerate(tables))
            yield c % self.modulus if self.wrapped else c

    def to_array(self) -> np.ndarray:
        if self.values is not None:
            return self.values
        return np.concatenate(list(self.chunks()))

    def num_colours(self) -> int:
        seen: set[int] = set()
        for chunk in self.chunks():
            seen.update(np.unique(chunk).tolist())
        return len(seen)


def sum_colouring(per_tree: Sequence[TreeSquareColouring]) -> np.ndarray:
    """Dense array of ``sum_i c_i(v_i)`` over the product, flat little-endian order."""
    d = len(per_tree)
    dims = [pt.tree.n for pt in per_tree]
    # C order over reversed dims puts the first factor on the fastest axis
    acc = np.zeros(dims[::-1], dtype=np.int64)
    for i, pt in enumerate(per_tree):
        shape = [1] * d
        shape[d - 1 - i] = dims[i]
        acc += np.asarray(pt.colour, dtype=np.int64).reshape(shape)
    return acc.ravel()


def colour_product(
    instance: ProductInstance, *, materialize_cap: int = DEFAULT_MATERIALIZE_CAP
) -> ProductColouring:
    """Unwrapped sum colouring: factor ``i`` coloured with spans in its own window."""
    per_tree = tuple(
        colour_tree_square(t, s) for t, s in zip(instance.trees, span_offsets(instance))
    )
    values = sum_colouring(per_tree) if instance.total <= materialize_cap else None
    return ProductColouring(
        instance=instance,
        per_tree=per_tree,
        S=total_span_bound(instance),
        wrapped=False,
        values=values,
    )


def edge_index_pairs(instance: ProductInstance, dim: int, edge: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Flat endpoints of every product edge that copies tree edge ``edge`` in factor ``dim``."""
    dims = instance.dims
    stride = instance.strides[dim]
    a, b = edge
    # all flat indices whose coordinate ``dim`` is ``a``
    outer = instance.total // (stride * dims[dim])
    lo = np.arange(stride, dtype=np.int64)
    hi = np.arange(outer, dtype=np.int64) * (stride * dims[dim])
    base = (hi[:, None] + lo[None, :]).ravel()
    return base + a * stride, base + b * stride


def max_edge_span(pc: ProductColouring) -> int:
    """Largest span over all edges of the product graph."""
    if pc.values is None:
        if pc.wrapped:
            raise ValueError("edge spans of an unmaterialised wrapped colouring are not tracked")
        return max(max(pt.spans()) for pt in pc.per_tree)
    worst = 0
    for i, t in enumerate(pc.instance.trees):
        for e in t.edges:
            u, v = edge_index_pairs(pc.instance, i, e)
            worst = max(worst, int(np.abs(pc.values[u] - pc.values[v]).max()))
    return worst


def wrap(pc: ProductColouring) -> ProductColouring:
    """Reduce colours mod ``2S+1`` into ``[0, 2S]``.

    Sound when every product edge has span at most ``S``: then every pair at
    distance two differs by something in ``[1, 2S]``, never a multiple of the
    modulus.
    """
    if pc.wrapped:
        return pc
    worst = max_edge_span(pc)
    if worst > pc.S:
        raise SpanBoundViolated(f"an edge has span {worst} > S = {pc.S}")
    values = None if pc.values is None else np.mod(pc.values, pc.modulus)
    return replace(pc, wrapped=True, values=values)
