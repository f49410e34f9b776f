"""Colour the square of a tree with every tree-edge span inside a fixed window."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidDelta, OffsetExhausted
from .tree import Tree, bfs_order


@dataclass(frozen=True)
class SpanWindow:
    """Permitted edge spans ``lo..hi`` and the signed offsets realising them.

    ``offsets`` is ordered ``lo, -lo, lo+1, -(lo+1), ..., hi, -hi``.
    """

    s: int
    half_delta: int

    @property
    def lo(self) -> int:
        return self.s + 1

    @property
    def hi(self) -> int:
        return self.s + self.half_delta

    @property
    def offsets(self) -> tuple[int, ...]:
        out = []
        for m in range(self.lo, self.hi + 1):
            out += (m, -m)
        return tuple(out)

    def __contains__(self, span: int) -> bool:
        return self.lo <= span <= self.hi


def make_window(s: int, delta: int) -> SpanWindow:
    if delta < 1:
        raise InvalidDelta(f"maximum degree must be >= 1, got {delta}")
    if s < 0:
        raise InvalidDelta(f"window base must be non-negative, got {s}")
    return SpanWindow(s=s, half_delta=(delta + 1) // 2)


@dataclass(frozen=True)
class TreeSquareColouring:
    tree: Tree
    window: SpanWindow
    colour: tuple[int, ...]
    root: int = 0

    def span(self, u: int, v: int) -> int:
        return abs(self.colour[u] - self.colour[v])

    def spans(self) -> list[int]:
        return [self.span(u, v) for u, v in self.tree.edges]


def colour_tree_square(t: Tree, s: int = 0) -> TreeSquareColouring:
    """Colour ``t`` so it is proper on its square, with spans in ``[s+1, s+ceil(D/2)]``.

    Sweeps breadth-first from vertex 0 (colour 0). Each vertex hands its
    children distinct offsets in window order, skipping the offset its own
    parent edge already uses. Since the window has at least ``D`` offsets and
    a non-root vertex has at most ``D - 1`` children, the sweep never runs out.
    """
    window = make_window(s, t.max_degree)
    offsets = window.offsets
    order, parent = bfs_order(t, 0)
    colour = [0] * t.n
    for w in order:
        back = None if w == 0 else colour[parent[w]] - colour[w]
        it = (x for x in offsets if x != back)
        for child in t.adjacency[w]:
            if child == parent[w]:
                continue
            x = next(it, None)
            if x is None:
                raise OffsetExhausted(f"vertex {w}: no free offset in {offsets}")
            colour[child] = colour[w] + x
    return TreeSquareColouring(tree=t, window=window, colour=tuple(colour), root=0)
