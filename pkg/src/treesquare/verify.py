"""Independent checks: explicit product and square graphs, properness, exact chromatic number.

Nothing here uses the span-window construction; the point is to check it.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import MissingColour, TooLarge
from .product import (
    ProductColouring,
    ProductInstance,
    edge_index_pairs,
    mixed_radix_decode,
    mixed_radix_encode,
    span_offsets,
)
from .spancol import make_window

DEFAULT_GRAPH_CAP = 50_000
DEFAULT_EXACT_CAP = 64


@dataclass(frozen=True)
class ExplicitGraph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, n: int, edges) -> "ExplicitGraph":
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return cls(n, tuple(tuple(sorted(a)) for a in adj))

    def edges(self):
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield u, v

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.adjacency[u]
        i = np.searchsorted(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v


def build_product_graph(instance: ProductInstance, cap: int = DEFAULT_GRAPH_CAP) -> ExplicitGraph:
    """Materialise the cartesian product over flat indices."""
    total = instance.total
    if total > cap:
        raise TooLarge(f"product has {total} vertices, cap is {cap}")
    dims = instance.dims
    adj = []
    for flat in range(total):
        coords = list(mixed_radix_decode(flat, dims))
        nbrs = []
        for i, t in enumerate(instance.trees):
            x = coords[i]
            for y in t.adjacency[x]:
                coords[i] = y
                nbrs.append(mixed_radix_encode(coords, dims))
            coords[i] = x
        adj.append(tuple(sorted(nbrs)))
    return ExplicitGraph(total, tuple(adj))


def tree_graph(t) -> ExplicitGraph:
    return ExplicitGraph(t.n, t.adjacency)


def square(g: ExplicitGraph, cap: int = DEFAULT_GRAPH_CAP) -> ExplicitGraph:
    if g.n > cap:
        raise TooLarge(f"graph has {g.n} vertices, cap is {cap}")
    adj = []
    for v, nbrs in enumerate(g.adjacency):
        reach = set(nbrs)
        for w in nbrs:
            reach.update(g.adjacency[w])
        reach.discard(v)
        adj.append(tuple(sorted(reach)))
    return ExplicitGraph(g.n, tuple(adj))


# -- colouring checks -------------------------------------------------------


class Violation(NamedTuple):
    u: int
    v: int
    colour: int


def _colour_lookup(g: ExplicitGraph, colour) -> Sequence[int]:
    if isinstance(colour, Mapping):
        missing = [v for v in range(g.n) if v not in colour]
        if missing:
            raise MissingColour(f"no colour for vertex {missing[0]}")
        return [colour[v] for v in range(g.n)]
    if len(colour) < g.n:
        raise MissingColour(f"no colour for vertex {len(colour)}")
    return colour


def check_proper(g: ExplicitGraph, colour) -> Violation | None:
    """``None`` if no edge is monochromatic, else the lexicographically first bad edge."""
    c = _colour_lookup(g, colour)
    for u, nbrs in enumerate(g.adjacency):
        cu = c[u]
        for v in nbrs:
            if v > u and c[v] == cu:
                return Violation(u, v, int(cu))
    return None


class SpanViolation(NamedTuple):
    u: int
    v: int
    dimension: int
    span: int
    window: tuple[int, int]


def check_spans(instance: ProductInstance, pc: ProductColouring) -> SpanViolation | None:
    """Check that every dimension-``i`` edge has span in window ``i``.

    Windows are recomputed from the instance, not taken from ``pc``.
    """
    if pc.wrapped:
        raise ValueError("span windows only apply to unwrapped colourings")
    values = pc.to_array()
    best: SpanViolation | None = None
    for i, (t, s) in enumerate(zip(instance.trees, span_offsets(instance))):
        w = make_window(s, t.max_degree)
        for e in t.edges:
            u, v = edge_index_pairs(instance, i, e)
            spans = np.abs(values[u] - values[v])
            bad = np.flatnonzero((spans < w.lo) | (spans > w.hi))
            if bad.size:
                # u < v componentwise, and u is increasing along the array
                j = bad[0]
                cand = SpanViolation(int(u[j]), int(v[j]), i, int(spans[j]), (w.lo, w.hi))
                if best is None or (cand.u, cand.v) < (best.u, best.v):
                    best = cand
    return best


# -- lower-bound certificate ------------------------------------------------


class CliqueCertificate(NamedTuple):
    vertex: int
    size: int
    members: tuple[int, ...]
    verified: bool | None


def clique_certificate(
    instance: ProductInstance, *, explicit: bool = False, cap: int = DEFAULT_GRAPH_CAP
) -> CliqueCertificate:
    """Product of per-factor max-degree vertices and its closed neighbourhood.

    With ``explicit`` the neighbourhood is checked for pairwise adjacency in
    an independently built square graph.
    """
    centre = [
        min(range(t.n), key=lambda v, t=t: (-t.degree(v), v)) for t in instance.trees
    ]
    dims = instance.dims
    vertex = mixed_radix_encode(centre, dims)
    members = [vertex]
    for i, t in enumerate(instance.trees):
        for y in t.adjacency[centre[i]]:
            coords = list(centre)
            coords[i] = y
            members.append(mixed_radix_encode(coords, dims))
    members.sort()
    verified = None
    if explicit:
        sq = square(build_product_graph(instance, cap), cap)
        verified = is_clique(sq, members)
    return CliqueCertificate(vertex, len(members), tuple(members), verified)


def is_clique(g: ExplicitGraph, vertices: Sequence[int]) -> bool:
    vs = list(vertices)
    for a in range(len(vs)):
        nbrs = set(g.adjacency[vs[a]])
        if any(vs[b] not in nbrs for b in range(a + 1, len(vs))):
            return False
    return True


# -- exact chromatic number -------------------------------------------------


def greedy_clique(g: ExplicitGraph) -> list[int]:
    """Largest clique found by greedy extension from each vertex."""
    order = sorted(range(g.n), key=lambda v: (-len(g.adjacency[v]), v))
    rank = {v: i for i, v in enumerate(order)}
    best: list[int] = []
    for v in order:
        if len(g.adjacency[v]) + 1 <= len(best):
            break
        clique = [v]
        cand = set(g.adjacency[v])
        for u in sorted(cand, key=rank.__getitem__):
            if u in cand:
                clique.append(u)
                cand &= set(g.adjacency[u])
        if len(clique) > len(best):
            best = clique
    return best


def dsatur_colouring(g: ExplicitGraph) -> list[int]:
    """Greedy DSATUR colouring; gives an upper bound."""
    colour = [-1] * g.n
    nbr_colours: list[set[int]] = [set() for _ in range(g.n)]
    deg = [len(a) for a in g.adjacency]
    for _ in range(g.n):
        v = max(
            (u for u in range(g.n) if colour[u] < 0),
            key=lambda u: (len(nbr_colours[u]), deg[u], -u),
        )
        c = 0
        while c in nbr_colours[v]:
            c += 1
        colour[v] = c
        for u in g.adjacency[v]:
            nbr_colours[u].add(c)
    return colour


def tabu_colouring(
    g: ExplicitGraph, k: int, *, seed: int = 0, max_iter: int = 200_000
) -> list[int] | None:
    """Local search for a proper ``k``-colouring (TabuCol).

    Can only ever return a proper colouring; ``None`` proves nothing.
    """
    n, adj = g.n, g.adjacency
    if n == 0:
        return []
    rng = random.Random(seed)
    col = [rng.randrange(k) for _ in range(n)]
    gamma = [[0] * k for _ in range(n)]
    for v in range(n):
        for u in adj[v]:
            gamma[v][col[u]] += 1
    conflicts = sum(gamma[v][col[v]] for v in range(n)) // 2
    best = conflicts
    tabu: dict[tuple[int, int], int] = {}
    for it in range(max_iter):
        if conflicts == 0:
            return col
        best_delta, moves, in_conflict = None, [], 0
        for v in range(n):
            gv, cv = gamma[v], col[v]
            if gv[cv] == 0:
                continue
            in_conflict += 1
            for c in range(k):
                if c == cv:
                    continue
                delta = gv[c] - gv[cv]
                # aspiration: a tabu move is allowed if it beats the best seen
                if tabu.get((v, c), -1) >= it and conflicts + delta >= best:
                    continue
                if best_delta is None or delta < best_delta:
                    best_delta, moves = delta, [(v, c)]
                elif delta == best_delta:
                    moves.append((v, c))
        if not moves:
            continue
        v, c = moves[rng.randrange(len(moves))]
        old = col[v]
        col[v] = c
        for u in adj[v]:
            gamma[u][old] -= 1
            gamma[u][c] += 1
        conflicts += best_delta
        best = min(best, conflicts)
        tabu[(v, old)] = it + int(0.6 * in_conflict) + rng.randrange(10)
    return col if conflicts == 0 else None


class _KColouring:
    """Backtracking k-colourability with DSATUR branching and forward checking."""

    def __init__(self, g: ExplicitGraph, k: int, clique: Sequence[int]):
        self.g = g
        self.k = k
        self.adj = g.adjacency
        self.deg = [len(a) for a in g.adjacency]
        self.colour = [-1] * g.n
        self.count = [[0] * k for _ in range(g.n)]
        self.sat = [0] * g.n
        self.uncoloured = set(range(g.n))
        self.clique = list(clique)
        self.nodes = 0

    def _assign(self, v: int, c: int) -> bool:
        """Colour ``v``; returns False if some neighbour is left with no colour."""
        self.colour[v] = c
        self.uncoloured.discard(v)
        ok = True
        count, sat, k = self.count, self.sat, self.k
        for u in self.adj[v]:
            row = count[u]
            row[c] += 1
            if row[c] == 1:
                sat[u] += 1
                if sat[u] == k and self.colour[u] < 0:
                    ok = False
        return ok

    def _unassign(self, v: int, c: int) -> None:
        self.colour[v] = -1
        self.uncoloured.add(v)
        count, sat = self.count, self.sat
        for u in self.adj[v]:
            row = count[u]
            row[c] -= 1
            if row[c] == 0:
                sat[u] -= 1

    def solve(self) -> list[int] | None:
        if len(self.clique) > self.k:
            return None
        ok = True
        for c, v in enumerate(self.clique):
            ok = self._assign(v, c) and ok
        if not ok:
            return None
        return list(self.colour) if self._search(len(self.clique) - 1) else None

    def _search(self, max_used: int) -> bool:
        self.nodes += 1
        if not self.uncoloured:
            return True
        sat, deg = self.sat, self.deg
        v = max(self.uncoloured, key=lambda u: (sat[u], deg[u], -u))
        row = self.count[v]
        for c in range(min(max_used + 2, self.k)):
            if row[c]:
                continue
            ok = self._assign(v, c)
            if ok and self._search(max(max_used, c)):
                return True
            self._unassign(v, c)
        return False


def find_k_colouring(
    g: ExplicitGraph, k: int, clique: Sequence[int] = ()
) -> list[int] | None:
    """A proper colouring with colours ``0..k-1``, or ``None`` if none exists.

    ``clique`` must be a clique of ``g``; its members are pre-coloured
    ``0, 1, ...`` which is without loss of generality.
    """
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, g.n + 100))
    try:
        return _KColouring(g, k, clique).solve()
    finally:
        sys.setrecursionlimit(limit)


def chi_exact(
    g: ExplicitGraph,
    limit: int = DEFAULT_EXACT_CAP,
    *,
    clique: Sequence[int] | None = None,
    tabu_iters: int = 200_000,
    tabu_seed: int = 0,
) -> int:
    """Chromatic number by exhaustive search. Refuses graphs above ``limit`` vertices.

    ``clique`` may seed the lower bound (e.g. a known clique certificate); it is
    checked before use. For each candidate ``k`` from the clique size upward a
    seeded tabu search looks for a witness colouring first (checked before it
    is trusted); only if it fails does the exhaustive search settle ``k``.
    """
    if g.n > limit:
        raise TooLarge(f"graph has {g.n} vertices, exact search limit is {limit}")
    if g.n == 0:
        return 0
    start = greedy_clique(g)
    if clique is not None:
        if not is_clique(g, clique):
            raise ValueError("seed vertices do not form a clique")
        if len(clique) >= len(start):
            start = sorted(clique)
    upper = max(dsatur_colouring(g)) + 1
    # small graphs are cheaper to settle exhaustively than to search locally
    iters = min(tabu_iters, 1000 * g.n)
    for k in range(len(start), upper):
        witness = tabu_colouring(g, k, seed=tabu_seed, max_iter=iters)
        if witness is not None and check_proper(g, witness) is None:
            return k
        if find_k_colouring(g, k, start) is not None:
            return k
    return upper
