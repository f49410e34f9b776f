"""Trees on dense vertex indices, their text format, and instance generators."""

from __future__ import annotations

import heapq
import itertools
import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    CycleDetected,
    Disconnected,
    DuplicateEdge,
    InvalidParams,
    ParseError,
    SelfLoop,
    TooSmall,
)

Edge = tuple[int, int]


@dataclass(frozen=True)
class Tree:
    """A validated tree on vertices ``0..n-1``.

    Build instances with :func:`tree_from_edges`; the constructor does not
    validate. ``edges`` holds each edge once as ``(min, max)`` in sorted
    order and ``adjacency[v]`` is the ascending tuple of neighbours of ``v``.
    """

    n: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @property
    def max_degree(self) -> int:
        return max(len(nbrs) for nbrs in self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


class _DisjointSets:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def tree_from_edges(edge_list: Iterable[Sequence[int]]) -> Tree:
    """Validate an edge list and build a :class:`Tree`.

    The vertex set is ``0..max index``; an index that appears in no edge
    leaves the graph disconnected.
    """
    raw = [tuple(e) for e in edge_list]
    if not raw:
        raise TooSmall("a tree needs at least one edge")
    seen: set[Edge] = set()
    edges: list[Edge] = []
    for e in raw:
        if len(e) != 2:
            raise InvalidParams(f"edge {e!r} does not have two endpoints")
        u, v = int(e[0]), int(e[1])
        if u < 0 or v < 0:
            raise InvalidParams(f"negative vertex index in edge ({u}, {v})")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}")
        seen.add(key)
        edges.append(key)

    n = 1 + max(max(e) for e in edges)
    if n < 2:
        raise TooSmall("a tree needs at least two vertices")

    sets = _DisjointSets(n)
    for u, v in edges:
        if not sets.union(u, v):
            raise CycleDetected(f"edge ({u}, {v}) closes a cycle")
    if len(edges) != n - 1:
        raise Disconnected(f"{n} vertices but only {len(edges)} edges")

    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return Tree(
        n=n,
        edges=tuple(sorted(edges)),
        adjacency=tuple(tuple(sorted(a)) for a in adj),
    )


def max_degree(t: Tree) -> int:
    return t.max_degree


def bfs_order(t: Tree, root: int = 0) -> tuple[list[int], list[int]]:
    """Breadth-first visit order and parent array (root is its own parent)."""
    parent = [-1] * t.n
    parent[root] = root
    order = [root]
    queue = deque([root])
    while queue:
        w = queue.popleft()
        for x in t.adjacency[w]:
            if parent[x] < 0:
                parent[x] = w
                order.append(x)
                queue.append(x)
    return order, parent


# -- Prüfer sequences -------------------------------------------------------


def prufer_decode(seq: Sequence[int], n: int | None = None) -> list[Edge]:
    """Edges of the labelled tree on ``0..n-1`` encoded by ``seq``."""
    if n is None:
        n = len(seq) + 2
    if n < 2 or len(seq) != n - 2:
        raise InvalidParams(f"a Prüfer sequence for n={n} has length {n - 2}")
    degree = [1] * n
    for x in seq:
        if not 0 <= x < n:
            raise InvalidParams(f"Prüfer entry {x} out of range for n={n}")
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def prufer_encode(t: Tree) -> list[int]:
    degree = [len(a) for a in t.adjacency]
    removed = [False] * t.n
    leaves = [v for v in range(t.n) if degree[v] == 1]
    heapq.heapify(leaves)
    seq = []
    for _ in range(t.n - 2):
        leaf = heapq.heappop(leaves)
        removed[leaf] = True
        nbr = next(x for x in t.adjacency[leaf] if not removed[x])
        seq.append(nbr)
        degree[nbr] -= 1
        if degree[nbr] == 1:
            heapq.heappush(leaves, nbr)
    return seq


def all_prufer_sequences(n: int) -> Iterator[tuple[int, ...]]:
    """Every labelled tree on ``n`` vertices, once each, as a Prüfer sequence."""
    return itertools.product(range(n), repeat=n - 2)


def canonical_relabel(t: Tree) -> Tree:
    """Relabel vertices by breadth-first order from vertex 0."""
    order, _ = bfs_order(t)
    label = {v: i for i, v in enumerate(order)}
    return tree_from_edges((label[u], label[v]) for u, v in t.edges)


# -- generators -------------------------------------------------------------


def path(n: int) -> Tree:
    if n < 2:
        raise InvalidParams("path needs n >= 2")
    return tree_from_edges((i, i + 1) for i in range(n - 1))


def star(n: int) -> Tree:
    if n < 2:
        raise InvalidParams("star needs n >= 2")
    return tree_from_edges((0, i) for i in range(1, n))


def caterpillar(spine: int, legs: int) -> Tree:
    """A path of ``spine`` vertices, each carrying ``legs`` pendant leaves."""
    if spine < 1 or legs < 0 or spine + spine * legs < 2:
        raise InvalidParams("caterpillar needs spine >= 1 and at least two vertices")
    edges = [(i, i + 1) for i in range(spine - 1)]
    nxt = spine
    for i in range(spine):
        for _ in range(legs):
            edges.append((i, nxt))
            nxt += 1
    return tree_from_edges(edges)


def random_tree(n: int, seed: int) -> Tree:
    """Uniform labelled tree on ``n`` vertices, canonically relabelled."""
    if n < 2:
        raise InvalidParams("random tree needs n >= 2")
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    return canonical_relabel(tree_from_edges(prufer_decode(seq, n)))


KINDS = ("path", "star", "caterpillar", "random")


def generate(
    kind: str,
    n: int | None = None,
    *,
    seed: int | None = None,
    spine: int | None = None,
    legs: int | None = None,
) -> Tree:
    if kind == "path":
        return path(_need(n, "n"))
    if kind == "star":
        return star(_need(n, "n"))
    if kind == "caterpillar":
        return caterpillar(_need(spine, "spine"), _need(legs, "legs"))
    if kind == "random":
        return random_tree(_need(n, "n"), _need(seed, "seed"))
    raise InvalidParams(f"unknown tree kind {kind!r}; expected one of {KINDS}")


def _need(value, name):
    if value is None:
        raise InvalidParams(f"missing parameter {name!r}")
    return value


# -- text format ------------------------------------------------------------

_EDGE_LINE = re.compile(r"^\s*(\d+)\s+(\d+)\s*$")


def _blocks(text: str) -> list[list[tuple[int, str]]]:
    blocks: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        if line.lstrip().startswith("#"):
            continue
        current.append((lineno, line))
    if current:
        blocks.append(current)
    return blocks


def _parse_block(block: list[tuple[int, str]]) -> Tree:
    edges = []
    for lineno, line in block:
        m = _EDGE_LINE.match(line)
        if m is None:
            raise ParseError(f"line {lineno}: expected 'u v', got {line!r}")
        edges.append((int(m.group(1)), int(m.group(2))))
    return tree_from_edges(edges)


def parse_trees(text: str) -> list[Tree]:
    """Parse blank-line-separated edge-list blocks; comment lines start with ``#``."""
    trees = [_parse_block(b) for b in _blocks(text)]
    if not trees:
        raise ParseError("no edges found")
    return trees


def parse_tree(text: str) -> Tree:
    trees = parse_trees(text)
    if len(trees) != 1:
        raise ParseError(f"expected one tree, found {len(trees)}")
    return trees[0]


def format_tree(t: Tree) -> str:
    return "".join(f"{u} {v}\n" for u, v in t.edges)


def format_trees(trees: Sequence[Tree]) -> str:
    return "\n".join(format_tree(t) for t in trees)
