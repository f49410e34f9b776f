"""Bounded distance-2 colourings of cartesian products of trees."""

from .product import (
    Bounds,
    ProductColouring,
    ProductInstance,
    bounds,
    colour_product,
    span_offsets,
    wrap,
)
from .spancol import SpanWindow, TreeSquareColouring, colour_tree_square, make_window
from .tree import Tree, generate, max_degree, parse_trees, tree_from_edges

__all__ = [
    "Bounds",
    "ProductColouring",
    "ProductInstance",
    "SpanWindow",
    "Tree",
    "TreeSquareColouring",
    "bounds",
    "colour_product",
    "colour_tree_square",
    "generate",
    "make_window",
    "max_degree",
    "parse_trees",
    "span_offsets",
    "tree_from_edges",
    "wrap",
]
