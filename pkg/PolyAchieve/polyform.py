# polyform.py

from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Set, Tuple

import networkx as nx

from PolyAchieve.board import (
    BoardKind, Cell, adjacent, check_board, format_cells, point_symmetries,
)

# A concrete placement of a polyform: its cells in sorted order.
Placement = Tuple[Cell, ...]


@dataclass(frozen=True)
class Polyform:
    """A finite edge-connected set of cells. Stored as a sorted tuple."""
    board: BoardKind
    cells: Tuple[Cell, ...]
    name: str = ""

    def __post_init__(self):
        cells = tuple(sorted(set(self.cells)))
        if not cells:
            raise ValueError(f"❌ Polyform '{self.name}' has no cells.")
        check_board(cells, self.board)
        object.__setattr__(self, "cells", cells)
        if not is_connected(cells, self.board):
            raise ValueError(
                f"❌ Polyform '{self.name}' is not edge-connected: {format_cells(cells)}"
            )

    @property
    def size(self) -> int:
        return len(self.cells)

    def __str__(self) -> str:
        return self.name or format_cells(self.cells)


def is_connected(cells: Iterable[Cell], board: BoardKind) -> bool:
    cell_set = set(cells)
    graph = nx.Graph()
    graph.add_nodes_from(cell_set)
    for cell in cell_set:
        for nb in adjacent(cell, board):
            if nb in cell_set:
                graph.add_edge(cell, nb)
    return graph.number_of_nodes() > 0 and nx.is_connected(graph)


def normalize(cells: Iterable[Cell]) -> Placement:
    """Translates so that the smallest cell sits at (0,0)."""
    ordered = sorted(cells)
    low = ordered[0]
    return tuple(c.shifted(-low.x, -low.y) for c in ordered)


@lru_cache(maxsize=None)
def _orientations(board: BoardKind, cells: Tuple[Cell, ...]) -> Tuple[Placement, ...]:
    images = {normalize(sym.apply_all(cells)) for sym in point_symmetries(board)}
    return tuple(sorted(images))


def orientations(p: Polyform) -> Tuple[Placement, ...]:
    """All distinct fixed orientations of `p`, each anchored at the origin."""
    return _orientations(p.board, p.cells)


def canonical(p: Polyform) -> Polyform:
    """The lexicographically least translate over all point-symmetry images."""
    return Polyform(p.board, orientations(p)[0], p.name)


def congruent(a: Polyform, b: Polyform) -> bool:
    return a.board is b.board and canonical(a).cells == canonical(b).cells


def exterior_boundary(p: Polyform) -> FrozenSet[Cell]:
    """Cells outside `p` adjacent to some cell of `p`."""
    inside = set(p.cells)
    border: Set[Cell] = set()
    for cell in p.cells:
        border.update(adjacent(cell, p.board))
    return frozenset(border - inside)


def site_perimeter(p: Polyform) -> int:
    return len(exterior_boundary(p))


def placements_meeting(p: Polyform, region: Iterable[Cell]) -> List[Placement]:
    """Every placement of `p` intersecting `region`, each once, in sorted order."""
    targets = sorted(set(region))
    found: Set[Placement] = set()
    for shape in orientations(p):
        for target in targets:
            for cell in shape:
                if cell.t != target.t:
                    continue
                dx, dy = target.x - cell.x, target.y - cell.y
                found.add(tuple(c.shifted(dx, dy) for c in shape))
    return sorted(found)


def placements_inside(p: Polyform, region: Iterable[Cell]) -> List[Placement]:
    """Placements of `p` lying entirely within `region`."""
    allowed = frozenset(region)
    return [pl for pl in placements_meeting(p, allowed) if allowed.issuperset(pl)]


def is_subform(a: Polyform, b: Polyform) -> bool:
    """True iff some placement of `a` fits inside `b`."""
    if a.board is not b.board:
        raise ValueError(f"❌ Cannot compare a {a.board.value} and a {b.board.value} polyform.")
    if a.size > b.size:
        return False
    return bool(placements_inside(a, b.cells))
