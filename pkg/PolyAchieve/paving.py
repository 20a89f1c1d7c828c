# paving.py

from typing import Dict, FrozenSet, List, NamedTuple, Optional, Set, Tuple

from PolyAchieve.board import UP, DOWN, BoardKind, Cell, check_board, format_cell, format_cells
from PolyAchieve.bounds import Verdict, breaker_wins, make_game, unknown
from PolyAchieve.polyform import Placement, Polyform, orientations

Vector = Tuple[int, int]


class Paving(NamedTuple):
    """A relation on cells given by pairs in one fundamental domain, repeated along two periods."""
    board: BoardKind
    period: Tuple[Vector, Vector]
    pairs: Tuple[Tuple[Cell, Cell], ...]
    name: str = ""

    @property
    def det(self) -> int:
        (ax, ay), (bx, by) = self.period
        return ax * by - ay * bx


def make_paving(board: BoardKind, period: Tuple[Vector, Vector], pairs, name: str = "") -> Paving:
    paving = Paving(board, (tuple(period[0]), tuple(period[1])), tuple(tuple(p) for p in pairs), name)
    if paving.det == 0:
        raise ValueError(f"❌ Paving '{name}': period vectors {period} are linearly dependent.")
    for u, v in paving.pairs:
        check_board((u, v), board)
        if u == v:
            raise ValueError(f"❌ Paving '{name}': pair relates {format_cell(u)} to itself.")
    return paving


def _coords(p: Paving, dx: int, dy: int) -> Tuple[int, int]:
    """Coordinates of (dx,dy) in the period basis, scaled by the determinant."""
    (ax, ay), (bx, by) = p.period
    return dx * by - dy * bx, ax * dy - ay * dx


def in_lattice(p: Paving, dx: int, dy: int) -> bool:
    alpha, beta = _coords(p, dx, dy)
    return alpha % p.det == 0 and beta % p.det == 0


def residue(p: Paving, cell: Cell) -> Tuple[int, int, str]:
    """A key shared by exactly the cells that are period translates of each other."""
    alpha, beta = _coords(p, cell.x, cell.y)
    d = abs(p.det)
    return alpha % d, beta % d, cell.t


def partners(p: Paving, cell: Cell) -> FrozenSet[Cell]:
    """Cells related to `cell`."""
    related: Set[Cell] = set()
    for u, v in p.pairs:
        for src, dst in ((u, v), (v, u)):
            if src.t != cell.t:
                continue
            dx, dy = cell.x - src.x, cell.y - src.y
            if in_lattice(p, dx, dy):
                related.add(dst.shifted(dx, dy))
    related.discard(cell)
    return frozenset(related)


def fundamental_domain(p: Paving) -> List[Cell]:
    """One representative cell per translation class, smallest first."""
    d = abs(p.det)
    kinds = ("",) if p.board is BoardKind.SQUARE else (DOWN, UP)
    seen: Dict[Tuple[int, int, str], Cell] = {}
    for x in range(d):
        for y in range(d):
            for t in kinds:
                cell = Cell(x, y, t)
                seen.setdefault(residue(p, cell), cell)
    return sorted(seen.values())


def paving_degree(p: Paving) -> int:
    """The largest number of cells related to one cell."""
    if not p.pairs:
        return 0
    return max(len(partners(p, c)) for c in fundamental_domain(p))


def _anchors(p: Paving, blocks: int) -> List[Cell]:
    (ax, ay), (bx, by) = p.period
    cells = fundamental_domain(p)
    return sorted({
        c.shifted(i * ax + j * bx, i * ay + j * by)
        for c in cells for i in range(blocks) for j in range(blocks)
    })


def related_pair(p: Paving, placement: Placement) -> Optional[Tuple[Cell, Cell]]:
    cells = set(placement)
    for cell in placement:
        for other in sorted(partners(p, cell)):
            if other in cells:
                return cell, other
    return None


def defeats(p: Paving, goal: Polyform, blocks: int = 1) -> Verdict:
    """
    BreakerWins(1, degree) iff every placement of the goal holds a related pair.

    Placements are enumerated up to the period: each orientation anchored at each
    fundamental-domain cell. `blocks` widens the anchor set to a block of periods.
    """
    if p.board is not goal.board:
        raise ValueError(f"❌ Paving '{p.name}' and goal '{goal}' are on different boards.")
    degree = paving_degree(p)
    game = make_game(1, degree)
    anchors = _anchors(p, blocks)
    checked = 0
    for anchor in anchors:
        for shape in orientations(goal):
            low = shape[0]
            if low.t != anchor.t:
                continue
            placement = tuple(c.shifted(anchor.x - low.x, anchor.y - low.y) for c in shape)
            checked += 1
            if related_pair(p, placement) is None:
                return unknown(
                    game, f"placement {format_cells(placement)} holds no related pair", placement
                )
    return breaker_wins(game, f"paving {p.name}".strip(), f"{checked} placements covered")
