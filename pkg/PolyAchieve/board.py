# board.py

from dataclasses import dataclass
from enum import Enum, IntEnum
from functools import lru_cache
import re
from typing import FrozenSet, Iterable, List, NamedTuple, Tuple

UP = "U"
DOWN = "D"

CELL_PATTERN = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*(?:,\s*([UD])\s*)?\)")


class BoardKind(Enum):
    """The two regular tilings the games are played on."""
    SQUARE = "square"
    TRIANGULAR = "triangular"

    @property
    def delta(self) -> int:
        """Site-perimeter of a single cell."""
        return 4 if self is BoardKind.SQUARE else 3


class Parity(IntEnum):
    EVEN = 0
    ODD = 1


class Cell(NamedTuple):
    """A board location. `t` is 'U' or 'D' on triangular boards and empty on square boards."""
    x: int
    y: int
    t: str = ""

    def shifted(self, dx: int, dy: int) -> "Cell":
        return Cell(self.x + dx, self.y + dy, self.t)

    def offset(self, rel: "Cell") -> "Cell":
        """Applies a relative offset; a triangular offset names the target orientation."""
        return Cell(self.x + rel.x, self.y + rel.y, rel.t or self.t)

    def __str__(self) -> str:
        return format_cell(self)


def board_of(cell: Cell) -> BoardKind:
    return BoardKind.TRIANGULAR if cell.t else BoardKind.SQUARE


# --- Cell text syntax ---
def format_cell(cell: Cell) -> str:
    if cell.t:
        return f"({cell.x},{cell.y},{cell.t})"
    return f"({cell.x},{cell.y})"


def format_cells(cells: Iterable[Cell]) -> str:
    return " ".join(format_cell(c) for c in sorted(cells))


def parse_cells(text: str) -> List[Cell]:
    """Parses every `(x,y)` or `(x,y,U|D)` token in `text`, in order."""
    return [
        Cell(int(m.group(1)), int(m.group(2)), m.group(3) or "")
        for m in CELL_PATTERN.finditer(text)
    ]


def check_board(cells: Iterable[Cell], board: BoardKind) -> None:
    """Raises ValueError if a cell does not belong to `board`."""
    for cell in cells:
        if board_of(cell) is not board:
            raise ValueError(
                f"❌ Cell {format_cell(cell)} does not belong to a {board.value} board."
            )


# --- Adjacency and parity ---
def adjacent(cell: Cell, board: BoardKind) -> FrozenSet[Cell]:
    """Cells sharing an edge with `cell`."""
    x, y = cell.x, cell.y
    if board is BoardKind.SQUARE:
        return frozenset((Cell(x + 1, y), Cell(x - 1, y), Cell(x, y + 1), Cell(x, y - 1)))
    if cell.t == UP:
        return frozenset((Cell(x, y, DOWN), Cell(x - 1, y, DOWN), Cell(x, y - 1, DOWN)))
    return frozenset((Cell(x, y, UP), Cell(x + 1, y, UP), Cell(x, y + 1, UP)))


def parity(cell: Cell) -> Parity:
    """Checkerboard parity on square boards; orientation on triangular boards (up is even)."""
    if cell.t:
        return Parity.EVEN if cell.t == UP else Parity.ODD
    return Parity.EVEN if (cell.x + cell.y) % 2 == 0 else Parity.ODD


# --- Symmetries ---
Matrix = Tuple[int, int, int, int]
IDENTITY: Matrix = (1, 0, 0, 1)


def _mat_mul(m2: Matrix, m1: Matrix) -> Matrix:
    a2, b2, c2, d2 = m2
    a1, b1, c1, d1 = m1
    return (a2 * a1 + b2 * c1, a2 * b1 + b2 * d1, c2 * a1 + d2 * c1, c2 * b1 + d2 * d1)


def _mat_vec(m: Matrix, x: int, y: int) -> Tuple[int, int]:
    a, b, c, d = m
    return a * x + b * y, c * x + d * y


def _mat_inv(m: Matrix) -> Matrix:
    a, b, c, d = m
    det = a * d - b * c
    if det not in (1, -1):
        raise ValueError(f"❌ Matrix {m} is not unimodular.")
    return (d * det, -b * det, -c * det, a * det)


@dataclass(frozen=True)
class Symmetry:
    """
    A congruence of the board: a point-group matrix followed by a translation.

    On triangular boards the matrix acts on triangle centroids written in a
    60-degree lattice basis (scaled by 3) about the vertex (-1,-1); the shift is
    in cell coordinates.
    """
    matrix: Matrix
    shift: Tuple[int, int]
    board: BoardKind

    def apply(self, cell: Cell) -> Cell:
        dx, dy = self.shift
        if self.board is BoardKind.SQUARE:
            x, y = _mat_vec(self.matrix, cell.x, cell.y)
            return Cell(x + dx, y + dy)
        px, py = (3 * cell.x, 3 * cell.y) if cell.t == UP else (3 * cell.x + 1, 3 * cell.y + 1)
        qx, qy = _mat_vec(self.matrix, px + 1, py + 1)
        qx, qy = qx - 1 + 3 * dx, qy - 1 + 3 * dy
        rx, ry = qx % 3, qy % 3
        if rx == 0 and ry == 0:
            return Cell(qx // 3, qy // 3, UP)
        if rx == 1 and ry == 1:
            return Cell((qx - 1) // 3, (qy - 1) // 3, DOWN)
        raise ValueError(f"❌ Symmetry {self} does not map triangles to triangles.")

    def apply_all(self, cells: Iterable[Cell]) -> Tuple[Cell, ...]:
        return tuple(sorted(self.apply(c) for c in cells))

    def compose(self, first: "Symmetry") -> "Symmetry":
        """Returns `self` after `first`."""
        sx, sy = _mat_vec(self.matrix, *first.shift)
        return Symmetry(
            _mat_mul(self.matrix, first.matrix),
            (sx + self.shift[0], sy + self.shift[1]), self.board
        )

    def inverse(self) -> "Symmetry":
        inv = _mat_inv(self.matrix)
        sx, sy = _mat_vec(inv, *self.shift)
        return Symmetry(inv, (-sx, -sy), self.board)

    def then_translate(self, dx: int, dy: int) -> "Symmetry":
        return Symmetry(self.matrix, (self.shift[0] + dx, self.shift[1] + dy), self.board)

    @property
    def is_point(self) -> bool:
        return self.shift == (0, 0)


def translation(dx: int, dy: int, board: BoardKind) -> Symmetry:
    return Symmetry(IDENTITY, (dx, dy), board)


def _generate_group(generators: List[Matrix]) -> Tuple[Matrix, ...]:
    group = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        current = frontier.pop()
        for gen in generators:
            product = _mat_mul(gen, current)
            if product not in group:
                group.add(product)
                frontier.append(product)
    return tuple(sorted(group, key=lambda m: (m != IDENTITY, m)))


@lru_cache(maxsize=None)
def point_symmetries(board: BoardKind) -> Tuple[Symmetry, ...]:
    """The point group of the board (8 square, 12 triangular), identity first."""
    if board is BoardKind.SQUARE:
        gens = [(0, -1, 1, 0), (0, 1, 1, 0)]
    else:
        gens = [(0, -1, 1, 1), (0, 1, 1, 0)]
    return tuple(Symmetry(m, (0, 0), board) for m in _generate_group(gens))


def rotation_quarter() -> Symmetry:
    """90 degree rotation of the square board about the origin."""
    return Symmetry((0, -1, 1, 0), (0, 0), BoardKind.SQUARE)


# --- Windows ---
@dataclass(frozen=True)
class Window:
    """A finite rectangle of cells with inclusive bounds; triangular windows hold both orientations."""
    board: BoardKind
    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"❌ Empty window: {self}")

    @classmethod
    def square(cls, width: int, height: int) -> "Window":
        return cls(BoardKind.SQUARE, 0, width - 1, 0, height - 1)

    @classmethod
    def rows(cls, n: int) -> "Window":
        """An n by n rhombus of triangular cells."""
        return cls(BoardKind.TRIANGULAR, 0, n - 1, 0, n - 1)

    @classmethod
    def parse(cls, text: str, board: BoardKind) -> "Window":
        """Parses 'WxH' for square boards or 'N' / 'NxN' for triangular boards."""
        parts = text.lower().split("x")
        try:
            dims = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"❌ Invalid window '{text}'. Use WxH, e.g. 7x7.") from None
        if board is BoardKind.SQUARE:
            if len(dims) != 2:
                raise ValueError(f"❌ Invalid window '{text}'. Square windows need WxH.")
            return cls.square(*dims)
        if len(dims) == 2 and dims[0] != dims[1]:
            raise ValueError(f"❌ Invalid window '{text}'. Triangular windows are N or NxN.")
        return cls.rows(dims[0])

    def cells(self) -> Tuple[Cell, ...]:
        kinds = ("",) if self.board is BoardKind.SQUARE else (DOWN, UP)
        return tuple(
            Cell(x, y, t)
            for x in range(self.x_min, self.x_max + 1)
            for y in range(self.y_min, self.y_max + 1)
            for t in kinds
        )

    def __contains__(self, cell: Cell) -> bool:
        return (
            self.x_min <= cell.x <= self.x_max and self.y_min <= cell.y <= self.y_max
            and board_of(cell) is self.board
        )

    def __str__(self) -> str:
        return f"{self.x_max - self.x_min + 1}x{self.y_max - self.y_min + 1} {self.board.value}"


def window_symmetries(window: Window) -> Tuple[Symmetry, ...]:
    """Board congruences mapping the window's cell set onto itself, identity first."""
    cells = window.cells()
    target = frozenset(cells)
    anchor = min(cells)
    found = []
    for sym in point_symmetries(window.board):
        image = sym.apply_all(cells)
        low = image[0]
        moved = sym.then_translate(anchor.x - low.x, anchor.y - low.y)
        if frozenset(moved.apply(c) for c in cells) == target:
            found.append(moved)
    return tuple(found)
