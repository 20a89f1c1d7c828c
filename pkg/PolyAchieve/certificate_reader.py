# certificate_reader.py

from pathlib import Path
import re
from typing import Callable, Dict, List, Optional, Tuple, Union

from PolyAchieve.board import BoardKind, Cell, Symmetry, check_board, parse_cells
from PolyAchieve.bounds import make_game
from PolyAchieve.paving import Paving, make_paving
from PolyAchieve.polyform import Polyform
from PolyAchieve.priority import (
    HistorySpec, ParityCondition, PriorityRule, PriorityStrategy, make_strategy,
)
from PolyAchieve.proofseq import Component, ProofSequence, Situation

PathLike = Union[str, Path]
DATA_DIR = Path(__file__).parent / "data"

_KEY_VALUE = re.compile(r"(\w+)\s*=\s*(-?\d+)")
_INTS = re.compile(r"-?\d+")


class CertificateError(ValueError):
    """A malformed certificate file, located by file name and 1-based line number."""

    def __init__(self, path: PathLike, line: int, message: str):
        self.path = Path(path)
        self.line = line
        super().__init__(f"❌ {self.path.name}, line {line}: {message}")


class _Lines:
    """Non-blank, comment-stripped lines of a certificate file with their line numbers."""

    def __init__(self, path: PathLike):
        self.path = Path(path)
        if not self.path.is_file():
            raise FileNotFoundError(f"❌ Certificate file not found: '{self.path}'")
        text = self.path.read_text(encoding="utf-8")
        self.items: List[Tuple[int, str]] = []
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.items.append((line_no, line))
        self.pos = 0

    def error(self, line: int, message: str) -> CertificateError:
        return CertificateError(self.path, line, message)

    def peek(self) -> Optional[Tuple[int, str]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> Tuple[int, str]:
        item = self.items[self.pos]
        self.pos += 1
        return item

    def last_line(self) -> int:
        return self.items[-1][0] if self.items else 1


def _keyword(line: str) -> Tuple[str, str]:
    head, _, rest = line.partition(" ")
    return head.rstrip(":").lower(), rest.strip()


def _board(lines: _Lines) -> BoardKind:
    item = lines.peek()
    if item is None:
        raise lines.error(1, "empty file, expected 'board square|triangular'")
    line_no, line = lines.next()
    key, rest = _keyword(line)
    if key != "board":
        raise lines.error(line_no, f"expected 'board square|triangular', got '{line}'")
    try:
        return BoardKind(rest.lower())
    except ValueError:
        raise lines.error(line_no, f"unknown board '{rest}'") from None


def _name(lines: _Lines, default: str) -> str:
    item = lines.peek()
    if item is not None and _keyword(item[1])[0] == "name":
        lines.next()
        return _keyword(item[1])[1]
    return default


def _cells(lines: _Lines, line_no: int, text: str, board: BoardKind, what: str) -> List[Cell]:
    cells = parse_cells(text)
    leftover = re.sub(r"\([^)]*\)", "", text).strip()
    if leftover:
        raise lines.error(line_no, f"unexpected text '{leftover}' in {what}")
    try:
        check_board(cells, board)
    except ValueError as e:
        raise lines.error(line_no, str(e).lstrip("❌ ")) from None
    return cells


def _guarded(lines: _Lines, line_no: int, build: Callable):
    """Runs a constructor and re-raises its ValueError at `line_no`."""
    try:
        return build()
    except CertificateError:
        raise
    except ValueError as e:
        raise lines.error(line_no, str(e).lstrip("❌ ")) from None


# --- Polyform files ---
def read_polyform(path: PathLike) -> Polyform:
    """`board ...`, an optional `name ...` line, then cells (any number per line)."""
    lines = _Lines(path)
    board = _board(lines)
    name = _name(lines, Path(path).stem)
    cells: List[Cell] = []
    while lines.peek() is not None:
        line_no, line = lines.next()
        cells.extend(_cells(lines, line_no, line, board, "polyform"))
    if not cells:
        raise lines.error(lines.last_line(), "polyform has no cells")
    return _guarded(lines, lines.last_line(), lambda: Polyform(board, tuple(cells), name))


# --- Proof sequence files ---
def read_proof(path: PathLike, goal: Optional[Polyform] = None) -> ProofSequence:
    """
    game a=.. b=.. [c=..]
    goal <polyform file, relative to this file>
    situation
      component [xN]
        core: <cells>
        open: <cells>

    Situations are listed s0 first. `xN` repeats a component N times.
    """
    lines = _Lines(path)
    game = None
    situations: List[Situation] = []
    components: Optional[List[Component]] = None
    core: Optional[List[Cell]] = None
    nbhd: Optional[List[Cell]] = None
    repeat = 1
    component_line = 0

    def close_component():
        nonlocal core, nbhd
        if core is None:
            return
        if nbhd is None:
            nbhd = []
        comp = _guarded(lines, component_line, lambda: Component(frozenset(core), frozenset(nbhd)))
        components.extend([comp] * repeat)
        core, nbhd = None, None

    def close_situation(line_no: int):
        nonlocal components
        close_component()
        if components is None:
            return
        if not components:
            raise lines.error(line_no, "situation has no components")
        situations.append(Situation(tuple(components)))
        components = None

    while lines.peek() is not None:
        line_no, line = lines.next()
        key, rest = _keyword(line)
        if key == "game":
            values = dict((k.lower(), int(v)) for k, v in _KEY_VALUE.findall(rest))
            if "a" not in values or "b" not in values:
                raise lines.error(line_no, "game line needs a=.. and b=..")
            game = _guarded(lines, line_no, lambda: make_game(values["a"], values["b"], values.get("c")))
        elif key == "goal":
            if goal is None:
                goal_path = Path(path).parent / rest
                goal = read_polyform(goal_path)
        elif key == "situation":
            close_situation(line_no)
            components = []
        elif key == "component":
            if components is None:
                raise lines.error(line_no, "component outside a situation")
            close_component()
            repeat = 1
            if rest:
                match = re.fullmatch(r"[x×]\s*(\d+)", rest)
                if not match or int(match.group(1)) < 1:
                    raise lines.error(line_no, f"bad multiplicity '{rest}', expected xN")
                repeat = int(match.group(1))
            core, nbhd = [], None
            component_line = line_no
        elif key in ("core", "open"):
            if core is None:
                raise lines.error(line_no, f"'{key}:' outside a component")
            if goal is None:
                raise lines.error(line_no, "cells before the goal line")
            cells = _cells(lines, line_no, rest, goal.board, key)
            if key == "core":
                core.extend(cells)
            else:
                nbhd = (nbhd or []) + cells
        else:
            raise lines.error(line_no, f"unknown keyword '{key}'")
    close_situation(lines.last_line())

    if game is None:
        raise lines.error(lines.last_line(), "missing 'game' line")
    if goal is None:
        raise lines.error(lines.last_line(), "missing 'goal' line")
    if not situations:
        raise lines.error(lines.last_line(), "no situations")
    return ProofSequence(game, goal, tuple(situations), Path(path).stem)


# --- Paving files ---
def read_paving(path: PathLike) -> Paving:
    """`board ...`, optional `name ...`, `period (x,y) (x,y)`, then `pair <cell> <cell>` lines."""
    lines = _Lines(path)
    board = _board(lines)
    name = _name(lines, Path(path).stem)
    period = None
    pairs: List[Tuple[Cell, Cell]] = []
    while lines.peek() is not None:
        line_no, line = lines.next()
        key, rest = _keyword(line)
        if key == "period":
            vectors = [tuple(int(v) for v in _INTS.findall(m)) for m in re.findall(r"\([^)]*\)", rest)]
            if len(vectors) != 2 or any(len(v) != 2 for v in vectors):
                raise lines.error(line_no, "period needs two vectors (x,y) (x,y)")
            period = (vectors[0], vectors[1])
        elif key == "pair":
            cells = _cells(lines, line_no, rest, board, "pair")
            if len(cells) != 2:
                raise lines.error(line_no, f"pair needs exactly two cells, got {len(cells)}")
            pairs.append((cells[0], cells[1]))
        else:
            raise lines.error(line_no, f"unknown keyword '{key}'")
    if period is None:
        raise lines.error(lines.last_line(), "missing 'period' line")
    return _guarded(lines, lines.last_line(), lambda: make_paving(board, period, pairs, name))


# --- Strategy files ---
def _symmetry(lines: _Lines, line_no: int, rest: str, board: BoardKind) -> Symmetry:
    """`symmetry matrix a b c d [shift dx dy]`."""
    match = re.fullmatch(r"matrix\s+(.+?)(?:\s+shift\s+(.+))?", rest)
    if not match:
        raise lines.error(line_no, "expected 'symmetry matrix a b c d [shift dx dy]'")
    matrix = tuple(int(v) for v in _INTS.findall(match.group(1)))
    shift = tuple(int(v) for v in _INTS.findall(match.group(2) or "0 0"))
    if len(matrix) != 4 or len(shift) != 2:
        raise lines.error(line_no, "symmetry needs four matrix entries and two shift entries")
    if abs(matrix[0] * matrix[3] - matrix[1] * matrix[2]) != 1:
        raise lines.error(line_no, f"matrix {matrix} is not invertible over the integers")
    return Symmetry(matrix, shift, board)


def read_strategy(path: PathLike, overrides: Optional[Dict[str, int]] = None) -> PriorityStrategy:
    """
    board ...
    a=.. b=.. [per_set=..]
    rule
      parity even|odd|any|up|down
      require <offsets>
      respond <offsets> [; <offsets> ...]
    history
      even <offsets>
    symmetry matrix a b c d [shift dx dy]

    Rules are listed in priority order. `overrides` replaces a, b or per_set.
    """
    lines = _Lines(path)
    board = _board(lines)
    name = _name(lines, Path(path).stem)
    params: Dict[str, int] = {}
    params_line = 0
    rules: List[PriorityRule] = []
    generators: List[Tuple[ParityCondition, Tuple[Cell, ...]]] = []
    symmetries: List[Symmetry] = []
    block = None
    rule: Optional[Dict] = None

    def close_rule():
        nonlocal rule
        if rule is None:
            return
        if not rule["responses"]:
            raise lines.error(rule["line"], "rule without a 'respond' line")
        rules.append(PriorityRule(rule["parity"], tuple(rule["require"]), tuple(rule["responses"])))
        rule = None

    while lines.peek() is not None:
        line_no, line = lines.next()
        key, rest = _keyword(line)
        if _KEY_VALUE.match(line) and block is None:
            params.update((k.lower(), int(v)) for k, v in _KEY_VALUE.findall(line))
            params_line = line_no
        elif key == "rule":
            close_rule()
            block = "rule"
            rule = {"line": line_no, "parity": ParityCondition.ANY, "require": [], "responses": []}
        elif key == "history":
            close_rule()
            block = "history"
        elif key == "symmetry":
            close_rule()
            block = None
            symmetries.append(_symmetry(lines, line_no, rest, board))
        elif block == "rule" and key == "parity":
            rule["parity"] = _guarded(lines, line_no, lambda: ParityCondition.parse(rest))
        elif block == "rule" and key == "require":
            rule["require"].extend(_cells(lines, line_no, rest, board, "require"))
        elif block == "rule" and key == "respond":
            for part in rest.split(";"):
                offsets = _cells(lines, line_no, part, board, "respond")
                if not offsets:
                    raise lines.error(line_no, "empty candidate list")
                rule["responses"].append(tuple(offsets))
        elif block == "history":
            cond = _guarded(lines, line_no, lambda: ParityCondition.parse(key))
            generators.append((cond, tuple(_cells(lines, line_no, rest, board, "history"))))
        else:
            raise lines.error(line_no, f"unknown keyword '{key}'")
    close_rule()

    params.update(overrides or {})
    if "a" not in params or "b" not in params:
        raise lines.error(params_line or 1, "missing 'a=.. b=..' line")
    return _guarded(lines, params_line or lines.last_line(), lambda: make_strategy(
        board, params["a"], params["b"], rules, params.get("per_set"),
        HistorySpec(tuple(generators)), symmetries, name
    ))


def data_path(*parts: str) -> Path:
    """A file shipped under the package's data directory."""
    return DATA_DIR.joinpath(*parts)
