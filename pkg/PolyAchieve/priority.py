# priority.py

from enum import Enum
from itertools import combinations
import os
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

from PolyAchieve.board import (
    UP, DOWN, BoardKind, Cell, Parity, Symmetry, format_cell, format_cells, parity, point_symmetries,
)
from PolyAchieve.bounds import (
    SearchLimitExceeded, Verdict, breaker_wins, make_game, unknown,
)
from PolyAchieve.polyform import Placement, Polyform, orientations
from PolyAchieve.verify_logger import get_logger

DEFAULT_MAX_POSITIONS = 10_000_000


def max_positions_from_env() -> int:
    return int(os.environ.get("POLYACHIEVE_MAX_POSITIONS", DEFAULT_MAX_POSITIONS))


class ParityCondition(Enum):
    EVEN = "even"
    ODD = "odd"
    ANY = "any"

    def matches(self, cell: Cell) -> bool:
        if self is ParityCondition.ANY:
            return True
        wanted = Parity.EVEN if self is ParityCondition.EVEN else Parity.ODD
        return parity(cell) is wanted

    @classmethod
    def parse(cls, text: str) -> "ParityCondition":
        aliases = {"up": "even", "down": "odd"}
        key = aliases.get(text.strip().lower(), text.strip().lower())
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"❌ Unknown parity '{text}'. Use even, odd, any, up or down.") from None


class PriorityRule(NamedTuple):
    """
    `require` offsets must be maker-marked for the rule to apply. `responses` holds one
    candidate list per response mark, or a single list shared by all of them.
    """
    parity: ParityCondition
    require: Tuple[Cell, ...]
    responses: Tuple[Tuple[Cell, ...], ...]

    def candidates(self, k: int) -> Optional[Tuple[Cell, ...]]:
        """Candidate offsets for the k-th response mark, None once the lists run out."""
        if len(self.responses) == 1:
            return self.responses[0]
        return self.responses[k] if k < len(self.responses) else None


class HistorySpec(NamedTuple):
    """Offsets of history cells generated around each goal cell, per parity."""
    generators: Tuple[Tuple[ParityCondition, Tuple[Cell, ...]], ...] = ()
    aux_level: int = 0


class PriorityStrategy(NamedTuple):
    board: BoardKind
    a: int
    b: int
    per_set: int
    rules: Tuple[PriorityRule, ...]
    history: HistorySpec = HistorySpec()
    symmetries: Tuple[Symmetry, ...] = ()
    name: str = ""


def make_strategy(
        board: BoardKind, a: int, b: int, rules: Sequence[PriorityRule], per_set: Optional[int] = None,
        history: HistorySpec = HistorySpec(), symmetries: Sequence[Symmetry] = (), name: str = ""
) -> PriorityStrategy:
    if per_set is None:
        per_set = b // a
    strat = PriorityStrategy(board, a, b, per_set, tuple(rules), history, tuple(symmetries), name)
    problems = validate_strategy(strat)
    if problems:
        raise ValueError(f"❌ Strategy '{name}' is malformed:\n - " + "\n - ".join(problems))
    return strat


def validate_strategy(strat: PriorityStrategy) -> List[str]:
    problems = []
    if strat.a < 1:
        problems.append(f"a={strat.a} must be at least 1")
    if strat.a * strat.per_set > strat.b:
        problems.append(f"a*per_set = {strat.a}*{strat.per_set} exceeds b={strat.b}")
    if not strat.rules:
        problems.append("no rules")
    for n, rule in enumerate(strat.rules, start=1):
        if not rule.responses or any(not lst for lst in rule.responses):
            problems.append(f"rule {n} has an empty candidate list")
        if len(rule.responses) > 1 and len(rule.responses) != strat.per_set:
            problems.append(
                f"rule {n} has {len(rule.responses)} per-mark lists but per_set={strat.per_set}"
            )
    for sym in strat.symmetries:
        if not strategy_fixed_by(strat, sym):
            problems.append(f"declared symmetry {sym.matrix} shift {sym.shift} does not fix the rules")
    return problems


class Position(NamedTuple):
    empty: FrozenSet[Cell]
    maker: FrozenSet[Cell]
    breaker: FrozenSet[Cell]


# --- Rule matching and response sets ---
def rules_for(strat: PriorityStrategy, cell: Cell) -> List[Tuple[int, PriorityRule]]:
    """Rules applicable to a mark on `cell`, in priority order, numbered from 1."""
    return [(n, r) for n, r in enumerate(strat.rules, start=1) if r.parity.matches(cell)]


def matching_rule(strat: PriorityStrategy, cell: Cell, maker: FrozenSet[Cell]) -> Optional[Tuple[int, PriorityRule]]:
    """The first applicable rule whose required cells are all maker-marked."""
    for n, rule in rules_for(strat, cell):
        if all(cell.offset(off) in maker for off in rule.require):
            return n, rule
    return None


class _ResponseSet:
    __slots__ = ("mark", "rule", "count", "open")

    def __init__(self, mark: Optional[Cell], rule: Optional[PriorityRule]):
        self.mark = mark
        self.rule = rule
        self.count = 0
        self.open = True


def _cycle(sets: List[_ResponseSet], taken: Set[Cell], b: int) -> List[Cell]:
    """
    Visits the response sets in order, one mark per visit, until `b` marks are spent.
    A set without a mark or rule absorbs its visit elsewhere on the board.
    """
    chosen: List[Cell] = []
    spent = 0
    while spent < b and any(s.open for s in sets):
        for s in sets:
            if spent >= b:
                break
            if not s.open:
                continue
            if s.rule is None:
                spent += 1
                continue
            offsets = s.rule.candidates(s.count)
            pick = None
            if offsets is not None:
                for off in offsets:
                    cell = s.mark.offset(off)
                    if cell not in taken:
                        pick = cell
                        break
            if pick is None:
                s.open = False
                continue
            taken.add(pick)
            chosen.append(pick)
            s.count += 1
            spent += 1
    return chosen


def breaker_response(
        pos: Position, maker_marks: Sequence[Cell], strat: PriorityStrategy, b: Optional[int] = None
) -> Tuple[Cell, ...]:
    """
    The breaker's reply to one maker turn.

    Marks are handled in lexicographic order; marks the maker spends elsewhere on the
    board (fewer than a in `maker_marks`) get response sets of their own.
    """
    b = strat.b if b is None else b
    maker = pos.maker | frozenset(maker_marks)
    sets = []
    for mark in sorted(maker_marks):
        match = matching_rule(strat, mark, maker)
        sets.append(_ResponseSet(mark, match[1] if match else None))
    for _ in range(strat.a - len(maker_marks)):
        sets.append(_ResponseSet(None, None))
    taken = set(maker | pos.breaker)
    return tuple(_cycle(sets, taken, b))


def _would_respond(rule: PriorityRule, mark: Cell, taken: FrozenSet[Cell], per_set: int) -> List[Cell]:
    """The marks `rule` alone would place for `mark`."""
    s = _ResponseSet(mark, rule)
    return _cycle([s], set(taken), per_set)


# --- History cells ---
def history_cells(goal: Placement, strat: PriorityStrategy, hist: HistorySpec) -> FrozenSet[Cell]:
    """Tracked cells outside the goal."""
    cells: Set[Cell] = set()
    for g in goal:
        for cond, offsets in hist.generators:
            if cond.matches(g):
                cells.update(g.offset(off) for off in offsets)
        if hist.aux_level >= 1:
            for _, rule in rules_for(strat, g):
                for lst in rule.responses:
                    cells.update(g.offset(off) for off in lst)
    return frozenset(cells - set(goal))


# --- Symmetry handling ---
def _parity_reps(board: BoardKind) -> List[Cell]:
    if board is BoardKind.SQUARE:
        return [Cell(0, 0), Cell(1, 0)]
    return [Cell(0, 0, UP), Cell(0, 0, DOWN)]


def _rule_table(strat: PriorityStrategy, cell: Cell, sym: Optional[Symmetry] = None):
    """Rules around `cell` in absolute cells, optionally moved by `sym`, relative to the image."""
    move = sym.apply if sym else (lambda c: c)
    origin = move(cell)

    def rel(off: Cell) -> Cell:
        target = move(cell.offset(off))
        return Cell(target.x - origin.x, target.y - origin.y, target.t)

    return tuple(
        (tuple(sorted(rel(o) for o in rule.require)),
         tuple(tuple(rel(o) for o in lst) for lst in rule.responses))
        for _, rule in rules_for(strat, cell)
    )


def _history_table(hist: HistorySpec, cell: Cell, sym: Optional[Symmetry] = None):
    move = sym.apply if sym else (lambda c: c)
    origin = move(cell)
    out = set()
    for cond, offsets in hist.generators:
        if cond.matches(cell):
            for off in offsets:
                target = move(cell.offset(off))
                out.add(Cell(target.x - origin.x, target.y - origin.y, target.t))
    return frozenset(out)


def strategy_fixed_by(strat: PriorityStrategy, sym: Symmetry) -> bool:
    """Does `sym` map the rule table and the history generators onto themselves?"""
    for cell in _parity_reps(strat.board):
        image = sym.apply(cell)
        if _rule_table(strat, cell, sym) != _rule_table(strat, image):
            return False
        if _history_table(strat.history, cell, sym) != _history_table(strat.history, image):
            return False
    return True


def _parity_dependent(strat: PriorityStrategy) -> bool:
    conditions = {r.parity for r in strat.rules} | {c for c, _ in strat.history.generators}
    return strat.board is BoardKind.SQUARE and conditions - {ParityCondition.ANY} != set()


def _placement_key(strat: PriorityStrategy, cells: Iterable[Cell]) -> Placement:
    """Translates a placement to a fixed spot without changing any cell's parity."""
    ordered = sorted(cells)
    low = ordered[0]
    dx, dy = -low.x, -low.y
    if _parity_dependent(strat) and (low.x + low.y) % 2:
        dx += 1
    return tuple(c.shifted(dx, dy) for c in ordered)


def goal_placements(goal: Polyform, strat: PriorityStrategy) -> List[Placement]:
    """
    Representative placements of the goal. Square strategies that read parity need two
    translation classes; declared symmetries reduce the list to orbit representatives.
    """
    anchors = [(0, 0)]
    if _parity_dependent(strat):
        anchors.append((1, 0))
    keys = sorted({
        _placement_key(strat, [c.shifted(dx, dy) for c in shape])
        for shape in orientations(goal) for dx, dy in anchors
    })
    if not strat.symmetries:
        return keys
    reps = []
    seen: Set[Placement] = set()
    for key in keys:
        if key in seen:
            continue
        reps.append(key)
        orbit = [key]
        seen.add(key)
        while orbit:
            current = orbit.pop()
            for sym in strat.symmetries:
                image = _placement_key(strat, sym.apply_all(current))
                if image not in seen:
                    seen.add(image)
                    orbit.append(image)
    return reps


# --- Turn logic shared by the verifier and the tracer ---
class RuleMatch(NamedTuple):
    cell: Cell
    rule: Optional[int]
    history: bool


class TurnOutcome(NamedTuple):
    position: Optional[Position]
    matches: Tuple[RuleMatch, ...]
    breaker_marks: Tuple[Cell, ...]
    ruined_at: Optional[Cell]


def play_turn(
        goal: FrozenSet[Cell], pos: Position, turn: Iterable[Cell], strat: PriorityStrategy, a: int
) -> TurnOutcome:
    """
    One maker turn `turn` and the breaker's rule-driven reply.

    Goal cells get their first matching rule and real response marks; the position
    is ruined when a response lands on an unmarked goal cell. History cells get no
    marks, but some rule of their parity must be consistent with the position.
    """
    turn = sorted(turn)
    maker = pos.maker | frozenset(turn)
    taken = maker | pos.breaker
    open_goal = goal - maker
    still_empty = pos.empty - maker
    matches = []
    sets = []
    for mark in turn:
        if mark in goal:
            match = matching_rule(strat, mark, maker)
            matches.append(RuleMatch(mark, match[0] if match else None, False))
            sets.append(_ResponseSet(mark, match[1] if match else None))
            continue
        consistent = None
        for n, rule in rules_for(strat, mark):
            if any(mark.offset(off) in still_empty for off in rule.require):
                continue
            if set(_would_respond(rule, mark, taken, strat.per_set)) & open_goal:
                continue
            consistent = n
            break
        matches.append(RuleMatch(mark, consistent, True))
        if consistent is None:
            return TurnOutcome(None, tuple(matches), (), mark)
        sets.append(_ResponseSet(None, None))
    for _ in range(a - len(turn)):
        sets.append(_ResponseSet(None, None))

    marks = tuple(_cycle(sets, set(taken), strat.b))
    hit = [m for m in marks if m in open_goal]
    if hit:
        return TurnOutcome(None, tuple(matches), marks, hit[0])
    breaker = pos.breaker | frozenset(marks)
    empty = pos.empty - maker - breaker
    return TurnOutcome(Position(empty, maker, breaker), tuple(matches), marks, None)


def canonical_position(goal: Placement, pos: Position, tracked: FrozenSet[Cell], board: BoardKind):
    """(goal, maker, breaker) on tracked cells, normalized under all congruences."""
    maker = [c for c in pos.maker if c in tracked]
    breaker = [c for c in pos.breaker if c in tracked]
    best = None
    for sym in point_symmetries(board):
        g = sym.apply_all(goal)
        low = g[0]
        dx, dy = -low.x, -low.y
        key = (
            tuple(c.shifted(dx, dy) for c in g),
            tuple(sorted(sym.apply(c).shifted(dx, dy) for c in maker)),
            tuple(sorted(sym.apply(c).shifted(dx, dy) for c in breaker)),
        )
        if best is None or key < best:
            best = key
    return best


def format_position(key) -> str:
    goal, maker, breaker = key
    return f"goal {format_cells(goal)} | maker {format_cells(maker)} | breaker {format_cells(breaker)}"


class SearchResult(NamedTuple):
    placements: int
    positions: int
    terminal_positions: Tuple
    failing_placement: Optional[Placement] = None
    failing_line: Tuple[Tuple[Cell, ...], ...] = ()


def _search_placement(
        goal: Placement, strat: PriorityStrategy, a: int, hist: HistorySpec, cap: int,
        terminals: Set, log: Optional[List] = None
) -> Tuple[int, Optional[Tuple[Tuple[Cell, ...], ...]]]:
    goal_set = frozenset(goal)
    tracked = goal_set | history_cells(goal, strat, hist)
    start = Position(tracked, frozenset(), frozenset())
    stack = [(start, ())]
    seen = {(start.maker, start.breaker)}
    explored = 0
    while stack:
        pos, line = stack.pop()
        explored += 1
        if explored > cap:
            raise SearchLimitExceeded("priority search positions", cap, explored)
        if len(goal_set - pos.maker) <= a:
            return explored, line
        children = 0
        empty = sorted(pos.empty)
        for size in range(1, a + 1):
            for turn in combinations(empty, size):
                outcome = play_turn(goal_set, pos, turn, strat, a)
                if outcome.position is None:
                    continue
                children += 1
                child = outcome.position
                key = (child.maker, child.breaker)
                if key in seen:
                    continue
                seen.add(key)
                stack.append((child, line + (turn,)))
        if children == 0:
            terminal = canonical_position(goal, pos, tracked, strat.board)
            terminals.add(terminal)
            if log is not None:
                log.append((goal, line, pos))
    return explored, None


def verify_breaker(
        goal: Polyform, strat: PriorityStrategy, a: Optional[int] = None,
        hist: Optional[HistorySpec] = None, max_positions: Optional[int] = None,
        search_log: Optional[List] = None
) -> Verdict:
    """
    Depth-first search over maker turns against the strategy, per goal placement.

    The maker marks 1..a tracked cells per turn. The strategy fails as soon as some
    line leaves at most a goal cells unmarked and none breaker-marked. BreakerWins
    is a proof; Unknown proves nothing.
    """
    a = strat.a if a is None else a
    hist = strat.history if hist is None else hist
    cap = max_positions_from_env() if max_positions is None else max_positions
    game = make_game(a, strat.b)
    logger = get_logger()

    placements = goal_placements(goal, strat)
    terminals: Set = set()
    total = 0
    for placement in placements:
        explored, failing = _search_placement(placement, strat, a, hist, cap, terminals, search_log)
        total += explored
        logger.debug(f"  placement {format_cells(placement)}: {explored} positions")
        if failing is not None:
            result = SearchResult(len(placements), total, tuple(sorted(terminals)), placement, failing)
            line = " | ".join(format_cells(t) for t in failing) or "(opening)"
            return unknown(
                game, f"maker survives on {format_cells(placement)} via {line}", result
            )
    result = SearchResult(len(placements), total, tuple(sorted(terminals)))
    return breaker_wins(
        game, f"priority {strat.name}".strip(),
        f"{len(placements)} placements, {total} positions, {len(terminals)} terminal positions",
        result
    )


# --- Tracing one maker line ---
class TraceStep(NamedTuple):
    turn: int
    marks: Tuple[Cell, ...]
    matches: Tuple[RuleMatch, ...]
    breaker_marks: Tuple[Cell, ...]
    position: Optional[Position]
    ruined_at: Optional[Cell] = None
    error: str = ""

    def describe(self) -> str:
        head = f"turn {self.turn}: maker {format_cells(self.marks)}"
        if self.error:
            return f"{head} -> illegal move: {self.error}"
        rules = ", ".join(
            f"{format_cell(m.cell)}:{'history ' if m.history else ''}rule {m.rule if m.rule else '-'}"
            for m in self.matches
        )
        text = f"{head} [{rules}] -> breaker {format_cells(self.breaker_marks)}"
        if self.ruined_at is not None:
            text += f" -> ruined at {format_cell(self.ruined_at)}"
        return text


class Trace(NamedTuple):
    start: Position
    steps: Tuple[TraceStep, ...]

    @property
    def final(self) -> Position:
        for step in reversed(self.steps):
            if step.position is not None:
                return step.position
        return self.start

    @property
    def ruined(self) -> bool:
        return bool(self.steps) and self.steps[-1].ruined_at is not None


def trace_sequence(
        goal: Polyform, strat: PriorityStrategy, a: Optional[int], hist: Optional[HistorySpec],
        moves: Sequence[Iterable[Cell]]
) -> Trace:
    """Replays one maker line on the goal's own cells and records every rule match."""
    a = strat.a if a is None else a
    hist = strat.history if hist is None else hist
    goal_set = frozenset(goal.cells)
    tracked = goal_set | history_cells(goal.cells, strat, hist)
    pos = Position(tracked, frozenset(), frozenset())
    start = pos
    steps: List[TraceStep] = []
    for turn_no, move in enumerate(moves, start=1):
        marks = tuple(sorted(move))
        illegal = [c for c in marks if c not in pos.empty]
        if illegal or not 1 <= len(marks) <= a:
            error = (f"{format_cells(illegal)} not empty tracked cells" if illegal
                     else f"{len(marks)} marks, expected 1..{a}")
            steps.append(TraceStep(turn_no, marks, (), (), None, None, error))
            break
        outcome = play_turn(goal_set, pos, marks, strat, a)
        steps.append(TraceStep(
            turn_no, marks, outcome.matches, outcome.breaker_marks, outcome.position,
            outcome.ruined_at
        ))
        if outcome.position is None:
            break
        pos = outcome.position
    return Trace(start, tuple(steps))
