# bounds.py

from enum import Enum
import re
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import networkx as nx

from PolyAchieve.board import UP, DOWN, BoardKind, Cell, format_cell
from PolyAchieve.polyform import Placement, Polyform, placements_meeting

INFINITY = "∞"


class Status(Enum):
    MAKER_WINS = "MakerWins"
    BREAKER_WINS = "BreakerWins"
    UNKNOWN = "Unknown"
    ABORTED = "Aborted"


class SearchLimitExceeded(RuntimeError):
    """Raised when an exhaustive search exceeds its configured resource cap."""

    def __init__(self, what: str, cap: int, reached: int):
        super().__init__(f"{what} exceeded the cap of {cap:,} (reached {reached:,})")
        self.cap = cap
        self.reached = reached


class GameSpec(NamedTuple):
    """An (a,b) game, or an (a->c,b) game when `c` is set."""
    a: int
    b: int
    c: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "GameSpec":
        """Parses 'a,b' or 'a->c,b'."""
        match = re.fullmatch(r"\s*\(?\s*(\d+)\s*(?:->\s*(\d+)\s*)?,\s*(\d+)\s*\)?\s*", str(text))
        if not match:
            raise ValueError(f"❌ Invalid game '{text}'. Use 'a,b' or 'a->c,b'.")
        a, c, b = match.group(1), match.group(2), match.group(3)
        return make_game(int(a), int(b), int(c) if c else None)

    @property
    def final_marks(self) -> int:
        return self.c if self.c is not None else self.a

    @property
    def plain(self) -> bool:
        return self.c is None or self.c == self.a

    def __str__(self) -> str:
        if self.c is None:
            return f"({self.a},{self.b})"
        return f"({self.a}->{self.c},{self.b})"


def make_game(a: int, b: int, c: Optional[int] = None) -> GameSpec:
    if a < 1 or b < 0:
        raise ValueError(f"❌ Invalid game: a must be >= 1 and b >= 0 (got a={a}, b={b}).")
    if c is not None and c < a:
        raise ValueError(f"❌ Invalid game: c must be >= a (got a={a}, c={c}).")
    return GameSpec(a, b, c)


class Verdict(NamedTuple):
    """The outcome of one check. Maker and breaker wins always name their witness."""
    status: Status
    game: GameSpec
    witness: str = ""
    detail: str = ""
    evidence: Any = None

    def __str__(self) -> str:
        text = f"{self.status.value} {self.game}"
        if self.witness:
            text += f" [{self.witness}]"
        if self.detail:
            text += f": {self.detail}"
        return text


def maker_wins(game: GameSpec, witness: str, detail: str = "", evidence: Any = None) -> Verdict:
    if not witness:
        raise ValueError("❌ A MakerWins verdict needs a witness.")
    return Verdict(Status.MAKER_WINS, game, witness, detail, evidence)


def breaker_wins(game: GameSpec, witness: str, detail: str = "", evidence: Any = None) -> Verdict:
    if not witness:
        raise ValueError("❌ A BreakerWins verdict needs a witness.")
    return Verdict(Status.BREAKER_WINS, game, witness, detail, evidence)


def unknown(game: GameSpec, detail: str = "", evidence: Any = None) -> Verdict:
    return Verdict(Status.UNKNOWN, game, "", detail, evidence)


def aborted(game: GameSpec, detail: str) -> Verdict:
    return Verdict(Status.ABORTED, game, "", detail)


# --- Closed-form rules ---
def surround_loser(a: int, b: int, goal: Polyform) -> Verdict:
    """The breaker surrounds every maker mark when a < |A| and a*delta <= b."""
    game = make_game(a, b)
    delta = goal.board.delta
    if a < goal.size and a * delta <= b:
        return breaker_wins(game, "surround", f"{a}*{delta} <= {b}")
    return unknown(game, f"surround needs a < {goal.size} and {a}*{delta} <= {b}")


def small_bias_winner(a: int, b: int) -> Verdict:
    """Any goal is won when the breaker marks fewer cells per turn than the maker."""
    game = make_game(a, b)
    if b < a:
        return maker_wins(game, "small_bias", f"{b} < {a}")
    return unknown(game, "small_bias needs b < a")


class TwoStepFamily(NamedTuple):
    center: Cell
    placements: Tuple[Placement, ...]

    @property
    def k(self) -> int:
        return len(self.placements)


def largest_twostep_family(goal: Polyform) -> TwoStepFamily:
    """
    The largest set of placements pairwise meeting in exactly one common cell.

    Every family can be translated so the common cell is at the origin, so only
    the origin cells of each orientation are tried.
    """
    centers = [Cell(0, 0)] if goal.board is BoardKind.SQUARE else [Cell(0, 0, DOWN), Cell(0, 0, UP)]
    best = TwoStepFamily(centers[0], ())
    for center in centers:
        through = placements_meeting(goal, [center])
        graph = nx.Graph()
        graph.add_nodes_from(range(len(through)))
        for i in range(len(through)):
            for j in range(i + 1, len(through)):
                if set(through[i]) & set(through[j]) == {center}:
                    graph.add_edge(i, j)
        for clique in nx.find_cliques(graph):
            family = tuple(sorted(through[i] for i in clique))
            if len(family) > best.k or (len(family) == best.k and family < best.placements):
                best = TwoStepFamily(center, family)
    return best


def twostep_winner(a: int, b: int, goal: Polyform) -> Verdict:
    """With |A| = a+1 the maker takes the common cell, then completes one of k placements."""
    game = make_game(a, b)
    if goal.size != a + 1:
        return unknown(game, f"twostep needs |A| = a+1 = {a + 1}")
    family = largest_twostep_family(goal)
    if a * family.k > b:
        return maker_wins(
            game, "twostep", f"k={family.k} at {format_cell(family.center)}", family
        )
    return unknown(game, f"twostep family has k={family.k}, {a}*{family.k} <= {b}")


# --- Composition and implications ---
class Composition(NamedTuple):
    game: GameSpec
    parts: Tuple[Tuple[int, int, int], ...]
    turn_bound: int


def compose_winner(parts: Sequence[Tuple[int, int, int]]) -> Composition:
    """
    Combines bounded (a_i -> a, b_i) wins in l_i turns into an (a, sum b_i + s - 1) win.

    The turn bound comes from the stage diagram of the parts.
    """
    from PolyAchieve.stages import build_diagram, total_turn_bound

    if not parts:
        raise ValueError("❌ compose_winner needs at least one part.")
    for a_i, b_i, l_i in parts:
        if a_i <= 0:
            raise ValueError(f"❌ Part ({a_i},{b_i},{l_i}) must have a_i >= 1.")
    s = len(parts)
    a = sum(p[0] for p in parts)
    b_list = [p[1] for p in parts]
    diagram = build_diagram(s, b_list, [p[2] for p in parts])
    return Composition(
        make_game(a, sum(b_list) + s - 1), tuple(tuple(p) for p in parts),
        total_turn_bound(diagram)
    )


def reduced_game(game: GameSpec) -> Optional[GameSpec]:
    """
    The plain game implied by winning `game`.

    (a->a,b) is the (a,b) game; a (1->c,b) win composes c times into (c, c*b + c - 1).
    Other arrow games imply nothing here.
    """
    if game.plain:
        return make_game(game.a, game.b)
    if game.a == 1:
        c = game.c
        return make_game(c, c * game.b + c - 1)
    return None


def implies(v: Verdict, game: GameSpec) -> bool:
    """Does `v` settle `game` by monotonicity in a and b?"""
    if not v.game.plain or not game.plain:
        return v.game == game and v.status in (Status.MAKER_WINS, Status.BREAKER_WINS)
    if v.status is Status.MAKER_WINS:
        return game.a >= v.game.a and game.b <= v.game.b
    if v.status is Status.BREAKER_WINS:
        return game.a <= v.game.a and game.b >= v.game.b
    return False


def monotone_implications(v: Verdict, max_a: int, max_b: int) -> Set[Verdict]:
    """The verdicts implied by `v` inside the box a <= max_a, b <= max_b."""
    implied: Set[Verdict] = set()
    if v.status not in (Status.MAKER_WINS, Status.BREAKER_WINS) or not v.game.plain:
        return implied
    for a in range(1, max_a + 1):
        for b in range(0, max_b + 1):
            game = GameSpec(a, b)
            if implies(v, game):
                implied.add(Verdict(v.status, game, v.witness, f"implied by {v.game}"))
    return implied


# --- Threshold sequences ---
class ThresholdSequence(NamedTuple):
    """tau(A): finite, strictly increasing entries b_1..b_{k-1} followed by infinity from n = k."""
    finite: Tuple[int, ...]

    @classmethod
    def parse(cls, values: Iterable[Any]) -> "ThresholdSequence":
        items = list(values)
        if not items or str(items[-1]).strip().lower() not in ("inf", "∞", "infinity"):
            raise ValueError(f"❌ Threshold sequence {items} must end with 'inf'.")
        finite = []
        for item in items[:-1]:
            if str(item).strip().lower() in ("inf", "∞", "infinity"):
                raise ValueError(f"❌ Threshold sequence {items} has 'inf' before its last entry.")
            finite.append(int(item))
        return cls(tuple(finite))

    @property
    def first_infinite(self) -> int:
        return len(self.finite) + 1

    def value(self, n: int) -> Optional[int]:
        """b_n, or None for infinity."""
        return self.finite[n - 1] if n <= len(self.finite) else None

    def __str__(self) -> str:
        return "(" + ",".join([str(b) for b in self.finite] + [INFINITY]) + ")"


class ThresholdReport(NamedTuple):
    name: str
    sequence: ThresholdSequence
    failures: List[str]
    notes: List[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def _at_least(x: Optional[int], y: Optional[int]) -> bool:
    if x is None:
        return True
    return y is not None and x >= y


def check_threshold(
        name: str, t: ThresholdSequence, evidence: Iterable[Verdict], goal_size: Optional[int] = None,
        superforms: Sequence[Tuple[str, ThresholdSequence]] = ()
) -> ThresholdReport:
    """
    Confirms each finite b_n with a maker win at (n, b_n) and a breaker win at (n, b_n + 1),
    and flags structural violations of the sequence.

    `superforms` lists the sequences of animals containing this one; each must be
    dominated entrywise.
    """
    evidence = [v for v in evidence if v.status in (Status.MAKER_WINS, Status.BREAKER_WINS)]
    failures: List[str] = []
    notes: List[str] = []

    for i, b_i in enumerate(t.finite, start=1):
        maker = [v for v in evidence if v.status is Status.MAKER_WINS and implies(v, GameSpec(i, b_i))]
        breaker = [v for v in evidence if v.status is Status.BREAKER_WINS and implies(v, GameSpec(i, b_i + 1))]
        if not maker:
            failures.append(f"{name}: no MakerWins witness for ({i},{b_i})")
        if not breaker:
            failures.append(f"{name}: no BreakerWins witness for ({i},{b_i + 1})")
        if b_i < i - 1:
            failures.append(f"{name}: b_{i} = {b_i} is below {i - 1}")
        if i > 1 and b_i <= t.finite[i - 2]:
            failures.append(f"{name}: entries {t.finite[i - 2]}, {b_i} do not strictly increase")
        if (b_i + 1) % i != 0:
            notes.append(f"{name}: {i} does not divide b_{i} + 1 = {b_i + 1}")

    if goal_size is not None and t.first_infinite != goal_size:
        failures.append(
            f"{name}: first infinite entry at n={t.first_infinite}, expected n={goal_size}"
        )

    for other_name, other in superforms:
        horizon = max(len(t.finite), len(other.finite)) + 1
        for i in range(1, horizon + 1):
            if not _at_least(t.value(i), other.value(i)):
                failures.append(
                    f"{name}: tau({i}) = {t.value(i)} is below tau({other_name})({i}) = "
                    f"{other.value(i)} although {name} is a subform of {other_name}"
                )
    return ThresholdReport(name, t, failures, notes)


def contradictions(verdicts: Iterable[Verdict], max_a: int, max_b: int) -> List[Tuple[GameSpec, Verdict, Verdict]]:
    """Games inside the box settled both ways once verdicts are closed under implication."""
    maker: Dict[GameSpec, Verdict] = {}
    breaker: Dict[GameSpec, Verdict] = {}
    for v in verdicts:
        table = maker if v.status is Status.MAKER_WINS else breaker if v.status is Status.BREAKER_WINS else None
        if table is None:
            continue
        for implied in sorted(monotone_implications(v, max_a, max_b), key=lambda x: x.game):
            table.setdefault(implied.game, v)
    return [(g, maker[g], breaker[g]) for g in sorted(maker) if g in breaker]
