# proofseq.py

from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

from PolyAchieve.board import Cell, Symmetry, board_of, format_cell, format_cells, point_symmetries
from PolyAchieve.bounds import (
    GameSpec, Status, Verdict, maker_wins, reduced_game, unknown,
)
from PolyAchieve.polyform import Polyform, congruent
from PolyAchieve.verify_logger import get_logger

# A cell of one component of a situation: (component index, cell).
Slot = Tuple[int, Cell]


class Component(NamedTuple):
    """Maker-marked core cells and the neighborhood cells that must stay free of breaker marks."""
    core: FrozenSet[Cell]
    neighborhood: FrozenSet[Cell]


class Situation(NamedTuple):
    """Independent, far-apart components. A repeated component models multiplicity."""
    components: Tuple[Component, ...]

    @property
    def core_size(self) -> int:
        return sum(len(comp.core) for comp in self.components)


class ProofSequence(NamedTuple):
    game: GameSpec
    goal: Polyform
    situations: Tuple[Situation, ...]
    source: str = ""


class StepReport(NamedTuple):
    index: int
    passed: bool
    breaker_sets: int
    violation: Optional[Tuple[Slot, ...]] = None
    problem: str = ""

    def describe(self) -> str:
        if self.passed:
            return f"step {self.index}: ok ({self.breaker_sets} breaker sets)"
        if self.violation is not None:
            cells = ", ".join(f"{format_cell(c)}#{k}" for k, c in self.violation)
            return f"step {self.index}: breaker marks {{{cells}}} leave no maker answer"
        return f"step {self.index}: {self.problem}"


class Embedding(NamedTuple):
    avoid: FrozenSet[Cell]
    cost: int


def _embeddings(src: Component, dst: Component) -> List[Embedding]:
    """
    Congruent images of `src` inside `dst` (core and neighborhood within C u N).
    Each is summarized by the cells the breaker must not hold and the new maker marks needed.
    """
    region = dst.core | dst.neighborhood
    shape = sorted(src.core | src.neighborhood)
    if not shape:
        return [Embedding(frozenset(), 0)]
    found: Dict[FrozenSet[Cell], int] = {}
    for sym in point_symmetries(board_of(shape[0])):
        core_img = [sym.apply(c) for c in src.core]
        open_img = [sym.apply(c) for c in src.neighborhood]
        anchor = min(core_img + open_img)
        for target in region:
            if target.t != anchor.t:
                continue
            dx, dy = target.x - anchor.x, target.y - anchor.y
            core = {c.shifted(dx, dy) for c in core_img}
            nbhd = {c.shifted(dx, dy) for c in open_img}
            if not core <= region or not nbhd <= region:
                continue
            new_marks = core - dst.core
            avoid = frozenset(new_marks | (nbhd & dst.neighborhood))
            cost = len(new_marks)
            if avoid not in found or found[avoid] > cost:
                found[avoid] = cost
    return sorted((Embedding(a, c) for a, c in found.items()), key=lambda e: (e.cost, sorted(e.avoid)))


def _minimal_options(options: Iterable[Tuple[int, int]]) -> List[int]:
    """Drops avoid masks that contain another mask."""
    masks = sorted({mask for mask, _ in options}, key=lambda m: (bin(m).count("1"), m))
    kept: List[int] = []
    for mask in masks:
        if not any(k & mask == k for k in kept):
            kept.append(mask)
    return kept


def _step_options(target: Situation, earlier: Situation, budget: int, index: Dict[Slot, int]) -> List[int]:
    """
    Avoid masks of every way to realize `earlier` from `target` with at most `budget` new marks.

    Components of `earlier` go injectively into components of `target`, or are
    created far away from scratch at the cost of their core.
    """
    per_pair: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for q, src in enumerate(earlier.components):
        for k, dst in enumerate(target.components):
            per_pair[q, k] = [
                (sum(1 << index[(k, c)] for c in emb.avoid), emb.cost)
                for emb in _embeddings(src, dst) if emb.cost <= budget
            ]

    results: List[Tuple[int, int]] = []

    def assign(q: int, used: FrozenSet[int], mask: int, cost: int):
        if cost > budget:
            return
        if q == len(earlier.components):
            results.append((mask, cost))
            return
        src = earlier.components[q]
        # created far away
        assign(q + 1, used, mask, cost + len(src.core))
        for k in range(len(target.components)):
            if k in used:
                continue
            for emb_mask, emb_cost in per_pair[q, k]:
                assign(q + 1, used | {k}, mask | emb_mask, cost + emb_cost)

    assign(0, frozenset(), 0, 0)
    return _minimal_options(results)


def _validate(seq: ProofSequence) -> List[str]:
    problems = []
    for i, sit in enumerate(seq.situations):
        if not sit.components:
            problems.append(f"s{i} has no components")
        for k, comp in enumerate(sit.components):
            overlap = comp.core & comp.neighborhood
            if overlap:
                problems.append(f"s{i} component {k}: core and neighborhood share {format_cells(overlap)}")
    return problems


def _budget(seq: ProofSequence, j: int) -> int:
    return seq.game.final_marks if j == 0 else seq.game.a


def _answers(seq: ProofSequence, i: int) -> Tuple[List[Slot], List[int]]:
    """Neighborhood slots of s_i and the minimal avoid masks of the maker's answers."""
    target = seq.situations[i]
    slots: List[Slot] = sorted(
        (k, c) for k, comp in enumerate(target.components) for c in comp.neighborhood
    )
    index = {slot: n for n, slot in enumerate(slots)}

    options: List[int] = []
    for j in range(i):
        options.extend(_step_options(target, seq.situations[j], _budget(seq, j), index))
    return slots, _minimal_options((m, 0) for m in options)


def has_maker_answer(seq: ProofSequence, i: int, breaker: Iterable[Slot]) -> bool:
    """Can the maker descend from s_i after the breaker marks these neighborhood slots?"""
    if not 1 <= i < len(seq.situations):
        raise IndexError(f"Step {i} is outside 1..{len(seq.situations) - 1}")
    slots, options = _answers(seq, i)
    index = {slot: n for n, slot in enumerate(slots)}
    hit = 0
    for slot in breaker:
        if slot not in index:
            raise ValueError(f"❌ {format_cell(slot[1])} is not in the neighborhood of s{i} component {slot[0]}.")
        hit |= 1 << index[slot]
    return any(opt & hit == 0 for opt in options)


def verify_step(seq: ProofSequence, i: int) -> StepReport:
    """
    Checks that after any breaker reply inside the neighborhood of s_i the maker
    can descend to some earlier situation.

    Breaker sets of size min(b, |N|) suffice: a smaller set is contained in one
    of them and leaves the maker at least the same answers.
    """
    if not 1 <= i < len(seq.situations):
        raise IndexError(f"Step {i} is outside 1..{len(seq.situations) - 1}")
    problems = _validate(seq)
    if problems:
        return StepReport(i, False, 0, problem="; ".join(problems))

    slots, options = _answers(seq, i)
    get_logger().debug(f"  s{i}: {len(slots)} neighborhood cells, {len(options)} maker answers")

    size = min(seq.game.b, len(slots))
    checked = 0
    for chosen in combinations(range(len(slots)), size):
        checked += 1
        hit = 0
        for n in chosen:
            hit |= 1 << n
        if not any(opt & hit == 0 for opt in options):
            return StepReport(i, False, checked, tuple(slots[n] for n in chosen))
    return StepReport(i, True, checked)


def verify_sequence(seq: ProofSequence) -> Verdict:
    """MakerWins iff every step passes and the last situation fits in the first turn."""
    game = seq.game
    if not seq.situations:
        return unknown(game, "empty proof sequence")
    first = seq.situations[0]
    if len(first.components) != 1 or first.components[0].neighborhood:
        return unknown(game, "s0 must be one component with an empty neighborhood")
    try:
        core = Polyform(seq.goal.board, tuple(first.components[0].core))
    except ValueError as e:
        return unknown(game, f"s0 core is not a polyform: {e}")
    if not congruent(core, seq.goal):
        return unknown(game, f"s0 core is not congruent to the goal {seq.goal}")

    last = len(seq.situations) - 1
    opening = game.final_marks if last == 0 else game.a
    if seq.situations[last].core_size > opening:
        return unknown(
            game, f"s{last} has {seq.situations[last].core_size} core cells, more than {opening}"
        )

    reports = [verify_step(seq, i) for i in range(1, last + 1)]
    for report in reports:
        if not report.passed:
            return unknown(game, report.describe(), reports)
    return maker_wins(game, f"proof {seq.source}".strip(), f"{last} steps", reports)


def derived_game_claims(v: Verdict) -> List[Verdict]:
    """Plain games implied by a verified certificate, e.g. (1->2,1) gives (2,3)."""
    if v.status is not Status.MAKER_WINS:
        return []
    implied = reduced_game(v.game)
    if implied is None:
        return []
    if implied == v.game:
        return [v]
    return [maker_wins(implied, v.witness, f"reduced from {v.game}")]


def apply_to_sequence(seq: ProofSequence, sym: Symmetry) -> ProofSequence:
    """The same certificate moved by a board congruence."""
    moved = tuple(
        Situation(tuple(
            Component(frozenset(sym.apply(c) for c in comp.core),
                      frozenset(sym.apply(c) for c in comp.neighborhood))
            for comp in sit.components
        ))
        for sit in seq.situations
    )
    goal = Polyform(seq.goal.board, sym.apply_all(seq.goal.cells), seq.goal.name)
    return ProofSequence(seq.game, goal, moved, seq.source)
