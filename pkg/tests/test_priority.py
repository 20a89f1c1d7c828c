import sys

import pytest

from PolyAchieve.board import DOWN, UP, BoardKind, Cell
from PolyAchieve.bounds import GameSpec, SearchLimitExceeded, Status
from PolyAchieve.certificate_reader import data_path, read_strategy
from PolyAchieve.polyform import Polyform
from PolyAchieve.priority import (
    HistorySpec, ParityCondition, Position, PriorityRule, breaker_response, format_position,
    goal_placements, history_cells, make_strategy, trace_sequence, verify_breaker,
)

EMPTY = Position(frozenset(), frozenset(), frozenset())


def _strategy(stem: str, **overrides):
    return read_strategy(data_path("strategies", stem + ".txt"), overrides or None)


# --- Response simulation ---
def test_single_mark_takes_its_first_free_candidate():
    strat = _strategy("tri_2_2_example")
    assert strat.per_set == 1
    # the unused second mark absorbs the other breaker mark
    assert breaker_response(EMPTY, [Cell(0, 0, UP)], strat) == (Cell(-1, 0, DOWN),)


def test_two_marks_get_one_response_each():
    strat = _strategy("tri_2_2_example")
    reply = breaker_response(EMPTY, [Cell(5, 5, UP), Cell(0, 0, UP)], strat)
    assert reply == (Cell(-1, 0, DOWN), Cell(4, 5, DOWN))


def test_taken_candidates_are_skipped():
    strat = _strategy("tri_2_2_example")
    pos = Position(frozenset(), frozenset(), frozenset({Cell(-1, 0, DOWN)}))
    assert breaker_response(pos, [Cell(0, 0, UP)], strat) == (Cell(0, -1, DOWN),)
    full = Position(frozenset(), frozenset(), frozenset({
        Cell(-1, 0, DOWN), Cell(0, -1, DOWN), Cell(0, 0, DOWN)
    }))
    assert breaker_response(full, [Cell(0, 0, UP)], strat) == ()


def test_shared_list_gives_a_fresh_mark_two_responses():
    strat = _strategy("T4_1_2_4")
    assert breaker_response(EMPTY, [Cell(0, 0, UP)], strat) == (Cell(-1, 0, DOWN), Cell(0, 0, DOWN))


def test_example_game_play_three_turns():
    strat = _strategy("tri_2_2_example")
    turns = [
        ([Cell(1, 0, UP), Cell(1, 1, UP)], (Cell(0, 0, DOWN), Cell(0, 1, DOWN))),
        ([Cell(1, -1, DOWN), Cell(1, -1, UP)], (Cell(2, -1, UP), Cell(0, -1, DOWN))),
        # (0,1,U) has no free candidate left, so (-1,1,D) gets its priority 2 and 3 cells
        ([Cell(-1, 1, DOWN), Cell(0, 1, UP)], (Cell(-1, 1, UP), Cell(-1, 2, UP))),
    ]
    pos = EMPTY
    for marks, expected in turns:
        reply = breaker_response(pos, marks, strat)
        assert reply == expected
        pos = Position(pos.empty, pos.maker | frozenset(marks), pos.breaker | frozenset(reply))


def test_per_mark_candidate_lists():
    strat = _strategy("P4_1_2_4")
    assert breaker_response(EMPTY, [Cell(0, 0)], strat) == (Cell(0, 1), Cell(-1, 0))


def test_rules_with_requirements_take_priority():
    strat = _strategy("P4_5_history")
    maker = frozenset({Cell(-1, 0)})
    pos = Position(frozenset(), maker, frozenset())
    # even cell with its left neighbour held: the second rule applies
    assert breaker_response(pos, [Cell(0, 0)], strat)[0] == Cell(1, 1)
    # no neighbours held: the catch-all even rule applies
    assert breaker_response(EMPTY, [Cell(0, 0)], strat)[0] == Cell(-1, 0)


# --- Strategy construction ---
def test_malformed_strategies_are_rejected():
    rule = PriorityRule(ParityCondition.ANY, (), ((Cell(0, 1),),))
    with pytest.raises(ValueError, match="exceeds"):
        make_strategy(BoardKind.SQUARE, 2, 3, [rule], per_set=2)
    with pytest.raises(ValueError, match="no rules"):
        make_strategy(BoardKind.SQUARE, 1, 1, [])
    two_lists = PriorityRule(ParityCondition.ANY, (), ((Cell(0, 1),), (Cell(1, 0),)))
    with pytest.raises(ValueError, match="per-mark lists"):
        make_strategy(BoardKind.SQUARE, 2, 6, [two_lists], per_set=3)


def test_parity_aliases():
    assert ParityCondition.parse("up") is ParityCondition.EVEN
    assert ParityCondition.parse(" Down ") is ParityCondition.ODD
    with pytest.raises(ValueError, match="Unknown parity"):
        ParityCondition.parse("sideways")


def test_overrides_replace_file_parameters():
    strat = _strategy("P4_4_parity", a=3, b=6, per_set=2)
    assert (strat.a, strat.b, strat.per_set) == (3, 6, 2)
    assert _strategy("P4_4_parity").per_set == 2


def test_parity_strategies_need_two_translation_classes(animal):
    assert len(goal_placements(animal("P4,4"), _strategy("P4_4_parity"))) == 2
    assert len(goal_placements(animal("P4,2"), _strategy("P4_2_2_6"))) == 8


def test_history_cells(animal):
    goal = animal("P4,5").cells
    strat = _strategy("P4_5_history")
    cells = history_cells(goal, strat, strat.history)
    assert not cells & set(goal)
    assert cells
    assert history_cells(goal, strat, HistorySpec()) == frozenset()
    assert history_cells(goal, strat, HistorySpec(aux_level=1))


# --- Verification ---
@pytest.mark.parametrize("stem, name, game, overrides", [
    ("T4_1_2_4", "T4,1", GameSpec(2, 4), {}),
    ("T4_2_2_4", "T4,2", GameSpec(2, 4), {}),
    ("T4_3_2_4", "T4,3", GameSpec(2, 4), {}),
    ("P4_1_2_4", "P4,1", GameSpec(2, 4), {}),
    ("P4_2_2_6", "P4,2", GameSpec(2, 6), {}),
    ("P4_3_2_4", "P4,3", GameSpec(2, 4), {}),
    ("P4_4_parity", "P4,4", GameSpec(2, 4), {}),
    ("P4_4_parity", "P4,4", GameSpec(3, 6), {"a": 3, "b": 6, "per_set": 2}),
    ("P4_5_history", "P4,5", GameSpec(2, 4), {}),
])
def test_strategies_defeat_their_goals(animal, stem, name, game, overrides):
    v = verify_breaker(animal(name), _strategy(stem, **overrides))
    assert v.status is Status.BREAKER_WINS, v.detail
    assert v.game == game
    assert v.evidence.placements >= 1


def test_history_strategy_has_two_terminal_positions(animal):
    v = verify_breaker(animal("P4,5"), _strategy("P4_5_history"))
    assert v.status is Status.BREAKER_WINS
    terminals = v.evidence.terminal_positions
    assert len(terminals) == 2
    for key in terminals:
        assert format_position(key).startswith("goal ")


def test_weaker_breaker_fails(animal):
    # one response per mark leaves two goal cells open after one turn
    v = verify_breaker(animal("P4,4"), _strategy("P4_4_parity", b=2, per_set=1))
    assert v.status is Status.UNKNOWN
    assert v.evidence.failing_placement is not None
    assert "maker survives" in v.detail


def test_search_limit(animal):
    with pytest.raises(SearchLimitExceeded):
        verify_breaker(animal("P4,4"), _strategy("P4_4_parity", b=2, per_set=1), max_positions=1)


# --- Tracing ---
def test_logged_terminal_lines_replay(animal):
    strat = _strategy("P4_5_history")
    log = []
    verify_breaker(animal("P4,5"), strat, search_log=log)
    assert log
    for goal, line, pos in log:
        trace = trace_sequence(Polyform(strat.board, goal), strat, None, None, line)
        assert trace.final == pos
        assert not trace.ruined


def test_empty_trace_leaves_the_start_position(animal):
    trace = trace_sequence(animal("P4,4"), _strategy("P4_4_parity"), None, None, [])
    assert trace.steps == ()
    assert trace.final == trace.start
    assert not trace.ruined


def test_trace_records_rules_and_ruin(animal):
    trace = trace_sequence(animal("P4,4"), _strategy("P4_4_parity"), None, None, [[Cell(1, 1)]])
    step = trace.steps[0]
    assert step.matches[0].rule == 1
    assert step.breaker_marks == (Cell(0, 1), Cell(2, 1))
    assert step.ruined_at == Cell(2, 1)
    assert trace.ruined
    assert "ruined at (2,1)" in step.describe()


def test_history_opening_is_ruined_on_the_third_turn(animal):
    strat = _strategy("P4_5_history")
    moves = [[Cell(0, 1)], [Cell(3, 2)], [Cell(1, 1), Cell(2, 2)]]
    trace = trace_sequence(animal("P4,5"), strat, None, None, moves)
    assert len(trace.steps) == 3
    assert trace.ruined
    first, second, third = trace.steps
    # history cells draw no breaker marks, only a rule consistent with the position
    assert [(m.rule, m.history) for m in first.matches] == [(7, True)]
    assert [(m.rule, m.history) for m in second.matches] == [(7, True)]
    assert first.breaker_marks == second.breaker_marks == ()
    assert [(m.cell, m.rule) for m in third.matches] == [(Cell(1, 1), 2), (Cell(2, 2), 3)]
    assert third.breaker_marks == (Cell(2, 0), Cell(1, 3), Cell(2, 1), Cell(1, 2))
    assert third.ruined_at == Cell(1, 2)
    assert trace.final.maker == frozenset({Cell(0, 1), Cell(3, 2)})


@pytest.mark.parametrize("overrides", [{}, {"a": 3, "b": 6, "per_set": 2}])
def test_extra_history_cells_keep_the_parity_strategy_winning(animal, overrides):
    strat = _strategy("P4_4_parity", **overrides)
    plain = verify_breaker(animal("P4,4"), strat)
    wider = verify_breaker(animal("P4,4"), strat, hist=HistorySpec(aux_level=1))
    assert plain.status is Status.BREAKER_WINS
    assert wider.status is Status.BREAKER_WINS
    assert wider.evidence.positions >= plain.evidence.positions


def test_trace_stops_at_an_illegal_move(animal):
    trace = trace_sequence(
        animal("P4,4"), _strategy("P4_4_parity"), None, None, [[Cell(9, 9)], [Cell(1, 1)]]
    )
    assert len(trace.steps) == 1
    assert "illegal move" in trace.steps[0].describe()
    assert trace.final == trace.start

    too_many = trace_sequence(
        animal("P4,4"), _strategy("P4_4_parity"), None, None, [[Cell(1, 1), Cell(1, 2), Cell(2, 1)]]
    )
    assert "expected 1..2" in too_many.steps[0].error


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
