import random
import sys

import pytest

from PolyAchieve.board import DOWN, UP, BoardKind, Cell, point_symmetries
from PolyAchieve.bounds import GameSpec, Status, breaker_wins, maker_wins, make_game
from PolyAchieve.certificate_reader import data_path, read_proof
from PolyAchieve.proofseq import (
    Component, ProofSequence, Situation, apply_to_sequence, derived_game_claims, has_maker_answer,
    verify_sequence, verify_step,
)

CERTIFICATES = [
    ("T3_1_1_1", GameSpec(1, 1)),
    ("T3_1_2_5", GameSpec(2, 5)),
    ("T4_1_2_3", GameSpec(2, 3)),
    ("T4_2_2_3", GameSpec(2, 3)),
    ("P4_2_2_5", GameSpec(2, 5)),
    ("P4_4_1to2_1", GameSpec(1, 1, 2)),
    ("P4_4_1to3_1", GameSpec(1, 1, 3)),
]


def _proof(stem: str) -> ProofSequence:
    return read_proof(data_path("proofs", stem + ".txt"))


def _replace_situation(seq: ProofSequence, i: int, components) -> ProofSequence:
    situations = list(seq.situations)
    situations[i] = Situation(tuple(components))
    return seq._replace(situations=tuple(situations))


@pytest.mark.parametrize("stem, game", CERTIFICATES)
def test_shipped_certificates_verify(stem, game):
    seq = _proof(stem)
    assert seq.game == game
    v = verify_sequence(seq)
    assert v.status is Status.MAKER_WINS, v
    assert v.game == game
    assert v.witness == f"proof {stem}"
    assert all(step.passed for step in v.evidence)


@pytest.mark.parametrize("stem, game", CERTIFICATES)
def test_one_more_breaker_mark_breaks_every_certificate(stem, game):
    # every certificate sits exactly at the threshold, so (a,b+1) is a breaker win
    seq = _proof(stem)
    mutated = seq._replace(game=make_game(game.a, game.b + 1, game.c))
    assert verify_sequence(mutated).status is Status.UNKNOWN


@pytest.mark.parametrize("stem, game", CERTIFICATES)
def test_dropping_a_goal_cell_breaks_every_certificate(stem, game):
    seq = _proof(stem)
    first = seq.situations[0].components[0]
    smaller = Component(frozenset(sorted(first.core)[1:]), first.neighborhood)
    v = verify_sequence(_replace_situation(seq, 0, [smaller]))
    assert v.status is Status.UNKNOWN
    assert "s0" in v.detail


@pytest.mark.parametrize("stem, game", CERTIFICATES)
def test_deleting_an_open_cell_of_the_critical_breaker_set(stem, game):
    seq = _proof(stem)
    stronger = verify_sequence(seq._replace(game=make_game(game.a, game.b + 1, game.c)))
    failed = next(r for r in stronger.evidence if not r.passed)
    k, cell = failed.violation[0]
    components = list(seq.situations[failed.index].components)
    components[k] = Component(components[k].core, components[k].neighborhood - {cell})
    mutated = _replace_situation(seq, failed.index, components)
    assert not verify_step(mutated, failed.index).passed
    assert verify_sequence(mutated).status is Status.UNKNOWN


@pytest.mark.parametrize("stem, game", CERTIFICATES)
def test_subsets_of_breaker_sets_leave_an_answer(stem, game):
    seq = _proof(stem)
    rng = random.Random(stem)
    for i in range(1, len(seq.situations)):
        slots = sorted(
            (k, c) for k, comp in enumerate(seq.situations[i].components) for c in comp.neighborhood
        )
        size = min(game.b, len(slots))
        for _ in range(5):
            full = rng.sample(slots, size)
            assert has_maker_answer(seq, i, full)
            for r in range(size):
                assert has_maker_answer(seq, i, rng.sample(full, r))


def test_answers_need_neighborhood_cells():
    seq = _proof("T3_1_1_1")
    assert has_maker_answer(seq, 2, [])
    with pytest.raises(ValueError, match="not in the neighborhood"):
        has_maker_answer(seq, 1, [(0, Cell(5, 5, UP))])
    with pytest.raises(IndexError):
        has_maker_answer(seq, 0, [])


def test_removing_an_open_cell_breaks_the_step():
    seq = _proof("T3_1_1_1")
    comp = seq.situations[1].components[0]
    mutated = _replace_situation(seq, 1, [
        Component(comp.core, comp.neighborhood - {Cell(0, 0, DOWN)})
    ])
    report = verify_step(mutated, 1)
    assert not report.passed
    assert report.violation == ((0, Cell(2, 0, UP)),)
    assert verify_sequence(mutated).status is Status.UNKNOWN


def test_extra_core_cell_in_the_last_situation():
    seq = _proof("T3_1_1_1")
    last = seq.situations[-1].components[0]
    grown = Component(last.core | {Cell(1, 0, DOWN)}, last.neighborhood - {Cell(1, 0, DOWN)})
    v = verify_sequence(_replace_situation(seq, len(seq.situations) - 1, [grown]))
    assert v.status is Status.UNKNOWN
    assert "core cells" in v.detail


def test_core_and_neighborhood_must_be_disjoint():
    seq = _proof("T3_1_1_1")
    comp = seq.situations[1].components[0]
    mutated = _replace_situation(seq, 1, [
        Component(comp.core, comp.neighborhood | {Cell(1, 0, UP)})
    ])
    report = verify_step(mutated, 1)
    assert not report.passed
    assert "share" in report.problem


def test_step_index_is_checked():
    seq = _proof("T3_1_1_1")
    with pytest.raises(IndexError):
        verify_step(seq, 0)
    with pytest.raises(IndexError):
        verify_step(seq, len(seq.situations))


def test_single_situation_certificate():
    seq = _proof("T3_1_1_1")
    only_goal = seq._replace(situations=seq.situations[:1])
    assert verify_sequence(only_goal).status is Status.UNKNOWN
    assert verify_sequence(only_goal._replace(game=make_game(3, 9))).status is Status.MAKER_WINS


def test_certificates_survive_board_congruences():
    seq = _proof("T3_1_1_1")
    for sym in point_symmetries(BoardKind.TRIANGULAR):
        moved = apply_to_sequence(seq, sym.then_translate(2, -1))
        assert verify_sequence(moved).status is Status.MAKER_WINS


def test_derived_game_claims():
    v = maker_wins(GameSpec(1, 1, 2), "proof P4_4_1to2_1")
    derived = derived_game_claims(v)
    assert [d.game for d in derived] == [GameSpec(2, 3)]
    assert derived[0].witness == v.witness
    assert [d.game for d in derived_game_claims(maker_wins(GameSpec(1, 1, 3), "p"))] == [GameSpec(3, 5)]
    assert derived_game_claims(maker_wins(GameSpec(2, 3), "p")) == [maker_wins(GameSpec(2, 3), "p")]
    assert derived_game_claims(breaker_wins(GameSpec(1, 1, 2), "p")) == []


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
