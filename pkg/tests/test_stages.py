from functools import lru_cache
from itertools import product
import random
import sys

import pytest

from PolyAchieve.stages import (
    PRE_WINNING, REGULAR, WINNING, build_diagram, classify, combine, diagram_rows,
    format_table, generate_mermaid_diagram, stage_feasibility, total_turn_bound,
)


def _oracle(b, l):
    """Independent recursive evaluator of the supply recurrences and the path bound."""
    s = len(b)
    total = sum(b) + s

    @lru_cache(maxsize=None)
    def vertex(p):
        for i in range(s):
            if p[i] == l[i]:
                return 0, tuple(int(k == i) for k in range(s)), 0
        for i in range(s):
            if p[i] == l[i] - 1:
                child = tuple(v + (k == i) for k, v in enumerate(p))
                return 1, tuple(int(k == i) for k in range(s)), 1 + vertex(child)[2]
        kids = [vertex(tuple(v + (k == i) for k, v in enumerate(p))) for i in range(s)]
        n = 1 + sum((kids[i][1][i] - 1) * (b[i] + 1) for i in range(s))
        q = tuple(
            max([n] + [kids[j][1][i] + n * total for j in range(s) if j != i and kids[j][1][i] > 0])
            for i in range(s)
        )
        return n, q, n + max(k[2] for k in kids)

    return vertex


def test_worked_vertex():
    d = build_diagram(2, [1, 2], [3, 4])
    v = d.vertices[(1, 0)]
    assert v.n == 1
    assert v.q == (11, 1)
    assert d.vertices[(1, 1)].q == (6, 1)


def test_total_bound_of_the_example():
    d = build_diagram(2, [1, 2], [3, 4])
    assert total_turn_bound(d) == 440
    assert d.vertices[d.root].n == 411
    assert d.vertices[(0, 1)].n == 26


def test_single_stage_wins_in_one_turn():
    d = build_diagram(1, [5], [1])
    assert total_turn_bound(d) == 1
    assert d.vertices[(0,)].kind == PRE_WINNING


@pytest.mark.parametrize("b, l", [
    ([1, 2], [3, 4]), ([0], [5]), ([2], [3]), ([1, 1, 1], [2, 2, 3]), ([3, 0], [2, 5]),
])
def test_matches_independent_oracle(b, l):
    d = build_diagram(len(b), b, l)
    oracle = _oracle(tuple(b), tuple(l))
    for p, v in d.vertices.items():
        n, q, _ = oracle(p)
        assert (v.n, v.q) == (n, q), p
    assert total_turn_bound(d) == oracle(d.root)[2]


def test_recurrences_hold_at_every_regular_vertex():
    b, l = [1, 2], [3, 4]
    d = build_diagram(2, b, l)
    for p, v in d.vertices.items():
        if v.kind != REGULAR:
            continue
        children = [d.vertices[tuple(x + (k == i) for k, x in enumerate(p))].q for i in range(2)]
        assert combine(children, b) == (v.n, v.q)
        assert v.n >= 1 and all(x >= 1 for x in v.q)


def test_every_non_winning_vertex_has_descendants():
    d = build_diagram(2, [1, 2], [3, 4])
    for p, v in d.vertices.items():
        out = d.graph.out_degree(p)
        if v.kind == WINNING:
            assert out == 0
        elif v.kind == PRE_WINNING:
            assert out == 1
        else:
            assert out == 2


def test_classify():
    assert classify((3, 0), [3, 4]) == (WINNING, 0)
    assert classify((2, 3), [3, 4]) == (PRE_WINNING, 0)
    assert classify((0, 3), [3, 4]) == (PRE_WINNING, 1)
    assert classify((1, 1), [3, 4]) == (REGULAR, -1)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        build_diagram(2, [1, 2], [3, 0])
    with pytest.raises(ValueError):
        build_diagram(2, [1], [3, 4])
    with pytest.raises(ValueError):
        build_diagram(1, [-1], [2])


def test_stage_feasibility():
    assert stage_feasibility(22, [11, 0], [1, 2])
    assert not stage_feasibility(1, [0, 0], [1, 2])
    assert not stage_feasibility(23, [11, 0], [1, 2])
    with pytest.raises(ValueError):
        stage_feasibility(1, [1], [1, 2])


def _allocation_fits(n, k, b):
    """Can n turns be shared out so that type i takes at most k_i rounds of b_i + 1 turns?"""
    return any(
        sum(split) == n and all(x <= ki * (bi + 1) for x, ki, bi in zip(split, k, b))
        for split in product(range(n + 1), repeat=len(k))
    )


def test_stage_feasibility_matches_brute_force_allocation():
    rng = random.Random(7)
    for _ in range(200):
        s = rng.randint(1, 3)
        k = [rng.randint(0, 3) for _ in range(s)]
        b = [rng.randint(0, 3) for _ in range(s)]
        n = rng.randint(0, 14)
        assert stage_feasibility(n, k, b) == _allocation_fits(n, k, b), (n, k, b)


def test_table_and_mermaid_are_stable():
    d = build_diagram(2, [1, 2], [3, 4])
    table = format_table(d)
    assert table.splitlines()[0].split() == ["p", "q", "n", "kind"]
    assert table.endswith("total bound: 440")
    assert len(diagram_rows(d)) == len(d.vertices)
    assert format_table(build_diagram(2, [1, 2], [3, 4])) == table
    mermaid = generate_mermaid_diagram(d)
    assert mermaid.startswith("graph TD;")
    assert "-. 1 .->" in mermaid


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
