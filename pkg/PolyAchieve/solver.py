# solver.py

from itertools import combinations
import os
from typing import Dict, List, NamedTuple, Optional, Tuple

from PolyAchieve.board import BoardKind, Window, window_symmetries
from PolyAchieve.bounds import (
    GameSpec, SearchLimitExceeded, Verdict, aborted, maker_wins, unknown,
)
from PolyAchieve.polyform import Polyform, placements_inside
from PolyAchieve.verify_logger import get_logger

DEFAULT_MAX_NODES = 2_000_000
DEFAULT_MAX_TURNS = 6
MAXIMAL = "maximal"
ALL = "all"


def default_window(board: BoardKind) -> Window:
    return Window.square(7, 7) if board is BoardKind.SQUARE else Window.rows(6)


def max_nodes_from_env() -> int:
    return int(os.environ.get("POLYACHIEVE_MAX_NODES", DEFAULT_MAX_NODES))


class SolveConfig(NamedTuple):
    window: Window
    game: GameSpec
    goal: Polyform
    max_turns: int = DEFAULT_MAX_TURNS
    breaker_moves: str = MAXIMAL
    max_nodes: Optional[int] = None


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int) -> List[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


class _Search:
    """AND-OR search over maker turns on bitmask positions, memoized on canonical positions."""

    def __init__(self, cfg: SolveConfig):
        if cfg.breaker_moves not in (MAXIMAL, ALL):
            raise ValueError(f"❌ breaker_moves must be '{MAXIMAL}' or '{ALL}', got '{cfg.breaker_moves}'.")
        if cfg.window.board is not cfg.goal.board:
            raise ValueError(f"❌ Window board {cfg.window.board.value} does not match goal '{cfg.goal}'.")
        self.cfg = cfg
        self.a = cfg.game.a
        self.b = cfg.game.b
        self.cap = cfg.game.final_marks
        self.cells = cfg.window.cells()
        index = {c: n for n, c in enumerate(self.cells)}
        self.placements = [
            sum(1 << index[c] for c in pl) for pl in placements_inside(cfg.goal, self.cells)
        ]
        if not self.placements:
            raise ValueError(f"❌ Window {cfg.window} holds no placement of '{cfg.goal}'.")
        self.perms = [
            [index[sym.apply(c)] for c in self.cells] for sym in window_symmetries(cfg.window)
        ]
        self.memo: Dict[Tuple[int, int, int], bool] = {}
        self.nodes = 0
        self.node_cap = max_nodes_from_env() if cfg.max_nodes is None else cfg.max_nodes

    def _permute(self, mask: int, perm: List[int]) -> int:
        out = 0
        for bit in _bits(mask):
            out |= 1 << perm[bit]
        return out

    def _key(self, maker: int, breaker: int, turns: int) -> Tuple[int, int, int]:
        best = None
        for perm in self.perms:
            cand = (self._permute(maker, perm), self._permute(breaker, perm))
            if best is None or cand < best:
                best = cand
        return best[0], best[1], turns

    def _alive(self, maker: int, breaker: int, budget: int) -> List[Tuple[int, int]]:
        """(placement, missing cells) for placements free of breaker marks needing <= budget cells."""
        out = []
        for pl in self.placements:
            if pl & breaker:
                continue
            missing = pl & ~maker
            if _popcount(missing) <= budget:
                out.append((pl, missing))
        return out

    def maker_to_move(self, maker: int, breaker: int, turns: int) -> bool:
        """Can the maker force a placement using at most `turns` more turns?"""
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise SearchLimitExceeded("solver nodes", self.node_cap, self.nodes)
        if self._alive(maker, breaker, self.cap):
            return True
        if turns <= 1:
            return False
        key = self._key(maker, breaker, turns)
        if key in self.memo:
            return self.memo[key]
        result = any(
            self._breaker_to_move(maker | move, breaker, turns - 1)
            for move in self._maker_moves(maker, breaker, turns)
        )
        self.memo[key] = result
        return result

    def _maker_moves(self, maker: int, breaker: int, turns: int) -> List[int]:
        budget = self.a * (turns - 1) + self.cap
        alive = self._alive(maker, breaker, budget)
        weight: Dict[int, int] = {}
        for _, missing in alive:
            bonus = budget - _popcount(missing) + 1
            for bit in _bits(missing):
                weight[bit] = weight.get(bit, 0) + bonus
        cells = sorted(weight, key=lambda bit: (-weight[bit], bit))
        size = min(self.a, len(cells))
        moves = []
        for chosen in combinations(cells, size):
            move = 0
            for bit in chosen:
                move |= 1 << bit
            moves.append(move)
        return moves

    def _breaker_to_move(self, maker: int, breaker: int, turns: int) -> bool:
        """True if every breaker reply still loses; `turns` maker turns remain."""
        threats = [missing for _, missing in self._alive(maker, breaker, self.cap)]
        relevant = self._alive(maker, breaker, self.a * (turns - 1) + self.cap)
        if not relevant:
            return False
        weight: Dict[int, int] = {}
        for _, missing in relevant:
            for bit in _bits(missing):
                weight[bit] = weight.get(bit, 0) + 1
        for missing in threats:
            for bit in _bits(missing):
                weight[bit] = weight.get(bit, 0) + len(relevant)
        cells = sorted(weight, key=lambda bit: (-weight[bit], bit))
        top = min(self.b, len(cells))
        sizes = range(top, -1, -1) if self.cfg.breaker_moves == ALL else [top]
        for size in sizes:
            for chosen in combinations(cells, size):
                move = 0
                for bit in chosen:
                    move |= 1 << bit
                if any(not (missing & move) for missing in threats):
                    continue
                if not self.maker_to_move(maker, breaker | move, turns):
                    return False
        # every reply either misses a threat or leaves a forced win
        return True


def solve(cfg: SolveConfig) -> Verdict:
    """
    Exhaustive search on a bounded window. MakerWins is sound for the infinite board;
    anything else is Unknown.
    """
    game = cfg.game
    search = _Search(cfg)
    logger = get_logger()
    try:
        won = search.maker_to_move(0, 0, cfg.max_turns)
    except SearchLimitExceeded as e:
        logger.warning(f"solve {cfg.goal} {game}: {e}")
        return aborted(game, str(e))
    logger.debug(f"  solve {cfg.goal} {game} on {cfg.window}: {search.nodes} nodes, {len(search.memo)} memo entries")
    if won:
        return maker_wins(
            game, f"solver {cfg.window} in {cfg.max_turns} turns", f"{search.nodes} nodes"
        )
    return unknown(game, f"no forced win on {cfg.window} within {cfg.max_turns} turns")
