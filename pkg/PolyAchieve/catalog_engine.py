# catalog_engine.py

from concurrent.futures import ProcessPoolExecutor
import json
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from PolyAchieve.board import BoardKind, Window
from PolyAchieve.bounds import (
    GameSpec, SearchLimitExceeded, Status, ThresholdReport, ThresholdSequence, Verdict,
    aborted, check_threshold, contradictions, implies, maker_wins, small_bias_winner,
    surround_loser, twostep_winner, unknown,
)
from PolyAchieve.certificate_reader import read_paving, read_polyform, read_proof, read_strategy
from PolyAchieve.claim_graph import ClaimGraph, ClaimKey, claim_order, get_suggestion
from PolyAchieve.config_loader import load_catalog_config
from PolyAchieve.paving import defeats
from PolyAchieve.polyform import Polyform, congruent, is_subform
from PolyAchieve.priority import HistorySpec, verify_breaker
from PolyAchieve.proofseq import derived_game_claims, verify_sequence
from PolyAchieve.solver import SolveConfig, solve
from PolyAchieve.verify_logger import VerifyLogger, get_logger, setup_logger

EXPECTED = {"maker": Status.MAKER_WINS, "breaker": Status.BREAKER_WINS}


class ClaimResult(NamedTuple):
    key: ClaimKey
    expected: Status
    verdict: Verdict

    @property
    def ok(self) -> bool:
        return self.verdict.status is self.expected and implies(self.verdict, self.key.game)


class CrossCheck(NamedTuple):
    """A solver run against one catalog claim of a small goal."""
    key: ClaimKey
    claimed: Status
    solver: Verdict

    @property
    def ok(self) -> bool:
        if self.claimed is Status.BREAKER_WINS:
            return self.solver.status is not Status.MAKER_WINS
        return self.solver.status is Status.MAKER_WINS


class EntryReport(NamedTuple):
    name: str
    claims: Tuple[ClaimResult, ...]
    threshold: ThresholdReport
    conflicts: Tuple[str, ...]
    cross_checks: Tuple[CrossCheck, ...]

    @property
    def ok(self) -> bool:
        return (
            all(c.ok for c in self.claims) and self.threshold.ok and not self.conflicts
            and all(x.ok for x in self.cross_checks)
        )


class CatalogReport(NamedTuple):
    entries: Tuple[EntryReport, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1


def _strip(v: Verdict) -> Verdict:
    """Drops search evidence so reports stay small and picklable."""
    return v._replace(evidence=None)


class CatalogEngine:
    """High-level facade: loads the catalog, verifies every witness and checks the threshold tables."""

    def __init__(self, config_data: dict, base_dir: Path, jobs: Optional[int] = None):
        self.config = config_data
        self.base_dir = Path(base_dir)
        settings = config_data.get("SETTINGS", {})
        self.jobs = jobs or settings.get("JOBS", 1)
        self.claims = ClaimGraph(config_data.get("ANIMALS", {}))
        self.subforms = self._check_subforms()

    @classmethod
    def from_file(cls, config_filepath, jobs: Optional[int] = None) -> "CatalogEngine":
        """Creates an engine from a catalog YAML file; witness files resolve relative to it."""
        config_data = load_catalog_config(config_filepath)
        return cls(config_data, Path(config_filepath).parent, jobs=jobs)

    @property
    def animals(self) -> Dict[str, dict]:
        return self.config.get("ANIMALS", {})

    def _check_subforms(self) -> List[Tuple[str, str]]:
        """
        Every (smaller, larger) pair of animals on one board where the smaller fits
        inside the larger. Declared SUBFORMS pairs must be among them.
        """
        names = list(self.animals)
        declared = self.config.get("SUBFORMS", [])
        for pair in declared:
            for name in pair:
                if name not in self.animals:
                    hint = get_suggestion(name, names)
                    raise ValueError(f"❌ SUBFORMS names unknown animal '{name}'.{hint}")

        loader = EntryVerifier(self.config, self.base_dir)
        goals = {name: loader.goal(name) for name in sorted(names)}
        pairs = [
            (small, large) for small, p in goals.items() for large, q in goals.items()
            if p.board is q.board and p.size < q.size and is_subform(p, q)
        ]
        for small, large in declared:
            if (small, large) not in pairs:
                raise ValueError(f"❌ SUBFORMS pair ({small}, {large}): {small} does not fit inside {large}.")
        return pairs

    def _require_entry(self, name: str):
        if name not in self.animals:
            available = "\n - ".join(sorted(self.animals))
            hint = get_suggestion(name, list(self.animals))
            raise ValueError(
                f"\nCatalog entry '{name}' not found.{hint}\n\nAvailable entries:\n - {available}\n"
            )

    def run_all(self, entry: Optional[str] = None, logger: Optional[VerifyLogger] = None) -> CatalogReport:
        """
        Verifies every entry (or one), each in its own task; the report is ordered by name
        whatever the number of jobs.
        """
        if logger is None:
            logger = get_logger()
        setup_logger(logger)
        if entry:
            self._require_entry(entry)
        names = [entry] if entry else sorted(self.animals)
        logger.section(f"Verifying {len(names)} catalog entries")

        tasks = [(self.config, str(self.base_dir), name, self.subforms) for name in names]
        if self.jobs > 1 and len(tasks) > 1:
            worker_init_info = logger.get_worker_init_info()
            initializer, initargs = (worker_init_info if worker_init_info else (None, ()))
            with ProcessPoolExecutor(
                    max_workers=self.jobs, initializer=initializer, initargs=initargs
            ) as executor:
                entries = list(executor.map(_verify_entry_task, tasks))
        else:
            entries = [_verify_entry_task(task) for task in tasks]

        report = CatalogReport(tuple(sorted(entries, key=lambda e: e.name)))
        for line in format_report(report):
            logger.log(line)
        if report.ok:
            logger.log(f"\n✅ Catalog reproduces: {len(report.entries)} entries verified.")
        else:
            failed = [e.name for e in report.entries if not e.ok]
            logger.log(f"🔴 Catalog check failed for {', '.join(failed)}.")
        return report

    def describe(self) -> str:
        """Markdown summary of the catalog with a Mermaid graph of the claim derivations."""
        return CatalogReporter(self.config, self.claims).describe_catalog()


# --- Entry verification (runs inside worker processes) ---
def _verify_entry_task(task: Tuple[dict, str, str, List[Tuple[str, str]]]) -> EntryReport:
    config, base_dir, name, subforms = task
    return EntryVerifier(config, Path(base_dir), subforms).verify(name)


class EntryVerifier:
    """Verifies the claims of one animal in dependency order."""

    def __init__(self, config: dict, base_dir: Path, subforms: Sequence[Tuple[str, str]] = ()):
        self.config = config
        self.base_dir = base_dir
        self.subforms = subforms
        settings = config.get("SETTINGS", {})
        self.solver_settings = settings.get("SOLVER", {})
        self.max_positions = settings.get("PRIORITY", {}).get("MAX_POSITIONS")
        self.logger = get_logger()

    def _path(self, relative: str) -> Path:
        return self.base_dir / relative

    def goal(self, name: str) -> Polyform:
        polyform = read_polyform(self._path(self.config["ANIMALS"][name]["POLYFORM"]))
        return Polyform(polyform.board, polyform.cells, name)

    def verify(self, name: str) -> EntryReport:
        animal = self.config["ANIMALS"][name]
        goal = self.goal(name)
        graph = ClaimGraph({name: animal})
        results: Dict[ClaimKey, Verdict] = {}
        claims: List[ClaimResult] = []
        for generation in ClaimGraph.generations(graph.graph):
            for key in generation:
                claim = graph.claim(key)
                verdict = _strip(self.verify_claim(goal, key, claim, results))
                results[key] = verdict
                claims.append(ClaimResult(key, EXPECTED[claim["VERDICT"]], verdict))
                self.logger.debug(f"  {key}: {verdict}")
        claims.sort(key=lambda c: claim_order(c.key))

        evidence = [c.verdict for c in claims if c.ok]
        threshold = ThresholdSequence.parse(animal["THRESHOLD"])
        superforms = [
            (large, ThresholdSequence.parse(self.config["ANIMALS"][large]["THRESHOLD"]))
            for small, large in self.subforms if small == name
        ]
        report = check_threshold(name, threshold, evidence, goal.size, superforms)
        horizon_b = max(threshold.finite, default=0) + 2
        conflicts = tuple(
            f"{game} settled both ways: {m} / {b}"
            for game, m, b in contradictions(evidence, len(threshold.finite) + 1, horizon_b)
        )
        cross = tuple(self.cross_check(goal, claims))
        return EntryReport(name, tuple(claims), report, conflicts, cross)

    def verify_claim(self, goal: Polyform, key: ClaimKey, claim: dict, results: Dict[ClaimKey, Verdict]) -> Verdict:
        """Runs the witness of one claim. Malformed witness files become failing verdicts."""
        game = key.game
        kind = claim["WITNESS"]
        args = claim.get("ARGS", {})
        try:
            if kind == "surround":
                return surround_loser(game.a, game.b, goal)
            if kind == "twostep":
                return twostep_winner(game.a, game.b, goal)
            if kind == "small_bias":
                return small_bias_winner(game.a, game.b)
            if kind == "proof":
                return self._proof(goal, game, self._path(claim["FILE"]))
            if kind == "paving":
                return defeats(read_paving(self._path(claim["FILE"])), goal, args.get("BLOCKS", 1))
            if kind == "priority":
                return self._priority(goal, game, self._path(claim["FILE"]), args)
            if kind == "solver":
                return self.solve(goal, game, args)
            if kind == "reduce":
                return self._reduce(game, results[ClaimKey(key.animal, GameSpec.parse(claim["FROM"]))])
        except (FileNotFoundError, ValueError) as e:
            return unknown(game, str(e))
        except SearchLimitExceeded as e:
            return aborted(game, str(e))
        raise ValueError(f"❌ Unknown witness kind '{kind}' for {key}.")

    @staticmethod
    def _proof(goal: Polyform, game: GameSpec, path: Path) -> Verdict:
        seq = read_proof(path)
        if not congruent(seq.goal, goal):
            return unknown(game, f"{path.name} proves a different goal: {seq.goal}")
        if seq.game != game:
            return unknown(game, f"{path.name} certifies {seq.game}, not {game}")
        return verify_sequence(seq)

    def _priority(self, goal: Polyform, game: GameSpec, path: Path, args: dict) -> Verdict:
        overrides = {"a": game.a, "b": game.b}
        if "PER_SET" in args:
            overrides["per_set"] = args["PER_SET"]
        strat = read_strategy(path, overrides)
        hist = HistorySpec(strat.history.generators, args.get("AUX_LEVEL", 0))
        return verify_breaker(goal, strat, hist=hist, max_positions=self.max_positions)

    @staticmethod
    def _reduce(game: GameSpec, base: Verdict) -> Verdict:
        if base.game.plain and base.game.a == 1 and game.a > 1:
            # extra marks in the final turn never hurt: (1,b) is also won as (1->c,b)
            base = base._replace(game=GameSpec(1, base.game.b, game.a))
        for derived in derived_game_claims(base):
            if implies(derived, game):
                return maker_wins(game, f"reduce {base.game}", f"from {base.witness}")
        return unknown(game, f"{base.game} does not yield {game} ({base.status.value})")

    def window(self, board: BoardKind, override: Optional[str] = None) -> Window:
        if override:
            return Window.parse(override, board)
        key = "SQUARE_WINDOW" if board is BoardKind.SQUARE else "TRIANGULAR_WINDOW"
        default = "7x7" if board is BoardKind.SQUARE else "6"
        return Window.parse(self.solver_settings.get(key, default), board)

    def solve(self, goal: Polyform, game: GameSpec, args: dict, max_turns: Optional[int] = None) -> Verdict:
        cfg = SolveConfig(
            self.window(goal.board, args.get("WINDOW")), game, goal,
            max_turns or args.get("MAX_TURNS") or self.solver_settings.get("MAX_TURNS", 6),
            args.get("BREAKER_MOVES", "maximal"),
        )
        return solve(cfg)

    def cross_check(self, goal: Polyform, claims: List[ClaimResult]) -> List[CrossCheck]:
        """
        Solver runs on the small claims. Maker claims must be confirmed; a solver MakerWins
        against a breaker claim is fatal. Breaker claims get the shorter turn limit and
        the cross-check window.
        """
        s = self.solver_settings
        if goal.size > s.get("CROSS_CHECK_MAX_SIZE", 3):
            return []
        if goal.board is BoardKind.SQUARE:
            small_window = s.get("CROSS_CHECK_SQUARE_WINDOW", "5x5")
        else:
            small_window = s.get("CROSS_CHECK_TRIANGULAR_WINDOW", "4")
        checks = []
        for c in claims:
            game = c.key.game
            if game.a > s.get("CROSS_CHECK_MAX_A", 1) or game.b > s.get("CROSS_CHECK_MAX_B", 3):
                continue
            try:
                turns, args = None, {}
                if c.expected is Status.BREAKER_WINS:
                    turns, args = s.get("CROSS_CHECK_MAX_TURNS", 4), {"WINDOW": small_window}
                verdict = self.solve(goal, game, args, turns)
            except ValueError as e:
                verdict = unknown(game, str(e))
            checks.append(CrossCheck(c.key, c.expected, _strip(verdict)))
        return checks


# --- Reporting ---
def format_report(report: CatalogReport) -> List[str]:
    """Line-oriented report, entries by name and claims by game."""
    lines = []
    for entry in report.entries:
        mark = "✅" if entry.ok else "🔴"
        lines.append(f"{mark} {entry.name} tau={entry.threshold.sequence}")
        for c in entry.claims:
            status = "ok  " if c.ok else "FAIL"
            lines.append(f"    {status} {c.key.game} expected {c.expected.value}: {c.verdict}")
        for failure in entry.threshold.failures:
            lines.append(f"    FAIL {failure}")
        for note in entry.threshold.notes:
            lines.append(f"    note {note}")
        for conflict in entry.conflicts:
            lines.append(f"    FAIL {conflict}")
        for x in entry.cross_checks:
            status = "ok  " if x.ok else "FAIL"
            lines.append(f"    {status} solver {x.key.game}: {x.solver.status.value}")
    return lines


def verdict_dict(v: Verdict) -> dict:
    """JSON form of a verdict, shared by the catalog report and single-certificate commands."""
    return {"status": v.status.value, "game": str(v.game), "witness": v.witness, "detail": v.detail}


def report_to_dict(report: CatalogReport) -> dict:
    """Machine-readable form of the report."""
    return {
        "ok": report.ok,
        "entries": [
            {
                "name": e.name,
                "ok": e.ok,
                "threshold": str(e.threshold.sequence),
                "claims": [
                    {"game": str(c.key.game), "expected": c.expected.value, "ok": c.ok,
                     "verdict": verdict_dict(c.verdict)}
                    for c in e.claims
                ],
                "threshold_failures": list(e.threshold.failures),
                "notes": list(e.threshold.notes),
                "conflicts": list(e.conflicts),
                "cross_checks": [
                    {"game": str(x.key.game), "claimed": x.claimed.value, "ok": x.ok,
                     "solver": verdict_dict(x.solver)}
                    for x in e.cross_checks
                ],
            }
            for e in report.entries
        ],
    }


def write_json(report: CatalogReport, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report_to_dict(report), f, indent=2, ensure_ascii=False)


class CatalogReporter:
    """Generates a human-readable description of the catalog."""

    def __init__(self, config: Dict, claims: ClaimGraph):
        self.config = config
        self.claims = claims

    @staticmethod
    def _node_id(key: ClaimKey) -> str:
        game = key.game
        arrow = f"to{game.c}_" if not game.plain else ""
        return f"{key.animal.replace(',', '_')}_{game.a}_{arrow}{game.b}"

    def generate_mermaid_diagram(self, graph: nx.DiGraph) -> str:
        """Mermaid graph of the claims; derived claims point back to their base claims."""
        if not graph.nodes:
            return "graph TD;\n    Empty_Catalog[Catalog is empty];"

        lines = ["graph TD;"]
        for node in sorted(graph.nodes(), key=claim_order):
            style = "certificate" if graph.in_degree(node) == 0 else "derived"
            lines.append(f'    {self._node_id(node)}["{node}"]:::{style};')
        for u, v in sorted(graph.edges(), key=lambda e: (claim_order(e[0]), claim_order(e[1]))):
            lines.append(f"    {self._node_id(u)} --> {self._node_id(v)};")

        lines.append("    classDef certificate fill:#d4edda,stroke:#155724,color:#155724;")
        lines.append("    classDef derived fill:#e2e3e5,stroke:#383d41,color:#383d41;")
        return "\n".join(lines)

    def describe_catalog(self) -> str:
        animals = self.config.get("ANIMALS", {})
        lines = ["# PolyAchieve Catalog", ""]

        overview_text = self.config.get("OVERVIEW")
        if overview_text:
            lines += ["## Overview", overview_text.strip(), "", "---", ""]

        lines += ["## Threshold Sequences", "", "| Animal | tau | Claims |", "|---|---|---|"]
        for name in sorted(animals):
            tau = ThresholdSequence.parse(animals[name]["THRESHOLD"])
            lines.append(f"| {name} | {tau} | {len(animals[name].get('CLAIMS', []))} |")
        lines.append("")

        lines += ["## Derivations", "```mermaid", self.generate_mermaid_diagram(self.claims.graph), "```", ""]

        lines.append("## Claims")
        for name in sorted(animals):
            lines.append(f"### {name}")
            keys = sorted((k for k in self.claims.graph.nodes if k.animal == name), key=claim_order)
            for key in keys:
                claim = self.claims.claim(key)
                source = claim.get("FILE") or claim.get("FROM") or ""
                source = f" `{source}`" if source else ""
                lines.append(f"* {key.game} {claim['VERDICT']} wins, witness {claim['WITNESS']}{source}")
            lines.append("")
        return "\n".join(lines)
