#!/usr/bin/env python
# polyachieve.py


import argparse
import json
import logging
from pathlib import Path
import sys
import traceback
from typing import List, Optional

from PolyAchieve.board import Window, format_cells, parse_cells
from PolyAchieve.bounds import GameSpec, SearchLimitExceeded, Status, Verdict, aborted, make_game
from PolyAchieve.catalog_engine import CatalogEngine, verdict_dict, write_json
from PolyAchieve.certificate_reader import data_path, read_paving, read_polyform, read_proof, read_strategy
from PolyAchieve.paving import defeats, paving_degree
from PolyAchieve.polyform import Polyform, canonical, site_perimeter
from PolyAchieve.priority import HistorySpec, format_position, trace_sequence, verify_breaker
from PolyAchieve.proofseq import verify_sequence
from PolyAchieve.schema import ANIMAL_NAME
from PolyAchieve.solver import ALL, MAXIMAL, SolveConfig, default_window, solve
from PolyAchieve.stages import build_diagram, format_table, generate_mermaid_diagram
from PolyAchieve.verify_logger import LogLevel, VerifyLogger, setup_logger


def main(argv: Optional[List[str]] = None) -> int:
    """The CLI for verifying achievement-game certificates and the threshold catalog."""
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(args.quiet, args.verbose)

    # --- Reports go to stdout through a VerifyLogger ---
    logger = VerifyLogger(sys.stdout, log_level=report_level(args.quiet, args.verbose))
    setup_logger(logger)

    try:
        return args.handler(args, logger)
    except (FileNotFoundError, ValueError) as e:
        logging.error(f"A configuration error occurred:\n{e}")
        return 1
    except Exception as e:
        logging.error(f"An unexpected error occurred: {e}")
        logging.debug(traceback.format_exc())  # Print traceback only in debug mode
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyachieve",
        description="PolyAchieve: verifiable certificates for biased polyform achievement games."
    )
    parser.add_argument("--jobs", type=int, help="Worker processes for catalog checks.")
    parser.add_argument("--json", metavar="FILE", help="Also write the report as JSON.")
    parser.add_argument(
        "--quiet", "-q", action='store_true', help="Suppress informational messages."
    )
    parser.add_argument(
        "--verbose", "-v", action='store_true', help="Enable detailed debug logging."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-proof", help="Verify a proof-sequence certificate.")
    p.add_argument("proof_file")
    p.set_defaults(handler=cmd_verify_proof)

    p = sub.add_parser("verify-paving", help="Check that a pairing strategy defeats a goal.")
    p.add_argument("paving_file")
    p.add_argument("goal", help="Polyform file or catalog name such as P3,1.")
    p.add_argument("--blocks", type=int, default=1, help="Anchor placements in a block of periods.")
    p.set_defaults(handler=cmd_verify_paving)

    p = sub.add_parser("verify-priority", help="Verify a breaker priority strategy.")
    p.add_argument("strategy_file")
    p.add_argument("goal")
    _add_strategy_overrides(p)
    p.add_argument("--aux-level", type=int, choices=[0, 1], default=0)
    p.set_defaults(handler=cmd_verify_priority)

    p = sub.add_parser("trace", help="Replay one maker line against a priority strategy.")
    p.add_argument("strategy_file")
    p.add_argument("goal")
    p.add_argument(
        "--moves", required=True,
        help="Maker turns separated by ';', e.g. '(1,1) (1,2); (2,2)'."
    )
    _add_strategy_overrides(p)
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser("stage-diagram", help="Build the stage diagram of a composition.")
    p.add_argument("--b", required=True, help="Per-part breaker marks, e.g. 1,2.")
    p.add_argument("--l", required=True, help="Per-part stage counts, e.g. 3,4.")
    p.add_argument("--mermaid", metavar="FILE", help="Write a Mermaid graph of the diagram.")
    p.set_defaults(handler=cmd_stage_diagram)

    p = sub.add_parser("solve", help="Search for a forced maker win on a bounded window.")
    p.add_argument("goal")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--c", type=int, help="Marks in the maker's final turn.")
    p.add_argument("--window", help="'WxH' for squares, 'N' rows for triangles.")
    p.add_argument("--max-turns", type=int, default=6)
    p.add_argument("--breaker-moves", choices=[MAXIMAL, ALL], default=MAXIMAL)
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("perimeter", help="Print the site perimeter of a polyform.")
    p.add_argument("goal")
    p.set_defaults(handler=cmd_perimeter)

    p = sub.add_parser("canonical", help="Print the canonical orientation of a polyform.")
    p.add_argument("goal")
    p.set_defaults(handler=cmd_canonical)

    catalog = sub.add_parser("catalog", help="Check or describe the threshold catalog.")
    catalog_sub = catalog.add_subparsers(dest="catalog_command", required=True)

    p = catalog_sub.add_parser("check", help="Verify every claim of the catalog.")
    p.add_argument("--catalog", default=str(data_path("catalog.yml")))
    p.add_argument("--entry", help="Verify a single animal, e.g. T4,3.")
    p.set_defaults(handler=cmd_catalog_check)

    p = catalog_sub.add_parser("describe", help="Generate a Markdown description of the catalog.")
    p.add_argument("--catalog", default=str(data_path("catalog.yml")))
    p.add_argument("--output", "-o", help="Path to save the description file.")
    p.set_defaults(handler=cmd_catalog_describe)
    return parser


def _add_strategy_overrides(p: argparse.ArgumentParser):
    p.add_argument("--a", type=int, help="Override the strategy's maker marks per turn.")
    p.add_argument("--b", type=int, help="Override the strategy's breaker marks per turn.")
    p.add_argument("--per-set", type=int, help="Override the marks per response set.")


def setup_logging(quiet: bool = False, verbose: bool = False):
    """Configures the root logger for the application."""
    level = logging.INFO
    if quiet:
        level = logging.WARNING
    if verbose:
        level = logging.DEBUG

    logging.basicConfig(
        level=level, format='%(message)s', stream=sys.stdout
    )


def report_level(quiet: bool = False, verbose: bool = False) -> LogLevel:
    """Report verbosity, matching the root logger's: --verbose wins over --quiet."""
    if verbose:
        return LogLevel.DEBUG
    return LogLevel.WARNING if quiet else LogLevel.INFO


def load_goal(text: str) -> Polyform:
    """A polyform file, or the catalog name of a shipped polyform (T4,3, P4,5, ...)."""
    path = Path(text)
    if not path.exists() and ANIMAL_NAME.fullmatch(text):
        path = data_path("polyforms", text.replace(",", "_") + ".txt")
        polyform = read_polyform(path)
        return Polyform(polyform.board, polyform.cells, text)
    return read_polyform(path)


def _overrides(args) -> dict:
    return {
        key: value for key, value in
        (("a", args.a), ("b", args.b), ("per_set", args.per_set)) if value is not None
    }


def _finish(args, verdict: Verdict, extra: Optional[dict] = None) -> int:
    """Writes the optional JSON dump; exit 0 iff the verdict is a proof."""
    if args.json:
        data = verdict_dict(verdict)
        data.update(extra or {})
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
    return 0 if verdict.status in (Status.MAKER_WINS, Status.BREAKER_WINS) else 1


# --- Subcommands ---
def cmd_verify_proof(args, logger: VerifyLogger) -> int:
    seq = read_proof(args.proof_file)
    logger.section(f"{seq.source}: {seq.goal} {seq.game}, {len(seq.situations)} situations")
    verdict = verify_sequence(seq)
    steps = verdict.evidence or []
    for report in steps:
        logger.log(f"  {report.describe()}")
    logger.verdict(verdict)
    return _finish(args, verdict, {"steps": [r.describe() for r in steps]})


def cmd_verify_paving(args, logger: VerifyLogger) -> int:
    paving = read_paving(args.paving_file)
    goal = load_goal(args.goal)
    logger.section(f"paving {paving.name}: degree {paving_degree(paving)}, goal {goal}")
    verdict = defeats(paving, goal, args.blocks)
    logger.verdict(verdict)
    return _finish(args, verdict)


def cmd_verify_priority(args, logger: VerifyLogger) -> int:
    strat = read_strategy(args.strategy_file, _overrides(args))
    goal = load_goal(args.goal)
    hist = HistorySpec(strat.history.generators, args.aux_level)
    logger.section(f"strategy {strat.name} ({strat.a},{strat.b}) per set {strat.per_set}, goal {goal}")
    try:
        verdict = verify_breaker(goal, strat, hist=hist)
    except SearchLimitExceeded as e:
        verdict = aborted(make_game(strat.a, strat.b), str(e))
    terminals = []
    if verdict.evidence is not None:
        terminals = [format_position(t) for t in verdict.evidence.terminal_positions]
    logger.verdict(verdict)
    if verdict.status is Status.BREAKER_WINS:
        logger.log(f"terminal positions: {len(terminals)}")
        for n, line in enumerate(terminals, start=1):
            logger.log(f"  {n}. {line}")
    return _finish(args, verdict, {"terminal_positions": terminals})


def _parse_moves(text: str):
    return [parse_cells(turn) for turn in text.split(";") if turn.strip()]


def cmd_trace(args, logger: VerifyLogger) -> int:
    strat = read_strategy(args.strategy_file, _overrides(args))
    goal = load_goal(args.goal)
    trace = trace_sequence(goal, strat, None, None, _parse_moves(args.moves))
    logger.section(f"trace of {goal} against {strat.name} ({strat.a},{strat.b})")
    for step in trace.steps:
        logger.log(f"  {step.describe()}")
    final = trace.final
    logger.log(f"maker {format_cells(final.maker)} | breaker {format_cells(final.breaker)}")
    if trace.ruined:
        logger.log("🔴 goal spoiled by the breaker")
    return 0


def _int_list(text: str, what: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"❌ --{what} must be comma-separated integers, got '{text}'.")


def cmd_stage_diagram(args, logger: VerifyLogger) -> int:
    b = _int_list(args.b, "b")
    l = _int_list(args.l, "l")
    if len(b) != len(l):
        raise ValueError(f"❌ --b and --l need the same number of parts (got {len(b)} and {len(l)}).")
    diagram = build_diagram(len(b), b, l)
    logger.log(format_table(diagram))
    if args.mermaid:
        with open(args.mermaid, "w", encoding="utf-8") as f:
            f.write(generate_mermaid_diagram(diagram) + "\n")
        logging.info(f"Stage diagram saved to: {args.mermaid}")
    return 0


def cmd_solve(args, logger: VerifyLogger) -> int:
    goal = load_goal(args.goal)
    game: GameSpec = make_game(args.a, args.b, args.c)
    window = Window.parse(args.window, goal.board) if args.window else default_window(goal.board)
    logger.section(f"solve {goal} {game} on {window}, {args.max_turns} turns")
    verdict = solve(SolveConfig(window, game, goal, args.max_turns, args.breaker_moves))
    logger.verdict(verdict)
    return _finish(args, verdict)


def cmd_perimeter(args, logger: VerifyLogger) -> int:
    logger.log(str(site_perimeter(load_goal(args.goal))))
    return 0


def cmd_canonical(args, logger: VerifyLogger) -> int:
    logger.log(format_cells(canonical(load_goal(args.goal)).cells))
    return 0


def cmd_catalog_check(args, logger: VerifyLogger) -> int:
    engine = CatalogEngine.from_file(args.catalog, jobs=args.jobs)
    report = engine.run_all(entry=args.entry, logger=logger)
    if args.json:
        write_json(report, args.json)
        logging.info(f"Report saved to: {args.json}")
    return report.exit_code


def cmd_catalog_describe(args, logger: VerifyLogger) -> int:
    description = CatalogEngine.from_file(args.catalog).describe()
    if args.output:
        with open(args.output, 'w', encoding='utf-8') as f:
            f.write(description)
        logging.info(f"Catalog description saved to: {args.output}")
    else:
        print(description)
    return 0


if __name__ == "__main__":
    sys.exit(main())
