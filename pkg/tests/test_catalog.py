import json
import sys

import networkx as nx
import pytest

from PolyAchieve.bounds import GameSpec, Status, maker_wins
from PolyAchieve.catalog_engine import CatalogEngine, EntryVerifier, format_report, write_json
from PolyAchieve.certificate_reader import DATA_DIR, data_path
from PolyAchieve.claim_graph import ClaimGraph, ClaimKey
from PolyAchieve.config_loader import load_catalog_config

CATALOG = data_path("catalog.yml")


def _entry(*claims, threshold=(2, "inf"), polyform="T2_1"):
    return {
        "POLYFORM": f"polyforms/{polyform}.txt",
        "THRESHOLD": list(threshold),
        "CLAIMS": [dict(c) for c in claims],
    }


def _claim(game, verdict, witness, **extra):
    return {"GAME": game, "VERDICT": verdict, "WITNESS": witness, "ARGS": {}, **extra}


def _engine(animals, subforms=()):
    config = {"config_type": "PolyAchieve", "SETTINGS": {}, "ANIMALS": animals, "SUBFORMS": list(subforms)}
    return CatalogEngine(config, DATA_DIR)


# --- Loading ---
def test_shipped_catalog_loads_with_defaults():
    config = load_catalog_config(CATALOG)
    assert len(config["ANIMALS"]) == 15
    assert config["SETTINGS"]["PRIORITY"]["MAX_POSITIONS"] is None
    assert config["ANIMALS"]["T2,1"]["CLAIMS"][0]["ARGS"] == {}


def test_schema_rejects_bad_names_and_games(write_file):
    path = write_file("bad.yml", """
        config_type: PolyAchieve
        ANIMALS:
          Q4,1:
            POLYFORM: polyforms/P4_1.txt
            THRESHOLD: [1, inf]
    """)
    with pytest.raises(ValueError):
        load_catalog_config(path)

    path = write_file("bad_game.yml", """
        config_type: PolyAchieve
        ANIMALS:
          P2,1:
            POLYFORM: polyforms/P2_1.txt
            THRESHOLD: [3, inf]
            CLAIMS:
              - {GAME: "one,three", VERDICT: maker, WITNESS: solver}
    """)
    with pytest.raises(ValueError):
        load_catalog_config(path)


def test_file_witness_needs_a_file(write_file):
    path = write_file("no_file.yml", """
        config_type: PolyAchieve
        ANIMALS:
          P2,1:
            POLYFORM: polyforms/P2_1.txt
            THRESHOLD: [3, inf]
            CLAIMS:
              - {GAME: "1,4", VERDICT: breaker, WITNESS: paving}
    """)
    with pytest.raises(ValueError):
        load_catalog_config(path)


def test_missing_catalog():
    with pytest.raises(FileNotFoundError):
        CatalogEngine.from_file(DATA_DIR / "missing.yml")


# --- Claim graph ---
def test_duplicate_claims_are_rejected():
    with pytest.raises(ValueError, match="claimed twice"):
        _engine({"T2,1": _entry(_claim("1,2", "maker", "solver"), _claim("1,2", "maker", "solver"))})


def test_derivation_from_a_missing_claim_suggests_a_fix():
    with pytest.raises(ValueError, match="Did you mean '\\(1,2\\)'"):
        _engine({"T2,1": _entry(
            _claim("1,2", "maker", "solver"), _claim("2,3", "maker", "reduce", FROM="1,1")
        )})


def test_circular_derivations_are_rejected():
    with pytest.raises(nx.NetworkXUnfeasible, match="Circular"):
        _engine({"T2,1": _entry(
            _claim("2,3", "maker", "reduce", FROM="3,5"), _claim("3,5", "maker", "reduce", FROM="2,3")
        )})


def test_unknown_subform_is_rejected():
    with pytest.raises(ValueError, match="unknown animal 'T3,2'"):
        _engine({"T2,1": _entry()}, subforms=[["T2,1", "T3,2"]])


def test_declared_subform_must_fit_inside_the_larger_animal():
    animals = {
        "P3,1": _entry(threshold=(1, 7, "inf"), polyform="P3_1"),
        "P4,4": _entry(threshold=(0, 3, 5, "inf"), polyform="P4_4"),
    }
    with pytest.raises(ValueError, match="P3,1 does not fit inside P4,4"):
        _engine(animals, subforms=[["P3,1", "P4,4"]])


def test_subform_pairs_are_derived_from_the_shapes():
    engine = CatalogEngine.from_file(CATALOG)
    assert ("P1,1", "P4,5") in engine.subforms
    assert ("T3,1", "T4,3") in engine.subforms
    assert ("P3,1", "P4,4") not in engine.subforms
    assert not any(small[0] != large[0] for small, large in engine.subforms)


def test_undeclared_subform_pairs_are_still_dominance_checked(captured_logger):
    logger, _ = captured_logger
    engine = _engine({
        "T2,1": _entry(threshold=(1, "inf")),
        "T3,1": _entry(threshold=(2, 5, "inf"), polyform="T3_1"),
    })
    assert engine.subforms == [("T2,1", "T3,1")]
    report = engine.run_all(entry="T2,1", logger=logger)
    assert any("is a subform of T3,1" in f for f in report.entries[0].threshold.failures)


def test_generations_put_bases_first():
    graph = ClaimGraph({"P4,4": load_catalog_config(CATALOG)["ANIMALS"]["P4,4"]})
    order = [k for gen in ClaimGraph.generations(graph.graph) for k in gen]
    assert order.index(ClaimKey("P4,4", GameSpec(1, 1, 2))) < order.index(ClaimKey("P4,4", GameSpec(2, 3)))
    assert order.index(ClaimKey("P4,4", GameSpec(1, 1, 3))) < order.index(ClaimKey("P4,4", GameSpec(3, 5)))


# --- Checking ---
def test_empty_catalog_passes(captured_logger):
    logger, stream = captured_logger
    report = _engine({}).run_all(logger=logger)
    assert report.entries == ()
    assert report.exit_code == 0
    assert "0 entries verified" in stream.getvalue()


def test_single_entry_reproduces(captured_logger, tmp_path):
    logger, stream = captured_logger
    engine = CatalogEngine.from_file(CATALOG)
    report = engine.run_all(entry="T2,1", logger=logger)
    assert report.ok, "\n".join(format_report(report))
    entry = report.entries[0]
    assert [str(c.key.game) for c in entry.claims] == ["(1,2)", "(1,3)"]
    assert {x.key.game for x in entry.cross_checks} == {GameSpec(1, 2), GameSpec(1, 3)}
    assert "✅ Catalog reproduces: 1 entries verified." in stream.getvalue()

    out = tmp_path / "report.json"
    write_json(report, out)
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["ok"] is True
    assert data["entries"][0]["claims"][0]["verdict"]["status"] == Status.MAKER_WINS.value


def test_derived_claims_follow_their_base(captured_logger):
    logger, _ = captured_logger
    report = CatalogEngine.from_file(CATALOG).run_all(entry="T4,3", logger=logger)
    claims = {c.key.game: c for c in report.entries[0].claims}
    derived = claims[GameSpec(2, 3)]
    assert derived.ok
    assert derived.verdict.witness == "reduce (1->2,1)"


def test_unknown_entry_gets_a_hint():
    engine = CatalogEngine.from_file(CATALOG)
    with pytest.raises(ValueError, match="Did you mean 'T2,1'"):
        engine.run_all(entry="T2,2")


def test_wrong_claims_fail_the_check(captured_logger):
    logger, stream = captured_logger
    engine = _engine({"T2,1": _entry(
        _claim("1,2", "breaker", "surround"), _claim("1,3", "breaker", "surround"),
    )})
    report = engine.run_all(logger=logger)
    assert report.exit_code == 1
    failing = [c for c in report.entries[0].claims if not c.ok]
    assert [c.key.game for c in failing] == [GameSpec(1, 2)]
    # the solver wins the falsely claimed breaker game
    assert not report.entries[0].cross_checks[0].ok
    assert "🔴 Catalog check failed for T2,1." in stream.getvalue()


def test_missing_witness_file_becomes_unknown():
    verifier = EntryVerifier({"ANIMALS": {"T2,1": _entry()}, "SETTINGS": {}}, DATA_DIR)
    goal = verifier.goal("T2,1")
    claim = _claim("1,3", "breaker", "paving", FILE="pavings/none.txt")
    v = verifier.verify_claim(goal, ClaimKey("T2,1", GameSpec(1, 3)), claim, {})
    assert v.status is Status.UNKNOWN
    assert "not found" in v.detail


def test_reduce_lifts_a_plain_single_mark_win():
    verifier = EntryVerifier({"ANIMALS": {}, "SETTINGS": {}}, DATA_DIR)
    base_key = ClaimKey("P4,1", GameSpec(1, 1))
    results = {base_key: maker_wins(GameSpec(1, 1), "solver")}
    claim = _claim("2,3", "maker", "reduce", FROM="1,1")
    v = verifier.verify_claim(None, ClaimKey("P4,1", GameSpec(2, 3)), claim, results)
    assert v.status is Status.MAKER_WINS
    claim = _claim("2,4", "maker", "reduce", FROM="1,1")
    assert verifier.verify_claim(None, ClaimKey("P4,1", GameSpec(2, 4)), claim, results).status is Status.UNKNOWN


# --- Description ---
def test_describe_lists_tables_and_derivations():
    text = CatalogEngine.from_file(CATALOG).describe()
    assert text.startswith("# PolyAchieve Catalog")
    assert "| P4,5 | (1,3,11,∞) |" in text
    assert "```mermaid\ngraph TD;" in text
    assert "P4_4_1_to2_1 --> P4_4_2_3;" in text
    assert "classDef certificate" in text
    assert _engine({}).describe().count("Catalog is empty") == 1


if __name__ == "__main__":
    sys.exit(pytest.main(["-v", __file__]))
