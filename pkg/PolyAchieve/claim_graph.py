# claim_graph.py

import difflib
from typing import Dict, List, NamedTuple

import networkx as nx

from PolyAchieve.bounds import GameSpec


class ClaimKey(NamedTuple):
    animal: str
    game: GameSpec

    def __str__(self) -> str:
        return f"{self.animal} {self.game}"


def claim_order(key: ClaimKey):
    """Sort key: animal name, then a, b and the final-turn marks."""
    return key.animal, key.game.a, key.game.b, key.game.final_marks


def get_suggestion(invalid_key: str, valid_options: List[str]) -> str:
    """Returns a 'Did you mean X?' string if a close match is found."""
    matches = difflib.get_close_matches(invalid_key, valid_options, n=1, cutoff=0.6)
    if matches:
        return f"\n   Did you mean '{matches[0]}'?"
    return ""


class ClaimGraph:
    """Claims of the catalog as a DAG; a derived claim depends on the claim it is derived from."""

    def __init__(self, animals: Dict[str, dict]):
        self._graph = self._build(animals)

    @staticmethod
    def _build(animals: Dict[str, dict]) -> nx.DiGraph:
        gr = nx.DiGraph()
        for name in sorted(animals):
            for claim in animals[name].get("CLAIMS", []):
                key = ClaimKey(name, GameSpec.parse(claim["GAME"]))
                if gr.has_node(key):
                    raise ValueError(
                        f"❌ {key} is claimed twice. Every claim carries exactly one witness."
                    )
                gr.add_node(key, **claim)

        for key, claim in gr.nodes(data=True):
            if claim.get("WITNESS") != "reduce":
                continue
            base = ClaimKey(key.animal, GameSpec.parse(claim["FROM"]))
            if not gr.has_node(base):
                own = [str(k.game) for k in gr.nodes if k.animal == key.animal]
                hint = get_suggestion(str(base.game), own)
                raise ValueError(f"❌ {key} is derived from {base}, which is not claimed.{hint}")
            gr.add_edge(base, key)

        if not nx.is_directed_acyclic_graph(gr):
            cycle_info = " -> ".join(f"{u}" for u, _ in nx.find_cycle(gr))
            raise nx.NetworkXUnfeasible(f"Circular derivation found in CLAIMS: {cycle_info}")
        return gr

    @property
    def graph(self) -> nx.DiGraph:
        return self._graph

    def claim(self, key: ClaimKey) -> dict:
        return self._graph.nodes[key]

    @staticmethod
    def generations(graph: nx.DiGraph) -> List[List[ClaimKey]]:
        """Claims grouped so that every claim comes after the claims it depends on."""
        return [sorted(gen, key=claim_order) for gen in nx.topological_generations(graph)]
