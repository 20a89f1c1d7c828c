# stages.py

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Sequence, Tuple

import networkx as nx

Vector = Tuple[int, ...]

WINNING = "winning"
PRE_WINNING = "pre-winning"
REGULAR = "regular"


class StageVertex(NamedTuple):
    """Progress p, supply q, and the turns n spent on each outgoing edge."""
    p: Vector
    q: Vector
    n: int
    kind: str


@dataclass
class StageDiagram:
    s: int
    b: Tuple[int, ...]
    l: Tuple[int, ...]
    vertices: Dict[Vector, StageVertex] = field(default_factory=dict)
    graph: nx.DiGraph = field(default_factory=nx.DiGraph)

    @property
    def root(self) -> Vector:
        return (0,) * self.s


def _unit(s: int, i: int) -> Vector:
    return tuple(1 if k == i else 0 for k in range(s))


def _step(p: Vector, i: int) -> Vector:
    return tuple(v + 1 if k == i else v for k, v in enumerate(p))


def classify(p: Vector, l: Sequence[int]) -> Tuple[str, int]:
    """Vertex kind and the coordinate it concerns (-1 for regular vertices)."""
    for i, (pi, li) in enumerate(zip(p, l)):
        if pi == li:
            return WINNING, i
    for i, (pi, li) in enumerate(zip(p, l)):
        if pi == li - 1:
            return PRE_WINNING, i
    return REGULAR, -1


def combine(children: Sequence[Vector], b: Sequence[int]) -> Tuple[int, Vector]:
    """
    n and q of a regular vertex from the supply vectors of its s children.

    n = 1 + sum_i (q^(i)(i) - 1)(b_i + 1)
    q(i) = max({n} u {q^(j)(i) + n(b + s) : j != i, q^(j)(i) > 0})
    """
    s = len(b)
    total_b = sum(b)
    n = 1 + sum((children[i][i] - 1) * (b[i] + 1) for i in range(s))
    q = []
    for i in range(s):
        options = [n] + [
            children[j][i] + n * (total_b + s)
            for j in range(s) if j != i and children[j][i] > 0
        ]
        q.append(max(options))
    return n, tuple(q)


def build_diagram(s: int, b: Sequence[int], l: Sequence[int]) -> StageDiagram:
    """
    Stage diagram of an s-part composition, computed from the winning vertices up.

    A vertex one step from winning in coordinate i has a single dashed edge of one
    turn and inherits q = e_i.
    """
    if s < 1 or len(b) != s or len(l) != s:
        raise ValueError(f"❌ Stage diagram needs s >= 1 and s entries in b and l (s={s}, b={list(b)}, l={list(l)}).")
    if any(li < 1 for li in l):
        raise ValueError(f"❌ Every l_i must be at least 1 (l={list(l)}).")
    if any(bi < 0 for bi in b):
        raise ValueError(f"❌ Every b_i must be non-negative (b={list(b)}).")

    diagram = StageDiagram(s, tuple(b), tuple(l))

    def visit(p: Vector) -> StageVertex:
        if p in diagram.vertices:
            return diagram.vertices[p]
        kind, i = classify(p, l)
        diagram.graph.add_node(p)
        if kind == WINNING:
            vertex = StageVertex(p, _unit(s, i), 0, kind)
        elif kind == PRE_WINNING:
            child = _step(p, i)
            visit(child)
            diagram.graph.add_edge(p, child, turns=1, dashed=True)
            vertex = StageVertex(p, _unit(s, i), 1, kind)
        else:
            children = [_step(p, i) for i in range(s)]
            qs = [visit(c).q for c in children]
            n, q = combine(qs, b)
            for c in children:
                diagram.graph.add_edge(p, c, turns=n, dashed=False)
            vertex = StageVertex(p, q, n, kind)
        diagram.vertices[p] = vertex
        return vertex

    visit(diagram.root)
    return diagram


def total_turn_bound(d: StageDiagram) -> int:
    """The heaviest root-to-winning path, weighted by edge turn counts."""
    longest: Dict[Vector, int] = {}
    for node in reversed(list(nx.topological_sort(d.graph))):
        out = [data["turns"] + longest[child] for _, child, data in d.graph.out_edges(node, data=True)]
        longest[node] = max(out) if out else 0
    return longest[d.root]


def stage_feasibility(n_j: int, k: Sequence[int], b: Sequence[int]) -> bool:
    """The counting inequality sum_i k_i (b_i + 1) >= n_j."""
    if len(k) != len(b):
        raise ValueError(f"❌ k and b must have equal length (got {len(k)} and {len(b)}).")
    return sum(ki * (bi + 1) for ki, bi in zip(k, b)) >= n_j


# --- Output ---
def _vec(v: Vector) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def diagram_rows(d: StageDiagram) -> List[Tuple[str, str, str, str]]:
    """(p, q, n, kind) rows ordered by p."""
    return [
        (_vec(v.p), _vec(v.q), str(v.n) if v.kind != WINNING else "-", v.kind)
        for _, v in sorted(d.vertices.items())
    ]


def format_table(d: StageDiagram) -> str:
    rows = [("p", "q", "n", "kind")] + diagram_rows(d)
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.append(f"total bound: {total_turn_bound(d)}")
    return "\n".join(lines)


def generate_mermaid_diagram(d: StageDiagram) -> str:
    """Mermaid graph of the diagram; dashed edges lead into winning vertices."""
    def node_id(p: Vector) -> str:
        return "p" + "_".join(str(x) for x in p)

    lines = ["graph TD;"]
    for p, v in sorted(d.vertices.items()):
        style = "win" if v.kind == WINNING else "stage"
        lines.append(f'    {node_id(p)}["p={_vec(p)} q={_vec(v.q)}"]:::{style};')
    for u, w, data in sorted(d.graph.edges(data=True)):
        arrow = f"-. {data['turns']} .->" if data["dashed"] else f"-- {data['turns']} -->"
        lines.append(f"    {node_id(u)} {arrow} {node_id(w)};")
    lines.append("    classDef win fill:#d4edda,stroke:#155724,color:#155724;")
    lines.append("    classDef stage fill:#e2e3e5,stroke:#383d41,color:#383d41;")
    return "\n".join(lines)
