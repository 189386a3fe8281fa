"""Rooted, directed, labeled concept graphs shared by AMR and PseudoAMR.

Graphs are immutable values.  The order of ``edges`` is significant: it fixes
the child order of every node and therefore the depth-first traversal used for
variable assignment, Penman output and linearization.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

VARIABLE_TOKEN = re.compile(r"^<R\d+>$")
RELATION_LABEL = re.compile(r"^:[^\s()]+$")
_BAD_CONCEPT = re.compile(r"[\s()]")


class GraphError(ValueError):
    """Raised for structurally invalid graphs or graph operations."""


def variable_token(k: int) -> str:
    return f"<R{k}>"


def is_valid_concept(concept: str) -> bool:
    return bool(concept) and not _BAD_CONCEPT.search(concept) and not VARIABLE_TOKEN.match(concept)


def sanitize_concept(text: str) -> str:
    """Turn arbitrary token text into a legal concept label.

    Whitespace becomes ``_``; brackets and double quotes get PTB-style
    escapes so the result survives Penman and linearized round trips.
    """
    text = re.sub(r"\s+", "_", text.strip())
    text = text.replace("(", "-LRB-").replace(")", "-RRB-").replace('"', "''")
    if VARIABLE_TOKEN.match(text):
        text = "-LT-" + text[1:-1] + "-GT-"
    return text or "_"


@dataclass(frozen=True)
class Node:
    id: int
    concept: str
    # constants (":polarity -", ":op1 \"Paris\"") are leaves that carry no variable
    constant: bool = False

    def __post_init__(self):
        if self.id < 0:
            raise GraphError(f"negative node id {self.id}")
        if not is_valid_concept(self.concept):
            raise GraphError(f"illegal concept {self.concept!r} on node {self.id}")


@dataclass(frozen=True)
class Edge:
    source: int
    label: str
    target: int

    def __post_init__(self):
        if self.source == self.target:
            raise GraphError(f"self-loop on node {self.source}")
        if not RELATION_LABEL.match(self.label):
            raise GraphError(f"illegal relation label {self.label!r}")


@dataclass(frozen=True)
class ValidationReport:
    well_formed: bool
    connected: bool
    acyclic: bool
    unreachable_nodes: Tuple[int, ...] = ()
    cycle_witness: Optional[Tuple[Edge, ...]] = None
    problems: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        """Strict AMR requirement: well formed and connected."""
        return self.well_formed and self.connected


@dataclass(frozen=True)
class AmrGraph:
    nodes: Tuple[Node, ...]
    edges: Tuple[Edge, ...]
    root: int
    _children: Dict[int, Tuple[Edge, ...]] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        children: Dict[int, List[Edge]] = {}
        for e in self.edges:
            children.setdefault(e.source, []).append(e)
        object.__setattr__(self, "_children", {k: tuple(v) for k, v in children.items()})

    @classmethod
    def build(cls, concepts: Sequence[str], edges: Iterable[Tuple[int, str, int]], root: int = 0) -> "AmrGraph":
        """Convenience constructor from a concept list and ``(src, label, tgt)`` triples."""
        nodes = tuple(Node(i, c) for i, c in enumerate(concepts))
        return cls(nodes, tuple(Edge(s, lab, t) for s, lab, t in edges), root)

    def __len__(self) -> int:
        return len(self.nodes)

    def concept(self, node_id: int) -> str:
        return self.nodes[node_id].concept

    def out_edges(self, node_id: int) -> Tuple[Edge, ...]:
        return self._children.get(node_id, ())

    def indegrees(self) -> List[int]:
        deg = [0] * len(self.nodes)
        for e in self.edges:
            deg[e.target] += 1
        return deg


def _structural_problems(graph: AmrGraph) -> List[str]:
    n = len(graph.nodes)
    problems = []
    if n == 0:
        problems.append("graph has no nodes")
    for pos, node in enumerate(graph.nodes):
        if node.id != pos:
            problems.append(f"node at position {pos} has id {node.id}")
    if not 0 <= graph.root < n:
        problems.append(f"root {graph.root} is not a node")
    elif graph.nodes[graph.root].constant:
        problems.append("root is a constant")
    for e in graph.edges:
        for end in (e.source, e.target):
            if not 0 <= end < n:
                problems.append(f"edge {e.source} {e.label} {e.target} has dangling endpoint {end}")
        if 0 <= e.source < n and graph.nodes[e.source].constant:
            problems.append(f"constant node {e.source} has an outgoing edge")
    if not problems:
        for node, deg in zip(graph.nodes, graph.indegrees()):
            if node.constant and deg > 1:
                problems.append(f"constant node {node.id} has {deg} parents")
    return problems


def _reachable(graph: AmrGraph) -> List[bool]:
    seen = [False] * len(graph.nodes)
    stack = [graph.root]
    seen[graph.root] = True
    while stack:
        v = stack.pop()
        for e in graph.out_edges(v):
            if not seen[e.target]:
                seen[e.target] = True
                stack.append(e.target)
    return seen


def _find_cycle(graph: AmrGraph) -> Optional[Tuple[Edge, ...]]:
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * len(graph.nodes)
    for start in range(len(graph.nodes)):
        if color[start] != WHITE:
            continue
        color[start] = GREY
        path: List[Edge] = []
        stack = [(start, iter(graph.out_edges(start)))]
        while stack:
            v, it = stack[-1]
            e = next(it, None)
            if e is None:
                color[v] = BLACK
                stack.pop()
                if path:
                    path.pop()
                continue
            if color[e.target] == GREY:
                # back edge closes a cycle; keep only the looping part of the path
                cycle = [e]
                for pe in reversed(path):
                    cycle.append(pe)
                    if pe.source == e.target:
                        break
                return tuple(reversed(cycle))
            if color[e.target] == WHITE:
                color[e.target] = GREY
                path.append(e)
                stack.append((e.target, iter(graph.out_edges(e.target))))
    return None


def validate(graph: AmrGraph) -> ValidationReport:
    """Report well-formedness, root reachability and acyclicity without raising."""
    problems = _structural_problems(graph)
    if problems:
        return ValidationReport(False, False, False, problems=tuple(problems))
    seen = _reachable(graph)
    unreachable = tuple(i for i, s in enumerate(seen) if not s)
    cycle = _find_cycle(graph)
    return ValidationReport(
        well_formed=True,
        connected=not unreachable,
        acyclic=cycle is None,
        unreachable_nodes=unreachable,
        cycle_witness=cycle,
    )


def require_connected(graph: AmrGraph) -> None:
    report = validate(graph)
    if not report.well_formed:
        raise GraphError("; ".join(report.problems))
    if not report.connected:
        raise GraphError(f"node {report.unreachable_nodes[0]} is unreachable from the root")


def traverse(graph: AmrGraph) -> Iterator[Tuple[str, object]]:
    """Root-first depth-first walk following edge-list order.

    Yields ``("open", node)`` on the first visit of a node, ``("edge", edge)``
    before following an edge, ``("ref", node)`` when an edge reaches an
    already-open node (re-entrancy or back edge), ``("const", node)`` for
    constant leaves and ``("close", node)`` when a node's edges are exhausted.
    """
    seen = {graph.root}
    yield ("open", graph.root)
    stack = [(graph.root, iter(graph.out_edges(graph.root)))]
    while stack:
        v, it = stack[-1]
        e = next(it, None)
        if e is None:
            stack.pop()
            yield ("close", v)
            continue
        yield ("edge", e)
        t = e.target
        if graph.nodes[t].constant:
            yield ("const", t)
        elif t in seen:
            yield ("ref", t)
        else:
            seen.add(t)
            yield ("open", t)
            stack.append((t, iter(graph.out_edges(t))))


def assign_variables(graph: AmrGraph) -> Dict[int, str]:
    """Map every non-constant node to ``<Rk>``, k being its DFS discovery rank."""
    require_connected(graph)
    mapping: Dict[int, str] = {}
    for kind, v in traverse(graph):
        if kind == "open":
            mapping[v] = variable_token(len(mapping))  # type: ignore[index]
    return mapping


def reentrancy_count(graph: AmrGraph) -> int:
    return sum(d - 1 for d in graph.indegrees() if d > 1)


def compact(nodes: Sequence[Node], edges: Iterable[Edge], root: int, keep: Iterable[int]) -> AmrGraph:
    """Drop nodes not in ``keep`` (with their edges) and renumber the rest densely."""
    keep_set = set(keep)
    remap = {}
    new_nodes = []
    for node in nodes:
        if node.id in keep_set:
            remap[node.id] = len(new_nodes)
            new_nodes.append(Node(len(new_nodes), node.concept, node.constant))
    new_edges = tuple(
        Edge(remap[e.source], e.label, remap[e.target])
        for e in edges
        if e.source in remap and e.target in remap
    )
    return AmrGraph(tuple(new_nodes), new_edges, remap[root])


def isomorphic(g1: AmrGraph, g2: AmrGraph) -> bool:
    """Rooted isomorphism respecting concepts, constant flags and edge labels."""
    import networkx as nx
    from networkx.algorithms.isomorphism import DiGraphMatcher

    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return False

    def as_nx(g: AmrGraph):
        h = nx.DiGraph()
        for node in g.nodes:
            h.add_node(node.id, label=(node.concept, node.constant, node.id == g.root))
        for e in g.edges:
            if h.has_edge(e.source, e.target):
                h[e.source][e.target]["labels"].append(e.label)
            else:
                h.add_edge(e.source, e.target, labels=[e.label])
        for _, _, data in h.edges(data=True):
            data["labels"] = tuple(sorted(data["labels"]))
        return h

    matcher = DiGraphMatcher(
        as_nx(g1),
        as_nx(g2),
        node_match=lambda a, b: a["label"] == b["label"],
        edge_match=lambda a, b: a["labels"] == b["labels"],
    )
    return matcher.is_isomorphic()
