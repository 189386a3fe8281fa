"""DFS linearization of graphs into ``( <Rk> concept :rel ... )`` token sequences and back."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Dict, List, NamedTuple, Optional, Tuple

from .graph import (
    VARIABLE_TOKEN,
    AmrGraph,
    Edge,
    Node,
    assign_variables,
    is_valid_concept,
    require_connected,
    sanitize_concept,
    traverse,
)

_TAG = re.compile(r"^<([^<>\s]+)>$")


class LinearizeError(ValueError):
    pass


@dataclass(frozen=True)
class LinearSeq:
    tokens: Tuple[str, ...]
    task_tag: Optional[str] = None

    def to_line(self) -> str:
        prefix = [f"<{self.task_tag}>"] if self.task_tag else []
        return " ".join(prefix + list(self.tokens))

    __str__ = to_line

    @classmethod
    def from_line(cls, line: str) -> "LinearSeq":
        tokens = line.split()
        tag = None
        if tokens and _TAG.match(tokens[0]) and not VARIABLE_TOKEN.match(tokens[0]):
            tag = _TAG.match(tokens[0]).group(1)
            tokens = tokens[1:]
        return cls(tuple(tokens), tag)


def linearize(graph: AmrGraph) -> LinearSeq:
    require_connected(graph)
    names = assign_variables(graph)
    out: List[str] = []
    for kind, item in traverse(graph):
        if kind == "open":
            out += ["(", names[item], graph.nodes[item].concept]
        elif kind == "edge":
            out.append(item.label)
        elif kind == "ref":
            out.append(names[item])
        elif kind == "const":
            out.append(graph.nodes[item].concept)
        else:
            out.append(")")
    return LinearSeq(tuple(out))


def tag_sequence(seq: LinearSeq, tag: str) -> LinearSeq:
    """Set (or replace) the task tag; ``"AMR"`` serializes as a leading ``<AMR>``."""
    m = _TAG.match(tag)
    if m:
        tag = m.group(1)
    if not tag or re.search(r"\s|[<>]", tag):
        raise ValueError(f"invalid task tag {tag!r}")
    return replace(seq, task_tag=tag)


class Restored(NamedTuple):
    graph: AmrGraph
    repairs: Tuple[str, ...]


def _is_relation(tok: str) -> bool:
    return tok.startswith(":") and len(tok) > 1


class _Reader:
    def __init__(self, tokens, lenient: bool):
        self.tokens = list(tokens)
        self.pos = 0
        self.lenient = lenient
        self.repairs: List[str] = []
        self.concepts: List[str] = []
        self.constant: List[bool] = []
        self.edges: List[Tuple[int, str, int]] = []
        self.var_ids: Dict[str, int] = {}
        self.placeholders = set()

    def fail(self, msg: str) -> None:
        if not self.lenient:
            raise LinearizeError(f"token {self.pos}: {msg}")
        self.repairs.append(msg)

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def new_node(self, concept: str, constant: bool = False) -> int:
        self.concepts.append(concept)
        self.constant.append(constant)
        return len(self.concepts) - 1

    def reference(self, var: str) -> int:
        if var in self.var_ids:
            return self.var_ids[var]
        self.fail(f"reference to undeclared variable {var}")
        nid = self.new_node(var[1:-1])
        self.var_ids[var] = nid
        self.placeholders.add(var)
        return nid

    def open_node(self) -> int:
        """Read ``<Rk> concept`` after an opening paren and return the node id."""
        tok = self.peek()
        if tok is not None and VARIABLE_TOKEN.match(tok):
            self.pos += 1
            if tok in self.placeholders:
                # a declaration after a forward reference fills the placeholder in
                self.placeholders.discard(tok)
                nid = self.var_ids[tok]
            elif tok in self.var_ids:
                self.fail(f"duplicate declaration of {tok}")
                nxt = self.peek()
                if nxt is not None and nxt not in ("(", ")") and not _is_relation(nxt) and not VARIABLE_TOKEN.match(nxt):
                    self.pos += 1  # the duplicate's concept is dropped
                return self.var_ids[tok]
            else:
                nid = self.new_node("thing")
                self.var_ids[tok] = nid
            fallback = tok[1:-1]
        else:
            self.fail("'(' not followed by a variable")
            nid = self.new_node("thing")
            fallback = "thing"
        tok = self.peek()
        if tok is None or tok in ("(", ")") or _is_relation(tok) or VARIABLE_TOKEN.match(tok):
            self.fail("missing concept after variable")
            self.concepts[nid] = fallback
        else:
            self.pos += 1
            self.concepts[nid] = self.checked(tok)
        return nid

    def checked(self, concept: str) -> str:
        if is_valid_concept(concept):
            return concept
        self.fail(f"illegal concept {concept!r}")
        return sanitize_concept(concept)

    def parse(self) -> AmrGraph:
        if not self.tokens:
            raise LinearizeError("empty sequence")
        if self.peek() == "(":
            self.pos += 1
        else:
            self.fail("sequence does not start with '('")
        root = self.open_node()
        stack = [root]
        while stack:
            tok = self.peek()
            if tok is None:
                self.fail("unbalanced parentheses: missing ')'")
                stack.pop()
                continue
            if tok == ")":
                self.pos += 1
                stack.pop()
                continue
            self.pos += 1
            if not _is_relation(tok):
                self.fail(f"expected a relation, got {tok!r}")
                continue
            target = self.peek()
            if target is None or target == ")" or _is_relation(target):
                self.fail(f"dangling relation {tok}")
                continue
            self.pos += 1
            if target == "(":
                child = self.open_node()
                self.add_edge(stack[-1], tok, child)
                stack.append(child)
            elif VARIABLE_TOKEN.match(target):
                self.add_edge(stack[-1], tok, self.reference(target))
            else:
                self.add_edge(stack[-1], tok, self.new_node(self.checked(target), constant=True))
        if self.pos < len(self.tokens):
            self.fail(f"trailing tokens after the root closes: {self.tokens[self.pos]!r}")
        nodes = tuple(Node(i, c, k) for i, (c, k) in enumerate(zip(self.concepts, self.constant)))
        return AmrGraph(nodes, tuple(Edge(*e) for e in self.edges), root)

    def add_edge(self, source: int, label: str, target: int) -> None:
        if source == target:
            self.fail(f"self-loop through {label}")
        else:
            self.edges.append((source, label, target))


def restore(seq: LinearSeq, mode: str = "strict") -> Restored:
    """Rebuild a graph from a token sequence, returning the repairs made.

    ``strict`` raises :class:`LinearizeError` on any deviation from the
    linearization grammar.  ``lenient`` repairs common decoder failures:
    unclosed parentheses are closed, dangling relations dropped, undeclared
    variables become fresh nodes (named after the variable) and duplicate
    declarations fold into the first one.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown mode {mode!r}")
    reader = _Reader(seq.tokens, lenient=mode == "lenient")
    graph = reader.parse()
    return Restored(graph, tuple(reader.repairs))


def delinearize(seq: LinearSeq, mode: str = "strict") -> AmrGraph:
    return restore(seq, mode).graph
