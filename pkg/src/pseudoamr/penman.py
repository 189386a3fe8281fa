"""Penman text serialization for :class:`AmrGraph`.

Only the subset needed for AMR corpora is supported: ``(var / concept
:rel ...)`` nodes, bare variable references (re-entrancies, forward
references allowed), and constants (quoted strings, numbers, ``-``/``+``
and other bare symbols that are not declared variables).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

from .graph import (
    AmrGraph,
    Edge,
    GraphError,
    Node,
    assign_variables,
    require_connected,
    sanitize_concept,
    traverse,
)

# Bare undeclared symbols shaped like this are treated as variable references, not constants.
_VARIABLE_LIKE = re.compile(r"^[A-Za-z][A-Za-z]?\d*$")
_TOKEN = re.compile(r'\s*(\(|\)|/|"(?:[^"\\]|\\.)*"|:[^\s()"]*|[^\s()"]+)')


class PenmanError(ValueError):
    pass


@dataclass(frozen=True)
class PenmanBlock:
    """One blank-line separated entry of a Penman file."""

    metadata: Tuple[str, ...]
    body: str
    line: int  # 1-based line of the first line of the block


def _var_name(token: str) -> str:
    return token[1:-1]


def to_penman(graph: AmrGraph) -> str:
    """Serialize a connected graph on one line, variables named ``R0``, ``R1``, ..."""
    require_connected(graph)
    names = {v: _var_name(tok) for v, tok in assign_variables(graph).items()}
    out: List[str] = []
    for kind, item in traverse(graph):
        if kind == "open":
            out.append(f"({names[item]} / {graph.nodes[item].concept}")
        elif kind == "edge":
            out.append(f" {item.label} ")
        elif kind == "ref":
            out.append(names[item])
        elif kind == "const":
            out.append(graph.nodes[item].concept)
        else:
            out.append(")")
    return "".join(out)


def _tokenize(text: str) -> List[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PenmanError(f"cannot tokenize near {text[pos:pos + 20]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def _constant_text(token: str) -> str:
    if token.startswith('"'):
        inner = token[1:-1].replace('\\"', "''")
        return '"' + (sanitize_concept(inner) if re.search(r"\s|[()]", inner) else inner) + '"'
    return token


def from_penman(text: str) -> AmrGraph:
    """Parse one Penman graph.

    Raises :class:`PenmanError` on unbalanced parentheses, undeclared variable
    references and duplicate variable declarations.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PenmanError("empty Penman text")
    declared = set()
    for i, tok in enumerate(tokens[:-1]):
        if tok == "(":
            var = tokens[i + 1]
            if var in declared:
                raise PenmanError(f"duplicate variable declaration {var!r}")
            declared.add(var)

    nodes: List[Node] = []
    edges: List[Tuple[int, str, object]] = []  # target is a node id or ("ref", var)
    var_ids: Dict[str, int] = {}
    pos = 0

    def expect(tok: str) -> None:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            got = tokens[pos] if pos < len(tokens) else "end of input"
            raise PenmanError(f"expected {tok!r}, got {got!r}")
        pos += 1

    def parse_node() -> int:
        nonlocal pos
        expect("(")
        if pos >= len(tokens) or tokens[pos] in "()/" or tokens[pos].startswith(":"):
            raise PenmanError("missing variable after '('")
        var = tokens[pos]
        pos += 1
        expect("/")
        if pos >= len(tokens) or tokens[pos] in ("(", ")"):
            raise PenmanError(f"missing concept for variable {var!r}")
        concept = _constant_text(tokens[pos]) if tokens[pos].startswith('"') else tokens[pos]
        pos += 1
        nid = len(nodes)
        try:
            nodes.append(Node(nid, concept))
        except GraphError as exc:
            raise PenmanError(str(exc)) from None
        var_ids[var] = nid
        while pos < len(tokens) and tokens[pos] != ")":
            label = tokens[pos]
            if not label.startswith(":") or len(label) < 2:
                raise PenmanError(f"expected a relation, got {label!r}")
            pos += 1
            if pos >= len(tokens):
                raise PenmanError("unbalanced parentheses: input ends after a relation")
            tok = tokens[pos]
            if tok == "(":
                slot = len(edges)
                edges.append(None)  # keep the edge ahead of the child's own edges
                edges[slot] = (nid, label, parse_node())
            elif tok == ")" or tok.startswith(":"):
                raise PenmanError(f"relation {label} has no target")
            else:
                pos += 1
                if tok in declared:
                    edges.append((nid, label, ("ref", tok)))
                elif not tok.startswith('"') and _VARIABLE_LIKE.match(tok):
                    raise PenmanError(f"reference to undeclared variable {tok!r}")
                else:
                    cid = len(nodes)
                    nodes.append(Node(cid, _constant_text(tok), constant=True))
                    edges.append((nid, label, cid))
        if pos >= len(tokens):
            raise PenmanError("unbalanced parentheses: missing ')'")
        expect(")")
        return nid

    parse_node()
    if pos != len(tokens):
        if tokens[pos] == ")":
            raise PenmanError("unbalanced parentheses: extra ')'")
        raise PenmanError(f"trailing tokens after graph: {tokens[pos]!r}")
    try:
        final = tuple(
            Edge(s, lab, var_ids[t[1]] if isinstance(t, tuple) else t)  # type: ignore[index]
            for s, lab, t in edges
        )
    except GraphError as exc:
        raise PenmanError(str(exc)) from None
    return AmrGraph(tuple(nodes), final, 0)


def split_blocks(text: str) -> Iterator[PenmanBlock]:
    """Split a Penman file on blank lines; ``#`` lines become block metadata.

    Chunks holding only comments (file headers) are skipped.
    """
    meta: List[str] = []
    body: List[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines() + [""], 1):
        if not line.strip():
            if body:
                yield PenmanBlock(tuple(meta), "\n".join(body), start)
            meta, body = [], []
            start = lineno + 1
        elif line.lstrip().startswith("#"):
            meta.append(line.rstrip())
        else:
            body.append(line)


def read_penman(text: str) -> List[Tuple[Tuple[str, ...], AmrGraph]]:
    """Parse every block, raising on the first malformed one."""
    out = []
    for block in split_blocks(text):
        try:
            out.append((block.metadata, from_penman(block.body)))
        except PenmanError as exc:
            raise PenmanError(f"block at line {block.line}: {exc}") from None
    return out


def format_entry(graph: AmrGraph, metadata: Tuple[str, ...] = ()) -> str:
    return "".join(m + "\n" for m in metadata) + to_penman(graph) + "\n"


def write_penman(entries) -> str:
    return "\n".join(format_entry(g, meta) for meta, g in entries)
