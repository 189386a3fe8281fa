"""SRL frames to PseudoAMR: connectivity formation, argument reduction and
reentrancy restoration (dictionary-based or dependency guided)."""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .graph import AmrGraph, Edge, Node, compact, sanitize_concept
from .ingest import Argument, DepTree, SrlFrame, SrlFrameSet

RESTORATIONS = ("none", "dfs", "dependency_guided")


class SrlAmrizeError(ValueError):
    pass


@dataclass(frozen=True)
class SrlAmrizeConfig:
    argument_reduction: bool = False
    restoration: str = "none"
    virtual_root_concept: str = "multi-sentence"
    virtual_edge_prefix: str = ":snt"

    def __post_init__(self):
        if self.restoration not in RESTORATIONS:
            raise ValueError(f"unknown restoration {self.restoration!r}; expected one of {RESTORATIONS}")

    @property
    def needs_dependencies(self) -> bool:
        return self.argument_reduction or self.restoration == "dependency_guided"


# Ablation rows; "dependency-guided" pairs argument reduction with the guided restoration.
SRL_PRESETS: Dict[str, SrlAmrizeConfig] = {
    "trivial": SrlAmrizeConfig(),
    "arg-reduction": SrlAmrizeConfig(argument_reduction=True),
    "reentrancy": SrlAmrizeConfig(restoration="dfs"),
    "all": SrlAmrizeConfig(argument_reduction=True, restoration="dfs"),
    "dependency-guided": SrlAmrizeConfig(argument_reduction=True, restoration="dependency_guided"),
}


def srl_preset(name: str, restoration: Optional[str] = None) -> SrlAmrizeConfig:
    key = name.replace("_", "-")
    if key not in SRL_PRESETS:
        raise ValueError(f"unknown SRL preset {name!r}; expected one of {sorted(SRL_PRESETS)}")
    cfg = SRL_PRESETS[key]
    return replace(cfg, restoration=restoration) if restoration else cfg


def sense_to_concept(sense: str) -> str:
    """``want.01`` -> ``want-01``."""
    return sanitize_concept(re.sub(r"\.(\d+)$", r"-\1", sense))


def _role_label(role: str) -> str:
    return role if role.startswith(":") else ":" + role


def connectivity_formation(frames: SrlFrameSet, cfg: SrlAmrizeConfig = SrlAmrizeConfig()) -> AmrGraph:
    """Hang every predicate-argument tree under one virtual root.

    Node order: root, then per frame its predicate followed by its arguments.
    Edge order: per frame the root edge, then the argument edges in input order.
    """
    if not frames.frames:
        raise SrlAmrizeError("no predicate frames")
    nodes = [Node(0, cfg.virtual_root_concept)]
    edges = []
    for i, frame in enumerate(frames.frames, 1):
        pred = len(nodes)
        nodes.append(Node(pred, sense_to_concept(frame.sense)))
        edges.append(Edge(0, f"{cfg.virtual_edge_prefix}{i}", pred))
        for arg in frame.arguments:
            nid = len(nodes)
            nodes.append(Node(nid, sanitize_concept("_".join(frames.span_text(arg.start, arg.end)))))
            edges.append(Edge(pred, _role_label(arg.role), nid))
    return AmrGraph(tuple(nodes), tuple(edges), 0)


def span_root(dep: DepTree, start: int, end: int) -> Tuple[int, bool]:
    """Head token of ``[start, end]`` and whether it was unique.

    The head is the token whose own head lies outside the span; the leftmost
    candidate wins when there are several.
    """
    inside = range(start, end + 1)
    roots = [i for i in inside if not start <= dep.head(i) <= end]
    if not roots:
        return start, False
    return roots[0], len(roots) == 1


def argument_reduction(frames: SrlFrameSet, dep: DepTree) -> SrlFrameSet:
    """Replace every multi-token argument span by its dependency head token."""
    if len(dep) != len(frames.sentence):
        raise SrlAmrizeError(
            f"dependency tree has {len(dep)} tokens, SRL sentence has {len(frames.sentence)}"
        )
    warnings = list(frames.warnings)
    new_frames = []
    for frame in frames.frames:
        args = []
        for arg in frame.arguments:
            if arg.end > arg.start:
                head, unique = span_root(dep, arg.start, arg.end)
                if not unique:
                    warnings.append(
                        f"span [{arg.start}, {arg.end}] of predicate {frame.predicate_index} "
                        f"has no unique head; using token {head}"
                    )
                arg = Argument(arg.role, head, head)
            args.append(arg)
        new_frames.append(SrlFrame(frame.predicate_index, frame.sense, tuple(args)))
    return SrlFrameSet(frames.sentence, tuple(new_frames), tuple(warnings))


def _merge(edges: List[Edge], victim: int, survivor: int) -> List[Edge]:
    """Point every edge at/from ``victim`` to ``survivor`` instead (victim becomes orphaned)."""
    out = []
    for e in edges:
        src = survivor if e.source == victim else e.source
        tgt = survivor if e.target == victim else e.target
        if src != tgt:
            out.append(Edge(src, e.label, tgt))
    return out


def _predicates(graph: AmrGraph) -> List[int]:
    return [e.target for e in graph.out_edges(graph.root)]


def reentrancy_restoration(graph: AmrGraph) -> AmrGraph:
    """Merge argument nodes with identical concepts into their first occurrence.

    Walks the predicates under the root in order and each predicate's
    arguments in order, remembering the first node seen for every concept;
    later nodes with the same concept are redirected to it.  Predicate nodes
    are never merged.
    """
    first_seen: Dict[str, int] = {}
    redirect: Dict[int, int] = {}
    for pred in _predicates(graph):
        for e in graph.out_edges(pred):
            son = e.target
            name = graph.concept(son)
            if name in first_seen:
                if first_seen[name] != son:
                    redirect[son] = first_seen[name]
            else:
                first_seen[name] = son
    if not redirect:
        return graph
    edges = list(graph.edges)
    for victim, survivor in redirect.items():
        edges = _merge(edges, victim, survivor)
    return compact(graph.nodes, edges, graph.root, (n.id for n in graph.nodes if n.id not in redirect))


def dependency_guided_restoration(
    graph: AmrGraph,
    frames: SrlFrameSet,
    dep: DepTree,
    original: Optional[SrlFrameSet] = None,
) -> AmrGraph:
    """Restore reentrancies using the sentence's dependency tree.

    ``graph`` must be the :func:`connectivity_formation` output for
    ``frames``; ``original`` (default ``frames``) supplies the pre-reduction
    spans used to test whether a predicate lies inside another frame's
    argument.

    1. argument leaves covering the same token span are merged;
    2. predicate p merges into argument a of predicate q when p's token lies
       in a's span and p's token directly depends on q's token (leftmost such
       span of q); the merged node keeps p's sense concept;
    3. the virtual root is dropped if a single predicate then reaches every node.
    """
    original = original or frames
    if len(frames.frames) != len(original.frames):
        raise SrlAmrizeError("original frames do not match the graph's frames")
    preds = _predicates(graph)
    if len(preds) != len(frames.frames):
        raise SrlAmrizeError("graph does not come from connectivity formation of these frames")
    arg_nodes: List[List[int]] = []
    for pred, frame in zip(preds, frames.frames):
        targets = [e.target for e in graph.out_edges(pred)]
        if len(targets) != len(frame.arguments):
            raise SrlAmrizeError("graph does not come from connectivity formation of these frames")
        arg_nodes.append(targets)

    edges = list(graph.edges)
    nodes = list(graph.nodes)
    alias: Dict[int, int] = {}

    def resolve(v: int) -> int:
        while v in alias:
            v = alias[v]
        return v

    # step 1: identical spans
    by_span: Dict[Tuple[int, int], int] = {}
    for frame, targets in zip(frames.frames, arg_nodes):
        for arg, node in zip(frame.arguments, targets):
            key = (arg.start, arg.end)
            if key in by_span:
                survivor, victim = resolve(by_span[key]), resolve(node)
                if victim != survivor:
                    edges = _merge(edges, victim, survivor)
                    alias[victim] = survivor
            else:
                by_span[key] = node

    # step 2: predicate inside another frame's argument and directly governed by it
    pred_set = set(preds)
    for p, frame_p in enumerate(original.frames):
        tok = frame_p.predicate_index
        for q, frame_q in enumerate(original.frames):
            if p == q or dep.head(tok) != frame_q.predicate_index:
                continue
            hit = next((k for k, a in enumerate(frame_q.arguments) if a.start <= tok <= a.end), None)
            if hit is None:
                continue
            target = resolve(arg_nodes[q][hit])
            pnode = resolve(preds[p])
            if target in pred_set or target == pnode:
                continue
            edges = _merge(edges, target, pnode)
            alias[target] = pnode
            break

    survivors = [n.id for n in nodes if n.id not in alias]
    merged = compact(nodes, edges, graph.root, survivors)

    # step 3: drop the virtual root when one predicate covers everything
    root = merged.root
    without_root = [e for e in merged.edges if e.source != root]
    indeg = [0] * len(merged.nodes)
    for e in without_root:
        indeg[e.target] += 1
    tops = [n.id for n in merged.nodes if n.id != root and indeg[n.id] == 0]
    if len(tops) == 1:
        candidate = AmrGraph(merged.nodes, tuple(without_root), tops[0])
        reach = _reachable_from(candidate, tops[0])
        if len(reach) == len(merged.nodes) - 1:
            return compact(merged.nodes, without_root, tops[0], reach)
    return merged


def _reachable_from(graph: AmrGraph, start: int) -> set:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e in graph.out_edges(v):
            if e.target not in seen:
                seen.add(e.target)
                stack.append(e.target)
    return seen


def amrize_srl(
    frames: SrlFrameSet,
    dep: Optional[DepTree] = None,
    cfg: SrlAmrizeConfig = SrlAmrizeConfig(),
) -> AmrGraph:
    """Full SRL pipeline: optional argument reduction, connectivity formation, restoration."""
    if cfg.needs_dependencies and dep is None:
        raise SrlAmrizeError("this configuration needs the sentence's dependency tree")
    built_from = argument_reduction(frames, dep) if cfg.argument_reduction else frames
    graph = connectivity_formation(built_from, cfg)
    if cfg.restoration == "dfs":
        graph = reentrancy_restoration(graph)
    elif cfg.restoration == "dependency_guided":
        graph = dependency_guided_restoration(graph, built_from, dep, original=frames)
    return graph


def amrize_srl_corpus(
    framesets: Sequence[SrlFrameSet], trees: Sequence[Optional[DepTree]], cfg: SrlAmrizeConfig
) -> List[AmrGraph]:
    return [amrize_srl(fs, dep, cfg) for fs, dep in zip(framesets, trees)]
