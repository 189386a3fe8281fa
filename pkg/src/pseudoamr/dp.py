"""Dependency trees to PseudoAMR: redundant relation removal and token lemmatization."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable

from .graph import AmrGraph, Edge, Node, sanitize_concept
from .ingest import DepTree, Token
from .lemmatizer import lemmatize_token

DEFAULT_BLOCKLIST = frozenset({"PUNCT", "DET", "MARK", "ROOT"})


@dataclass(frozen=True)
class DpAmrizeConfig:
    relation_blocklist: FrozenSet[str] = field(default=DEFAULT_BLOCKLIST)
    lemmatize: bool = True

    def __post_init__(self):
        labels = frozenset(self.relation_blocklist)
        if any(lab != lab.upper() for lab in labels):
            raise ValueError("blocklist labels must be upper-case")
        object.__setattr__(self, "relation_blocklist", labels)


DP_PRESETS: Dict[str, DpAmrizeConfig] = {
    "trivial": DpAmrizeConfig(frozenset(), lemmatize=False),
    "lemma": DpAmrizeConfig(frozenset(), lemmatize=True),
    "rel-removal": DpAmrizeConfig(DEFAULT_BLOCKLIST, lemmatize=False),
    "all": DpAmrizeConfig(DEFAULT_BLOCKLIST, lemmatize=True),
}


def dp_preset(name: str) -> DpAmrizeConfig:
    key = name.replace("_", "-")
    if key not in DP_PRESETS:
        raise ValueError(f"unknown DP preset {name!r}; expected one of {sorted(DP_PRESETS)}")
    return DP_PRESETS[key]


def redundant_relation_removal(dep: DepTree, blocklist: Iterable[str]) -> DepTree:
    """Delete every token attached by a blocklisted relation, with its subtree.

    ``ROOT`` in the blocklist only clears the root token's relation label, so
    the root always survives.  Surviving tokens keep their original indices.
    """
    blocked = frozenset(blocklist)
    removed = set()
    for tok, head, rel in zip(dep.tokens, dep.heads, dep.relations):
        if head != 0 and rel in blocked and tok.index not in removed:
            removed.update(dep.subtree(tok.index))
    keep = [k for k, tok in enumerate(dep.tokens) if tok.index not in removed]
    rels = tuple(
        "" if dep.heads[k] == 0 and "ROOT" in blocked else dep.relations[k]
        for k in keep
    )
    return DepTree(tuple(dep.tokens[k] for k in keep), tuple(dep.heads[k] for k in keep), rels)


def lemmatize_tree(dep: DepTree) -> DepTree:
    tokens = tuple(Token(t.index, lemmatize_token(t.form), t.lemma) for t in dep.tokens)
    return DepTree(tokens, dep.heads, dep.relations)


def tree_to_graph(dep: DepTree) -> AmrGraph:
    """One node per token (sentence order), one ``:REL`` edge per arc, edges ordered by dependent."""
    ids = {tok.index: k for k, tok in enumerate(dep.tokens)}
    nodes = tuple(Node(k, sanitize_concept(tok.form)) for k, tok in enumerate(dep.tokens))
    edges = tuple(
        Edge(ids[head], ":" + (rel or "DEP"), ids[tok.index])
        for tok, head, rel in zip(dep.tokens, dep.heads, dep.relations)
        if head != 0
    )
    return AmrGraph(nodes, edges, ids[dep.root])


def amrize_dp(dep: DepTree, cfg: DpAmrizeConfig = DpAmrizeConfig()) -> AmrGraph:
    pruned = redundant_relation_removal(dep, cfg.relation_blocklist)
    if cfg.lemmatize:
        pruned = lemmatize_tree(pruned)
    return tree_to_graph(pruned)
