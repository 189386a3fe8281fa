"""Fine-grained breakdown: each metric filters or rewrites both triple sets, then aligns them.

Concept-related metrics: concept, ner, negation (plus no_wsd).
Topology-related metrics: unlabeled, reentrancy, srl.
"""
from __future__ import annotations

import re
from collections import Counter
from typing import Callable, Dict, Optional

from .graph import AmrGraph
from .smatch import TOP, ScoreReport, TripleSet, extract_triples, score_triples

METRICS = ("smatch", "unlabeled", "no_wsd", "concept", "ner", "negation", "reentrancy", "srl")
DUMMY_LABEL = ":label"
_SENSE = re.compile(r"-\d+$")


def unlabeled(t: TripleSet) -> TripleSet:
    return TripleSet.of(
        t.instances,
        ((v, r if r == TOP else DUMMY_LABEL, c) for v, r, c in t.attributes),
        ((v, DUMMY_LABEL, w) for v, _, w in t.relations),
    )


def no_wsd(t: TripleSet) -> TripleSet:
    return TripleSet.of(
        ((v, _SENSE.sub("", c)) for v, c in t.instances),
        ((v, r, _SENSE.sub("", c) if r == TOP else c) for v, r, c in t.attributes),
        t.relations,
    )


def concept(t: TripleSet) -> TripleSet:
    return TripleSet.of(t.instances)


def ner(t: TripleSet) -> TripleSet:
    """Named-entity heads, their ``:name`` nodes and everything below those."""
    heads = {v for v, r, _ in t.relations if r == ":name"}
    frontier = [w for _, r, w in t.relations if r == ":name"]
    below = set(frontier)
    children: Dict[str, list] = {}
    for v, _, w in t.relations:
        children.setdefault(v, []).append(w)
    while frontier:
        v = frontier.pop()
        for w in children.get(v, ()):
            if w not in below:
                below.add(w)
                frontier.append(w)
    keep = heads | below
    return TripleSet.of(
        ((v, c) for v, c in t.instances if v in keep),
        ((v, r, c) for v, r, c in t.attributes if v in below and r != TOP),
        ((v, r, w) for v, r, w in t.relations if v in keep and w in below),
    )


def negation(t: TripleSet) -> TripleSet:
    return TripleSet.of(attributes=(a for a in t.attributes if a[1] == ":polarity"))


def reentrancy(t: TripleSet) -> TripleSet:
    """Nodes with more than one incoming relation, those relations and both ends' instances."""
    indegree = Counter(w for _, _, w in t.relations)
    reentrant = {v for v, k in indegree.items() if k > 1}
    incoming = [(v, r, w) for v, r, w in t.relations if w in reentrant]
    ends = reentrant | {v for v, _, _ in incoming}
    return TripleSet.of(((v, c) for v, c in t.instances if v in ends), (), incoming)


def srl(t: TripleSet) -> TripleSet:
    return TripleSet.of(
        attributes=(a for a in t.attributes if a[1].startswith(":ARG")),
        relations=(r for r in t.relations if r[1].startswith(":ARG")),
    )


TRANSFORMS: Dict[str, Callable[[TripleSet], TripleSet]] = {
    "smatch": lambda t: t,
    "unlabeled": unlabeled,
    "no_wsd": no_wsd,
    "concept": concept,
    "ner": ner,
    "negation": negation,
    "reentrancy": reentrancy,
    "srl": srl,
}


def fine_grained(
    g_gold: AmrGraph, g_pred: AmrGraph, restarts: int = 4, seed: int = 0, backend: Optional[str] = None
) -> ScoreReport:
    gold, pred = extract_triples(g_gold), extract_triples(g_pred)
    return ScoreReport(
        {
            name: score_triples(TRANSFORMS[name](gold), TRANSFORMS[name](pred), restarts, seed, backend)
            for name in METRICS
        }
    )
