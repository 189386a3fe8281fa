"""Smatch: F-score over matched triples under the best one-to-one variable alignment.

A graph decomposes into instance triples ``(v, concept)``, attribute triples
``(v, rel, constant)`` (including ``(root, :TOP, root-concept)``) and
relation triples ``(v, rel, w)``.  Inverse roles ``:X-of`` are flipped to
``:X`` first, so ``(a :ARG0-of b)`` and ``(b :ARG0 a)`` score the same.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .graph import AmrGraph, assign_variables, require_connected

TOP = ":TOP"
# roles that end in "-of" without being inverses
_NOT_INVERSE = frozenset({":consist-of", ":prep-out-of", ":prep-on-behalf-of"})
BRUTE_FORCE_MAX_VARIABLES = 8
BRUTE_FORCE_MAX_MAPPINGS = 5_000_000

Instance = Tuple[str, str]
Attribute = Tuple[str, str, str]
Relation = Tuple[str, str, str]


@dataclass(frozen=True)
class TripleSet:
    """Sorted, de-duplicated triples of one graph."""

    instances: Tuple[Instance, ...] = ()
    attributes: Tuple[Attribute, ...] = ()
    relations: Tuple[Relation, ...] = ()

    @classmethod
    def of(cls, instances: Iterable = (), attributes: Iterable = (), relations: Iterable = ()) -> "TripleSet":
        return cls(tuple(sorted(set(instances))), tuple(sorted(set(attributes))), tuple(sorted(set(relations))))

    def __len__(self) -> int:
        return len(self.instances) + len(self.attributes) + len(self.relations)

    @property
    def variables(self) -> Tuple[str, ...]:
        seen = {v for v, _ in self.instances}
        seen.update(v for v, _, _ in self.attributes)
        for v, _, w in self.relations:
            seen.update((v, w))
        return tuple(sorted(seen, key=_var_key))


def _var_key(name: str):
    m = re.match(r"^([A-Za-z]*)(\d+)$", name)
    return (m.group(1), int(m.group(2)), "") if m else ("", -1, name)


def normalize_role(source: str, label: str, target: str) -> Tuple[str, str, str]:
    if label.endswith("-of") and label not in _NOT_INVERSE and len(label) > 4:
        return target, label[:-3], source
    return source, label, target


def extract_triples(graph: AmrGraph) -> TripleSet:
    require_connected(graph)
    names = {v: tok[1:-1] for v, tok in assign_variables(graph).items()}
    instances = [(names[n.id], n.concept) for n in graph.nodes if not n.constant]
    attributes = [(names[graph.root], TOP, graph.concept(graph.root))]
    relations = []
    for e in graph.edges:
        if graph.nodes[e.target].constant:
            attributes.append((names[e.source], e.label, graph.concept(e.target)))
        else:
            relations.append(normalize_role(names[e.source], e.label, names[e.target]))
    return TripleSet.of(instances, attributes, relations)


@dataclass(frozen=True)
class MetricScore:
    matched: int = 0
    test_total: int = 0
    gold_total: int = 0

    def __post_init__(self):
        if min(self.matched, self.test_total, self.gold_total) < 0:
            raise ValueError("triple counts must be non-negative")
        if self.matched > min(self.test_total, self.gold_total):
            raise ValueError("matched count exceeds a triple total")

    @property
    def applicable(self) -> bool:
        return self.test_total > 0 or self.gold_total > 0

    @property
    def precision(self) -> float:
        return self.matched / self.test_total if self.test_total else 0.0

    @property
    def recall(self) -> float:
        return self.matched / self.gold_total if self.gold_total else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "MetricScore") -> "MetricScore":
        return MetricScore(
            self.matched + other.matched, self.test_total + other.test_total, self.gold_total + other.gold_total
        )

    def as_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "matched": self.matched,
            "test_total": self.test_total,
            "gold_total": self.gold_total,
            "applicable": self.applicable,
        }


@dataclass(frozen=True)
class ScoreReport:
    metrics: Dict[str, MetricScore] = field(default_factory=dict)

    def __getitem__(self, name: str) -> MetricScore:
        return self.metrics[name]

    @property
    def smatch(self) -> MetricScore:
        return self.metrics["smatch"]

    def __add__(self, other: "ScoreReport") -> "ScoreReport":
        names = list(self.metrics) + [k for k in other.metrics if k not in self.metrics]
        zero = MetricScore()
        return ScoreReport({k: self.metrics.get(k, zero) + other.metrics.get(k, zero) for k in names})

    def as_dict(self) -> dict:
        return {k: v.as_dict() for k, v in self.metrics.items()}


def micro_average(reports: Iterable[ScoreReport]) -> ScoreReport:
    total = ScoreReport()
    for rep in reports:
        total = total + rep
    return total


def _index(triples: TripleSet):
    variables = triples.variables
    ids = {v: k for k, v in enumerate(variables)}
    unary: Dict[int, set] = defaultdict(set)
    for v, c in triples.instances:
        unary[ids[v]].add((":instance", c))
    for v, r, c in triples.attributes:
        unary[ids[v]].add((r, c))
    binary: Dict[Tuple[int, int], set] = defaultdict(set)
    for v, r, w in triples.relations:
        binary[ids[v], ids[w]].add(r)
    return variables, unary, binary


@dataclass
class _Problem:
    """Integer encoding of one alignment problem (see :mod:`pseudoamr._kernels`)."""

    n1: int
    n2: int
    unary: np.ndarray
    pairs: Tuple[np.ndarray, ...]
    candidates: List[List[int]]  # per gold variable, predicted variables sharing its concept


def _encode(gold: TripleSet, test: TripleSet) -> _Problem:
    v1, u1, b1 = _index(gold)
    v2, u2, b2 = _index(test)
    n1, n2 = len(v1), len(v2)
    unary = np.zeros((n1, n2 + 1), dtype=np.int64)
    for i, ts in u1.items():
        for a, us in u2.items():
            unary[i, a] = len(ts & us)
    by_label: Dict[str, List[Tuple[int, int]]] = defaultdict(list)
    for (a, b), labels in b2.items():
        for lab in labels:
            by_label[lab].append((a, b))
    weights: Dict[Tuple[int, int, int, int], int] = defaultdict(int)
    for (i, j), labels in b1.items():
        for lab in labels:
            for a, b in by_label.get(lab, ()):
                weights[i, j, a, b] += 1
    keys = sorted(weights)
    cols = [np.array([k[c] for k in keys], dtype=np.int64) for c in range(4)]
    pw = np.array([weights[k] for k in keys], dtype=np.int64)
    concepts2 = defaultdict(list)
    for v, c in test.instances:
        concepts2[c].append(v2.index(v))
    candidates = [[] for _ in range(n1)]
    for v, c in gold.instances:
        candidates[v1.index(v)] = sorted(concepts2.get(c, ()))
    return _Problem(n1, n2, unary, (*cols, pw), candidates)


def _seeded_start(prob: _Problem) -> np.ndarray:
    """Concept-matched seeding: first free same-concept target, then leftovers in order."""
    mapping = np.full(prob.n1, prob.n2, dtype=np.int64)
    free = [True] * prob.n2
    for i in range(prob.n1):
        for a in prob.candidates[i]:
            if free[a]:
                mapping[i] = a
                free[a] = False
                break
    rest = iter(a for a in range(prob.n2) if free[a])
    for i in range(prob.n1):
        if mapping[i] == prob.n2:
            a = next(rest, None)
            if a is None:
                break
            mapping[i] = a
    return mapping


def _random_start(prob: _Problem, rng: np.random.Generator) -> np.ndarray:
    """Random injective mapping; gold variables beyond the predicted count stay unmapped."""
    mapping = np.full(prob.n1, prob.n2, dtype=np.int64)
    k = min(prob.n1, prob.n2)
    who = rng.permutation(prob.n1)[:k]
    mapping[who] = rng.permutation(prob.n2)[:k]
    return mapping


def align(gold: TripleSet, test: TripleSet, restarts: int = 4, seed: int = 0, backend: Optional[str] = None) -> int:
    """Best matched-triple count found by hill climbing over ``restarts`` starts."""
    if isinstance(restarts, bool) or not isinstance(restarts, (int, np.integer)) or restarts < 1:
        raise ValueError(f"restarts must be a positive integer, got {restarts!r}")
    if not len(gold) or not len(test):
        return 0
    prob = _encode(gold, test)
    if prob.n1 == 0 or prob.n2 == 0:
        return 0
    rng = np.random.default_rng(seed)
    best = 0
    for r in range(restarts):
        start = _seeded_start(prob) if r == 0 else _random_start(prob, rng)
        best = max(best, _kernels.hill_climb(prob.unary, *prob.pairs, start, backend=backend))
    return best


def score_triples(
    gold: TripleSet, test: TripleSet, restarts: int = 4, seed: int = 0, backend: Optional[str] = None
) -> MetricScore:
    return MetricScore(align(gold, test, restarts, seed, backend), len(test), len(gold))


def smatch(
    g1: AmrGraph, g2: AmrGraph, restarts: int = 4, seed: int = 0, backend: Optional[str] = None
) -> ScoreReport:
    """Score ``g2`` (predicted) against ``g1`` (gold)."""
    return ScoreReport({"smatch": score_triples(extract_triples(g1), extract_triples(g2), restarts, seed, backend)})


def _mapped_count(gold: TripleSet, test_set: set, mapping: Dict[str, str]) -> int:
    hits = 0
    for v, c in gold.instances:
        if v in mapping and (mapping[v], c) in test_set:
            hits += 1
    for v, r, c in gold.attributes:
        if v in mapping and (mapping[v], r, c) in test_set:
            hits += 1
    for v, r, w in gold.relations:
        if v in mapping and w in mapping and (mapping[v], r, mapping[w]) in test_set:
            hits += 1
    return hits


def brute_force_triples(gold: TripleSet, test: TripleSet) -> int:
    """Exact optimum by enumerating every injective mapping of the smaller side.

    Mapping a variable never loses a triple, so only total injections of the
    smaller variable set need checking.
    """
    v1, v2 = gold.variables, test.variables
    small, large = sorted((len(v1), len(v2)))
    if small > BRUTE_FORCE_MAX_VARIABLES:
        raise ValueError(f"brute force needs at most {BRUTE_FORCE_MAX_VARIABLES} variables on one side, got {small}")
    count = math.perm(large, small)
    if count > BRUTE_FORCE_MAX_MAPPINGS:
        raise ValueError(f"brute force would enumerate {count} mappings (limit {BRUTE_FORCE_MAX_MAPPINGS})")
    if len(v1) <= len(v2):
        test_set = set(test.instances) | set(test.attributes) | set(test.relations)
        return max(
            (_mapped_count(gold, test_set, dict(zip(v1, image))) for image in itertools.permutations(v2, len(v1))),
            default=0,
        )
    gold_set = set(gold.instances) | set(gold.attributes) | set(gold.relations)
    return max(
        (_mapped_count(test, gold_set, dict(zip(v2, image))) for image in itertools.permutations(v1, len(v2))),
        default=0,
    )


def brute_force_smatch(g1: AmrGraph, g2: AmrGraph) -> ScoreReport:
    t1, t2 = extract_triples(g1), extract_triples(g2)
    return ScoreReport({"smatch": MetricScore(brute_force_triples(t1, t2), len(t2), len(t1))})


def pair_seed(seed: int, index: int) -> int:
    """Per-pair seed so corpus scores do not depend on scheduling."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def corpus_smatch(
    pairs: Sequence[Tuple[AmrGraph, AmrGraph]], restarts: int = 4, seed: int = 0, backend: Optional[str] = None
) -> ScoreReport:
    return micro_average(smatch(g, p, restarts, pair_seed(seed, k), backend) for k, (g, p) in enumerate(pairs))
