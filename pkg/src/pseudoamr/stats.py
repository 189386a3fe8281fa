"""Corpus statistics, including the reentrancy delta between two AMRization settings."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .graph import AmrGraph, reentrancy_count


@dataclass(frozen=True)
class CorpusStats:
    sentences: int = 0
    nodes: int = 0
    edges: int = 0
    reentrancies: int = 0
    labels: Dict[str, int] = field(default_factory=dict)
    per_sentence_reentrancies: tuple = ()

    def as_dict(self) -> dict:
        return {
            "sentences": self.sentences,
            "nodes": self.nodes,
            "edges": self.edges,
            "reentrancies": self.reentrancies,
            "labels": dict(self.labels),
        }


def corpus_stats(graphs: Sequence[AmrGraph]) -> CorpusStats:
    labels: Counter = Counter()
    per = []
    nodes = edges = 0
    for g in graphs:
        nodes += len(g.nodes)
        edges += len(g.edges)
        labels.update(e.label for e in g.edges)
        per.append(reentrancy_count(g))
    return CorpusStats(len(per), nodes, edges, sum(per), dict(sorted(labels.items())), tuple(per))


@dataclass(frozen=True)
class ReentrancyDelta:
    """Reentrancies of ``other`` minus those of ``base``, totalled and per sentence."""

    total: int
    increased: int
    decreased: int
    per_sentence: tuple

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "sentences_increased": self.increased,
            "sentences_decreased": self.decreased,
        }


def reentrancy_delta(base: CorpusStats, other: CorpusStats) -> ReentrancyDelta:
    if base.sentences != other.sentences:
        raise ValueError(f"corpora differ in size: {base.sentences} vs {other.sentences}")
    diffs = tuple(b - a for a, b in zip(base.per_sentence_reentrancies, other.per_sentence_reentrancies))
    return ReentrancyDelta(sum(diffs), sum(d > 0 for d in diffs), sum(d < 0 for d in diffs), diffs)


def format_stats(stats: CorpusStats, delta: Optional[ReentrancyDelta] = None) -> str:
    lines: List[str] = [
        f"sentences\t{stats.sentences}",
        f"nodes\t{stats.nodes}",
        f"edges\t{stats.edges}",
        f"reentrancies\t{stats.reentrancies}",
    ]
    for label, count in stats.labels.items():
        lines.append(f"label {label}\t{count}")
    if delta is not None:
        lines.append(f"reentrancy delta\t{delta.total:+d}")
        lines.append(f"sentences with more reentrancies\t{delta.increased}")
        lines.append(f"sentences with fewer reentrancies\t{delta.decreased}")
    return "\n".join(lines) + "\n"
