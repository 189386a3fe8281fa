"""Random graph generators for property tests and benchmarks."""
from __future__ import annotations

import random
from typing import List, Optional, Sequence, Tuple

from .graph import AmrGraph, Edge, Node
from .ingest import Argument, DepTree, SrlFrame, SrlFrameSet, Token

CONCEPTS = ("want-01", "boy", "girl", "leave-01", "believe-01", "go-02", "city", "name", "person", "and", "thing")
LABELS = (":ARG0", ":ARG1", ":ARG2", ":mod", ":name", ":op1", ":ARG0-of", ":location", ":time")
CONSTANTS = ("-", '"Paris"', "5", "+", "imperative")


def random_graph(
    rng: random.Random,
    max_nodes: int = 20,
    reentrancy: Optional[float] = None,
    constants: float = 0.1,
    concepts: Sequence[str] = CONCEPTS,
    labels: Sequence[str] = LABELS,
    min_nodes: int = 1,
) -> AmrGraph:
    """A connected rooted graph: a random spanning tree plus extra edges.

    ``reentrancy`` (default: uniform in [0, 0.3]) is the number of extra
    non-tree edges per node; extra edges may create cycles.  Edge order is
    shuffled so serialization order is exercised too.
    """
    density = rng.uniform(0.0, 0.3) if reentrancy is None else reentrancy
    n = rng.randint(min_nodes, max_nodes)
    nodes = [Node(k, rng.choice(concepts)) for k in range(n)]
    edges = [(rng.randrange(k), rng.choice(labels), k) for k in range(1, n)]
    for _ in range(round(density * n)):
        if n < 2:
            break
        s, t = rng.sample(range(n), 2)
        edges.append((s, rng.choice(labels), t))
    if n and constants:
        for _ in range(sum(rng.random() < constants for _ in range(n))):
            cid = len(nodes)
            nodes.append(Node(cid, rng.choice(CONSTANTS), constant=True))
            edges.append((rng.randrange(n), rng.choice((":polarity", ":quant", ":op1", ":mode")), cid))
    rng.shuffle(edges)
    # root is node 0 in id order; relabel so the root is not always the lowest id
    perm = list(range(n))
    rng.shuffle(perm)
    perm += list(range(n, len(nodes)))
    order = sorted(range(len(nodes)), key=lambda k: perm[k])
    new_id = {old: new for new, old in enumerate(order)}
    new_nodes = tuple(Node(new_id[nd.id], nd.concept, nd.constant) for nd in sorted(nodes, key=lambda x: new_id[x.id]))
    new_edges = tuple(Edge(new_id[s], lab, new_id[t]) for s, lab, t in edges)
    return AmrGraph(new_nodes, new_edges, new_id[0])


def random_pair(rng: random.Random, max_variables: int = 6) -> Tuple[AmrGraph, AmrGraph]:
    """Two small graphs over a shared vocabulary, often overlapping."""
    vocab = rng.sample(CONCEPTS, rng.randint(2, 5))
    labs = rng.sample(LABELS, rng.randint(1, 4))
    g1 = random_graph(rng, max_variables, concepts=vocab, labels=labs)
    if rng.random() < 0.5:
        g2 = perturb(rng, g1, vocab, labs)
    else:
        g2 = random_graph(rng, max_variables, concepts=vocab, labels=labs)
    return g1, g2


def perturb(rng: random.Random, g: AmrGraph, concepts: Sequence[str], labels: Sequence[str]) -> AmrGraph:
    """Relabel a few concepts and edge labels (structure unchanged)."""
    nodes = tuple(
        Node(n.id, rng.choice(concepts)) if not n.constant and rng.random() < 0.3 else n for n in g.nodes
    )
    edges = tuple(
        Edge(e.source, rng.choice(labels), e.target)
        if rng.random() < 0.3 and not g.nodes[e.target].constant
        else e
        for e in g.edges
    )
    return AmrGraph(nodes, edges, g.root)


WORDS = ("boy", "girl", "the", "tall", "dog", "wants", "to", "leave", "saw", "believes", "city", "old", "a", "runs")
DEPRELS = ("NSUBJ", "OBJ", "DET", "AMOD", "XCOMP", "MARK", "PUNCT", "ADVMOD", "CCOMP")
ROLES = ("ARG0", "ARG1", "ARG2", "ARGM-TMP")


def random_tree(rng: random.Random, n: int, words: Sequence[str] = WORDS) -> DepTree:
    """Random dependency tree over ``n`` tokens: attach tokens one by one to an already attached token."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = {order[0]: 0}
    for k, tok in enumerate(order[1:], 1):
        heads[tok] = order[rng.randrange(k)]
    tokens = tuple(Token(i, rng.choice(words)) for i in range(1, n + 1))
    rels = tuple("ROOT" if heads[i] == 0 else rng.choice(DEPRELS) for i in range(1, n + 1))
    return DepTree(tokens, tuple(heads[i] for i in range(1, n + 1)), rels)


def random_annotation(rng: random.Random, max_tokens: int = 12, max_frames: int = 3) -> Tuple[SrlFrameSet, DepTree]:
    """A sentence with a random dependency tree and random (valid) SRL frames over it."""
    n = rng.randint(2, max_tokens)
    tree = random_tree(rng, n)
    preds = rng.sample(range(1, n + 1), rng.randint(1, min(max_frames, n)))
    frames = []
    for p in preds:
        args = []
        for _ in range(rng.randint(0, 3)):
            # a span on one side of the predicate
            lo, hi = (1, p - 1) if rng.random() < 0.5 else (p + 1, n)
            if lo > hi:
                continue
            start = rng.randint(lo, hi)
            end = rng.randint(start, min(hi, start + 3))
            args.append(Argument(rng.choice(ROLES), start, end))
        frames.append(SrlFrame(p, f"{tree.token(p).form}.0{rng.randint(1, 3)}", tuple(args)))
    return SrlFrameSet(tree.tokens, tuple(frames)), tree


_NOUNS = ("boy", "girl", "teacher", "dog", "farmer", "pilot", "doctor", "child", "student", "singer")
_ADJS = ("tall", "young", "old", "clever", "quiet", "happy", "brave", "tired")
_VERBS = (("wants", "want.01"), ("hopes", "hope.01"), ("tries", "try.01"), ("plans", "plan.01"))
_GOALS = (("leave", "leave.01"), ("sing", "sing.01"), ("win", "win.01"), ("rest", "rest.01"))


def shared_head_corpus(n: int = 50, seed: int = 0) -> List[Tuple[SrlFrameSet, DepTree]]:
    """Sentences "The ADJ NOUN VERB to GOAL ." whose two frames label different
    spans with the same head: ARG0 of VERB is "The ADJ NOUN", ARG0 of GOAL is
    "ADJ NOUN" (every other sentence) or the same full span."""
    rng = random.Random(seed)
    out = []
    for k in range(n):
        adj, noun = rng.choice(_ADJS), rng.choice(_NOUNS)
        (verb, vsense), (goal, gsense) = rng.choice(_VERBS), rng.choice(_GOALS)
        forms = ["The", adj, noun, verb, "to", goal, "."]
        tokens = tuple(Token(i, w) for i, w in enumerate(forms, 1))
        tree = DepTree(
            tokens,
            (3, 3, 4, 0, 6, 4, 4),
            ("DET", "AMOD", "NSUBJ", "ROOT", "MARK", "XCOMP", "PUNCT"),
        )
        inner = Argument("ARG0", 2, 3) if k % 2 == 0 else Argument("ARG0", 1, 3)
        frames = (
            SrlFrame(4, vsense, (Argument("ARG0", 1, 3), Argument("ARG1", 5, 6))),
            SrlFrame(6, gsense, (inner,)),
        )
        out.append((SrlFrameSet(tokens, frames), tree))
    return out
