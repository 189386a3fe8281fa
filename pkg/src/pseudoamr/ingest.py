"""Readers and writers for dependency trees (CoNLL-U) and SRL frame records (JSONL)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple


class ConlluError(ValueError):
    pass


class SrlFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: Optional[str] = None

    def __post_init__(self):
        if not self.form:
            raise ValueError(f"token {self.index} has an empty form")
        if self.index < 1:
            raise ValueError(f"token index must be 1-based, got {self.index}")


@dataclass(frozen=True)
class DepTree:
    """A dependency tree.

    ``heads[k]`` and ``relations[k]`` describe ``tokens[k]``; heads refer to
    ``Token.index`` values (0 is the artificial root).  Indices are dense
    (1..n) for parsed sentences but may have gaps once subtrees are pruned.
    The root token carries relation ``ROOT`` (or ``""`` after the ROOT marker
    has been removed).
    """

    tokens: Tuple[Token, ...]
    heads: Tuple[int, ...]
    relations: Tuple[str, ...]
    _pos: Dict[int, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "heads", tuple(self.heads))
        object.__setattr__(self, "relations", tuple(self.relations))
        if not (len(self.tokens) == len(self.heads) == len(self.relations)):
            raise ValueError("tokens, heads and relations differ in length")
        pos = {}
        for k, tok in enumerate(self.tokens):
            if tok.index in pos:
                raise ValueError(f"duplicate token index {tok.index}")
            pos[tok.index] = k
        object.__setattr__(self, "_pos", pos)
        problem = self._tree_problem()
        if problem:
            raise ValueError(problem)

    def _tree_problem(self) -> Optional[str]:
        if not self.tokens:
            return "empty tree"
        roots = [t.index for t, h in zip(self.tokens, self.heads) if h == 0]
        if len(roots) != 1:
            return f"expected exactly one root token, found {len(roots)}"
        for tok, head, rel in zip(self.tokens, self.heads, self.relations):
            if head != 0 and head not in self._pos:
                return f"token {tok.index} has head {head} outside the sentence"
            if head == 0 and rel not in ("ROOT", ""):
                return f"root token {tok.index} has relation {rel!r}, expected ROOT"
            if head != 0 and rel == "ROOT":
                return f"token {tok.index} is labelled ROOT but has head {head}"
        state: Dict[int, int] = {}
        for tok in self.tokens:
            trail = []
            v = tok.index
            while v != 0 and state.get(v) != 2:
                if state.get(v) == 1:
                    return f"cyclic heads through token {v}"
                state[v] = 1
                trail.append(v)
                v = self.head(v)
            for t in trail:
                state[t] = 2
        return None

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def indices(self) -> List[int]:
        return [t.index for t in self.tokens]

    @property
    def root(self) -> int:
        return self.tokens[self.heads.index(0)].index

    def token(self, index: int) -> Token:
        return self.tokens[self._pos[index]]

    def head(self, index: int) -> int:
        return self.heads[self._pos[index]]

    def relation(self, index: int) -> str:
        return self.relations[self._pos[index]]

    def children(self, index: int) -> List[int]:
        return [t.index for t, h in zip(self.tokens, self.heads) if h == index]

    def subtree(self, index: int) -> List[int]:
        """Token indices dominated by ``index`` (inclusive), in sentence order."""
        keep = {index}
        changed = True
        while changed:
            changed = False
            for t, h in zip(self.tokens, self.heads):
                if h in keep and t.index not in keep:
                    keep.add(t.index)
                    changed = True
        return [i for i in self.indices if i in keep]


def _normalize_relation(deprel: str) -> str:
    return deprel.split(":", 1)[0].upper()


def iter_conllu_blocks(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield ``(first_line_number, lines)`` per sentence, comments included."""
    block: List[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines() + [""], 1):
        if line.strip():
            if not block:
                start = lineno
            block.append(line)
        elif block:
            yield start, block
            block = []


def parse_conllu_sentence(lines: Sequence[str], first_line: int = 1) -> DepTree:
    tokens, heads, rels = [], [], []
    for offset, line in enumerate(lines):
        lineno = first_line + offset
        if line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 10:
            raise ConlluError(f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}")
        tid = cols[0]
        if "-" in tid or "." in tid:
            continue  # multiword token ranges and empty nodes
        try:
            index = int(tid)
        except ValueError:
            raise ConlluError(f"line {lineno}: non-integer ID {tid!r}") from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluError(f"line {lineno}: non-integer HEAD {cols[6]!r}") from None
        if index != len(tokens) + 1:
            raise ConlluError(f"line {lineno}: token ID {index} out of sequence")
        lemma = None if cols[2] == "_" and cols[1] != "_" else cols[2]
        tokens.append(Token(index, cols[1], lemma))
        heads.append(head)
        rels.append(_normalize_relation(cols[7]))
    n = len(tokens)
    for tok, head in zip(tokens, heads):
        if not 0 <= head <= n:
            raise ConlluError(f"sentence at line {first_line}: head {head} of token {tok.index} out of range")
    try:
        return DepTree(tuple(tokens), tuple(heads), tuple(rels))
    except ValueError as exc:
        raise ConlluError(f"sentence at line {first_line}: {exc}") from None


def read_conllu(text: str) -> List[DepTree]:
    return [parse_conllu_sentence(lines, start) for start, lines in iter_conllu_blocks(text)]


def write_conllu(trees: Sequence[DepTree]) -> str:
    """Write the retained columns (ID, FORM, LEMMA, HEAD, DEPREL); others are ``_``."""
    out = []
    for tree in trees:
        for tok, head, rel in zip(tree.tokens, tree.heads, tree.relations):
            cols = [str(tok.index), tok.form, tok.lemma or "_", "_", "_", "_", str(head), rel.lower() or "_", "_", "_"]
            out.append("\t".join(cols))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


@dataclass(frozen=True)
class Argument:
    role: str
    start: int
    end: int


@dataclass(frozen=True)
class SrlFrame:
    predicate_index: int
    sense: str
    arguments: Tuple[Argument, ...] = ()


@dataclass(frozen=True)
class SrlFrameSet:
    sentence: Tuple[Token, ...]
    frames: Tuple[SrlFrame, ...]
    warnings: Tuple[str, ...] = ()

    def span_text(self, start: int, end: int) -> List[str]:
        return [t.form for t in self.sentence[start - 1:end]]


def check_frames(sentence: Sequence[Token], frames: Sequence[SrlFrame]) -> None:
    n = len(sentence)
    for frame in frames:
        p = frame.predicate_index
        if not 1 <= p <= n:
            raise ValueError(f"predicate index {p} outside sentence of {n} tokens")
        if not frame.sense:
            raise ValueError(f"predicate {p} has an empty sense")
        for arg in frame.arguments:
            if not arg.role:
                raise ValueError(f"predicate {p} has an argument with an empty role")
            if arg.end < arg.start:
                raise ValueError(f"span [{arg.start}, {arg.end}] of {arg.role} ends before it starts")
            if arg.start < 1 or arg.end > n:
                raise ValueError(f"span [{arg.start}, {arg.end}] of {arg.role} outside sentence of {n} tokens")
            if arg.start <= p <= arg.end:
                raise ValueError(f"predicate {p} lies inside its own {arg.role} span")


def parse_srl_record(line: str) -> SrlFrameSet:
    try:
        rec = json.loads(line)
        words = rec["tokens"]
        if not isinstance(words, list) or not all(isinstance(w, str) and w for w in words):
            raise ValueError("tokens must be a list of non-empty strings")
        sentence = tuple(Token(i, w) for i, w in enumerate(words, 1))
        frames = tuple(
            SrlFrame(
                int(f["predicate"]),
                str(f["sense"]),
                tuple(Argument(str(a["role"]), int(a["start"]), int(a["end"])) for a in f.get("args", [])),
            )
            for f in rec["frames"]
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed record: {exc!r}") from None
    check_frames(sentence, frames)
    return SrlFrameSet(sentence, frames)


def read_srl_jsonl(text: str) -> List[SrlFrameSet]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(parse_srl_record(line))
        except ValueError as exc:
            raise SrlFormatError(f"line {lineno}: {exc}") from None
    return out


def srl_record(frameset: SrlFrameSet) -> str:
    rec = {
        "tokens": [t.form for t in frameset.sentence],
        "frames": [
            {
                "predicate": f.predicate_index,
                "sense": f.sense,
                "args": [{"role": a.role, "start": a.start, "end": a.end} for a in f.arguments],
            }
            for f in frameset.frames
        ],
    }
    return json.dumps(rec, ensure_ascii=False)


def write_srl_jsonl(framesets: Sequence[SrlFrameSet]) -> str:
    return "".join(srl_record(fs) + "\n" for fs in framesets)
