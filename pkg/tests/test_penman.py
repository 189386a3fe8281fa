import random

import pytest

from pseudoamr.graph import isomorphic
from pseudoamr.penman import PenmanError, from_penman, read_penman, split_blocks, to_penman, write_penman
from pseudoamr.testing import random_graph


def test_figure_serialization(fig_amr):
    assert to_penman(fig_amr) == "(R0 / want-01 :ARG0 (R1 / boy) :ARG1 (R2 / leave-01 :ARG0 R1))"
    assert from_penman(to_penman(fig_amr)) == fig_amr


def test_gold_file_parses(data_dir, fig_amr):
    [(meta, g)] = read_penman((data_dir / "fig1_gold.penman").read_text())
    assert meta == ("# ::snt The boy wants to leave .",)
    assert g == fig_amr


def test_constants_and_inverse_roles():
    g = from_penman('(p / person :ARG0-of (l / like-01 :polarity -) :name (n / name :op1 "New York"))')
    assert [n.concept for n in g.nodes if n.constant] == ["-", '"New_York"']
    assert to_penman(g) == '(R0 / person :ARG0-of (R1 / like-01 :polarity -) :name (R2 / name :op1 "New_York"))'


def test_forward_reference():
    g = from_penman("(a / and :op1 b :op2 (b / boy))")
    assert len(g.nodes) == 2 and [e.target for e in g.edges] == [1, 1]


@pytest.mark.parametrize(
    "text, message",
    [
        ("(a / b", "unbalanced"),
        ("(a / b))", "extra"),
        ("(a / b :x c)", "undeclared"),
        ("(a / b :x (a / c))", "duplicate"),
        ("(a / b) (c / d)", "trailing"),
        ("(a / b :x)", "no target"),
        ("", "empty"),
        ("(a / b x)", "expected a relation"),
        ("(a / b :x a)", "self-loop"),
    ],
)
def test_malformed_input(text, message):
    with pytest.raises(PenmanError, match=message):
        from_penman(text)


def test_blocks_keep_metadata_and_skip_comment_only_chunks():
    text = "# file header\n\n# ::id 1\n(a / b)\n\n\n# ::id 2\n(c / d\n  :x (e / f))\n"
    blocks = list(split_blocks(text))
    assert [b.metadata for b in blocks] == [("# ::id 1",), ("# ::id 2",)]
    assert [b.line for b in blocks] == [3, 7]
    entries = read_penman(text)
    assert read_penman(write_penman(entries)) == entries


def test_random_roundtrip():
    rng = random.Random(11)
    for _ in range(300):
        g = random_graph(rng)
        back = from_penman(to_penman(g))
        assert isomorphic(g, back)
        assert to_penman(back) == to_penman(g)
