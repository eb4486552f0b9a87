import pytest
from hypothesis import given, settings, strategies as st

from propsplit.ptb import (
    EmptyLabel,
    EmptyTree,
    ParseTree,
    UnbalancedBrackets,
    detokenize,
    parse_bracketed,
    serialize_bracketed,
    split_bracketed,
    yield_text,
)


def test_preterminal_is_a_leaf():
    t = parse_bracketed("(ROOT (NN dog))")
    assert t.label == "ROOT"
    (nn,) = t.children
    assert nn.is_leaf and nn.label == "NN" and nn.token == "dog"
    assert nn.span == (0, 1)


def test_spans_and_tokens():
    t = parse_bracketed("(ROOT (S (NP (PRP It)) (VP (VBZ works)) (. .)))")
    assert t.tokens() == ["It", "works", "."]
    s = t.children[0]
    assert [c.span for c in s.children] == [(0, 1), (1, 2), (2, 3)]
    assert yield_text(t) == "It works."


def test_wsj_outer_bracket_becomes_root():
    t = parse_bracketed("( (S (NP (NNP Kim)) (VP (VBD left))) )")
    assert t.label == "ROOT"
    assert t.children[0].label == "S"


@pytest.mark.parametrize(
    "text, err",
    [
        ("(S (NP (NN a))", UnbalancedBrackets),
        ("(S (NN a)))", UnbalancedBrackets),
        ("", EmptyTree),
        ("   ", EmptyTree),
        ("(S ( (NN a)) (NN b))", EmptyLabel),
    ],
)
def test_malformed(text, err):
    with pytest.raises(err):
        parse_bracketed(text)


def test_structural_equality_and_hash():
    a = parse_bracketed("(ROOT (S (NN a) (NN b)))")
    b = parse_bracketed("(ROOT\n  (S (NN a)\n     (NN b)))")
    assert a == b and hash(a) == hash(b)
    assert a is not b
    assert a != parse_bracketed("(ROOT (S (NN a) (NN c)))")


def test_trees_are_truthy_even_with_empty_span():
    assert bool(ParseTree("S", [ParseTree("NN", (), "x", (-1, -1))], None, (-1, -1)))


def test_immutable():
    t = parse_bracketed("(ROOT (NN dog))")
    with pytest.raises(AttributeError):
        t.label = "X"


def test_detokenize_quotes_and_clitics():
    assert detokenize(["``", "I", "love", "you", "''", ",", "he", "said", "."]) == "``I love you'', he said."
    assert detokenize(["Maggie", "'s", "family", "do", "n't", "care"]) == "Maggie's family don't care"
    assert detokenize(["-LRB-", "a", "-RRB-"]) == "(a)"


def test_empty_categories_are_dropped():
    t = parse_bracketed("(ROOT (S (NP (-NONE- *T*-1)) (VP (VBD left))))")
    assert serialize_bracketed(t) == "(ROOT (S (VP (VBD left))))"


def test_split_bracketed_reports_lines():
    text = "(ROOT (NN a))\n\n(ROOT\n  (NN b))\n"
    assert [ln for ln, _ in split_bracketed(text)] == [1, 3]


# ---------------------------------------------------------------- round trip
_labels = st.sampled_from(["S", "NP", "VP", "PP", "SBAR", "NN", "VBD", ",", ".", "``", "''", "PRP$"])
_tokens = st.text(alphabet=st.characters(blacklist_characters="() \t\r\n", blacklist_categories=("Cs", "Cc", "Z")),
                  min_size=1, max_size=6)


def _tree(depth):
    leaf = st.builds(lambda lab, tok: ParseTree.leaf(lab, tok), _labels, _tokens)
    if depth == 0:
        return leaf
    return st.one_of(leaf, st.builds(lambda lab, kids: ParseTree(lab, kids), _labels,
                                     st.lists(_tree(depth - 1), min_size=1, max_size=3)))


trees = st.builds(lambda kids: ParseTree.node("ROOT", kids), st.lists(_tree(3), min_size=1, max_size=3))


@settings(max_examples=1000, deadline=None)
@given(trees)
def test_round_trip(t):
    back = parse_bracketed(serialize_bracketed(t))
    assert back == t
    assert back.tokens() == t.tokens()
    assert serialize_bracketed(back) == serialize_bracketed(t)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_spans_cover_tokens(t):
    back = parse_bracketed(serialize_bracketed(t))
    for n in back.preorder():
        lo, hi = n.span
        assert hi - lo == len(n.leaves())
