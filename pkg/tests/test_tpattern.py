import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import WIDE_LABELS, oracle_trees, random_pattern, random_tree, shapes
from oracles import oracle_matches
from propsplit.ptb import parse_bracketed
from propsplit.rules import get_rule, rule_catalog
from propsplit.tpattern import (
    DuplicateCapture,
    PatternSyntaxError,
    TokenNode,
    UnknownOperator,
    compile,
    match_all,
    match_first,
)

FLAVOR = (
    "(ROOT (S (S (NP (JJ Many)) (VP (VBP consider) (S (NP (DT the) (NN flavor)) (VP (TO to) (VP (VB be) "
    "(ADJP (RB very) (JJ agreeable))))))) (, ,) (CC but) (S (NP (PRP it)) (VP (VBZ is) (ADVP (RB generally)) "
    "(ADJP (JJ bitter)))) (. .)))"
)


def keys(pattern, tree):
    return {(k[0], frozenset(k[1])) for k in (m.key for m in match_all(pattern, tree))}


def test_rule1_pattern_compiles_without_captures():
    p = compile("ROOT <<: (S < (S ?$.. CC & $.. S))")
    assert p.captures == frozenset()


def test_rule1_pattern_finds_but():
    t = parse_bracketed(FLAVOR)
    m = match_first("ROOT <<: (S < (S ?$.. CC=cc & $.. S))", t)
    assert m is not None and m["cc"].token == "but"


def test_no_coordination_no_match():
    t = parse_bracketed("(ROOT (S (NP (PRP It)) (VP (VBZ works))))")
    assert match_first("ROOT <<: (S < (S $.. CC $.. S))", t) is None


@pytest.mark.parametrize("src", ["A <", "(A", "A < (B", "A [< B", "A < B )", "", "A < B=", "A <+VP B"])
def test_syntax_errors(src):
    with pytest.raises(PatternSyntaxError):
        compile(src)


def test_unknown_operator():
    with pytest.raises(UnknownOperator):
        compile("A <<< B")


def test_duplicate_capture():
    with pytest.raises(DuplicateCapture):
        compile("A < B=x & < C=x")


def test_capture_repeated_across_disjunction_branches():
    p = compile("A [< B=x | < C=x]")
    assert p.captures == {"x"}


def test_all_rule_patterns_compile():
    rules = [r for r in rule_catalog() if r.pattern_source]
    assert len(rules) == 34  # rule 29 is a token-level procedure
    for r in rules:
        assert r.pattern is not None


def test_rule24_pattern_compiles():
    p = compile(get_rule(24).pattern_source)
    assert {"ref", "part", "c1"} <= p.captures


def test_wildcard_enumerates_preorder():
    t = parse_bracketed("(ROOT (S (NP (NN a)) (VP (VBZ b))))")
    ms = match_all("__", t)
    # six nodes plus the two tokens, which are nodes to the matcher
    assert len(ms) == 8
    assert [m.root_match.label for m in ms if not isinstance(m.root_match, TokenNode)] == [
        "ROOT", "S", "NP", "NN", "VP", "VBZ"
    ]


def test_rule30_two_qualifying_pps():
    t = parse_bracketed(
        "(ROOT (S (NP (PRP He)) (VP (VBD put) (NP (DT the) (NN book)) (PP (IN on) (NP (DT the) (NN shelf))) "
        "(PP (IN in) (NP (NNP May)))) (. .)))"
    )
    ms = match_all(get_rule(30).pattern, t)
    assert len(ms) == 2
    assert keys(get_rule(30).pattern, t) == oracle_matches(get_rule(30).pattern, t)


def test_match_first_is_head_of_match_all():
    t = parse_bracketed(FLAVOR)
    p = compile("__=a < __=b")
    assert match_first(p, t) == match_all(p, t)[0]


def test_regex_anchors_full_label():
    t = parse_bracketed("(ROOT (S (NP (NNS dogs)) (VP (VBP bark))))")
    assert match_first("/NN/", t) is None
    assert len(match_all("/NN.?/", t)) == 1


def test_token_nodes_visible():
    t = parse_bracketed("(ROOT (S (VP (TO to) (VP (VB go)))))")
    assert match_first("VP <<, /(T|t)o/", t) is not None
    assert match_first("WP <: whom", parse_bracketed("(ROOT (WHNP (WP whom)))")) is not None


def test_constraints_over_named_nodes():
    t = parse_bracketed("(ROOT (S (S (VP (VBG Having) (VP (VBN left)))) (NP (PRP he)) (VP (VBD cried))))")
    p = compile("ROOT <<: (S < S=s) : (=s <: (VP <<, VBG))")
    assert match_first(p, t)["s"].label == "S"


# ----------------------------------------------------------- oracle checks
_trees = oracle_trees


def test_shape_enumeration_counts():
    # Catalan numbers: ordered trees with n nodes
    assert [sum(1 for _ in shapes(n)) for n in range(1, 8)] == [1, 1, 2, 5, 14, 42, 132]


def test_rule_patterns_agree_with_oracle_on_small_trees():
    trees = _trees(11, 2, 60)
    for r in rule_catalog():
        if r.pattern is None:
            continue
        for t in trees:
            assert keys(r.pattern, t) == oracle_matches(r.pattern, t), (r.id, str(t))


def test_rule_patterns_agree_with_oracle_on_fixtures(golden):
    for g in golden:
        t = parse_bracketed(g["tree"])
        for r in rule_catalog():
            if r.pattern is not None:
                assert keys(r.pattern, t) == oracle_matches(r.pattern, t), (r.id, g["rule"])


def test_synthetic_patterns_agree_with_oracle():
    rng = random.Random(5)
    trees = _trees(3, 1, 40, max_shape=5)
    for _ in range(25):
        p = compile(random_pattern(rng))
        for t in trees:
            assert keys(p, t) == oracle_matches(p, t), (p.source, str(t))


# ---------------------------------------------- negation and optionality
_ops = st.sampled_from(["<", "<<", "$..", "$+", "..", ",,", "<,", "<-", "<<:", ">"])
_labs = st.sampled_from(WIDE_LABELS[:8]).map(lambda x: x.replace(",", "/,/"))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10_000), _labs, _ops, _labs)
def test_negation_is_complement(seed, a, op, b):
    t = random_tree(random.Random(seed))
    pos = {m.root_match for m in match_all(f"{a} {op} {b}", t)}
    neg = {m.root_match for m in match_all(f"{a} !{op} {b}", t)}
    every = {m.root_match for m in match_all(a, t)}
    assert {id(x) for x in pos} | {id(x) for x in neg} == {id(x) for x in every}
    assert not ({id(x) for x in pos} & {id(x) for x in neg})


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10_000), _labs, _ops, _labs)
def test_optional_is_superset(seed, a, op, b):
    t = random_tree(random.Random(seed))
    plain = {id(m.root_match) for m in match_all(f"{a} {op} {b}=x", t)}
    opt = {id(m.root_match) for m in match_all(f"{a} ?{op} {b}=x", t)}
    every = {id(m.root_match) for m in match_all(a, t)}
    assert plain <= opt == every


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_matching_is_deterministic_and_duplicate_free(seed):
    rng = random.Random(seed)
    t = random_tree(rng)
    p = compile(random_pattern(rng))
    first = [m.key for m in match_all(p, t)]
    assert first == [m.key for m in match_all(p, t)]
    assert len(first) == len(set(first))
