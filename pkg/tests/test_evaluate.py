import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import levenshtein_recursive, sari_oracle

from propsplit.evaluate import (
    CorpusFormatError,
    CorpusLine,
    EmptyOutput,
    NoReferences,
    bleu,
    corpus_sari,
    evaluate_corpus,
    format_report,
    levenshtein_words,
    mean_levenshtein,
    percent_same,
    read_corpus,
    sari,
    sentences_per_input,
    tokenize,
    tokens_per_sentence,
)

SUBSCORES = ("precision_add", "recall_add", "precision_keep", "recall_keep", "precision_delete")


# ------------------------------------------------------------------ counts
def test_tokenize():
    assert tokenize("He left, then.") == ["He", "left,", "then."]
    assert tokenize("He left, then.", split_punct=True) == ["He", "left", ",", "then", "."]
    assert tokenize("don't stop", split_punct=True) == ["don't", "stop"]


def test_tokens_per_sentence():
    assert tokens_per_sentence(["a b", "c d e f"]) == 3
    with pytest.raises(EmptyOutput):
        tokens_per_sentence([])


def test_sentences_per_input():
    assert sentences_per_input([("x", ["a", "b"]), ("y", ["c"])]) == Fraction(3, 2)


def test_percent_same():
    pairs = [("a b", ["a  b"]), ("c d", ["c.", "d."]), ("e", ["f"]), ("g", ["g"])]
    assert percent_same(pairs) == 50


def test_levenshtein_example():
    assert levenshtein_words("a b c", "a x c d") == 2


def test_levenshtein_edges():
    assert levenshtein_words("", "") == 0
    assert levenshtein_words("a b", "") == 2
    assert levenshtein_words("", "a b c") == 3


def test_mean_levenshtein():
    assert mean_levenshtein([("a b c", ["a b.", "c."]), ("x", ["x"])]) == Fraction(2, 2)


@settings(max_examples=300)
@given(st.lists(st.sampled_from("abcd"), max_size=8), st.lists(st.sampled_from("abcd"), max_size=8))
def test_levenshtein_matches_recursion(x, y):
    assert levenshtein_words(" ".join(x), " ".join(y)) == levenshtein_recursive(tuple(x), tuple(y))


# -------------------------------------------------------------------- BLEU
def test_bleu_hand_worked():
    # clipped precisions 7/9, 4/7, 2/5, 1/3; candidate longer than reference
    got = bleu(["a b c d e", "a a a b"], [["a b c d f"], ["a b a"]])
    assert got == pytest.approx((Fraction(8, 135)) ** 0.25, abs=1e-9)


def test_bleu_identity():
    assert bleu(["the cat sat on the mat"], [["the cat sat on the mat"]]) == pytest.approx(1.0, abs=1e-12)


def test_bleu_brevity_penalty():
    import math

    got = bleu(["a b c d"], [["a b c d e f"]])
    assert got == pytest.approx(math.exp(1 - 6 / 4), abs=1e-9)


def test_bleu_closest_reference():
    # closest reference length is 4, so no brevity penalty
    assert bleu(["a b c d"], [["a b c d e f g h", "a b c d"]]) == pytest.approx(1.0)


def test_bleu_zero():
    assert bleu([""], [["a b c d"]]) == 0.0
    assert bleu(["x y z w"], [["a b c d"]]) == 0.0


def test_bleu_errors():
    with pytest.raises(NoReferences):
        bleu(["a"], [[]])
    with pytest.raises(ValueError):
        bleu(["a", "b"], [["a"]])


# -------------------------------------------------------------------- SARI
def _micro_case(rng):
    vocab = "abcdef"

    def sent():
        return " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 6)))

    return sent(), sent(), [sent() for _ in range(rng.randint(1, 3))]


def test_sari_matches_oracle_on_micro_cases():
    rng = random.Random(20240611)
    for _ in range(100):
        src, cand, refs = _micro_case(rng)
        got = sari(src, cand, refs).as_dict()
        want = sari_oracle(src, cand, refs)
        for key in SUBSCORES + ("sari",):
            assert abs(float(got[key]) - float(want[key])) <= 1e-9, (src, cand, refs, key)


def test_sari_copy_of_reference_keeps_perfectly():
    s = sari("a b c d", "a b c", ["a b c"])
    assert s.precision_keep == 1 and s.recall_keep == 1 and s.precision_delete == 1


def test_sari_empty_operations_score_one():
    s = sari("a b c", "a b c", ["a b c"])
    assert s.precision_add == 1 and s.recall_add == 1
    assert s.sari == 1


def test_sari_needs_references():
    with pytest.raises(NoReferences):
        sari("a", "a", [])


def test_corpus_sari_is_mean():
    a = sari("a b", "a", ["a"]).sari
    b = sari("c d", "d c", ["c"]).sari
    assert corpus_sari(["a b", "c d"], ["a", "d c"], [["a"], ["c"]]) == (a + b) / 2


# ------------------------------------------------------------------ corpus
def test_read_corpus(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("A B C.\tA B. <::> C.\tA B. C.\n\nD E.\tD E.\tD E.\tD. E.\n", encoding="utf-8")
    corpus = read_corpus(p)
    assert corpus == [
        CorpusLine("A B C.", ("A B.", "C."), ("A B. C.",)),
        CorpusLine("D E.", ("D E.",), ("D E.", "D. E.")),
    ]
    rep = evaluate_corpus(corpus)
    assert rep["S/C"] == Fraction(3, 2)
    assert rep["%SAME"] == 50
    assert rep["BLEU"] is not None and rep["SARI"] is not None
    assert rep["SAMSA"] is None


@pytest.mark.parametrize("text, line", [("only\n", 1), ("a\tb\n\tc\n", 2), ("a\t \n", 1)])
def test_corpus_format_errors(tmp_path, text, line):
    p = tmp_path / "bad.tsv"
    p.write_text(text, encoding="utf-8")
    with pytest.raises(CorpusFormatError) as exc:
        read_corpus(p)
    assert exc.value.line == line


def test_report_without_references():
    rep = evaluate_corpus([CorpusLine("a b", ("a.", "b."), ())])
    assert rep["BLEU"] is None and rep["SARI"] is None
    text = format_report(rep)
    head, row = text.splitlines()
    assert head.split() == ["#T/S", "#S/C", "%SAME", "LD_SC", "BLEU", "SARI", "SAMSA", "SAMSA_abl"]
    assert row.split() == ["1.00", "2.00", "0.00", "2.00", "n/a", "n/a", "n/a", "n/a"]


def test_empty_corpus():
    with pytest.raises(EmptyOutput):
        evaluate_corpus([])
