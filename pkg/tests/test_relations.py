import pytest
from conftest import DATA
from hypothesis import given
from hypothesis import strategies as st

from propsplit.relations import (
    CueTable,
    Relation,
    classify_cue,
    classify_entities,
    coarse_class,
    default_table,
    is_attribution_verb,
    lemmatize_verb,
    refine_temporal,
)

# Transcribed by hand from the cue mapping table, in row order.  Explanation
# rows are merged into Cause; a phrase listed twice keeps its first row.
CUE_ROWS = [
    ("Contrast", "although, but, but now, despite, even though, even when, except when, however, instead, "
                 "rather, still, though, thus, until recently, while, yet"),
    ("List", "and, in addition, in addition to, moreover"),
    ("Disjunction", "or"),
    ("Cause", "largely because, because, since"),
    ("Result", "as a result, as a result of"),
    ("Temporal", "after, and after, next, then, before, previously"),
    ("Background", "as, now, once, when, with, without"),
    ("Condition", "if, in case, unless, until"),
    ("Elaboration", "more provocatively, even before, for example, further, recently, since, since now, so, "
                    "so far, where, whereby, whether"),
    ("Cause", "simply because, because of, indeed, so, so that"),
]


def expected_cues():
    out = {}
    for rel, phrases in CUE_ROWS:
        for p in phrases.split(", "):
            out.setdefault(p, rel)
    return out


def test_cue_table_is_complete():
    want = expected_cues()
    assert len(want) == 57  # 59 listings, "since" and "so" twice
    got = {p: classify_cue(p).value for p in want}
    assert got == want


def test_no_extra_cues():
    assert set(default_table().entries) == set(expected_cues())


def test_ambiguous_cues_are_flagged():
    amb = default_table().ambiguous
    assert set(amb) == {"since", "so"}
    assert amb["so"] == [Relation.ELABORATION, Relation.CAUSE]


@pytest.mark.parametrize("cue", ["Although", "ALTHOUGH", "  although "])
def test_case_and_space_insensitive(cue):
    assert classify_cue(cue) is Relation.CONTRAST


def test_longest_match_wins():
    assert classify_cue("largely because") is Relation.CAUSE
    assert classify_cue("as a result of") is Relation.RESULT
    assert classify_cue("even before") is Relation.ELABORATION
    assert classify_cue(("and", "after")) is Relation.TEMPORAL


def test_prefix_match_for_longer_cues():
    assert classify_cue("because of the rain") is Relation.CAUSE


@pytest.mark.parametrize(
    "cue, hierarchy, want",
    [
        (None, "coordinate", Relation.UNKNOWN_COORDINATION),
        ("", "subordinate", Relation.UNKNOWN_SUBORDINATION),
        ("banana", "coordinate", Relation.UNKNOWN_COORDINATION),
        ("banana", "subordinate", Relation.UNKNOWN_SUBORDINATION),
    ],
)
def test_unknown_fallback(cue, hierarchy, want):
    assert classify_cue(cue, hierarchy) is want


@given(st.sampled_from(sorted(expected_cues())), st.sampled_from(["coordinate", "subordinate"]))
def test_classification_ignores_hierarchy_for_known_cues(cue, hierarchy):
    assert classify_cue(cue, hierarchy).value == expected_cues()[cue]


def test_custom_table(tmp_path):
    cues = tmp_path / "c.tsv"
    cues.write_text("# mine\nmeanwhile\tTemporal\n", encoding="utf-8")
    table = CueTable.load(cues=cues)
    assert classify_cue("meanwhile", table=table) is Relation.TEMPORAL
    assert classify_cue("although", table=table) is Relation.UNKNOWN_SUBORDINATION


def test_bad_cue_file(tmp_path):
    cues = tmp_path / "c.tsv"
    cues.write_text("lonely\n", encoding="utf-8")
    with pytest.raises(ValueError):
        CueTable.load(cues=cues)


# ------------------------------------------------------------------ coarse
COARSE = {
    "List": "Joint",
    "Disjunction": "Joint",
    "Result": "Cause",
    "TemporalBefore": "Temporal",
    "TemporalAfter": "Temporal",
    "Purpose": "Enablement",
}


def test_coarse_mapping():
    for rel in Relation:
        assert coarse_class(rel) == COARSE.get(rel.value, rel.value)


def test_coarse_accepts_names():
    assert coarse_class("Temporal-After") == "Temporal"
    assert coarse_class("List") == "Joint"
    assert coarse_class("Whatever") == "Whatever"


def test_relation_vocabulary():
    names = {r.value for r in Relation}
    for want in ("Contrast", "List", "Disjunction", "Cause", "Result", "Background", "Condition",
                 "Elaboration", "Attribution", "Purpose", "TemporalBefore", "TemporalAfter", "Temporal",
                 "Spatial", "UnknownCoordination", "UnknownSubordination"):
        assert want in names


@pytest.mark.parametrize("text", ["Temporal-Before", "temporal_before", "TEMPORAL BEFORE", "TemporalBefore"])
def test_relation_parse(text):
    assert Relation.parse(text) is Relation.TEMPORAL_BEFORE


def test_relation_parse_unknown():
    with pytest.raises(ValueError):
        Relation.parse("Sarcasm")


# ---------------------------------------------------------------- temporal
def test_refine_temporal():
    assert refine_temporal(Relation.TEMPORAL, ("before",)) is Relation.TEMPORAL_AFTER
    assert refine_temporal(Relation.TEMPORAL, "after") is Relation.TEMPORAL_BEFORE
    assert refine_temporal(Relation.TEMPORAL, ("and", "after")) is Relation.TEMPORAL_BEFORE
    assert refine_temporal(Relation.TEMPORAL, "then") is Relation.TEMPORAL
    assert refine_temporal(Relation.CONTRAST, "before") is Relation.CONTRAST
    assert refine_temporal(Relation.TEMPORAL, None) is Relation.TEMPORAL


# ---------------------------------------------------------------- entities
def tagged(text):
    return [tuple(w.rsplit("/", 1)) for w in text.split()]


@pytest.mark.parametrize(
    "text, want",
    [
        ("Six/CD days/NNS later/RB", Relation.TEMPORAL),
        ("almost/RB 44/CD years/NNS after/IN the/DT event/NN", None),
        ("in/IN 1990/CD", Relation.TEMPORAL),
        ("on/IN Monday/NNP", Relation.TEMPORAL),
        ("in/IN March/NNP", Relation.TEMPORAL),
        ("may/MD leave/VB", None),
        ("in/IN the/DT 19th/JJ century/NN", Relation.TEMPORAL),
        ("in/IN Paris/NNP", Relation.SPATIAL),
        ("at/IN the/DT Louvre/NNP", Relation.SPATIAL),
        ("in/IN the/DT garden/NN", None),
        ("in/IN Paris/NNP in/IN 1990/CD", Relation.TEMPORAL),
    ],
)
def test_classify_entities(text, want):
    assert classify_entities(tagged(text)) is want


def test_external_ne_tags():
    toks = ["at", "the", "summit"]
    assert classify_entities(toks) is None
    assert classify_entities(toks, ne_tags=[None, None, "LOCATION"]) is Relation.SPATIAL
    assert classify_entities(toks, ne_tags=["DATE", None, None]) is Relation.TEMPORAL


def test_gazetteer_location():
    assert "Germany" in default_table().locations
    assert classify_entities(["Germany"]) is Relation.SPATIAL


# ------------------------------------------------------------ attribution
def _lemma_rows():
    rows = []
    for line in (DATA / "verb_lemmas.tsv").read_text(encoding="utf-8").splitlines():
        if line and not line.startswith("#"):
            rows.append(tuple(line.split("\t")))
    return rows


def test_lemmatizer_on_reference_list():
    rows = _lemma_rows()
    assert len(rows) == 200
    wrong = [(form, lemma, lemmatize_verb(form)) for form, lemma in rows if lemmatize_verb(form) != lemma]
    assert wrong == []


@pytest.mark.parametrize("tok", ["said", "says", "claimed", "told", "reported", "announced", "Said", "stated"])
def test_attribution_verbs(tok):
    assert is_attribution_verb(tok)


@pytest.mark.parametrize("tok", ["ate", "consider", "found", "runs", "is"])
def test_not_attribution_verbs(tok):
    assert not is_attribution_verb(tok)
