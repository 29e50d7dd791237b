import pytest
from hypothesis import given, strategies as st

from oracles import brute_jac_mod
from revex.errors import EmptyQueryError
from revex.simmatch import jac_mod, rank_sentences
from revex.textcore import Document, Sentence, make_document

terms = st.frozensets(st.sampled_from([f"t{i}" for i in range(30)]), max_size=15)
nonempty = st.frozensets(st.sampled_from([f"t{i}" for i in range(30)]), min_size=1, max_size=15)


def test_identical_and_disjoint():
    assert jac_mod({"a", "b", "c"}, {"a", "b", "c"}) == 1.0
    assert jac_mod({"a", "b", "c"}, {"x", "y"}) == 0.0


def test_half_overlap_matches_brute_force():
    sx = {"men", "women", "postmenopausal", "40"}
    sy = {"men", "women", "were", "recruited"}
    assert jac_mod(sx, sy) == float(brute_jac_mod(sx, sy)) == 0.5


def test_asymmetric():
    assert jac_mod({"a"}, {"a", "b"}) == 1.0
    assert jac_mod({"a", "b"}, {"a"}) == 0.5


def test_empty_query_raises():
    with pytest.raises(EmptyQueryError):
        jac_mod(set(), {"a"})
    with pytest.raises(EmptyQueryError):
        rank_sentences(Sentence("q", 0, "..."), make_document("d", "Something."))


def _doc_with_scores(scores):
    # query has 10 terms; sentence i shares round(score*10) of them
    q = [f"q{i}" for i in range(10)]
    sentences = tuple(Sentence("d", i, " ".join(q[:round(s * 10)] + ["filler"])) for i, s in enumerate(scores))
    return frozenset(q), Document("d", sentences)


def test_rank_order_with_ties():
    query, doc = _doc_with_scores([0.2, 0.9, 0.2])
    assert [r.sentence.index for r in rank_sentences(query, doc)] == [1, 0, 2]


def test_empty_document():
    assert rank_sentences({"a"}, Document("d", ())) == []


def test_verbatim_query_ranked_first():
    doc = make_document("d", "Patients aged 40 or more. Weather was fine. Adults aged over 40 were included.")
    query = Sentence("q", 0, "Adults aged over 40 were included.")
    ranked = rank_sentences(query, doc)
    brute = [float(brute_jac_mod(query.term_set, s.term_set)) for s in doc.sentences]
    assert ranked[0].sentence.index == max(range(len(brute)), key=lambda i: (brute[i], -i)) == 2
    assert ranked[0].score == 1.0
    assert sorted(r.score for r in ranked) == sorted(brute)


@given(nonempty, terms)
def test_bounded(sx, sy):
    assert 0.0 <= jac_mod(sx, sy) <= 1.0
    assert jac_mod(sx, sy) == float(brute_jac_mod(sx, sy))


@given(nonempty)
def test_self_similarity(sx):
    assert jac_mod(sx, sx) == 1.0


@given(nonempty, terms, st.sampled_from([f"t{i}" for i in range(30)] + ["zz"]))
def test_monotone_in_target(sx, sy, extra):
    before = jac_mod(sx, sy)
    after = jac_mod(sx, sy | {extra})
    if extra in sx:
        assert after >= before
    else:
        assert after == before


@given(nonempty, st.lists(terms, max_size=12))
def test_rank_is_permutation(query, sentence_terms):
    doc = Document("d", tuple(Sentence("d", i, " ".join(sorted(t))) for i, t in enumerate(sentence_terms)))
    ranked = rank_sentences(query, doc)
    assert sorted(r.sentence.index for r in ranked) == list(range(len(sentence_terms)))
    keys = [(-r.score, r.sentence.index) for r in ranked]
    assert keys == sorted(keys)
