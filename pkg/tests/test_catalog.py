"""Fuzzy catalog search: scoring oracle, edit budgets, history, permalinks."""

import random

import pytest

from tutordesk.catalog import (
    CatalogEntry,
    SearchParams,
    build_index,
    load_catalog,
    parse_permalink,
    search,
    search_with_history,
)
from tutordesk.normalizer import load_normalizer_config, normalize

from oracles import reference_search, reference_term_distance
from perturb import make_class, perturb


@pytest.fixture(scope="module")
def cfg():
    return load_normalizer_config()


@pytest.fixture(scope="module")
def catalog():
    return load_catalog()


@pytest.fixture(scope="module")
def index(catalog, cfg):
    return build_index(catalog.entries, cfg)


def hits_for(index, cfg, text, history=()):
    return search_with_history(
        index, normalize(text, cfg), [normalize(h, cfg) for h in history]
    )


# -- parameters ---------------------------------------------------------------

def test_default_parameters():
    params = SearchParams()
    assert params.min_should_match == 0.20
    assert params.max_edit_distance == 2
    assert params.relevance_threshold == 1.5
    assert params.title_boost == 2.0
    assert params.synonym_boost == 1.5
    assert params.history_weight == 0.5
    assert params.history_decay == 0.5
    assert params.prefix_length == 2


# -- per-term matching --------------------------------------------------------

def test_length_scaled_edit_budget(index):
    # <= 2 characters: exact only
    assert index.term_distance("at", "at") == 0
    assert index.term_distance("at", "an") is None
    # 3-5 characters: one edit
    assert index.term_distance("root", "roots") == 1
    assert index.term_distance("root", "rooxx") is None
    # >= 6 characters: the full budget of two
    assert index.term_distance("vektor", "vector") == 1
    assert index.term_distance("geometrx", "geometry") == 1
    assert index.term_distance("geomxtrx", "geometry") == 2
    assert index.term_distance("geoxxxry", "geometry") is None


def test_prefix_must_match_exactly(index):
    # d=2 but diverging on the second character: rejected
    assert index.term_distance("elimination", "examination") is None
    # same distance with a shared prefix: accepted
    assert index.term_distance("elimxnatxon", "elimination") == 2


def test_short_tokens_cannot_fuzzy_match(index):
    # shorter than prefix + 2 on either side: exact or nothing
    assert index.term_distance("tri", "tria") is None
    assert index.term_distance("abcd", "abc") is None
    assert index.term_distance("abc", "abc") == 0


def test_term_distance_agrees_with_reference(index):
    rng = random.Random(5)
    terms = sorted({t for ts in index.entry_terms.values() for t in ts})
    pairs = []
    for _ in range(400):
        a = terms[rng.randrange(len(terms))]
        b = terms[rng.randrange(len(terms))]
        pairs.append((a, b))
        if len(a) > 2:
            pairs.append((perturb(a, rng.randrange(1, 3), rng), a))
    for a, b in pairs:
        assert index.term_distance(a, b) == reference_term_distance(a, b, index.params), (a, b)


# -- whole-ranking oracle -----------------------------------------------------

def test_search_matches_flat_loop_reference(index, catalog, cfg):
    rng = random.Random(11)
    terms = sorted({t for ts in index.entry_terms.values() for t in ts})
    kinds = {e.entry_id: e.kind for e in catalog.entries}
    noise = ["hello", "thanks", "need", "help", "with", "stuck"]

    queries = [
        [("geometry", 1.0)],
        [("complex", 1.0), ("number", 1.0)],
        [("linear", 1.0), ("equation", 1.0), ("system", 0.5)],
    ]
    for _ in range(120):
        q = []
        for _ in range(rng.randrange(1, 5)):
            word = terms[rng.randrange(len(terms))]
            roll = rng.random()
            if roll < 0.3 and len(word) > 4:
                word = perturb(word, 1, rng)
            elif roll < 0.4 and len(word) > 6:
                word = perturb(word, 2, rng)
            elif roll < 0.5:
                word = noise[rng.randrange(len(noise))]
            weight = 1.0 if rng.random() < 0.7 else round(rng.random(), 2)
            q.append((word, weight))
        queries.append(q)

    for q in queries:
        got = index.search_weighted(q)
        want = reference_search(index.entry_terms, kinds, q, index.params)
        assert [h.entry_id for h in got] == [w[0] for w in want], q
        for h, w in zip(got, want):
            assert h.score == pytest.approx(w[1])
            assert h.coverage == pytest.approx(w[2])
            assert tuple(h.matched_terms) == w[3]


# -- minimum should match -----------------------------------------------------

def test_history_terms_never_raise_the_match_requirement(index, cfg):
    # a follow-up consisting of new words entirely: the long history
    # must not starve it
    history = ["I am stuck with descriptive vector geometry and the scalar product"]
    hits = hits_for(index, cfg, "roots and powers", history)
    assert hits, "short follow-up starved by history terms"


def test_history_only_matches_stay_eligible(index, cfg):
    # the current turn contributes no catalog words at all (its tokens
    # were consumed by other extractors, or it was all stopwords);
    # earlier context still ranks entries because the requirement is
    # computed over full-weight terms only
    hits = index.search_weighted([("complex", 0.5), ("number", 0.5)])
    assert hits and hits[0].entry_id == "t11"
    via_history = hits_for(index, cfg, "", ["complex numbers please"])
    assert via_history and via_history[0].entry_id == "t11"


def test_smalltalk_matches_nothing(index, cfg):
    assert hits_for(index, cfg, "hello there, sure, ok thanks!") == []
    assert hits_for(index, cfg, "") == []


# -- ranking ------------------------------------------------------------------

def test_coverage_breaks_score_ties(index, cfg):
    # "Geometry" names one chapter completely and one-fifth of another
    hits = hits_for(index, cfg, "Geometry")
    assert hits[0].entry_id == "t05"
    assert hits[0].score == pytest.approx(hits[1].score)
    assert hits[0].coverage > hits[1].coverage


def test_full_tie_is_deterministic_by_entry_id(index, cfg):
    # "one" matches two chapter titles identically; catalog search
    # reports both (the extractor refuses to choose from a full tie)
    hits = hits_for(index, cfg, "one")
    assert [h.entry_id for h in hits[:2]] == ["t02", "t03"]
    assert hits[0].score == pytest.approx(hits[1].score)
    assert hits[0].coverage == pytest.approx(hits[1].coverage)


def test_rare_terms_outweigh_common_terms(index):
    # idf grows strictly as document frequency falls
    df = {t: len(ids) for t, ids in index.postings.items()}
    assert df["calculu"] > df["trigonometry"]
    assert index.idf("trigonometry") > index.idf("calculu")


def test_history_flips_rank(index, cfg):
    # cold, the fully-covered "Circles" wins; after the student talked
    # about the plane, the analytic-geometry section overtakes it
    cold = hits_for(index, cfg, "Circles")
    assert cold[0].entry_id == "t05-s4"
    warm = hits_for(index, cfg, "Circles", ["regions in the plane"])
    assert warm[0].entry_id == "t10-s2"


def test_recent_history_outweighs_old(index, cfg):
    older = hits_for(index, cfg, "Circles",
                     ["regions in the plane", "angles and triangles"])
    newer = hits_for(index, cfg, "Circles",
                     ["angles and triangles", "regions in the plane"])

    def score_of(hits, entry_id):
        return next(h.score for h in hits if h.entry_id == entry_id)

    assert score_of(newer, "t10-s2") > score_of(older, "t10-s2")


# -- misspelling classes (small sweep; the acceptance test runs the large one)

def test_one_and_two_edit_queries_resolve(index, catalog, cfg):
    for k in (1, 2):
        triples = make_class(index, k, 20, seed=40 + k)
        resolved = 0
        for entry_id, term, mutant in triples:
            title = catalog.by_id[entry_id].title
            query_terms = [
                mutant if t == term else t
                for t in normalize(title, cfg).terms
            ]
            hits = index.search_weighted([(t, 1.0) for t in query_terms])
            if hits and hits[0].entry_id == entry_id:
                resolved += 1
        assert resolved / len(triples) >= 0.95, f"d{k}: {resolved}/{len(triples)}"


def test_three_edit_isolated_queries_never_resolve(index):
    triples = make_class(index, 3, 20, seed=43, require_isolated=True)
    for entry_id, term, mutant in triples:
        hits = index.search_weighted([(mutant, 1.0)])
        assert not any(h.entry_id == entry_id for h in hits), (term, mutant)


# -- permalinks ---------------------------------------------------------------

def test_permalink_full_parse(catalog):
    result = parse_permalink(
        "see https://learn.example.org/course/geometry/exercise/5a please",
        catalog,
    )
    assert result["topic"] == "t05"
    assert result["exam_mode"] == "exercise"
    assert result["question_number"] == "5a"
    start, end = result["_span"]
    assert start == 4 and end == len("see https://learn.example.org/course/geometry/exercise/5a")


def test_permalink_without_question_number(catalog):
    result = parse_permalink(
        "https://learn.example.org/course/linear-systems/final-exam", catalog
    )
    assert result["topic"] == "t04"
    assert result["exam_mode"] == "final_examination"
    assert "question_number" not in result


def test_permalink_trailing_punctuation_stripped(catalog):
    result = parse_permalink(
        "look at https://learn.example.org/course/geometry/quiz.", catalog
    )
    assert result["topic"] == "t05"
    assert result["exam_mode"] == "quiz"


def test_permalink_rejects_foreign_hosts_and_bad_paths(catalog):
    assert parse_permalink("https://evil.example.com/course/geometry/quiz", catalog) == {}
    assert parse_permalink("https://learn.example.org/blog/geometry/quiz", catalog) == {}
    assert parse_permalink("https://learn.example.org/course/unknown/quiz", catalog) == {}
    assert parse_permalink("https://learn.example.org/course/geometry/unknown", catalog) == {}
    assert parse_permalink("no url here", catalog) == {}


# -- index construction -------------------------------------------------------

def test_duplicate_entry_ids_rejected(cfg):
    entries = [
        CatalogEntry("t1", "topic", "Algebra", ordinal=1),
        CatalogEntry("t1", "topic", "Geometry", ordinal=2),
    ]
    with pytest.raises(ValueError, match="duplicate"):
        build_index(entries, cfg)


def test_empty_title_rejected(cfg):
    with pytest.raises(ValueError, match="empty title"):
        build_index([CatalogEntry("t1", "topic", "", ordinal=1)], cfg)


def test_subtopic_requires_topic_parent(cfg):
    entries = [CatalogEntry("s1", "subtopic", "Angles", parent="missing")]
    with pytest.raises(ValueError, match="needs a topic parent"):
        build_index(entries, cfg)


def test_search_function_wraps_weighted(index, cfg):
    direct = search(index, normalize("Geometry", cfg))
    weighted = index.search_weighted([("geometry", 1.0)])
    assert [h.entry_id for h in direct] == [h.entry_id for h in weighted]
