"""Course catalog with fuzzy ranked search.

Entries (chapters, their sections, examination modes, levels) are indexed
by the normalized terms of their titles and synonyms. A query term matches
an index term if it is within a configurable edit distance, with the first
`prefix_length` characters required to match exactly; eligible entries are
scored by summed idf-weighted term similarity. History terms participate
with a recency-decayed weight so that a fresh mention outranks an old one
while short follow-up messages ("5 a") still resolve against context.
"""

import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from urllib.parse import urlsplit

from tutordesk.distance import levenshtein_bounded
from tutordesk.normalizer import NormalizedText, NormalizerConfig, normalize

_URL_RE = re.compile(r"https?://[^\s<>\"]+")
_QNR_PATH_RE = re.compile(r"^\d{1,3}[a-z]?$")


@dataclass(frozen=True)
class CatalogEntry:
    entry_id: str
    kind: str  # topic | subtopic | exam_mode | level
    title: str
    synonyms: tuple = ()
    parent: str = None
    ordinal: int = None
    slug: str = None
    value: str = None  # canonical slot value for exam_mode / level entries


@dataclass(frozen=True)
class SearchParams:
    min_should_match: float = 0.20
    max_edit_distance: int = 2
    prefix_length: int = 2
    relevance_threshold: float = 1.5
    title_boost: float = 2.0
    synonym_boost: float = 1.5
    history_weight: float = 0.5
    history_decay: float = 0.5

    def __post_init__(self):
        if not 0 < self.min_should_match <= 1:
            raise ValueError("min_should_match must be in (0, 1]")
        if self.max_edit_distance < 0 or self.max_edit_distance > 2:
            raise ValueError("max_edit_distance must be between 0 and 2")
        if self.prefix_length < 0:
            raise ValueError("prefix_length must be non-negative")
        if self.relevance_threshold < 0:
            raise ValueError("relevance_threshold must be non-negative")


@dataclass(frozen=True)
class SearchHit:
    entry_id: str
    kind: str
    score: float
    matched_terms: tuple  # of (query_term, index_term, edit_distance)
    coverage: float = 0.0  # matched fraction of the entry's own terms


@dataclass
class Catalog:
    entries: list
    permalink_hosts: list
    permalink_mode_slugs: dict  # canonical mode value -> URL path segment

    def __post_init__(self):
        self.by_id = {e.entry_id: e for e in self.entries}
        self.by_slug = {e.slug: e for e in self.entries if e.slug}
        self.topics = sorted(
            (e for e in self.entries if e.kind == "topic"), key=lambda e: e.ordinal
        )
        self.by_ordinal = {e.ordinal: e for e in self.topics}
        self.modes = {e.value: e for e in self.entries if e.kind == "exam_mode"}
        self.levels = {e.value: e for e in self.entries if e.kind == "level"}

    def subtopics_of(self, topic_id: str):
        return [e for e in self.entries if e.kind == "subtopic" and e.parent == topic_id]

    def parent_of(self, subtopic_id: str):
        entry = self.by_id.get(subtopic_id)
        return entry.parent if entry else None

    def display_value(self, slot: str, value: str) -> str:
        """Human-readable form of a resolved slot value."""
        entry = self.by_id.get(value)
        if slot == "topic" and entry is not None:
            from tutordesk.normalizer import int_to_roman

            return f"{int_to_roman(entry.ordinal).upper()} {entry.title}"
        if entry is not None:
            return entry.title
        if slot == "exam_mode" and value in self.modes:
            return self.modes[value].title
        if slot == "exam_level" and value in self.levels:
            return self.levels[value].title
        return value


def load_catalog(path=None) -> Catalog:
    if path is None:
        raw = resources.files("tutordesk.data").joinpath("catalog.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    doc = json.loads(raw)
    entries = []
    for item in doc["entries"]:
        entries.append(
            CatalogEntry(
                entry_id=item["entry_id"],
                kind=item["kind"],
                title=item["title"],
                synonyms=tuple(item.get("synonyms", ())),
                parent=item.get("parent"),
                ordinal=item.get("ordinal"),
                slug=item.get("slug"),
                value=item.get("value"),
            )
        )
    permalink = doc.get("permalink", {})
    return Catalog(
        entries=entries,
        permalink_hosts=list(permalink.get("hosts", [])),
        permalink_mode_slugs=dict(permalink.get("mode_slugs", {})),
    )


class CatalogIndex:
    """Immutable inverted index over catalog entries."""

    def __init__(self, entries, cfg: NormalizerConfig, params: SearchParams = None):
        self.params = params or SearchParams()
        self.cfg = cfg
        by_id = {}
        for entry in entries:
            if entry.entry_id in by_id:
                raise ValueError(f"duplicate entry_id: {entry.entry_id}")
            if not entry.title:
                raise ValueError(f"entry {entry.entry_id} has an empty title")
            by_id[entry.entry_id] = entry
        for entry in entries:
            if entry.kind == "subtopic":
                parent = by_id.get(entry.parent)
                if parent is None or parent.kind != "topic":
                    raise ValueError(
                        f"subtopic {entry.entry_id} needs a topic parent, "
                        f"got {entry.parent!r}"
                    )
        self.entries = by_id
        # entry_id -> {term: boost}; term -> set of entry_ids (for idf)
        self.entry_terms = {}
        self.postings = {}
        for entry in entries:
            terms = {}
            for term in normalize(entry.title, cfg).terms:
                terms[term] = max(terms.get(term, 0.0), self.params.title_boost)
            for synonym in entry.synonyms:
                for term in normalize(synonym, cfg).terms:
                    terms[term] = max(terms.get(term, 0.0), self.params.synonym_boost)
            self.entry_terms[entry.entry_id] = terms
            for term in terms:
                self.postings.setdefault(term, set()).add(entry.entry_id)
        self.n_entries = len(entries)

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return 1.0 + math.log(self.n_entries / (1.0 + df)) if self.n_entries else 0.0

    def allowed_edits(self, query_term: str) -> int:
        """Length-scaled fuzziness: very short tokens must match exactly,
        mid-length tokens allow one edit, long tokens the full budget.
        Without the scaling, every 3-letter filler word sits within two
        edits of some short index term and smalltalk floods the results."""
        n = len(query_term)
        if n <= 2:
            return 0
        if n <= 5:
            return min(1, self.params.max_edit_distance)
        return self.params.max_edit_distance

    def term_distance(self, query_term: str, index_term: str):
        """Edit distance under the prefix rule, or None if not a match.

        The first prefix_length characters must match exactly; distance is
        computed over the remainders and capped by the length-scaled edit
        budget of the query term. Tokens too short to have a fuzzy
        remainder (shorter than prefix_length + 2) must match exactly.
        """
        params = self.params
        if query_term == index_term:
            return 0
        budget = self.allowed_edits(query_term)
        if budget == 0:
            return None
        limit = params.prefix_length + 2
        if len(query_term) < limit or len(index_term) < limit:
            return None
        p = params.prefix_length
        if query_term[:p] != index_term[:p]:
            return None
        d = levenshtein_bounded(query_term[p:], index_term[p:], budget)
        if d > budget:
            return None
        return d

    def search_weighted(self, weighted_terms, params: SearchParams = None):
        """Rank entries for (term, weight) pairs; weight scales the score
        contribution (1.0 for current-turn terms, less for history).

        The minimum-should-match requirement is computed over full-weight
        terms only: dialogue-history context raises scores but never the
        eligibility bar, otherwise a long history would starve the short
        follow-up messages it exists to support."""
        params = params or self.params
        best_weight = {}
        for term, weight in weighted_terms:
            if weight > best_weight.get(term, 0.0):
                best_weight[term] = weight
        if not best_weight:
            return []
        full_weight_terms = {t for t, w in best_weight.items() if w >= 1.0}
        required = math.ceil(params.min_should_match * len(full_weight_terms))
        hits = []
        for entry_id, terms in self.entry_terms.items():
            matched = []
            score = 0.0
            matched_full = 0
            for query_term, weight in best_weight.items():
                best = None
                for index_term, boost in terms.items():
                    d = self.term_distance(query_term, index_term)
                    if d is None:
                        continue
                    contribution = (
                        self.idf(index_term)
                        * (1.0 - d / (params.max_edit_distance + 1.0))
                        * boost
                        * weight
                    )
                    if best is None or contribution > best[0]:
                        best = (contribution, index_term, d)
                if best is not None:
                    score += best[0]
                    matched.append((query_term, best[1], best[2]))
                    if query_term in full_weight_terms:
                        matched_full += 1
            if matched and matched_full >= required and score >= params.relevance_threshold:
                coverage = len({m[1] for m in matched}) / len(terms)
                hits.append(
                    SearchHit(entry_id, self.entries[entry_id].kind, score,
                              tuple(matched), coverage)
                )
        # ties in raw score break toward the entry the query covers more
        # fully - matching one word of a one-word title beats matching one
        # word of a five-word title
        hits.sort(key=lambda h: (-h.score, -h.coverage, h.entry_id))
        return hits


def build_index(entries, cfg: NormalizerConfig, params: SearchParams = None) -> CatalogIndex:
    return CatalogIndex(list(entries), cfg, params)


def search(index: CatalogIndex, query: NormalizedText, params: SearchParams = None):
    return index.search_weighted([(t, 1.0) for t in query.terms], params)


def search_with_history(index, current: NormalizedText, history, params: SearchParams = None):
    """Search over current terms plus history terms at decayed weight.

    `history` is ordered oldest to newest; a term mentioned n turns ago
    weighs history_weight * history_decay**n relative to a current term,
    so the most recent mention of two competing entries wins.
    """
    params = params or index.params
    weighted = [(t, 1.0) for t in current.terms]
    n = len(history)
    for idx, past in enumerate(history):
        age = n - 1 - idx
        weight = params.history_weight * (params.history_decay ** age)
        weighted.extend((t, weight) for t in past.terms)
    return index.search_weighted(weighted, params)


def parse_permalink(text: str, catalog: Catalog):
    """Extract (topic, examination mode, question number) from a course URL.

    Recognized shape: https://<host>/course/<topic-slug>/<mode-slug>[/<qnr>]
    for the hosts listed in the catalog file. Anything else yields {}.
    """
    slug_to_mode = {v: k for k, v in catalog.permalink_mode_slugs.items()}
    for match in _URL_RE.finditer(text):
        url = match.group(0).rstrip(".,;:!?)")
        parts = urlsplit(url)
        if parts.hostname not in catalog.permalink_hosts:
            continue
        segments = [s for s in parts.path.split("/") if s]
        if len(segments) < 3 or segments[0] != "course":
            continue
        entry = catalog.by_slug.get(segments[1])
        mode = slug_to_mode.get(segments[2])
        if entry is None or entry.kind != "topic" or mode is None:
            continue
        result = {
            "topic": entry.entry_id,
            "exam_mode": mode,
            "_span": (match.start(), match.start() + len(url)),
        }
        if len(segments) >= 4 and _QNR_PATH_RE.match(segments[3].lower()):
            result["question_number"] = segments[3].lower()
        return result
    return {}
