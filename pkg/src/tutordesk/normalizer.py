"""Text normalization: tokenize, fold synonyms, convert ordinals and roman
numerals to digits, drop stopwords and math variables, stem.

Every token keeps its character span into the original text so downstream
consumers (entity extraction, training-data export) can point back at the
exact surface form. The pipeline is deterministic and idempotent: running
the rendered normal forms through the pipeline again yields the same
token sequence.
"""

import json
import re
from dataclasses import dataclass, field
from importlib import resources

_TOKEN_RE = re.compile(r"\d+\.\w+|\w+|[()]", re.UNICODE)
_ROMAN_RE = re.compile(r"^[ivxlcdm]+$")
_ROMAN_VALUES = {"i": 1, "v": 5, "x": 10, "l": 50, "c": 100, "d": 500, "m": 1000}
_OPERATOR_CHARS = set("+-=*/^()")


@dataclass(frozen=True)
class Token:
    surface: str
    normal: str
    start: int
    end: int
    rules: tuple = ()


@dataclass
class NormalizedText:
    original: str
    tokens: list
    applied_rules: list = field(default_factory=list)

    @property
    def terms(self):
        return [t.normal for t in self.tokens]

    def render(self) -> str:
        return " ".join(self.terms)


@dataclass(frozen=True)
class NormalizerConfig:
    stopwords: frozenset
    synonym_map: dict
    ordinal_words: dict
    trigger_words: frozenset
    stemmer_rules: tuple
    roman_numeral_limit: int = 20
    math_variable_symbols: frozenset = frozenset({"x"})
    min_stem_length: int = 4

    def __post_init__(self):
        for key, value in self.synonym_map.items():
            target = self.synonym_map.get(value)
            if target is not None and target != value:
                raise ValueError(
                    f"synonym chain: {key!r} -> {value!r} -> {target!r}; "
                    "map values must be fixed points"
                )
        if self.roman_numeral_limit < 10:
            raise ValueError("roman_numeral_limit must be at least 10")


def load_normalizer_config(path=None) -> NormalizerConfig:
    """Load the normalizer configuration from a JSON file.

    Schema: {"stopwords": [...], "synonyms": {from: to}, "ordinals": {word: "digit"},
    "triggers": [...], "stemmer_rules": [[suffix, replacement], ...],
    "roman_numeral_limit": int, "math_variable_symbols": [...]}
    """
    if path is None:
        raw = resources.files("tutordesk.data").joinpath("normalizer.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    doc = json.loads(raw)
    return NormalizerConfig(
        stopwords=frozenset(doc["stopwords"]),
        synonym_map=dict(doc.get("synonyms", {})),
        ordinal_words=dict(doc.get("ordinals", {})),
        trigger_words=frozenset(doc.get("triggers", [])),
        stemmer_rules=tuple((s, r) for s, r in doc.get("stemmer_rules", [])),
        roman_numeral_limit=int(doc.get("roman_numeral_limit", 20)),
        math_variable_symbols=frozenset(doc.get("math_variable_symbols", ["x"])),
        min_stem_length=int(doc.get("min_stem_length", 4)),
    )


def roman_to_int(token: str):
    """Parse a (lowercase) roman numeral; None if malformed."""
    if not _ROMAN_RE.match(token):
        return None
    total = 0
    prev = 0
    for ch in reversed(token):
        value = _ROMAN_VALUES[ch]
        if value < prev:
            total -= value
        else:
            total += value
            prev = value
    # reject non-canonical spellings like "iiii" or "vx"
    if int_to_roman(total) != token:
        return None
    return total


def int_to_roman(number: int) -> str:
    if number <= 0:
        return ""
    parts = []
    for value, glyph in (
        (1000, "m"), (900, "cm"), (500, "d"), (400, "cd"),
        (100, "c"), (90, "xc"), (50, "l"), (40, "xl"),
        (10, "x"), (9, "ix"), (5, "v"), (4, "iv"), (1, "i"),
    ):
        while number >= value:
            parts.append(glyph)
            number -= value
    return "".join(parts)


def stem(word: str, cfg: NormalizerConfig) -> str:
    """Ordered suffix stripping, iterated to a fixed point.

    A rule applies only if the remaining stem keeps at least
    min_stem_length characters; iteration makes the result independent of
    how many suffixes were stacked ("exercises" and "exercise" conflate).
    """
    current = word
    while True:
        for suffix, replacement in cfg.stemmer_rules:
            if current.endswith(suffix):
                candidate = current[: len(current) - len(suffix)] + replacement
                if len(candidate) >= cfg.min_stem_length:
                    current = candidate
                    break
        else:
            return current


def _is_math_variable(tok, original: str, cfg: NormalizerConfig) -> bool:
    """A standalone variable letter next to a digit, operator or bracket."""
    if tok.normal not in cfg.math_variable_symbols:
        return False
    before = original[: tok.start].rstrip()
    after = original[tok.end :].lstrip()
    neighbours = (before[-1] if before else "") + (after[0] if after else "")
    return any(ch.isdigit() or ch in _OPERATOR_CHARS for ch in neighbours)


def normalize(text: str, cfg: NormalizerConfig) -> NormalizedText:
    """Run the full pipeline; total over any unicode input."""
    applied = set()
    tokens = []
    for match in _TOKEN_RE.finditer(text):
        tokens.append(
            Token(match.group(0), match.group(0).lower(), match.start(), match.end())
        )

    # math variables out first so they cannot be mistaken for roman numerals
    kept = []
    for tok in tokens:
        if _is_math_variable(tok, text, cfg):
            applied.add("math_variable")
        else:
            kept.append(tok)
    tokens = kept

    # synonym folding before digit conversion so folded forms can act as triggers
    folded = []
    for tok in tokens:
        target = cfg.synonym_map.get(tok.normal)
        if target is not None and target != tok.normal:
            applied.add("synonym")
            folded.append(Token(tok.surface, target, tok.start, tok.end, tok.rules + ("synonym",)))
        else:
            folded.append(tok)
    tokens = folded

    tokens, digit_rules = _convert_numerals(tokens, cfg)
    applied |= digit_rules

    kept = []
    for tok in tokens:
        if tok.normal in cfg.stopwords:
            applied.add("stopword")
        else:
            kept.append(tok)
    tokens = kept

    stemmed = []
    for tok in tokens:
        base = stem(tok.normal, cfg)
        if base != tok.normal:
            applied.add("stem")
            tok = Token(tok.surface, base, tok.start, tok.end, tok.rules + ("stem",))
        # a stem may collapse onto a stopword; drop it for idempotence
        if tok.normal in cfg.stopwords:
            applied.add("stopword")
            continue
        stemmed.append(tok)

    return NormalizedText(text, stemmed, sorted(applied))


def _digit_for(tok, cfg: NormalizerConfig, trigger_adjacent: bool):
    """The digit string this token converts to, or None.

    Ordinal words and single-letter roman numerals convert only next to a
    trigger word (chapter, exercise, ...); longer roman numerals convert
    on their own. Bare digits never convert (they already are digits).
    """
    word = cfg.ordinal_words.get(tok.normal)
    if word is not None:
        return word if trigger_adjacent else None
    if tok.normal.isdigit() or any(ch.isdigit() for ch in tok.normal):
        return None
    value = roman_to_int(tok.normal)
    if value is None or value > cfg.roman_numeral_limit:
        return None
    if len(tok.normal) == 1 and not trigger_adjacent:
        return None
    return str(value)


def _convert_numerals(tokens, cfg):
    """Replace ordinal words / roman numerals with digits.

    When the number precedes its trigger word ("first chapter"), the pair is
    emitted in canonical trigger-then-digit order; the two spans are kept in
    text order so the span invariants hold, and both tokens are tagged with
    "numeral_reorder" (surface and normal no longer line up one-to-one).
    """
    applied = set()
    out = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        prev_trigger = i > 0 and tokens[i - 1].normal in cfg.trigger_words
        next_trigger = i + 1 < len(tokens) and tokens[i + 1].normal in cfg.trigger_words
        digit = _digit_for(tok, cfg, prev_trigger or next_trigger)
        if digit is None:
            out.append(tok)
            i += 1
            continue
        rule = "ordinal" if tok.normal in cfg.ordinal_words else "roman"
        applied.add(rule)
        if next_trigger and not prev_trigger:
            # number before its trigger: swap normals, keep spans in order
            trig = tokens[i + 1]
            applied.add("numeral_reorder")
            out.append(
                Token(tok.surface, trig.normal, tok.start, tok.end,
                      tok.rules + (rule, "numeral_reorder"))
            )
            out.append(
                Token(trig.surface, digit, trig.start, trig.end,
                      trig.rules + (rule, "numeral_reorder"))
            )
            i += 2
        else:
            out.append(Token(tok.surface, digit, tok.start, tok.end, tok.rules + (rule,)))
            i += 1
    return out, applied
