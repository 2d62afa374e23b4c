"""Rule-based delimitation of text into elementary discourse units (EDUs).

Delimiters are the PDTB 2.0 "Explicit" connectives plus four punctuation
marks. Delimiter tokens are never part of an EDU; they are kept as hits and
later become typed graph edges between the EDUs on either side.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field

# Order as published; "and" is listed twice there and kept once here.
EXPLICIT_CONNECTIVES = (
    "once", "although", "though", "but", "because", "nevertheless", "before",
    "for example", "until", "if", "previously", "when", "and", "so", "then",
    "while", "as long as", "however", "also", "after", "separately", "still",
    "so that", "or", "moreover", "in addition", "instead", "on the other hand",
    "as", "for instance", "nonetheless", "unless", "meanwhile", "yet", "since",
    "rather", "in fact", "indeed", "later", "ultimately", "as a result",
    "either or", "therefore", "in turn", "thus", "in particular", "further",
    "afterward", "next", "similarly", "besides", "if and when", "nor",
    "alternatively", "whereas", "overall", "by comparison", "till",
    "in contrast", "finally", "otherwise", "as if", "thereby", "now that",
    "before and after", "additionally", "meantime", "by contrast", "if then",
    "likewise", "in the end", "regardless", "thereafter", "earlier",
    "in other words", "as soon as", "except", "in short", "neither nor",
    "furthermore", "lest", "as though", "specifically", "conversely",
    "consequently", "as well", "much as", "plus", "hence", "by then",
    "accordingly", "on the contrary", "simultaneously", "for", "in sum",
    "when and if", "insofar as", "else", "as an alternative",
    "on the one hand on the other hand",
)
PUNCTUATION = (".", ",", ";", ":")

# sha256 over "\n".join(connectives) + "\n\n" + "\n".join(sorted(punctuation))
LIBRARY_SHA256 = "b9190e79f2ae7b82ae92c287c91a86c9d652a9f689898e7bf50b5bd23db60f0a"

# Split off as standalone tokens. The four delimiters are required; the rest
# keep sentence-final and bracketing marks off word tokens.
_SPLIT_CHARS = frozenset(".,;:?!()[]\"")


class Granularity(str, enum.Enum):
    EDU = "edu"
    CLAUSE = "clause"
    SENTENCE = "sentence"


class DelimiterKind(str, enum.Enum):
    EXPLICIT = "Explicit"
    PUNCT = "Punct"


@dataclass(frozen=True)
class Token:
    text: str
    char_span: tuple  # [start, end) code-point offsets into the source
    index: int

    @property
    def lower(self):
        return self.text.lower()


@dataclass
class DelimiterHit:
    phrase: str
    kind: DelimiterKind
    token_span: tuple  # [first, last], inclusive
    left_edu: int | None = None
    right_edu: int | None = None

    def to_json(self):
        return {
            "phrase": self.phrase,
            "kind": self.kind.value,
            "token_span": list(self.token_span),
            "left_edu": self.left_edu,
            "right_edu": self.right_edu,
        }


@dataclass
class EDU:
    id: int
    token_span: tuple  # [first, last], inclusive
    text: str
    source: str = "context"

    @property
    def positions(self):
        return range(self.token_span[0], self.token_span[1] + 1)

    def to_json(self):
        return {"id": self.id, "text": self.text, "token_span": list(self.token_span),
                "source": self.source}


@dataclass(frozen=True)
class DelimiterLibrary:
    connectives: tuple
    punctuation: frozenset
    _by_first: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        by_first = {}
        # longest-first; ties keep library order
        for phrase in sorted(self.connectives, key=lambda p: -len(p.split())):
            words = tuple(phrase.split())
            by_first.setdefault(words[0], []).append((words, phrase))
        object.__setattr__(self, "_by_first", by_first)

    @property
    def longest_first(self):
        return sorted(self.connectives, key=lambda p: -len(p.split()))

    def kind_of(self, phrase):
        if phrase in self.punctuation:
            return DelimiterKind.PUNCT
        if phrase in self.connectives:
            return DelimiterKind.EXPLICIT
        raise KeyError(phrase)

    def __contains__(self, phrase):
        return phrase in self.punctuation or phrase in self.connectives

    def restrict(self, granularity):
        """Delimiter subset for a node granularity (edu / clause / sentence)."""
        g = Granularity(granularity)
        if g is Granularity.EDU:
            return self
        if g is Granularity.CLAUSE:
            return DelimiterLibrary((), self.punctuation)
        return DelimiterLibrary((), frozenset({"."}) & self.punctuation)

    def checksum(self):
        blob = "\n".join(self.connectives) + "\n\n" + "\n".join(sorted(self.punctuation))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def phrases_at(self, first_word):
        return self._by_first.get(first_word, ())


def load_delimiter_library():
    return DelimiterLibrary(EXPLICIT_CONNECTIVES, frozenset(PUNCTUATION))


def tokenize(text):
    """Whitespace tokenization with punctuation split into standalone tokens."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SPLIT_CHARS:
            tokens.append(Token(ch, (i, i + 1), len(tokens)))
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _SPLIT_CHARS:
            j += 1
        tokens.append(Token(text[i:j], (i, j), len(tokens)))
        i = j
    return tokens


def match_delimiters(tokens, lib):
    """Greedy left-to-right scan; connectives longest-first, then punctuation."""
    hits = []
    lowered = [t.lower for t in tokens]
    i, n = 0, len(tokens)
    while i < n:
        matched = None
        for words, phrase in lib.phrases_at(lowered[i]):
            k = len(words)
            if tuple(lowered[i:i + k]) == words:
                matched = DelimiterHit(phrase, DelimiterKind.EXPLICIT, (i, i + k - 1))
                break
        if matched is None and lowered[i] in lib.punctuation:
            matched = DelimiterHit(lowered[i], DelimiterKind.PUNCT, (i, i))
        if matched is None:
            i += 1
            continue
        hits.append(matched)
        i = matched.token_span[1] + 1
    return hits


def segment(text, lib=None, granularity=Granularity.EDU, *, start_id=0, source="context",
            tokens=None):
    """Split ``text`` into EDUs at delimiter hits.

    Returns ``(edus, hits)``. EDUs are the maximal non-empty token runs
    between hits, numbered from ``start_id``. Each hit records the EDU
    directly to its left and right when one exists.
    """
    lib = (lib or load_delimiter_library()).restrict(granularity)
    if tokens is None:
        tokens = tokenize(text)
    hits = match_delimiters(tokens, lib)

    edus = []
    ends_at = {}
    starts_at = {}
    cursor = 0

    def close_run(first, last):
        if first > last:
            return
        span_text = text[tokens[first].char_span[0]:tokens[last].char_span[1]]
        edu = EDU(start_id + len(edus), (first, last), span_text, source)
        ends_at[last] = edu.id
        starts_at[first] = edu.id
        edus.append(edu)

    for hit in hits:
        close_run(cursor, hit.token_span[0] - 1)
        cursor = hit.token_span[1] + 1
    close_run(cursor, len(tokens) - 1)

    for hit in hits:
        hit.left_edu = ends_at.get(hit.token_span[0] - 1)
        hit.right_edu = starts_at.get(hit.token_span[1] + 1)
    return edus, hits


@dataclass
class SegmentedText:
    tokens: list
    edus: list
    hits: list


@dataclass
class SegmentedSample:
    context: SegmentedText
    options: list  # one SegmentedText per option


def segment_sample(sample, lib=None, granularity=Granularity.EDU):
    """Segment the context and every option; the question is left alone.

    Context EDUs are numbered from 0 and each option's EDUs continue from
    the context count, so ids are unique within every per-option graph.
    """
    lib = lib or load_delimiter_library()
    ctx_tokens = tokenize(sample.context)
    ctx_edus, ctx_hits = segment(sample.context, lib, granularity, tokens=ctx_tokens)
    options = []
    for text in sample.options:
        tokens = tokenize(text)
        edus, hits = segment(text, lib, granularity, start_id=len(ctx_edus), source="option",
                             tokens=tokens)
        options.append(SegmentedText(tokens, edus, hits))
    return SegmentedSample(SegmentedText(ctx_tokens, ctx_edus, ctx_hits), options)
