"""Candidate sub-event extraction.

Candidates are noun-verb pairs read off dependency-parse edges (with a
window-based lexicon fallback for corpora without parses) plus adjacent
two-word phrases detected with a vocabulary-scaled co-occurrence score.
Noun-verb pairs are kept only when they occur at least twice corpus-wide;
phrases are frequency-gated by the detector itself.
"""

from __future__ import annotations

import csv
import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .corpus import Corpus, Tweet, clean_token
from .errors import InputFormatError

logger = logging.getLogger(__name__)

NOUN_TAGS = frozenset({"NOUN", "PROPN"})
VERB_TAG = "VERB"

DEFAULT_MIN_FREQ = 2
DEFAULT_WINDOW = 4


class CandidateKind(Enum):
    NOUN_VERB_PAIR = "nv"
    PHRASE = "phrase"


@dataclass(frozen=True)
class Candidate:
    """A candidate sub-event; identity is (kind, first, second).

    For noun-verb pairs `first` is the noun and `second` the verb, whatever
    the direction of the parse edge. For phrases (first, second) is an
    adjacent bigram. Frequencies aggregate over the whole corpus.
    """

    kind: CandidateKind
    first: str
    second: str
    frequency: int = 1

    @property
    def identity(self) -> tuple[str, str, str]:
        return (self.kind.value, self.first, self.second)

    @property
    def words(self) -> tuple[str, str]:
        return (self.first, self.second)


@dataclass(frozen=True)
class PhraseConfig:
    min_count: int = 2
    threshold: float = 10.0

    def __post_init__(self) -> None:
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.threshold < 0:
            raise ValueError("threshold must be nonnegative")


@dataclass(frozen=True)
class CandidateSet:
    """Filtered candidate union plus the accounting the extract stage reports."""

    candidates: tuple[Candidate, ...]
    nv_before: int
    nv_after: int
    phrase_count: int
    total: int
    overlap: int

    def __len__(self) -> int:
        return len(self.candidates)


def extract_nv_pairs(tweet: Tweet, stopwords: frozenset[str]) -> list[Candidate]:
    """Noun-verb pairs from the tweet's dependency parse.

    Every head-dependent edge joining a {NOUN, PROPN} node and a VERB node
    yields one pair, noun first regardless of edge direction, lowercase
    surface forms. Pairs whose members would not survive preprocessing
    (too short, digits, stopwords) are dropped.
    """
    if tweet.parse is None:
        raise ValueError(
            f"tweet {tweet.id} has no dependency parse; use extract_nv_pairs_fallback"
        )
    pairs: list[Candidate] = []
    nodes = tweet.parse.nodes
    for node in nodes:
        if node.head == 0:
            continue
        parent = nodes[node.head - 1]
        if node.upos in NOUN_TAGS and parent.upos == VERB_TAG:
            noun, verb = node.surface, parent.surface
        elif node.upos == VERB_TAG and parent.upos in NOUN_TAGS:
            noun, verb = parent.surface, node.surface
        else:
            continue
        noun = clean_token(noun.lower(), stopwords)
        verb = clean_token(verb.lower(), stopwords)
        if noun is None or verb is None:
            continue
        pairs.append(Candidate(CandidateKind.NOUN_VERB_PAIR, noun, verb))
    return pairs


def load_pos_lexicon(path: str | Path | None = None) -> dict[str, frozenset[str]]:
    """Load a `word TAB tags` lexicon (tags a subset of {N, V}); the bundled
    small lexicon is used when no path is given."""
    if path is None:
        text = resources.files("subevents.data").joinpath("pos_lexicon.txt").read_text("utf-8")
        path = "<bundled lexicon>"
    else:
        text = Path(path).read_text(encoding="utf-8")
    lexicon: dict[str, frozenset[str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not set(parts[1]) <= {"N", "V"}:
            raise InputFormatError(f"{path}:{lineno}: expected 'word<TAB>tags' with tags in {{N,V}}")
        lexicon[parts[0].lower()] = frozenset(parts[1])
    return lexicon


def extract_nv_pairs_fallback(
    tweet: Tweet,
    lexicon: dict[str, frozenset[str]],
    window: int = DEFAULT_WINDOW,
) -> list[Candidate]:
    """Window-based noun-verb pairing for tweets without a parse.

    Pairs each lexicon noun with each lexicon verb that follows it within a
    sliding window of `window` tokens (both tokens inside one window, so at
    distance < window), emitted left to right.
    """
    tokens = tweet.tokens
    pairs: list[Candidate] = []
    for i, noun in enumerate(tokens):
        if "N" not in lexicon.get(noun, frozenset()):
            continue
        for j in range(i + 1, min(i + window, len(tokens))):
            verb = tokens[j]
            if "V" in lexicon.get(verb, frozenset()):
                pairs.append(Candidate(CandidateKind.NOUN_VERB_PAIR, noun, verb))
    return pairs


def detect_phrases(corpus: Corpus, cfg: PhraseConfig = PhraseConfig()) -> list[Candidate]:
    """Adjacent two-word phrases over the preprocessed corpus.

    A bigram (a, b) scores (count(a,b) - min_count) * V / (count(a) * count(b))
    with V the distinct-unigram count; bigrams with count(a,b) >= min_count
    and score > threshold become Phrase candidates with frequency count(a,b).
    Output is sorted by (first, second) and so independent of tweet order.
    """
    unigrams: Counter[str] = Counter()
    bigrams: Counter[tuple[str, str]] = Counter()
    for tweet in corpus.tweets:
        tokens = tweet.tokens
        unigrams.update(tokens)
        bigrams.update(zip(tokens, tokens[1:]))
    vocab_size = len(unigrams)
    phrases = []
    for (a, b), count_ab in bigrams.items():
        if count_ab < cfg.min_count:
            continue
        score = (count_ab - cfg.min_count) * vocab_size / (unigrams[a] * unigrams[b])
        if score > cfg.threshold:
            phrases.append(Candidate(CandidateKind.PHRASE, a, b, frequency=count_ab))
    phrases.sort(key=lambda c: (c.first, c.second))
    return phrases


def phrase_score(
    count_ab: int, count_a: int, count_b: int, vocab_size: int, min_count: int
) -> float:
    """The raw bigram score used by detect_phrases, exposed for inspection."""
    return (count_ab - min_count) * vocab_size / (count_a * count_b)


def aggregate(candidates: Iterable[Candidate]) -> list[Candidate]:
    """Merge candidates by identity, summing frequencies; sorted by identity."""
    merged: dict[tuple[str, str, str], int] = {}
    kinds: dict[tuple[str, str, str], CandidateKind] = {}
    for cand in candidates:
        merged[cand.identity] = merged.get(cand.identity, 0) + cand.frequency
        kinds[cand.identity] = cand.kind
    return [
        Candidate(kinds[identity], identity[1], identity[2], frequency=freq)
        for identity, freq in sorted(merged.items())
    ]


def filter_candidates(
    nv: Sequence[Candidate],
    phrases: Sequence[Candidate],
    min_freq: int = DEFAULT_MIN_FREQ,
) -> CandidateSet:
    """Frequency-filter noun-verb pairs, union with phrases, and account.

    Noun-verb pairs below `min_freq` corpus-wide occurrences are dropped;
    phrases are already gated by the detector. The union deduplicates on
    (kind, first, second); `overlap` reports how many identities collided
    (expected zero, since kind is part of the identity).
    """
    nv_agg = aggregate(nv)
    phrase_agg = aggregate(phrases)
    nv_kept = [c for c in nv_agg if c.frequency >= min_freq]
    union: dict[tuple[str, str, str], Candidate] = {}
    for cand in nv_kept + phrase_agg:
        union.setdefault(cand.identity, cand)
    candidates = tuple(sorted(union.values(), key=lambda c: c.identity))
    overlap = len(nv_kept) + len(phrase_agg) - len(candidates)
    return CandidateSet(
        candidates=candidates,
        nv_before=len(nv_agg),
        nv_after=len(nv_kept),
        phrase_count=len(phrase_agg),
        total=len(candidates),
        overlap=overlap,
    )


def reduction_percent(before: int, after: int) -> float:
    """Percentage reduction from `before` to `after` counts (0.0 when before is 0)."""
    if before == 0:
        return 0.0
    return 100.0 * (1.0 - after / before)


CANDIDATE_CSV_HEADER = ["kind", "first", "second", "frequency"]


def write_candidates(candidates: Iterable[Candidate], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CANDIDATE_CSV_HEADER)
        for cand in candidates:
            writer.writerow([cand.kind.value, cand.first, cand.second, cand.frequency])


def read_candidates(path: str | Path) -> list[Candidate]:
    candidates = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CANDIDATE_CSV_HEADER:
            raise InputFormatError(f"{path}: expected header {','.join(CANDIDATE_CSV_HEADER)}")
        for row in reader:
            if len(row) != 4:
                raise InputFormatError(f"{path}: malformed row {row!r}")
            try:
                kind = CandidateKind(row[0])
                frequency = int(row[3])
            except ValueError as exc:
                raise InputFormatError(f"{path}: malformed row {row!r}") from exc
            candidates.append(Candidate(kind, row[1], row[2], frequency))
    return candidates
