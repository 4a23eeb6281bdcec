"""Tweet corpus loading, preprocessing, and dependency-parse sidecars.

Corpora arrive as JSON Lines files (one object per line with ``id``,
``text``, and an optional ``label`` of "informative"/"uninformative").
Dependency parses arrive as an optional CoNLL-U sidecar keyed by a
``# tweet_id = <id>`` sentence comment.

Preprocessing lowercases, splits on whitespace, strips punctuation from
token edges, and removes stopwords, tokens shorter than three characters,
tokens containing a digit, hashtags, and user mentions. Tweets and corpora
are treated as immutable: preprocessing returns new objects.
"""

from __future__ import annotations

import json
import logging
import string
import unicodedata
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path

from ._util import parallel_map
from .errors import InputFormatError

logger = logging.getLogger(__name__)

MIN_TOKEN_LEN = 3

_PUNCT_CHARS = set(string.punctuation)


class Label(Enum):
    INFORMATIVE = "informative"
    UNINFORMATIVE = "uninformative"
    UNLABELED = "unlabeled"


class LabelMode(Enum):
    UNLABELED = "unlabeled"
    LABELED = "labeled"


@dataclass(frozen=True)
class ParseNode:
    """One token of a dependency parse: 1-based index, surface form,
    universal POS tag, and 1-based head index (0 for the root)."""

    index: int
    surface: str
    upos: str
    head: int


@dataclass(frozen=True)
class DependencyParse:
    nodes: tuple[ParseNode, ...]

    def validate(self) -> None:
        """Raise ValueError unless heads are in range, there is exactly one
        root, and the head relation is acyclic."""
        n = len(self.nodes)
        roots = 0
        for i, node in enumerate(self.nodes):
            if node.index != i + 1:
                raise ValueError(f"node index {node.index} at position {i}")
            if not 0 <= node.head <= n:
                raise ValueError(f"head {node.head} out of range [0, {n}]")
            if node.head == 0:
                roots += 1
        if roots != 1:
            raise ValueError(f"expected exactly one root, found {roots}")
        for node in self.nodes:
            seen = set()
            current = node.index
            while current != 0:
                if current in seen:
                    raise ValueError(f"cycle through node {current}")
                seen.add(current)
                current = self.nodes[current - 1].head


@dataclass(frozen=True)
class Tweet:
    id: str
    raw_text: str
    label: Label = Label.UNLABELED
    tokens: tuple[str, ...] = ()
    parse: DependencyParse | None = None


@dataclass(frozen=True)
class Corpus:
    tweets: tuple[Tweet, ...]
    skipped: int = 0

    @property
    def counts(self) -> tuple[int, int, int]:
        """(n_informative, n_uninformative, n_unlabeled); sums to len(tweets)."""
        n_inf = sum(1 for t in self.tweets if t.label is Label.INFORMATIVE)
        n_unf = sum(1 for t in self.tweets if t.label is Label.UNINFORMATIVE)
        return n_inf, n_unf, len(self.tweets) - n_inf - n_unf

    def __len__(self) -> int:
        return len(self.tweets)


def _parse_line(line: str, label_mode: LabelMode) -> Tweet:
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    tweet_id = obj.get("id")
    text = obj.get("text")
    if not isinstance(tweet_id, str) or not isinstance(text, str):
        raise ValueError("missing string 'id' or 'text'")
    label = Label.UNLABELED
    if label_mode is LabelMode.LABELED and "label" in obj:
        raw = obj["label"]
        if raw == "informative":
            label = Label.INFORMATIVE
        elif raw == "uninformative":
            label = Label.UNINFORMATIVE
        else:
            raise ValueError(f"unknown label {raw!r}")
    return Tweet(id=tweet_id, raw_text=text, label=label)


def load_corpus(path: str | Path, label_mode: LabelMode = LabelMode.UNLABELED) -> Corpus:
    """Load a JSON Lines corpus.

    Malformed lines are counted and skipped (reported on the returned
    ``Corpus.skipped``); more than 50% malformed lines is a fatal
    InputFormatError. Blank lines are ignored.
    """
    tweets: list[Tweet] = []
    skipped = 0
    total = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            total += 1
            try:
                tweets.append(_parse_line(line, label_mode))
            except (json.JSONDecodeError, ValueError) as exc:
                skipped += 1
                logger.warning("%s:%d: skipping malformed line (%s)", path, lineno, exc)
    if total > 0 and skipped * 2 > total:
        raise InputFormatError(
            f"{path}: {skipped} of {total} lines malformed; not a JSONL tweet corpus?"
        )
    if skipped:
        logger.info("%s: loaded %d tweets, skipped %d malformed lines", path, len(tweets), skipped)
    return Corpus(tweets=tuple(tweets), skipped=skipped)


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Serialize (id, text, label) back to JSON Lines; inverse of load_corpus."""
    with open(path, "w", encoding="utf-8") as fh:
        for tweet in corpus.tweets:
            obj: dict = {"id": tweet.id, "text": tweet.raw_text}
            if tweet.label is not Label.UNLABELED:
                obj["label"] = tweet.label.value
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def dedupe_corpus(corpus: Corpus) -> Corpus:
    """Drop tweets whose exact raw_text was already seen, keeping the first."""
    seen: set[str] = set()
    kept = []
    for tweet in corpus.tweets:
        if tweet.raw_text in seen:
            continue
        seen.add(tweet.raw_text)
        kept.append(tweet)
    return Corpus(tweets=tuple(kept), skipped=corpus.skipped)


def concat_corpora(*corpora: Corpus) -> Corpus:
    tweets: list[Tweet] = []
    skipped = 0
    for corpus in corpora:
        tweets.extend(corpus.tweets)
        skipped += corpus.skipped
    return Corpus(tweets=tuple(tweets), skipped=skipped)


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stopword list (one word per line, '#' comments); the bundled
    English list is used when no path is given."""
    if path is None:
        text = resources.files("subevents.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            words.add(word.lower())
    return frozenset(words)


def _is_edge_punct(ch: str) -> bool:
    return ch in _PUNCT_CHARS or unicodedata.category(ch).startswith("P")


def _strip_edge_punct(token: str) -> str:
    start = 0
    end = len(token)
    while start < end and _is_edge_punct(token[start]):
        start += 1
    while end > start and _is_edge_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def clean_token(token: str, stopwords: frozenset[str]) -> str | None:
    """Apply the per-token preprocessing rules; None when the token is removed.

    Hashtags and mentions are checked on the raw token (before punctuation
    stripping, otherwise the leading '#'/'@' would be stripped and the rule
    could never fire); length, digit, and stopword rules apply after.
    """
    if token.startswith("#") or token.startswith("@"):
        return None
    token = _strip_edge_punct(token)
    if len(token) < MIN_TOKEN_LEN:
        return None
    if any(ch.isdigit() for ch in token):
        return None
    if token in stopwords:
        return None
    return token


def preprocess(tweet: Tweet, stopwords: frozenset[str]) -> Tweet:
    """Return a copy of the tweet with ``tokens`` filled from ``raw_text``.

    A tweet may legitimately end up with zero tokens.
    """
    tokens = []
    for raw in tweet.raw_text.lower().split():
        token = clean_token(raw, stopwords)
        if token is not None:
            tokens.append(token)
    return replace(tweet, tokens=tuple(tokens))


def preprocess_corpus(corpus: Corpus, stopwords: frozenset[str], threads: int = 1) -> Corpus:
    """Preprocess every tweet; pure per tweet, so safely parallel."""
    tweets = parallel_map(lambda t: preprocess(t, stopwords), corpus.tweets, threads)
    return Corpus(tweets=tuple(tweets), skipped=corpus.skipped)


# CoNLL-U column offsets (ID, FORM, UPOS, HEAD are the ones used here).
_COL_ID, _COL_FORM, _COL_UPOS, _COL_HEAD = 0, 1, 3, 6


def load_parses(path: str | Path) -> dict[str, DependencyParse]:
    """Read a CoNLL-U sidecar keyed by ``# tweet_id = <id>`` comments.

    Multiword-token and empty-node lines (ranged or dotted IDs) are skipped.
    Sentences without a tweet_id comment or violating parse invariants are
    skipped with a warning.
    """
    parses: dict[str, DependencyParse] = {}
    current_id: str | None = None
    nodes: list[ParseNode] = []
    bad = 0

    def flush() -> None:
        nonlocal current_id, nodes, bad
        if current_id is not None and nodes:
            parse = DependencyParse(nodes=tuple(nodes))
            try:
                parse.validate()
            except ValueError as exc:
                bad += 1
                logger.warning("%s: dropping parse for %s (%s)", path, current_id, exc)
            else:
                parses[current_id] = parse
        current_id = None
        nodes = []

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                flush()
                continue
            if line.startswith("#"):
                comment = line[1:].strip()
                if comment.startswith("tweet_id"):
                    _, _, value = comment.partition("=")
                    current_id = value.strip()
                continue
            cols = line.split("\t")
            if len(cols) <= _COL_HEAD:
                continue
            if "-" in cols[_COL_ID] or "." in cols[_COL_ID]:
                continue
            try:
                nodes.append(
                    ParseNode(
                        index=int(cols[_COL_ID]),
                        surface=cols[_COL_FORM],
                        upos=cols[_COL_UPOS],
                        head=int(cols[_COL_HEAD]),
                    )
                )
            except ValueError:
                bad += 1
                logger.warning("%s: unparseable token line %r", path, line)
                current_id = None
                nodes = []
    flush()
    if bad:
        logger.info("%s: dropped %d malformed parse entries", path, bad)
    return parses


def attach_parses(corpus: Corpus, parses: dict[str, DependencyParse]) -> Corpus:
    """Return a corpus whose tweets carry their sidecar parse, if any."""
    tweets = tuple(
        replace(t, parse=parses[t.id]) if t.id in parses else t for t in corpus.tweets
    )
    return Corpus(tweets=tweets, skipped=corpus.skipped)
