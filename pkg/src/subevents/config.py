"""Pipeline configuration: JSON file, defaults, and dotted-key overrides.

Every key in the JSON config can be overridden on the command line by a
flag of the same dotted name (e.g. --cluster.k 40). One seed
(cluster.seed) drives all randomness: k-means initialization and the
out-of-vocabulary hash buckets.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .evaluate import MATCH_MODES

DEFAULT_KS = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000)

RANK_METHODS = ("moac", "baseline")
OOV_POLICIES = ("skip", "subword")
DISCOUNTS = ("log", "none")


@dataclass
class PathsSection:
    corpus_labeled: str | None = None
    corpus_unlabeled: str | None = None
    parses: str | None = None
    vectors: str | None = None
    ontology: str | None = None   # None = bundled crisis term list
    stopwords: str | None = None  # None = bundled stopword list
    lexicon: str | None = None    # POS lexicon for parse-free extraction
    out_dir: str = "out"


@dataclass
class PhraseSection:
    min_count: int = 2
    threshold: float = 10.0


@dataclass
class RankSection:
    method: str = "moac"
    normalize_words: bool = False
    oov_policy: str = "skip"
    discount: str = "log"


@dataclass
class ClusterSection:
    k: int | None = None  # required by the cluster stage; no safe default
    top_m: int = 1000
    seed: int = 0
    normalized: bool = True


@dataclass
class EvalSection:
    ks: tuple[int, ...] = DEFAULT_KS
    nv_match: str = "tokens"
    phrase_match: str = "bigram"


@dataclass
class PipelineConfig:
    paths: PathsSection = field(default_factory=PathsSection)
    phrase: PhraseSection = field(default_factory=PhraseSection)
    filter_min_freq: int = 2
    dedupe: bool = False
    rank: RankSection = field(default_factory=RankSection)
    cluster: ClusterSection = field(default_factory=ClusterSection)
    eval: EvalSection = field(default_factory=EvalSection)

    def validate(self) -> None:
        if self.phrase.min_count < 1:
            raise ConfigError("phrase.min_count must be >= 1")
        if not math.isfinite(self.phrase.threshold):
            raise ConfigError("phrase.threshold must be finite")
        if self.filter_min_freq < 1:
            raise ConfigError("filter_min_freq must be >= 1")
        if self.rank.method not in RANK_METHODS:
            raise ConfigError(f"rank.method must be one of {RANK_METHODS}")
        if self.rank.oov_policy not in OOV_POLICIES:
            raise ConfigError(f"rank.oov_policy must be one of {OOV_POLICIES}")
        if self.rank.discount not in DISCOUNTS:
            raise ConfigError(f"rank.discount must be one of {DISCOUNTS}")
        if self.cluster.k is not None and self.cluster.k < 2:
            raise ConfigError("cluster.k must be >= 2")
        if self.cluster.top_m < 2:
            raise ConfigError("cluster.top_m must be >= 2")
        if self.cluster.seed < 0:
            raise ConfigError("cluster.seed must be >= 0")
        if not self.eval.ks:
            raise ConfigError("eval.ks must be non-empty")
        if any(k < 0 for k in self.eval.ks):
            raise ConfigError("eval.ks entries must be >= 0")
        if any(a >= b for a, b in zip(self.eval.ks, self.eval.ks[1:])):
            raise ConfigError("eval.ks must be strictly ascending")
        if self.eval.nv_match not in MATCH_MODES:
            raise ConfigError(f"eval.nv_match must be one of {MATCH_MODES}")
        if self.eval.phrase_match not in MATCH_MODES:
            raise ConfigError(f"eval.phrase_match must be one of {MATCH_MODES}")

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["eval"]["ks"] = list(self.eval.ks)
        return data


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_ks(raw: str) -> tuple[int, ...]:
    return tuple(int(part) for part in raw.split(",") if part.strip())


def _parse_opt_str(raw: str) -> str | None:
    return raw or None


# dotted key -> (section attribute or None for top level, field, CLI parser)
OVERRIDABLE: dict[str, tuple[str | None, str, object]] = {
    "paths.corpus_labeled": ("paths", "corpus_labeled", _parse_opt_str),
    "paths.corpus_unlabeled": ("paths", "corpus_unlabeled", _parse_opt_str),
    "paths.parses": ("paths", "parses", _parse_opt_str),
    "paths.vectors": ("paths", "vectors", _parse_opt_str),
    "paths.ontology": ("paths", "ontology", _parse_opt_str),
    "paths.stopwords": ("paths", "stopwords", _parse_opt_str),
    "paths.lexicon": ("paths", "lexicon", _parse_opt_str),
    "paths.out_dir": ("paths", "out_dir", str),
    "phrase.min_count": ("phrase", "min_count", int),
    "phrase.threshold": ("phrase", "threshold", float),
    "filter_min_freq": (None, "filter_min_freq", int),
    "dedupe": (None, "dedupe", _parse_bool),
    "rank.method": ("rank", "method", str),
    "rank.normalize_words": ("rank", "normalize_words", _parse_bool),
    "rank.oov_policy": ("rank", "oov_policy", str),
    "rank.discount": ("rank", "discount", str),
    "cluster.k": ("cluster", "k", int),
    "cluster.top_m": ("cluster", "top_m", int),
    "cluster.seed": ("cluster", "seed", int),
    "cluster.normalized": ("cluster", "normalized", _parse_bool),
    "eval.ks": ("eval", "ks", _parse_ks),
    "eval.nv_match": ("eval", "nv_match", str),
    "eval.phrase_match": ("eval", "phrase_match", str),
}

_SECTIONS = {
    "paths": PathsSection,
    "phrase": PhraseSection,
    "rank": RankSection,
    "cluster": ClusterSection,
    "eval": EvalSection,
}


def config_from_dict(data: dict) -> PipelineConfig:
    """Build a config from parsed JSON; unknown keys are errors."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    cfg = PipelineConfig()
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be an object")
            section = getattr(cfg, key)
            known = {f.name for f in dataclasses.fields(section)}
            for sub, sub_value in value.items():
                if sub not in known:
                    raise ConfigError(f"unknown config key {key}.{sub}")
                if key == "eval" and sub == "ks":
                    if not isinstance(sub_value, list) or not all(
                        isinstance(v, int) and not isinstance(v, bool) for v in sub_value
                    ):
                        raise ConfigError("eval.ks must be a list of integers")
                    sub_value = tuple(sub_value)
                setattr(section, sub, sub_value)
        elif key in ("filter_min_freq", "dedupe"):
            setattr(cfg, key, value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    cfg.validate()
    return cfg


def load_config(path: str | Path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_override(cfg: PipelineConfig, dotted: str, raw: str) -> None:
    """Set one dotted config key from its command-line string form."""
    try:
        section_name, field_name, parser = OVERRIDABLE[dotted]
    except KeyError:
        raise ConfigError(f"unknown config key {dotted!r}") from None
    try:
        value = parser(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {dotted}: {exc}") from exc
    target = cfg if section_name is None else getattr(cfg, section_name)
    setattr(target, field_name, value)
