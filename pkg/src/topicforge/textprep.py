"""Narrative text preprocessing: clean, tokenize, stopword removal, lemmatize.

The pipeline is deliberately dependency-free and deterministic: cleaning keeps
letters only, the stopword list is a plain text file, and the lemmatizer is a
small exceptions table plus ordered suffix rules gated by a shipped word list
(so "crashed" -> "crash" only because "crash" is a known word).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .ingest import AccidentRecord

_NON_LETTER = re.compile(r"[^a-z]+")

# (suffix, replacement, dictionary_check); tried in order, first hit wins
DEFAULT_SUFFIX_RULES: tuple[tuple[str, str, bool], ...] = (
    ("ies", "y", True),
    ("ing", "", True),
    ("ing", "e", True),
    ("ed", "", True),
    ("s", "", True),
)


def _data_text(name: str) -> str:
    return resources.files("topicforge.data").joinpath(name).read_text(encoding="utf-8")


def _read_word_lines(text: str) -> set[str]:
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line)
    return words


@dataclass(frozen=True)
class StopwordList:
    """Set of lowercase tokens to drop, tagged with where it came from."""

    words: frozenset[str]
    source: str = "builtin_general"

    def __post_init__(self):
        for w in self.words:
            if not w or w != w.lower():
                raise ValueError(f"stopword entries must be lowercase and nonempty: {w!r}")

    @classmethod
    def builtin(cls) -> "StopwordList":
        general = _read_word_lines(_data_text("stopwords_general.txt"))
        aviation = _read_word_lines(_data_text("stopwords_aviation.txt"))
        return cls(frozenset(general | aviation), source="builtin_general")

    @classmethod
    def from_file(cls, path: str | Path, source: str = "user_file") -> "StopwordList":
        return cls(frozenset(_read_word_lines(Path(path).read_text(encoding="utf-8"))), source)

    def union(self, other: "StopwordList") -> "StopwordList":
        return StopwordList(self.words | other.words, source=f"{self.source}+{other.source}")


@dataclass(frozen=True)
class LemmaLexicon:
    """Exceptions table plus ordered suffix rules checked against a word list.

    Applying the lexicon twice equals applying it once; the builtin data files
    are curated to keep that property (no dictionary word reduces to another
    dictionary word, exception values are fixed points).
    """

    exceptions: dict[str, str]
    suffix_rules: tuple[tuple[str, str, bool], ...] = DEFAULT_SUFFIX_RULES
    dictionary: frozenset[str] = field(default_factory=frozenset)

    @classmethod
    def builtin(cls) -> "LemmaLexicon":
        exceptions = {}
        for line in _data_text("lemma_exceptions.tsv").splitlines():
            if not line.strip():
                continue
            token, lemma = line.split("\t")
            exceptions[token] = lemma
        dictionary = frozenset(_read_word_lines(_data_text("wordlist.txt")))
        return cls(exceptions=exceptions, dictionary=dictionary)

    @classmethod
    def from_files(
        cls,
        exceptions_path: str | Path | None = None,
        wordlist_path: str | Path | None = None,
    ) -> "LemmaLexicon":
        """Builtin lexicon with either part replaced by a user file."""
        base = cls.builtin()
        exceptions = dict(base.exceptions)
        dictionary = base.dictionary
        if exceptions_path is not None:
            exceptions = {}
            for line in Path(exceptions_path).read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                token, lemma = line.split("\t")
                exceptions[token] = lemma
        if wordlist_path is not None:
            dictionary = frozenset(
                _read_word_lines(Path(wordlist_path).read_text(encoding="utf-8"))
            )
        return cls(exceptions=exceptions, dictionary=dictionary)

    def lemma(self, token: str) -> str:
        hit = self.exceptions.get(token)
        if hit is not None:
            return hit
        for suffix, replacement, check in self.suffix_rules:
            if token.endswith(suffix) and len(token) > len(suffix):
                candidate = token[: -len(suffix)] + replacement
                if candidate and candidate != token:
                    if not check or candidate in self.dictionary:
                        return candidate
        return token


@dataclass(frozen=True)
class TokenizedDoc:
    record_id: int
    tokens: tuple[str, ...]


def clean_text(raw: str) -> str:
    """Lowercase and collapse every non-letter run to a single space."""
    return _NON_LETTER.sub(" ", raw.lower()).strip()


def tokenize(clean: str) -> list[str]:
    """Whitespace split; duplicates and order preserved."""
    return clean.split()


def remove_stopwords(tokens: Sequence[str], stoplist: StopwordList) -> list[str]:
    return [t for t in tokens if t not in stoplist.words]


def lemmatize(tokens: Sequence[str], lexicon: LemmaLexicon) -> list[str]:
    """Map each token to its lemma; output length equals input length."""
    return [lexicon.lemma(t) for t in tokens]


def preprocess_text(
    raw: str, stoplist: StopwordList, lexicon: LemmaLexicon
) -> list[str]:
    """clean -> tokenize -> stopword removal -> lemmatize, for one narrative."""
    return lemmatize(remove_stopwords(tokenize(clean_text(raw)), stoplist), lexicon)


def preprocess_corpus(
    records: Iterable[AccidentRecord],
    stoplist: StopwordList,
    lexicon: LemmaLexicon,
    min_tokens: int = 3,
) -> list[TokenizedDoc]:
    """Preprocess every record's narrative; drop documents shorter than min_tokens."""
    if min_tokens < 1:
        raise ValueError("min_tokens must be >= 1")
    docs = []
    for rec in records:
        tokens = preprocess_text(rec.narrative, stoplist, lexicon)
        if len(tokens) >= min_tokens:
            docs.append(TokenizedDoc(record_id=rec.record_id, tokens=tuple(tokens)))
    return docs
