"""Tokenization, sentence segmentation, and answer normalization.

Everything downstream (similarity scores, span checks, reports) is defined
in terms of these three functions, so they are deliberately rule-based,
pure, and deterministic: equal inputs always produce equal outputs.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field

from ._assets import asset_lines

# Tokens are maximal runs of Unicode letters/digits. Apostrophes survive only
# word-internally ("Queen's" is one token); hyphens and underscores separate.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*")

_ARTICLE_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT_TABLE = {ord(ch): None for ch in string.punctuation}

_TERMINATORS = ".?!"
# Closing quotes/brackets that may trail a terminator and still belong to the
# sentence that the terminator ends.
_CLOSERS = "\"')]}’”"

_ABBREVIATIONS = asset_lines("abbreviations.txt")
_INITIAL_RE = re.compile(r"[A-Z]\.")


@dataclass(frozen=True)
class RawDocument:
    """A source document as ingested from disk."""

    id: str
    source: str  # "news" | "wiki" | "other"
    title: str
    text: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be nonempty")
        if self.source not in ("news", "wiki", "other"):
            raise ValueError(f"unknown document source {self.source!r}")
        if not self.text:
            raise ValueError(f"document {self.id!r} has empty text")


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class TokenizedText:
    """Tokens with character offsets over an immutable source string.

    ``folded`` carries the lowercased surfaces; all set/multiset comparisons
    elsewhere operate on it, while offsets always address ``source``.
    """

    source: str
    tokens: tuple[Token, ...] = field(default=())
    folded: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class SentenceSpan:
    """Character range of one sentence; spans never include outer whitespace."""

    char_start: int
    char_end: int
    index: int


def tokenize(text: str) -> TokenizedText:
    """Split ``text`` into offset-carrying tokens.

    Deterministic and lossless: ``text[t.start:t.end] == t.surface`` for every
    token. Empty input yields an empty token list.
    """
    tokens = []
    folded = []
    for m in _TOKEN_RE.finditer(text):
        tokens.append(Token(m.group(), m.start(), m.end()))
        folded.append(m.group().lower())
    return TokenizedText(source=text, tokens=tuple(tokens), folded=tuple(folded))


def _ends_with_abbreviation(text: str, dot: int) -> bool:
    # Chunk of non-whitespace ending at the period, minus any opening quotes.
    left = dot
    while left > 0 and not text[left - 1].isspace():
        left -= 1
    chunk = text[left : dot + 1].lstrip("\"'([{‘“")
    if chunk in _ABBREVIATIONS:
        return True
    # Single-letter initials ("J. Smith") never end a sentence here.
    return bool(_INITIAL_RE.fullmatch(chunk))


def split_sentences(text: str) -> list[SentenceSpan]:
    """Rule-based sentence segmentation.

    A sentence ends at '.', '?' or '!' (plus any trailing closing quotes or
    brackets) when followed by whitespace and an uppercase letter or digit,
    unless the period closes a known abbreviation. Text without a qualifying
    terminator is a single sentence. The returned spans are ordered,
    non-overlapping, and jointly cover every non-whitespace character.
    """
    n = len(text)
    start = 0
    while start < n and text[start].isspace():
        start += 1
    if start == n:
        return []

    bounds: list[tuple[int, int]] = []
    pos = start
    while pos < n:
        ch = text[pos]
        if ch in _TERMINATORS:
            if ch == "." and _ends_with_abbreviation(text, pos):
                pos += 1
                continue
            j = pos + 1
            while j < n and text[j] in _CLOSERS:
                j += 1
            k = j
            while k < n and text[k].isspace():
                k += 1
            if j < k < n and (text[k].isupper() or text[k].isdigit()):
                bounds.append((start, j))
                start = k
                pos = k
                continue
        pos += 1

    end = n
    while end > start and text[end - 1].isspace():
        end -= 1
    if end > start:
        bounds.append((start, end))
    return [SentenceSpan(s, e, i) for i, (s, e) in enumerate(bounds)]


def normalize_answer(text: str) -> str:
    """SQuAD-convention answer normalization.

    Lowercase, strip punctuation, drop the articles a/an/the as whole words,
    collapse whitespace. Idempotent.
    """
    text = text.lower()
    text = text.translate(_PUNCT_TABLE)
    text = _ARTICLE_RE.sub(" ", text)
    return " ".join(text.split())


def answer_tokens(text: str) -> list[str]:
    """Normalized token list used by the token-overlap F1 metric."""
    norm = normalize_answer(text)
    return norm.split() if norm else []
