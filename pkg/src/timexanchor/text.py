"""Tokenization and sentence segmentation for discharge-summary text."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Peeled off chunk edges only; hyphens, slashes and interior periods survive so
# "post-operative", "11/29/13" and "23.1" stay whole tokens.
_EDGE_PUNCT = set(".,;:!?()[]{}<>'\"#%&*+=|~`")

_CHUNK_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, then peel edge punctuation into separate tokens."""
    tokens: list[Token] = []
    for m in _CHUNK_RE.finditer(text):
        chunk, base = m.group(), m.start()
        i, j = 0, len(chunk)
        lead: list[Token] = []
        while i < j and chunk[i] in _EDGE_PUNCT:
            lead.append(Token(chunk[i], base + i, base + i + 1))
            i += 1
        trail: list[Token] = []
        while j > i and chunk[j - 1] in _EDGE_PUNCT:
            trail.append(Token(chunk[j - 1], base + j - 1, base + j))
            j -= 1
        tokens.extend(lead)
        if i < j:
            tokens.append(Token(chunk[i:j], base + i, base + j))
        tokens.extend(reversed(trail))
    return tokens


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Character ranges of sentences; cut at newlines and after ". " / "; "."""
    cuts = [0]
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            cuts.append(i + 1)
        elif c in ".;" and i + 1 < n and text[i + 1] == " ":
            cuts.append(i + 2)
        i += 1
    cuts.append(n)
    spans: list[tuple[int, int]] = []
    for start, end in zip(cuts, cuts[1:]):
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start < end:
            spans.append((start, end))
    return spans


def sentence_containing(text: str, offset: int) -> tuple[int, int]:
    """Span of the sentence covering offset; a zero-width span if none does."""
    for start, end in sentence_spans(text):
        if start <= offset < end:
            return start, end
    return offset, offset


_CLAUSE_BREAKERS = {",", ";", "and", "but"}


def clause_token_ranges(tokens: list[Token], is_verb) -> list[tuple[int, int]]:
    """Split a sentence's tokens into clauses at commas/semicolons/"and"/"but".

    A candidate split is taken only when both sides of it contain a verb,
    judged by the caller-supplied predicate.
    """
    ranges: list[tuple[int, int]] = []
    start = 0
    for i, tok in enumerate(tokens):
        if tok.text.lower() not in _CLAUSE_BREAKERS:
            continue
        left_has = any(is_verb(t.text) for t in tokens[start:i])
        right_has = any(is_verb(t.text) for t in tokens[i + 1 :])
        if left_has and right_has:
            ranges.append((start, i))
            start = i + 1
    ranges.append((start, len(tokens)))
    return [(s, e) for s, e in ranges if s < e]
