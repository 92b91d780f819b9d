"""Rule-based sentence splitter.

Deterministic and model-free so the whole pipeline can run offline. The
rules: a run of '.', '!', '?' ends a sentence when followed by end-of-text,
or by whitespace and then an uppercase letter or digit. A '.' directly
between digits (decimals) never splits, nor does a '.' closing a protected
abbreviation ("Dr.", "etc.", ...). Terminator runs ("...", "?!") stay
attached to the sentence on their left. Text without any terminator is a
single sentence. Symbol-only fragments such as "..." are kept: downstream
assignment routes them to the reserved sink.
"""

from __future__ import annotations

import re
from importlib import resources

from .models import CorpusError, Sentence

TERMINATORS = ".!?"

_WS_RUN = re.compile(r"\s+")


class EmptyTextError(CorpusError):
    pass


def _load_default_abbreviations() -> frozenset[str]:
    text = resources.files("reviewlens.data").joinpath("abbreviations.txt").read_text("utf-8")
    words = {line.strip().lower() for line in text.splitlines()}
    return frozenset(w for w in words if w and not w.startswith("#"))


_DEFAULT_ABBREVIATIONS = _load_default_abbreviations()


def _preceding_word(text: str, dot_index: int) -> str:
    """Dotted word immediately before ``text[dot_index]`` ("e.g", "Dr")."""
    j = dot_index
    while j > 0 and (text[j - 1].isalpha() or text[j - 1] == "."):
        j -= 1
    return text[j:dot_index].lstrip(".")


def split_sentences(
    text: str, abbreviations: frozenset[str] | None = None
) -> list[Sentence]:
    """Split review text into ordered sentences.

    Raises EmptyTextError on whitespace-only input. Joining the returned
    sentences with single spaces and collapsing whitespace runs reproduces
    the input text up to whitespace.
    """
    if not text.strip():
        raise EmptyTextError("cannot split empty or whitespace-only text")
    abbreviations = abbreviations if abbreviations is not None else _DEFAULT_ABBREVIATIONS

    boundaries: list[int] = []  # exclusive end offsets of sentences
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch not in TERMINATORS:
            i += 1
            continue
        run_start = i
        while i < n and text[i] in TERMINATORS:
            i += 1
        run = text[run_start:i]

        # A lone '.' between digits is a decimal point, never a boundary.
        if (
            run == "."
            and run_start > 0
            and text[run_start - 1].isdigit()
            and i < n
            and text[i].isdigit()
        ):
            continue
        # A lone '.' closing a protected abbreviation never ends a sentence.
        if run == "." and _preceding_word(text, run_start).lower() + "." in abbreviations:
            continue

        if i >= n:
            boundaries.append(i)
            continue
        if text[i].isspace():
            j = i
            while j < n and text[j].isspace():
                j += 1
            if j >= n:
                boundaries.append(i)
                i = j
            elif text[j].isupper() or text[j].isdigit():
                boundaries.append(i)
                i = j
        # otherwise: terminator glued to more text ("e.g.com") -> no boundary

    if not boundaries or boundaries[-1] < n:
        boundaries.append(n)

    sentences: list[Sentence] = []
    start = 0
    for end in boundaries:
        piece = text[start:end].strip()
        start = end
        if piece:
            sentences.append(Sentence(index=len(sentences), text=piece))
    return sentences


def normalize_whitespace(text: str) -> str:
    return _WS_RUN.sub(" ", text).strip()


def reconstructs(text: str, sentences: list[Sentence]) -> bool:
    """Conservation check: sentences re-join to the text modulo whitespace."""
    joined = " ".join(s.text for s in sentences)
    return normalize_whitespace(joined) == normalize_whitespace(text)
