"""Corpus model: section parsing, cleaning, dedup, language filter, tokenization.

Raw lyrics arrive as free text with bracketed section headers. This module
turns them into `Song` objects holding only verse lines, ready for annotation
and training.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from importlib import resources as _importlib_resources
from pathlib import Path
from typing import Iterable

from .errors import ParseError

DEFAULT_ENGLISH_THRESHOLD = 0.15

_HEADER_RE = re.compile(r"^\s*\[([^\]]*)\]\s*$")
_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*")
_PAREN_SUFFIX_RE = re.compile(r"\s*\([^()]*\)\s*$")
_VOWELS = frozenset("aeiou")


class SectionKind(Enum):
    VERSE = "verse"
    CHORUS = "chorus"
    INTRO = "intro"
    OUTRO = "outro"
    BRIDGE = "bridge"
    INTERLUDE = "interlude"
    INSTRUMENTAL = "instrumental"
    OTHER = "other"


# Header label prefixes, checked in order; first match wins.
_KIND_PREFIXES = [
    ("verse", SectionKind.VERSE),
    ("chorus", SectionKind.CHORUS),
    ("intro", SectionKind.INTRO),
    ("outro", SectionKind.OUTRO),
    ("bridge", SectionKind.BRIDGE),
    ("interlude", SectionKind.INTERLUDE),
    ("instrumental", SectionKind.INSTRUMENTAL),
]


@dataclass(frozen=True)
class Section:
    kind: SectionKind
    lines: tuple[str, ...]


@dataclass(frozen=True)
class Song:
    artist: str
    title: str
    year: int | None
    sections: tuple[Section, ...]

    def verse_lines(self) -> list[str]:
        return [ln for sec in self.sections if sec.kind is SectionKind.VERSE for ln in sec.lines]


@dataclass(frozen=True)
class TokenizedLine:
    tokens: tuple[str, ...]
    lemmas: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.lemmas):
            raise ValueError("tokens and lemmas must align")


def _kind_for_label(label: str) -> SectionKind:
    label = label.strip().lower()
    for prefix, kind in _KIND_PREFIXES:
        if label.startswith(prefix):
            return kind
    return SectionKind.OTHER


def parse_sections(lyrics_text: str) -> list[Section]:
    """Split lyrics at bracketed headers like ``[Verse 1]``.

    Text before the first header becomes one Verse when the song has no
    headers at all, otherwise an Other section (dropped when blank).
    """
    lines = lyrics_text.splitlines()
    if not any(ln.strip() for ln in lines):
        return []
    has_headers = any(_HEADER_RE.match(ln) for ln in lines)

    sections: list[Section] = []
    current_kind = SectionKind.VERSE if not has_headers else SectionKind.OTHER
    current: list[str] = []
    buffer_is_preamble = has_headers

    def flush() -> None:
        if buffer_is_preamble and not any(s.strip() for s in current):
            return
        sections.append(Section(current_kind, tuple(current)))

    for ln in lines:
        m = _HEADER_RE.match(ln)
        if m is None:
            current.append(ln)
        else:
            flush()
            buffer_is_preamble = False
            current_kind = _kind_for_label(m.group(1))
            current = []
    flush()
    return sections


def _clean_line(line: str) -> str:
    ascii_only = line.encode("ascii", errors="ignore").decode("ascii")
    return " ".join(ascii_only.split())


def clean_song(song: Song) -> Song | None:
    """Keep only Verse sections, strip non-ASCII, drop empty lines.

    Returns None when no verse lines survive.
    """
    kept: list[Section] = []
    for sec in song.sections:
        if sec.kind is not SectionKind.VERSE:
            continue
        lines = [cl for ln in sec.lines if (cl := _clean_line(ln))]
        if lines:
            kept.append(Section(SectionKind.VERSE, tuple(lines)))
    if not kept:
        return None
    return replace(song, sections=tuple(kept))


def tokenize_line(line: str) -> list[str]:
    """Lowercase tokens; punctuation splits except internal apostrophes."""
    return _TOKEN_RE.findall(line.lower())


@lru_cache(maxsize=1)
def load_stopwords() -> frozenset[str]:
    text = _importlib_resources.files("raplyr.resources").joinpath("stopwords.txt").read_text("utf-8")
    words = frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))
    return words


def is_english(song: Song, threshold: float = DEFAULT_ENGLISH_THRESHOLD) -> bool:
    """True iff the stopword token ratio over all verse tokens reaches the threshold."""
    stop = load_stopwords()
    total = 0
    hits = 0
    for line in song.verse_lines():
        for tok in tokenize_line(line):
            total += 1
            if tok in stop:
                hits += 1
    if total == 0:
        return False
    return hits / total >= threshold


def _normalize_title(title: str) -> str:
    t = title.lower()
    while True:
        stripped = _PAREN_SUFFIX_RE.sub("", t)
        if stripped == t:
            break
        t = stripped
    t = re.sub(r"[^a-z0-9\s]", " ", t)
    return " ".join(t.split())


def dedupe_corpus(songs: list[Song]) -> list[Song]:
    """One song per (artist, normalized title): earliest year wins, ties by input order.

    Missing years sort last so a dated original beats an undated re-upload.
    """
    best: dict[tuple[str, str], tuple[tuple[float, int], Song]] = {}
    order: list[tuple[str, str]] = []
    for idx, song in enumerate(songs):
        key = (song.artist.strip().lower(), _normalize_title(song.title))
        rank = (float(song.year) if song.year is not None else float("inf"), idx)
        if key not in best:
            best[key] = (rank, song)
            order.append(key)
        elif rank < best[key][0]:
            best[key] = (rank, song)
    return [best[key][1] for key in order]


@lru_cache(maxsize=1)
def load_default_lemma_table() -> dict[str, str]:
    text = _importlib_resources.files("raplyr.resources").joinpath("lemmas.txt").read_text("utf-8")
    return _parse_lemma_table(text.splitlines())


def load_lemma_table(path: str | Path) -> dict[str, str]:
    """Load a two-column (form<TAB>lemma) table; '#' lines are comments."""
    with open(path, encoding="utf-8") as fh:
        return _parse_lemma_table(fh.read().splitlines())


def _parse_lemma_table(lines: Iterable[str]) -> dict[str, str]:
    table: dict[str, str] = {}
    for no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ParseError("expected two columns (form, lemma)", line_no=no)
        form, lemma = parts[0].strip().lower(), parts[1].strip().lower()
        table[form] = lemma
    # Shield every target lemma from the suffix rules so lemmatize stays idempotent.
    for lemma in list(table.values()):
        table.setdefault(lemma, lemma)
    return table


def lemmatize(token: str, lemma_table: dict[str, str] | None = None) -> str:
    """Table lookup first, then ordered suffix rules, else identity.

    Rules (in order): ies->y, es->, s->, ing-> (with doubled-consonant
    repair), ed->. A rule only applies when the stem keeps >= 2 characters.
    """
    table = lemma_table if lemma_table is not None else load_default_lemma_table()
    hit = table.get(token)
    if hit is not None:
        return hit
    if token.endswith("ies") and len(token) >= 5:
        return token[:-3] + "y"
    if token.endswith("es") and not token.endswith("ies") and len(token) >= 4:
        return token[:-2]
    if token.endswith("s") and not token.endswith("ss") and len(token) >= 3:
        return token[:-1]
    if token.endswith("ing") and len(token) >= 5:
        stem = token[:-3]
        if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS:
            stem = stem[:-1]
        return stem
    if token.endswith("ed") and len(token) >= 4:
        return token[:-2]
    return token


def tokenize_and_lemmatize(line: str, lemma_table: dict[str, str] | None = None) -> TokenizedLine:
    tokens = tuple(tokenize_line(line))
    lemmas = tuple(lemmatize(t, lemma_table) for t in tokens)
    return TokenizedLine(tokens=tokens, lemmas=lemmas)


def corpus_stats(songs: list[Song]) -> dict[str, int]:
    """Song and verse-token counts, the shape used for corpus size reports."""
    tokens = 0
    for song in songs:
        for line in song.verse_lines():
            tokens += len(tokenize_line(line))
    return {"song_count": len(songs), "token_count": tokens}


# --- corpus file round-trip -------------------------------------------------

def song_to_record(song: Song) -> dict:
    return {
        "artist": song.artist,
        "title": song.title,
        "year": song.year,
        "verses": [list(sec.lines) for sec in song.sections if sec.kind is SectionKind.VERSE],
    }


def song_from_record(rec: dict) -> Song:
    sections = tuple(
        Section(SectionKind.VERSE, tuple(lines)) for lines in rec.get("verses", []) if lines
    )
    return Song(
        artist=rec["artist"],
        title=rec["title"],
        year=rec.get("year"),
        sections=sections,
    )


def write_clean_corpus(songs: Iterable[Song], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for song in songs:
            fh.write(json.dumps(song_to_record(song), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_clean_corpus(path: str | Path) -> list[Song]:
    songs: list[Song] = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                songs.append(song_from_record(rec))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"bad corpus record: {exc}", line_no=no) from exc
    return songs
