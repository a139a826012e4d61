"""Profanity scoring and corpus filtering.

A line's weighted severity is the sum of matched ratings divided by its token
count. A song's slur score is the mean over lines that have at least one
token. Filtering keeps songs whose slur score stays at or below a threshold,
either a fixed value or a quantile of the corpus distribution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Song, lemmatize, song_from_record, song_to_record, tokenize_line
from .errors import EmptyCorpus, EmptySong, ParseError
from .lexicon import Category, Lexicon

# Fixed fallback cutoff, picked to sit near the third quartile of a typical
# uncurated corpus; quantile mode recomputes it from the data at hand.
DEFAULT_SLUR_THRESHOLD = 0.05
DEFAULT_FILTER_QUANTILE = 0.75


@dataclass(frozen=True)
class Match:
    token_index: int
    surface: str
    category: Category
    severity: float


@dataclass(frozen=True)
class LineAnnotation:
    line_index: int
    token_count: int
    ws_score: float
    matches: tuple[Match, ...]


@dataclass(frozen=True)
class SongAnnotation:
    song: Song
    slur_score: float
    lines: tuple[LineAnnotation, ...]


def match_tokens(
    tokens: Sequence[str], lexicon: Lexicon, lemma_table: dict[str, str] | None = None
) -> list[Match]:
    out: list[Match] = []
    for i, tok in enumerate(tokens):
        entry = lexicon.lookup(tok, lemma=lemmatize(tok, lemma_table))
        if entry is not None:
            out.append(Match(i, tok, entry.category, entry.severity))
    return out


def ws_score(line: str, lexicon: Lexicon, lemma_table: dict[str, str] | None = None) -> float:
    """Sum of matched severities over the line's token count; 0.0 for a tokenless line."""
    tokens = tokenize_line(line)
    if not tokens:
        return 0.0
    matches = match_tokens(tokens, lexicon, lemma_table)
    return sum(m.severity for m in matches) / len(tokens)


def annotate_song(
    song: Song, lexicon: Lexicon, lemma_table: dict[str, str] | None = None
) -> SongAnnotation:
    lines: list[LineAnnotation] = []
    total = 0.0
    counted = 0
    for idx, line in enumerate(song.verse_lines()):
        tokens = tokenize_line(line)
        if tokens:
            matches = tuple(match_tokens(tokens, lexicon, lemma_table))
            score = sum(m.severity for m in matches) / len(tokens)
            counted += 1
            total += score
        else:
            matches = ()
            score = 0.0
        lines.append(LineAnnotation(idx, len(tokens), score, matches))
    if counted == 0:
        raise EmptySong(f"no scoreable lines in {song.artist!r} - {song.title!r}")
    return SongAnnotation(song=song, slur_score=total / counted, lines=tuple(lines))


def slur_score(song: Song, lexicon: Lexicon, lemma_table: dict[str, str] | None = None) -> float:
    return annotate_song(song, lexicon, lemma_table).slur_score


def annotate_corpus(
    songs: Iterable[Song], lexicon: Lexicon, lemma_table: dict[str, str] | None = None
) -> list[SongAnnotation]:
    return [annotate_song(s, lexicon, lemma_table) for s in songs]


def quantile_threshold(scores: Sequence[float], q: float | Fraction = DEFAULT_FILTER_QUANTILE) -> float:
    """Nearest-rank quantile: the ceil(q*n)-th smallest score, 1-based.

    q is read as its decimal literal (0.75 means exactly 3/4) so the rank is
    never thrown off by binary float fuzz at exact multiples.
    """
    if not scores:
        raise EmptyCorpus("no scores to take a quantile of")
    q_exact = q if isinstance(q, Fraction) else Fraction(str(q))
    if not 0 < q_exact <= 1:
        raise ValueError(f"quantile must be in (0, 1], got {q!r}")
    rank = math.ceil(q_exact * len(scores))
    return sorted(scores)[rank - 1]


def filter_corpus(
    annotations: Sequence[SongAnnotation], threshold: float = DEFAULT_SLUR_THRESHOLD
) -> list[SongAnnotation]:
    """Keep songs whose slur score is at or below the threshold."""
    return [a for a in annotations if a.slur_score <= threshold]


def filter_corpus_by_quantile(
    annotations: Sequence[SongAnnotation], q: float | Fraction = DEFAULT_FILTER_QUANTILE
) -> tuple[list[SongAnnotation], float]:
    """Threshold at the corpus's own q-quantile; returns (kept, threshold)."""
    threshold = quantile_threshold([a.slur_score for a in annotations], q)
    return filter_corpus(annotations, threshold), threshold


# --- annotated corpus files --------------------------------------------------

def annotation_to_record(ann: SongAnnotation) -> dict:
    rec = song_to_record(ann.song)
    rec["slur_score"] = ann.slur_score
    rec["lines"] = [
        {
            "line_index": ln.line_index,
            "token_count": ln.token_count,
            "ws_score": ln.ws_score,
            "matches": [
                {
                    "token_index": m.token_index,
                    "surface": m.surface,
                    "category": m.category.value,
                    "severity": m.severity,
                }
                for m in ln.matches
            ],
        }
        for ln in ann.lines
    ]
    return rec


def annotation_from_record(rec: dict) -> SongAnnotation:
    song = song_from_record(rec)
    lines = tuple(
        LineAnnotation(
            line_index=ln["line_index"],
            token_count=ln["token_count"],
            ws_score=ln["ws_score"],
            matches=tuple(
                Match(m["token_index"], m["surface"], Category(m["category"]), m["severity"])
                for m in ln.get("matches", [])
            ),
        )
        for ln in rec.get("lines", [])
    )
    return SongAnnotation(song=song, slur_score=rec["slur_score"], lines=lines)


def write_annotated_corpus(annotations: Iterable[SongAnnotation], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for ann in annotations:
            fh.write(json.dumps(annotation_to_record(ann), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_annotated_corpus(path: str | Path) -> list[SongAnnotation]:
    out: list[SongAnnotation] = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(annotation_from_record(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad annotated record: {exc}", line_no=no) from exc
    return out
