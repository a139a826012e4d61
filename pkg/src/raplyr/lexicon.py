"""Profanity lexicon: CSV loading, severity buckets, category taxonomy, lookup.

The expected CSV shape matches the public crowdsourced obscenity list: one row
per headword with up to three spelling variants, a category label, and a mean
severity rating on a 1..3 scale.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import ParseError, SeverityOutOfRange

SEVERITY_MIN = 1.0
SEVERITY_MAX = 3.0

CSV_COLUMNS = [
    "text",
    "canonical_form_1",
    "canonical_form_2",
    "canonical_form_3",
    "category_1",
    "severity_rating",
    "severity_description",
]


class Category(Enum):
    SEXUAL_ANATOMY_ACTS = "sexual anatomy / sexual acts"
    BODILY_FLUIDS_EXCREMENT = "bodily fluids / excrement"
    SEXUAL_ORIENTATION_GENDER = "sexual orientation / gender"
    RACIAL_ETHNIC_SLURS = "racial / ethnic slurs"
    MENTAL_DISABILITY = "mental disability"
    PHYSICAL_DISABILITY = "physical disability"
    PHYSICAL_ATTRIBUTES = "physical attributes"
    ANIMAL_REFERENCES = "animal references"
    RELIGIOUS_OFFENSE = "religious offense"
    POLITICAL = "political"
    GENERAL_INSULT = "other / general insult"


class SeverityBucket(Enum):
    MILD = "mild"
    STRONG = "strong"
    SEVERE = "severe"


def severity_bucket(rating: float) -> SeverityBucket:
    """Mild [1.0, 1.5), Strong [1.5, 2.5), Severe [2.5, 3.0]."""
    if not SEVERITY_MIN <= rating <= SEVERITY_MAX:
        raise SeverityOutOfRange(f"severity {rating!r} outside [{SEVERITY_MIN}, {SEVERITY_MAX}]")
    if rating < 1.5:
        return SeverityBucket.MILD
    if rating < 2.5:
        return SeverityBucket.STRONG
    return SeverityBucket.SEVERE


def _normalize_category_text(raw: str) -> str:
    out = []
    for ch in raw.lower():
        out.append(ch if ch.isalnum() else " ")
    return " ".join("".join(out).split())


_CATEGORY_ALIASES: dict[str, Category] = {}
for _cat in Category:
    _CATEGORY_ALIASES[_normalize_category_text(_cat.value)] = _cat
_CATEGORY_ALIASES.update(
    {
        "sexual anatomy sexual acts": Category.SEXUAL_ANATOMY_ACTS,
        "bodily fluids excrement": Category.BODILY_FLUIDS_EXCREMENT,
        "sexual orientation gender": Category.SEXUAL_ORIENTATION_GENDER,
        "racial ethnic slurs": Category.RACIAL_ETHNIC_SLURS,
        "other general insult": Category.GENERAL_INSULT,
        "general insult": Category.GENERAL_INSULT,
        "other": Category.GENERAL_INSULT,
        "animal references general insult": Category.ANIMAL_REFERENCES,
        "religious offense general insult": Category.RELIGIOUS_OFFENSE,
    }
)


def parse_category(raw: str) -> Category:
    key = _normalize_category_text(raw)
    try:
        return _CATEGORY_ALIASES[key]
    except KeyError:
        raise ParseError(f"unknown category {raw!r}") from None


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    canonical: str
    category: Category
    severity: float

    @property
    def bucket(self) -> SeverityBucket:
        return severity_bucket(self.severity)


class Lexicon:
    """Surface-form index over profanity entries.

    lookup() tries the token itself first, then its lemma, so inflected
    variants of a listed word still match.
    """

    def __init__(self, entries: Iterable[LexiconEntry] = ()):
        self._by_surface: dict[str, LexiconEntry] = {}
        for entry in entries:
            self.add(entry)

    def add(self, entry: LexiconEntry) -> None:
        surface = entry.surface.strip().lower()
        if not surface:
            return
        if surface != entry.surface:
            entry = LexiconEntry(surface, entry.canonical, entry.category, entry.severity)
        severity_bucket(entry.severity)  # range check
        prior = self._by_surface.get(surface)
        # Conflicting rows: keep the harsher rating.
        if prior is None or entry.severity > prior.severity:
            self._by_surface[surface] = entry

    def lookup(self, token: str, lemma: str | None = None) -> LexiconEntry | None:
        hit = self._by_surface.get(token)
        if hit is not None:
            return hit
        if lemma is not None and lemma != token:
            return self._by_surface.get(lemma)
        return None

    def __len__(self) -> int:
        return len(self._by_surface)

    def __contains__(self, surface: str) -> bool:
        return surface in self._by_surface

    def entries(self) -> list[LexiconEntry]:
        return sorted(self._by_surface.values(), key=lambda e: e.surface)

    def surfaces(self) -> set[str]:
        return set(self._by_surface)


def _rows_to_entries(rows: Iterable[dict], strict: bool = True) -> Iterable[LexiconEntry]:
    for no, row in enumerate(rows, start=2):  # row 1 is the header
        text = (row.get("text") or "").strip().lower()
        if not text:
            continue
        variants = []
        for col in ("canonical_form_1", "canonical_form_2", "canonical_form_3"):
            v = (row.get(col) or "").strip().lower()
            if v:
                variants.append(v)
        raw_category = (row.get("category_1") or "").strip()
        raw_severity = (row.get("severity_rating") or "").strip()
        try:
            category = parse_category(raw_category)
            severity = float(raw_severity)
            severity_bucket(severity)
        except ParseError as exc:
            if not strict:
                continue
            if exc.line_no is None:
                raise type(exc)(str(exc), line_no=no) from exc
            raise
        except ValueError as exc:
            if not strict:
                continue
            raise ParseError(f"bad severity {raw_severity!r}", line_no=no) from exc
        canonical = variants[0] if variants else text
        yield LexiconEntry(text, canonical, category, severity)
        for v in variants:
            yield LexiconEntry(v, v, category, severity)


def load_lexicon_csv(path: str | Path, strict: bool = True) -> Lexicon:
    with open(path, encoding="utf-8", newline="") as fh:
        return _load_from_reader(fh, strict=strict)


def load_lexicon_csv_text(text: str, strict: bool = True) -> Lexicon:
    return _load_from_reader(io.StringIO(text), strict=strict)


def _load_from_reader(fh, strict: bool) -> Lexicon:
    reader = csv.DictReader(fh)
    if reader.fieldnames is None:
        raise ParseError("empty lexicon file")
    missing = {"text", "category_1", "severity_rating"} - set(reader.fieldnames)
    if missing:
        raise ParseError(f"lexicon header missing columns: {sorted(missing)}")
    return Lexicon(_rows_to_entries(reader, strict=strict))


def save_lexicon_csv(lexicon: Lexicon, path: str | Path) -> None:
    """Write one row per surface; variants were already expanded at load time."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for entry in lexicon.entries():
            writer.writerow(
                {
                    "text": entry.surface,
                    "canonical_form_1": entry.canonical,
                    "canonical_form_2": "",
                    "canonical_form_3": "",
                    "category_1": entry.category.value,
                    "severity_rating": repr(entry.severity),
                    "severity_description": entry.bucket.value,
                }
            )


OBSCENITY_LIST_URL = (
    "https://raw.githubusercontent.com/surge-ai/profanity/main/profanity_en.csv"
)


def download_lexicon(dest: str | Path, url: str = OBSCENITY_LIST_URL, session=None) -> Path:
    """Fetch the crowdsourced obscenity CSV and store it at dest."""
    import requests

    sess = session if session is not None else requests.Session()
    resp = sess.get(url, timeout=30)
    resp.raise_for_status()
    dest = Path(dest)
    dest.write_text(resp.text, encoding="utf-8")
    return dest
