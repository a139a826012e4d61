import random
from fractions import Fraction

import pytest

from raplyr.corpus import Section, SectionKind, Song
from raplyr.lexicon import Category, Lexicon, LexiconEntry
from raplyr.rhyme import PronouncingDict

# Synthetic profanity surfaces with ratings; nonsense words keep the test
# corpus printable and guarantee no lemma-rule collisions with filler text.
PROFANITY_RATINGS = {
    "grak": 1.0,
    "drenk": 1.5,
    "vex": 2.0,
    "splug": 2.5,
    "zorp": 3.0,
}

PROFANITY_CATEGORIES = {
    "grak": Category.GENERAL_INSULT,
    "drenk": Category.ANIMAL_REFERENCES,
    "vex": Category.POLITICAL,
    "splug": Category.SEXUAL_ANATOMY_ACTS,
    "zorp": Category.RACIAL_ETHNIC_SLURS,
}

FILLER_WORDS = [
    "night", "city", "flow", "beat", "mic", "stage", "crowd", "light",
    "street", "dream", "time", "rhyme", "line", "mind", "grind", "shine",
]


@pytest.fixture(scope="session")
def mini_lexicon() -> Lexicon:
    return Lexicon(
        LexiconEntry(w, w, PROFANITY_CATEGORIES[w], r) for w, r in PROFANITY_RATINGS.items()
    )


def build_song(lines: list[str], artist="mc test", title="fixture", year=2020) -> Song:
    return Song(
        artist=artist,
        title=title,
        year=year,
        sections=(Section(SectionKind.VERSE, tuple(lines)),),
    )


def random_song(rng: random.Random, n_lines=None, profanity_share=0.2) -> Song:
    """Song over FILLER_WORDS with profanity surfaces planted at a given rate."""
    n_lines = n_lines if n_lines is not None else rng.randint(1, 12)
    profane = sorted(PROFANITY_RATINGS)
    lines = []
    for _ in range(n_lines):
        words = []
        for _ in range(rng.randint(1, 10)):
            if rng.random() < profanity_share:
                words.append(rng.choice(profane))
            else:
                words.append(rng.choice(FILLER_WORDS))
        lines.append(" ".join(words))
    return build_song(lines, title=f"song {rng.random():.6f}")


def exact_ratings() -> dict[str, Fraction]:
    return {w: Fraction(str(r)) for w, r in PROFANITY_RATINGS.items()}


# 30-word pronunciation fixture. FIXTURE_SKELETONS is written out by hand so
# reference computations never route through the parser under test.
FIXTURE_DICT_TEXT = """\
;;; vowels: AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW
walk\tW AO1 K
talk\tT AO1 K
stalk\tS T AO1 K
chalk\tCH AO1 K
cat\tK AE1 T
hat\tHH AE1 T
bat\tB AE1 T
night\tN AY1 T
light\tL AY1 T
right\tR AY1 T
flow\tF L OW1
go\tG OW1
show\tSH OW1
me\tM IY1
free\tF R IY1
see\tS IY1
game\tG EY1 M
name\tN EY1 M
money\tM AH1 N IY0
honey\tHH AH1 N IY0
party\tP AA1 R T IY0
tonight\tT AH0 N AY1 T
believe\tB IH0 L IY1 V
receive\tR IH0 S IY1 V
paradise\tP AE1 R AH0 D AY2 S
recognize\tR EH1 K AH0 G N AY2 Z
the\tDH AH0
in\tIH0 N
a\tAH0
read\tR IY1 D
read\tR EH1 D
"""

FIXTURE_SKELETONS: dict[str, tuple[str, ...]] = {
    "walk": ("AO",),
    "talk": ("AO",),
    "stalk": ("AO",),
    "chalk": ("AO",),
    "cat": ("AE",),
    "hat": ("AE",),
    "bat": ("AE",),
    "night": ("AY",),
    "light": ("AY",),
    "right": ("AY",),
    "flow": ("OW",),
    "go": ("OW",),
    "show": ("OW",),
    "me": ("IY",),
    "free": ("IY",),
    "see": ("IY",),
    "game": ("EY",),
    "name": ("EY",),
    "money": ("AH", "IY"),
    "honey": ("AH", "IY"),
    "party": ("AA", "IY"),
    "tonight": ("AH", "AY"),
    "believe": ("IH", "IY"),
    "receive": ("IH", "IY"),
    "paradise": ("AE", "AH", "AY"),
    "recognize": ("EH", "AH", "AY"),
    "the": ("AH",),
    "in": ("IH",),
    "a": ("AH",),
    "read": ("IY",),
}


@pytest.fixture(scope="session")
def fixture_pdict() -> PronouncingDict:
    return PronouncingDict.loads(FIXTURE_DICT_TEXT)
