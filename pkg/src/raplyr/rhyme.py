"""Phoneme-based rhyme metrics.

A token's vowel skeleton is the vowel sequence of its primary pronunciation,
stress marks removed. Each token is scored by the longest suffix of its
skeleton that reappears as a contiguous vowel run ending inside one of the
preceding `window` tokens (with a different surface form); rhyme density is
the mean score over tokens that have a pronunciation.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources as _importlib_resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .corpus import tokenize_line
from .errors import EmptyInput, ParseError, PhonemizerProcessError

DEFAULT_WINDOW = 15
HIGH_DENSITY_CUTOFF = 1.0

ARPABET_VOWELS = (
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW",
)

ARPABET_CONSONANTS = frozenset(
    {
        "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
        "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH",
    }
)

# Vowel code points seen in broad IPA transcriptions; the length mark rides
# along so "ɑː" stays one unit.
IPA_VOWELS = frozenset(
    "aeiouy"
    "æ"  # ae ligature
    "ɑɒɔəɚɛɜɝɪʊʌ"
    "øœɶɯɨʉɐɤʏ"
    "ːˑ"  # length marks
)

_VOWEL_DIRECTIVE = ";;; vowels:"


def strip_stress(phone: str) -> str:
    return phone[:-1] if phone and phone[-1].isdigit() else phone


class PronouncingDict:
    """Word to ARPABET pronunciations; first listed pronunciation is primary."""

    def __init__(
        self,
        prons: dict[str, list[tuple[str, ...]]],
        vowels: Sequence[str] = ARPABET_VOWELS,
    ):
        self._prons = prons
        self.vowels = frozenset(vowels)

    @classmethod
    def loads(cls, text: str) -> "PronouncingDict":
        vowels: tuple[str, ...] = ARPABET_VOWELS
        for raw in text.splitlines():
            if raw.lower().startswith(_VOWEL_DIRECTIVE):
                vowels = tuple(raw[len(_VOWEL_DIRECTIVE) :].split())
                break
        inventory = frozenset(vowels) | ARPABET_CONSONANTS
        prons: dict[str, list[tuple[str, ...]]] = {}
        for no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith(";;;"):
                continue
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParseError("expected 'word<TAB>PH PH ...'", line_no=no)
            word = parts[0].lower()
            phones = tuple(parts[1].split())
            for ph in phones:
                base = strip_stress(ph)
                if base not in inventory:
                    raise ParseError(f"unknown phone {ph!r}", line_no=no)
                if base != ph and base not in vowels:
                    raise ParseError(f"stress digit on consonant {ph!r}", line_no=no)
            prons.setdefault(word, []).append(phones)
        return cls(prons, vowels)

    @classmethod
    def load(cls, path: str | Path) -> "PronouncingDict":
        return cls.loads(Path(path).read_text("utf-8"))

    def dumps(self) -> str:
        lines = [_VOWEL_DIRECTIVE + " " + " ".join(sorted(self.vowels))]
        for word in sorted(self._prons):
            for phones in self._prons[word]:
                lines.append(word + "\t" + " ".join(phones))
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), "utf-8")

    def pronunciations(self, word: str) -> list[tuple[str, ...]]:
        return list(self._prons.get(word.lower(), []))

    def skeleton(self, word: str) -> tuple[str, ...]:
        """Stress-stripped vowels of the primary pronunciation; () when unknown."""
        prons = self._prons.get(word.lower())
        if not prons:
            return ()
        return tuple(
            strip_stress(ph) for ph in prons[0] if strip_stress(ph) in self.vowels
        )

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._prons

    def __len__(self) -> int:
        return len(self._prons)

    def words(self) -> list[str]:
        return sorted(self._prons)


@lru_cache(maxsize=1)
def load_default_dict() -> PronouncingDict:
    text = _importlib_resources.files("raplyr.resources").joinpath("pronounce_en.txt").read_text("utf-8")
    return PronouncingDict.loads(text)


# Broad-transcription vowel runs mapped onto the matching dictionary symbol,
# so hook output can rhyme against dictionary skeletons. Unknown runs pass
# through unchanged and only rhyme with themselves.
IPA_RUN_TO_ARPABET = {
    "aɪ": "AY",
    "eɪ": "EY",
    "i": "IY",
    "iː": "IY",
    "ɪ": "IH",
    "ɛ": "EH",
    "e": "EH",
    "æ": "AE",
    "a": "AA",
    "ɑ": "AA",
    "ɑː": "AA",
    "ɒ": "AA",
    "ɔ": "AO",
    "ɔː": "AO",
    "oʊ": "OW",
    "əʊ": "OW",
    "o": "OW",
    "ʊ": "UH",
    "u": "UW",
    "uː": "UW",
    "ʌ": "AH",
    "ə": "AH",
    "ɐ": "AH",
    "ɜ": "ER",
    "ɜː": "ER",
    "ɝ": "ER",
    "ɚ": "ER",
    "aʊ": "AW",
    "ɔɪ": "OY",
}


def ipa_skeleton(ipa: str) -> tuple[str, ...]:
    """Maximal runs of IPA vowel characters, each run one skeleton unit."""
    units: list[str] = []
    run = ""
    for ch in ipa:
        if ch in IPA_VOWELS:
            run += ch
        elif run:
            units.append(run)
            run = ""
    if run:
        units.append(run)
    return tuple(IPA_RUN_TO_ARPABET.get(u, u) for u in units)


@dataclass
class ExternalPhonemizer:
    """Line-oriented subprocess hook: one token per input line, IPA per output line."""

    command: list[str]
    timeout: float = 30.0

    def __call__(self, tokens: Sequence[str]) -> list[str]:
        if not tokens:
            return []
        try:
            proc = subprocess.run(
                self.command,
                input="\n".join(tokens) + "\n",
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired as exc:
            raise PhonemizerProcessError(f"phonemizer timed out after {self.timeout}s") from exc
        except OSError as exc:
            raise PhonemizerProcessError(f"could not run phonemizer: {exc}") from exc
        if proc.returncode != 0:
            raise PhonemizerProcessError(
                f"phonemizer exited {proc.returncode}: {proc.stderr.strip()[:200]}"
            )
        lines = proc.stdout.splitlines()
        if len(lines) < len(tokens):
            raise PhonemizerProcessError(
                f"phonemizer returned {len(lines)} lines for {len(tokens)} tokens"
            )
        return [ln.strip() for ln in lines[: len(tokens)]]


Phonemizer = Callable[[Sequence[str]], list[str]]


def _resolve_skeletons(
    tokens: Sequence[str],
    pdict: PronouncingDict,
    phonemizer: Phonemizer | None,
) -> list[tuple[str, ...]]:
    skeletons = [pdict.skeleton(t) for t in tokens]
    if phonemizer is None:
        return skeletons
    missing_idx = [i for i, sk in enumerate(skeletons) if not sk and tokens[i] not in pdict]
    if not missing_idx:
        return skeletons
    # One subprocess call for the whole batch of unknown tokens.
    seen: dict[str, tuple[str, ...]] = {}
    batch = []
    for i in missing_idx:
        if tokens[i] not in seen:
            seen[tokens[i]] = ()
            batch.append(tokens[i])
    ipa_lines = phonemizer(batch)
    for tok, ipa in zip(batch, ipa_lines):
        seen[tok] = ipa_skeleton(ipa)
    for i in missing_idx:
        skeletons[i] = seen[tokens[i]]
    return skeletons


@dataclass(frozen=True)
class TokenRhyme:
    token: str
    skeleton: tuple[str, ...]
    score: int

    @property
    def in_vocab(self) -> bool:
        return bool(self.skeleton)


@dataclass(frozen=True)
class RhymeDensityResult:
    density: float
    tokens: tuple[TokenRhyme, ...]
    oov_count: int
    window: int

    @property
    def scored_count(self) -> int:
        return len(self.tokens) - self.oov_count

    @property
    def high(self) -> bool:
        return self.density > HIGH_DENSITY_CUTOFF


def rhyme_scores(
    tokens: Sequence[str],
    pdict: PronouncingDict | None = None,
    window: int = DEFAULT_WINDOW,
    phonemizer: Phonemizer | None = None,
) -> list[TokenRhyme]:
    """Score each token; OOV tokens get skeleton () and score 0."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    pdict = pdict if pdict is not None else load_default_dict()
    surfaces = [t.lower() for t in tokens]
    skeletons = _resolve_skeletons(surfaces, pdict, phonemizer)

    stream: list[str] = []
    owner: list[int] = []
    tok_span: list[tuple[int, int] | None] = []  # [start, end) into stream
    for idx, sk in enumerate(skeletons):
        start = len(stream)
        stream.extend(sk)
        owner.extend([idx] * len(sk))
        tok_span.append((start, len(stream)) if sk else None)

    out: list[TokenRhyme] = []
    for i, sk in enumerate(skeletons):
        if not sk:
            out.append(TokenRhyme(surfaces[i], (), 0))
            continue
        lo_tok = max(0, i - window)
        # Stream range covering tokens [lo_tok, i-1]; empty-skeleton tokens
        # contribute nothing, so scan between the first vowel at or after
        # lo_tok and the last vowel before token i.
        span_end = tok_span[i][0] if tok_span[i] else len(stream)
        span_start = next(
            (tok_span[j][0] for j in range(lo_tok, i) if tok_span[j]), span_end
        )
        best = 0
        for p in range(span_start, span_end):
            j = owner[p]
            if surfaces[j] == surfaces[i]:
                continue
            length = 0
            while (
                length < len(sk)
                and p - length >= 0
                and stream[p - length] == sk[len(sk) - 1 - length]
            ):
                length += 1
            if length > best:
                best = length
        out.append(TokenRhyme(surfaces[i], sk, best))
    return out


def rhyme_density(
    text_or_tokens: str | Sequence[str],
    pdict: PronouncingDict | None = None,
    window: int = DEFAULT_WINDOW,
    phonemizer: Phonemizer | None = None,
) -> RhymeDensityResult:
    """Mean rhyme score over tokens with pronunciations.

    Accepts raw text (tokenized line by line, scored as one stream) or an
    already-tokenized sequence. Raises EmptyInput when no token has a
    pronunciation.
    """
    if isinstance(text_or_tokens, str):
        tokens = [t for line in text_or_tokens.splitlines() for t in tokenize_line(line)]
    else:
        tokens = [t.lower() for t in text_or_tokens]
    scored = rhyme_scores(tokens, pdict, window=window, phonemizer=phonemizer)
    in_vocab = [t.score for t in scored if t.in_vocab]
    oov = len(scored) - len(in_vocab)
    if not in_vocab:
        raise EmptyInput("no tokens with pronunciations to score")
    density = sum(in_vocab) / len(in_vocab)
    return RhymeDensityResult(
        density=density, tokens=tuple(scored), oov_count=oov, window=window
    )
