"""Seeded n-gram line generation.

The model trains on a token stream where every verse line is preceded by the
separator token ``line:``, so sampling the separator ends a line naturally.
Completion uses top-k sampling driven by a self-contained xorshift64* RNG so
identical seeds reproduce identical lines on any platform.
"""

from __future__ import annotations

import json
import math
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Song, tokenize_line
from .errors import (
    EmptyCorpus,
    EmptyInput,
    EmptyQuery,
    ParseError,
    ProcessError,
    ProcessTimeout,
)
from .lexicon import Lexicon
from .rhyme import DEFAULT_WINDOW, PronouncingDict, rhyme_scores
from .scoring import ws_score

SEPARATOR = "line:"

DEFAULT_ORDER = 4
DEFAULT_ADD_K = 0.01
DEFAULT_BACKOFF = 0.4
DEFAULT_TOP_K = 50
DEFAULT_MIN_TOKENS = 4
DEFAULT_MAX_TOKENS = 50
DEFAULT_CANDIDATES = 8

MODEL_FORMAT_VERSION = 1

_MASK64 = (1 << 64) - 1


class Xorshift64Star:
    """xorshift64* with a splitmix64-scrambled seed.

    Bit-exact definition:
      seed' = splitmix64(seed & 2^64-1); state = seed' or 0x9E3779B97F4A7C15 if 0
      step:  s ^= s >> 12; s ^= (s << 25) & 2^64-1; s ^= s >> 27
      out:   (s * 0x2545F4914F6CDD1D) & 2^64-1
      uniform: (out >> 11) * 2**-53
    """

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        z = (seed + 0x9E3779B97F4A7C15) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        self.state = z if z != 0 else 0x9E3779B97F4A7C15

    def next_uint64(self) -> int:
        s = self.state
        s ^= s >> 12
        s = (s ^ ((s << 25) & _MASK64))
        s ^= s >> 27
        self.state = s
        return (s * 0x2545F4914F6CDD1D) & _MASK64

    def uniform(self) -> float:
        return (self.next_uint64() >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection on the top 53 bits."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        span = 1 << 53
        limit = span - (span % n)
        while True:
            v = self.next_uint64() >> 11
            if v < limit:
                return v % n


def prepare_stream(lines: Iterable[str]) -> list[str]:
    """Lowercased token stream with a separator before every non-empty line."""
    stream: list[str] = []
    for line in lines:
        tokens = tokenize_line(line)
        if not tokens:
            continue
        stream.append(SEPARATOR)
        stream.extend(tokens)
    return stream


class NgramModel:
    """Interpolated add-k n-gram model over the prepared token stream."""

    def __init__(
        self,
        counts: dict[int, dict[tuple[str, ...], int]],
        order: int = DEFAULT_ORDER,
        add_k: float = DEFAULT_ADD_K,
        backoff: float = DEFAULT_BACKOFF,
        name: str = "ngram",
    ):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if add_k <= 0:
            raise ValueError(f"add_k must be positive, got {add_k}")
        if not 0 <= backoff < 1:
            raise ValueError(f"backoff weight must be in [0, 1), got {backoff}")
        self.order = order
        self.add_k = add_k
        self.backoff = backoff
        self.name = name
        self.counts = counts
        uni = counts.get(1, {})
        if not uni:
            raise EmptyCorpus("model has no unigram counts")
        self._unigram = {ng[0]: c for ng, c in uni.items()}
        self._unigram_total = sum(self._unigram.values())
        self.vocab = tuple(sorted(self._unigram))
        # followers[n][ctx] -> {token: count}; totals[n][ctx] -> sum
        self._followers: dict[int, dict[tuple[str, ...], dict[str, int]]] = {}
        self._totals: dict[int, dict[tuple[str, ...], int]] = {}
        for n in range(2, order + 1):
            table: dict[tuple[str, ...], dict[str, int]] = {}
            for ngram, c in counts.get(n, {}).items():
                table.setdefault(ngram[:-1], {})[ngram[-1]] = c
            self._followers[n] = table
            self._totals[n] = {ctx: sum(f.values()) for ctx, f in table.items()}

    # -- probabilities -------------------------------------------------------

    def probability(self, context: Sequence[str], token: str) -> float:
        """P(token | context); context longer than order-1 uses its tail."""
        ctx = tuple(context)
        use = min(self.order, len(ctx) + 1)
        ctx = ctx[len(ctx) - (use - 1) :] if use > 1 else ()
        return self._prob(use, ctx, token)

    def _prob(self, n: int, ctx: tuple[str, ...], token: str) -> float:
        k = self.add_k
        v = len(self.vocab)
        if n == 1:
            return (self._unigram.get(token, 0) + k) / (self._unigram_total + k * v)
        lower = self._prob(n - 1, ctx[1:], token)
        followers = self._followers[n].get(ctx)
        if not followers:
            return lower
        total = self._totals[n][ctx]
        direct = (followers.get(token, 0) + k) / (total + k * v)
        return (1 - self.backoff) * direct + self.backoff * lower

    def next_distribution(self, context: Sequence[str]) -> dict[str, float]:
        """Full distribution over the vocabulary for the given context."""
        ctx = tuple(context)
        use = min(self.order, len(ctx) + 1)
        ctx = ctx[len(ctx) - (use - 1) :] if use > 1 else ()
        return {tok: self._prob(use, ctx, tok) for tok in self.vocab}

    def perplexity(self, lines: Iterable[str]) -> float:
        """exp(-mean ln p) over the prepared stream, separators included."""
        stream = prepare_stream(lines)
        if not stream:
            raise EmptyInput("no tokens to evaluate perplexity on")
        total = 0.0
        for i, token in enumerate(stream):
            ctx = stream[max(0, i - (self.order - 1)) : i]
            total += math.log(self.probability(ctx, token))
        return math.exp(-total / len(stream))

    # -- persistence ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "order": self.order,
            "add_k": self.add_k,
            "backoff": self.backoff,
            "name": self.name,
            "ngrams": {
                str(n): {" ".join(ng): c for ng, c in table.items()}
                for n, table in self.counts.items()
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "NgramModel":
        version = data.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise ParseError(f"unsupported model format_version {version!r}")
        try:
            counts = {
                int(n): {tuple(key.split(" ")): int(c) for key, c in table.items()}
                for n, table in data["ngrams"].items()
            }
            return cls(
                counts,
                order=data["order"],
                add_k=data["add_k"],
                backoff=data["backoff"],
                name=data.get("name", "ngram"),
            )
        except (KeyError, ValueError, AttributeError) as exc:
            raise ParseError(f"bad model file: {exc}") from exc

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path: str | Path) -> "NgramModel":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"model file is not valid JSON: {exc}") from exc
        return cls.from_json(data)


def train(
    lines: Iterable[str],
    order: int = DEFAULT_ORDER,
    add_k: float = DEFAULT_ADD_K,
    backoff: float = DEFAULT_BACKOFF,
    name: str = "ngram",
) -> NgramModel:
    """Count n-grams of every size up to `order` over the prepared stream."""
    stream = prepare_stream(lines)
    if not stream:
        raise EmptyCorpus("no trainable lines")
    counts: dict[int, dict[tuple[str, ...], int]] = {n: {} for n in range(1, order + 1)}
    for n in range(1, order + 1):
        table = counts[n]
        for i in range(len(stream) - n + 1):
            ngram = tuple(stream[i : i + n])
            table[ngram] = table.get(ngram, 0) + 1
    return NgramModel(counts, order=order, add_k=add_k, backoff=backoff, name=name)


def train_on_songs(songs: Iterable[Song], **kwargs) -> NgramModel:
    return train((ln for s in songs for ln in s.verse_lines()), **kwargs)


# -- completion ----------------------------------------------------------------


@dataclass(frozen=True)
class StepTrace:
    candidates: tuple[str, ...]
    probabilities: tuple[float, ...]
    separator_masked: bool
    draw: float
    chosen: str


@dataclass(frozen=True)
class Completion:
    text: str
    tokens: tuple[str, ...]
    seed: int
    ended_by_separator: bool


def _query_context(query_lines: Sequence[str]) -> list[str]:
    context: list[str] = []
    for line in query_lines:
        tokens = tokenize_line(line)
        if not tokens:
            continue
        context.append(SEPARATOR)
        context.extend(tokens)
    if not context:
        raise EmptyQuery("query has no tokens")
    context.append(SEPARATOR)  # open a fresh line for the completion
    return context


def complete(
    model: NgramModel,
    query_lines: Sequence[str],
    seed: int = 0,
    k: int = DEFAULT_TOP_K,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    trace: list[StepTrace] | None = None,
) -> Completion:
    """Sample one line continuing the query, top-k at each step.

    While the line is shorter than min_tokens the separator is removed from
    the full distribution before the top-k cut, so short lines cannot end
    early even at k=1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if min_tokens < 0 or max_tokens < 1 or min_tokens > max_tokens:
        raise ValueError(f"bad token bounds [{min_tokens}, {max_tokens}]")
    context = _query_context(query_lines)
    rng = Xorshift64Star(seed)
    generated: list[str] = []
    ended_by_separator = False
    while len(generated) < max_tokens:
        window = (context + generated)[-(model.order - 1) :] if model.order > 1 else []
        dist = model.next_distribution(window)
        masked = len(generated) < min_tokens
        if masked:
            dist = {t: p for t, p in dist.items() if t != SEPARATOR}
        ranked = sorted(dist.items(), key=lambda item: (-item[1], item[0]))[:k]
        total = sum(p for _, p in ranked)
        r = rng.uniform()
        chosen = ranked[-1][0]
        cum = 0.0
        for tok, p in ranked:
            cum += p / total
            if r < cum:
                chosen = tok
                break
        if trace is not None:
            trace.append(
                StepTrace(
                    candidates=tuple(t for t, _ in ranked),
                    probabilities=tuple(p / total for _, p in ranked),
                    separator_masked=masked,
                    draw=r,
                    chosen=chosen,
                )
            )
        if chosen == SEPARATOR:
            ended_by_separator = True
            break
        generated.append(chosen)
    return Completion(
        text=" ".join(generated),
        tokens=tuple(generated),
        seed=seed,
        ended_by_separator=ended_by_separator,
    )


def completion_rhyme_density(
    query_lines: Sequence[str],
    completion_tokens: Sequence[str],
    pdict: PronouncingDict | None = None,
    window: int = DEFAULT_WINDOW,
) -> float:
    """Mean rhyme score of the completion's tokens, query visible as context.

    Returns 0.0 when no completion token has a pronunciation.
    """
    query_tokens = [t for line in query_lines for t in tokenize_line(line)]
    all_tokens = query_tokens + [t.lower() for t in completion_tokens]
    if not completion_tokens:
        return 0.0
    scored = rhyme_scores(all_tokens, pdict, window=window)
    tail = scored[len(query_tokens) :]
    in_vocab = [t.score for t in tail if t.in_vocab]
    if not in_vocab:
        return 0.0
    return sum(in_vocab) / len(in_vocab)


@dataclass(frozen=True)
class RankedCandidate:
    completion: Completion
    rhyme_density: float
    slur_score: float
    seed_offset: int


@dataclass(frozen=True)
class RerankedCompletion:
    chosen: RankedCandidate
    candidates: tuple[RankedCandidate, ...]

    @property
    def text(self) -> str:
        return self.chosen.completion.text


def complete_reranked(
    model: NgramModel,
    query_lines: Sequence[str],
    seed: int = 0,
    num_candidates: int = DEFAULT_CANDIDATES,
    k: int = DEFAULT_TOP_K,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    pdict: PronouncingDict | None = None,
    window: int = DEFAULT_WINDOW,
    lexicon: Lexicon | None = None,
) -> RerankedCompletion:
    """Draw candidates at seed, seed+1, ... and keep the densest rhyme.

    Candidate 0 reuses the plain seed, so reranking can only match or beat a
    single unranked draw on rhyme density. Ties prefer the lower slur score,
    then the earlier candidate.
    """
    if num_candidates < 1:
        raise ValueError(f"num_candidates must be >= 1, got {num_candidates}")
    candidates: list[RankedCandidate] = []
    for offset in range(num_candidates):
        comp = complete(
            model,
            query_lines,
            seed=seed + offset,
            k=k,
            min_tokens=min_tokens,
            max_tokens=max_tokens,
        )
        rd = completion_rhyme_density(query_lines, comp.tokens, pdict, window)
        slur = ws_score(comp.text, lexicon) if lexicon is not None and comp.text else 0.0
        candidates.append(RankedCandidate(comp, rd, slur, offset))
    chosen = min(candidates, key=lambda c: (-c.rhyme_density, c.slur_score, c.seed_offset))
    return RerankedCompletion(chosen=chosen, candidates=tuple(candidates))


@dataclass
class ExternalGenerator:
    """Line-oriented subprocess hook: query lines on stdin, completion on stdout.

    One process invocation produces one completed line, mirroring the sampler's
    contract so backends can be swapped behind the same interface.
    """

    command: list[str]
    timeout: float = 60.0

    def complete(self, query_lines: Sequence[str]) -> str:
        lines = [ln for ln in query_lines if ln.strip()]
        if not lines:
            raise EmptyQuery("query has no tokens")
        try:
            proc = subprocess.run(
                self.command,
                input="\n".join(lines) + "\n",
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired as exc:
            raise ProcessTimeout(f"generator timed out after {self.timeout}s") from exc
        except OSError as exc:
            raise ProcessError(f"could not run generator: {exc}") from exc
        if proc.returncode != 0:
            raise ProcessError(
                f"generator exited {proc.returncode}: {proc.stderr.strip()[:200]}"
            )
        out = proc.stdout.splitlines()
        if not out or not out[0].strip():
            raise ProcessError("generator produced no completion line")
        return out[0].strip()
