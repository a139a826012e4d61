"""raplyr: corpus-to-completion toolkit for rap lyrics.

The pipeline runs fetch -> clean -> annotate -> filter -> train -> complete,
with rhyme-density and profanity scoring available standalone. Everything
here re-exports from the topic modules; import from them directly for the
long tail (file formats, external process adapters, the HTTP service).
"""

from .corpus import Section, SectionKind, Song, clean_song, is_english, tokenize_line
from .errors import (
    EmptyCorpus,
    EmptyInput,
    EmptyQuery,
    EmptySong,
    NegativeInput,
    ParseError,
    RaplyrError,
    TooShort,
)
from .evaluation import EvalParams, EvalReport, compare_reports, energy_kwh, evaluate
from .generator import (
    NgramModel,
    complete,
    complete_reranked,
    completion_rhyme_density,
    train,
)
from .lexicon import Category, Lexicon, LexiconEntry, load_lexicon_csv
from .rhyme import PronouncingDict, load_default_dict, rhyme_density, rhyme_scores
from .scoring import (
    annotate_song,
    filter_corpus,
    filter_corpus_by_quantile,
    quantile_threshold,
    slur_score,
    ws_score,
)

__version__ = "0.1.0"

__all__ = [
    "Category",
    "EmptyCorpus",
    "EmptyInput",
    "EmptyQuery",
    "EmptySong",
    "EvalParams",
    "EvalReport",
    "Lexicon",
    "LexiconEntry",
    "NegativeInput",
    "NgramModel",
    "ParseError",
    "PronouncingDict",
    "RaplyrError",
    "Section",
    "SectionKind",
    "Song",
    "TooShort",
    "annotate_song",
    "clean_song",
    "compare_reports",
    "complete",
    "complete_reranked",
    "completion_rhyme_density",
    "energy_kwh",
    "evaluate",
    "filter_corpus",
    "filter_corpus_by_quantile",
    "is_english",
    "load_default_dict",
    "load_lexicon_csv",
    "quantile_threshold",
    "rhyme_density",
    "rhyme_scores",
    "slur_score",
    "tokenize_line",
    "train",
    "ws_score",
    "__version__",
]
