"""Walk a tiny corpus through profanity scoring and quantile filtering.

Scores are per-line (severity sum over token count) averaged per song, then
the corpus is cut at its own third-quartile score. Run directly:

    python3 demos/01_scoring_and_filtering.py
"""

from raplyr import Category, Lexicon, LexiconEntry, Section, SectionKind, Song
from raplyr import annotate_song, filter_corpus_by_quantile

lexicon = Lexicon(
    [
        LexiconEntry("grime", "grime", Category.GENERAL_INSULT, 1.0),
        LexiconEntry("sludge", "sludge", Category.GENERAL_INSULT, 2.0),
        LexiconEntry("muck", "muck", Category.ANIMAL_REFERENCES, 3.0),
    ]
)


def song(title, lines):
    return Song("demo mc", title, 2020, (Section(SectionKind.VERSE, tuple(lines)),))


corpus = [
    song("clean opener", ["city lights keep me awake", "writing lines til daybreak"]),
    song("one slip", ["grime on my shoes again", "but the beat stays clean"]),
    song("mid tier", ["sludge talk all day", "sludge talk all night"]),
    song("heavy", ["muck muck muck", "muck in every bar"]),
]

print("per-song slur scores")
annotations = []
for s in corpus:
    ann = annotate_song(s, lexicon)
    annotations.append(ann)
    print(f"  {s.title:<14} {ann.slur_score:.4f}")
    for line in ann.lines:
        for m in line.matches:
            print(f"      line {line.line_index}: {m.surface!r} severity {m.severity}")

kept, threshold = filter_corpus_by_quantile(annotations, 0.75)

print(f"\nthird-quartile threshold: {threshold:.4f}")
print("kept:", ", ".join(a.song.title for a in kept))
dropped = [a.song.title for a in annotations if a not in kept]
print("dropped:", ", ".join(dropped) or "(none)")

mean_before = sum(a.slur_score for a in annotations) / len(annotations)
mean_after = sum(a.slur_score for a in kept) / len(kept)
print(f"mean slur score {mean_before:.4f} -> {mean_after:.4f}")
