"""Evaluate two models on a held-out set and print the comparison table.

Each test song keeps its final line as the reference; the model completes
the preceding lines and is scored on rhyme density (in context and in
isolation), perplexity, and generated profanity. The table includes the
commonly cited baseline numbers for orientation. Run directly:

    python3 demos/04_evaluation.py
"""

import random

from raplyr import (
    EvalParams,
    Lexicon,
    LexiconEntry,
    Category,
    Section,
    SectionKind,
    Song,
    compare_reports,
    energy_kwh,
    evaluate,
    load_default_dict,
    train,
)

rng = random.Random(5)
WORDS = ["night", "light", "street", "beat", "game", "name", "mind", "time"]


def song(i, n_lines):
    lines = tuple(" ".join(rng.choice(WORDS) for _ in range(4)) for _ in range(n_lines))
    return Song("demo mc", f"track {i}", 2020, (Section(SectionKind.VERSE, lines),))


train_lines = [ln for i in range(30) for ln in song(i, 6).verse_lines()]
test_songs = [song(100 + i, 4) for i in range(10)]

lexicon = Lexicon([LexiconEntry("muck", "muck", Category.GENERAL_INSULT, 3.0)])
pdict = load_default_dict()
params = EvalParams(seed=7, k=10, max_tokens=12)

reports = []
for order in (2, 4):
    model = train(train_lines, order=order, name=f"demo-{order}gram")
    reports.append(evaluate(model, test_songs, lexicon, pdict, params))

print(compare_reports(reports))

kwh = energy_kwh(250, 6)
print(f"\nback-of-envelope training energy: 250 W for 6 h = {float(kwh)} kWh")
