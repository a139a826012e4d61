"""Train a small n-gram model and sample line completions.

Sampling is top-k over the interpolated distribution with a fixed-seed
generator, so every run of this script prints the same lines. Reranking
draws several candidates and keeps the one that rhymes hardest against
the context. Run directly:

    python3 demos/03_completion.py
"""

from raplyr import complete, complete_reranked, load_default_dict, train

# A deliberately loopy training set so a 3-gram model has somewhere to go.
lines = [
    "i walk the street at night",
    "the street at night feels right",
    "chasing every light in sight",
    "the game is mine tonight",
    "i write my name in light",
    "my name is on the street",
    "the beat is in my mind",
    "my mind is on the game",
] * 3

model = train(lines, order=3, name="demo")
print(f"model {model.name}: order {model.order}, vocab {len(model.vocab)} tokens\n")

context = ["i walk the street at night"]
print(f"context: {context[0]!r}")

for seed in (1, 2, 3):
    comp = complete(model, context, seed=seed, k=5)
    print(f"  seed {seed}: {comp.text}")

print("\nreranked over 6 candidates (highest rhyme density wins):")
rr = complete_reranked(model, context, seed=1, num_candidates=6, k=5,
                       pdict=load_default_dict())
for cand in rr.candidates:
    marker = "->" if cand is rr.chosen else "  "
    print(f"  {marker} rd {cand.rhyme_density:.3f}  {cand.completion.text}")
