"""Score rhyme density on real stanzas with the bundled pronunciations.

Each token earns the length of its longest vowel-skeleton suffix that also
ends inside one of the previous 15 tokens (different surface required), and
the density is the mean over tokens the dictionary knows. Run directly:

    python3 demos/02_rhyme_density.py
"""

from raplyr import load_default_dict, rhyme_density

pdict = load_default_dict()

stanzas = {
    "tight rhymes": "I walk the street at night\nholding every light in sight",
    "loose lines": "random words gathered here\nnothing matches anything",
    "internal": "the game the name the same old flame",
}

for label, text in stanzas.items():
    result = rhyme_density(text, pdict)
    flag = "  (suspiciously high, check for repetition)" if result.high else ""
    print(f"{label}: density {result.density:.3f}, "
          f"{result.oov_count} unknown tokens{flag}")
    for tok in result.tokens:
        skel = "-".join(tok.skeleton) if tok.skeleton else "??"
        print(f"    {tok.token:<10} {skel:<10} score {tok.score}")
    print()
