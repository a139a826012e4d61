import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FILLER_WORDS, PROFANITY_RATINGS, build_song, exact_ratings, random_song
from oracles import oracle_quantile, oracle_slur_score
from raplyr.errors import EmptyCorpus, EmptySong, ParseError
from raplyr.lexicon import Category, Lexicon, LexiconEntry
from raplyr.scoring import (
    DEFAULT_SLUR_THRESHOLD,
    annotate_corpus,
    annotate_song,
    annotation_from_record,
    annotation_to_record,
    filter_corpus,
    filter_corpus_by_quantile,
    quantile_threshold,
    read_annotated_corpus,
    slur_score,
    write_annotated_corpus,
    ws_score,
)


class TestWsScore:
    def test_half_from_two_severity_over_four_tokens(self, mini_lexicon):
        # grak (1.0) + grak (1.0) = 2.0 over 4 tokens
        assert ws_score("grak beat grak mic", mini_lexicon) == pytest.approx(0.5, abs=1e-15)

    def test_clean_line_is_zero(self, mini_lexicon):
        assert ws_score("city lights at night", mini_lexicon) == 0.0

    def test_tokenless_line_is_zero(self, mini_lexicon):
        assert ws_score("!!! ...", mini_lexicon) == 0.0

    def test_lemma_match_counts(self, mini_lexicon):
        # graks -> grak via the bare-s rule
        assert ws_score("graks", mini_lexicon) == pytest.approx(1.0)

    def test_repeated_matches_all_count(self, mini_lexicon):
        assert ws_score("zorp zorp", mini_lexicon) == pytest.approx(3.0)


class TestSlurScore:
    def test_mean_of_line_scores(self, mini_lexicon):
        song = build_song(["grak beat grak mic", "city lights at night"])
        assert slur_score(song, mini_lexicon) == pytest.approx(0.25, abs=1e-15)

    def test_tokenless_lines_excluded_from_mean(self, mini_lexicon):
        song = build_song(["grak beat grak mic", "???", "city lights at night"])
        assert slur_score(song, mini_lexicon) == pytest.approx(0.25, abs=1e-15)

    def test_empty_song_raises(self, mini_lexicon):
        with pytest.raises(EmptySong):
            slur_score(build_song(["...", "!!"]), mini_lexicon)
        with pytest.raises(EmptySong):
            slur_score(build_song([]), mini_lexicon)

    def test_annotation_structure(self, mini_lexicon):
        song = build_song(["splug in the booth", "clean line here"])
        ann = annotate_song(song, mini_lexicon)
        assert len(ann.lines) == 2
        first = ann.lines[0]
        assert first.line_index == 0
        assert first.token_count == 4
        assert first.ws_score == pytest.approx(2.5 / 4)
        assert len(first.matches) == 1
        m = first.matches[0]
        assert (m.token_index, m.surface) == (0, "splug")
        assert m.category is Category.SEXUAL_ANATOMY_ACTS
        assert m.severity == 2.5
        assert ann.lines[1].matches == ()

    def test_matches_oracle_on_seeded_songs(self, mini_lexicon):
        rng = random.Random(90210)
        ratings = exact_ratings()
        for _ in range(50):
            song = random_song(rng)
            expected = oracle_slur_score(list(song.verse_lines()), ratings)
            got = slur_score(song, mini_lexicon)
            assert abs(got - float(expected)) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.lists(
                st.sampled_from(FILLER_WORDS + sorted(PROFANITY_RATINGS)),
                min_size=1,
                max_size=8,
            ),
            min_size=1,
            max_size=10,
        )
    )
    def test_oracle_property(self, mini_lexicon, word_lines):
        lines = [" ".join(ws) for ws in word_lines]
        expected = oracle_slur_score(lines, exact_ratings())
        got = slur_score(build_song(lines), mini_lexicon)
        assert abs(got - float(expected)) <= 1e-12


class TestQuantile:
    def test_nearest_rank_examples(self):
        scores = [float(x) for x in range(1, 11)]  # 1..10
        assert quantile_threshold(scores, 0.75) == 8.0
        assert quantile_threshold(scores, 0.5) == 5.0
        assert quantile_threshold(scores, 1.0) == 10.0
        assert quantile_threshold(scores, 0.05) == 1.0

    def test_unsorted_input(self):
        assert quantile_threshold([3.0, 1.0, 2.0], 0.5) == 2.0

    def test_empty_raises(self):
        with pytest.raises(EmptyCorpus):
            quantile_threshold([], 0.75)

    def test_out_of_range_q(self):
        for q in (0.0, -0.5, 1.01):
            with pytest.raises(ValueError):
                quantile_threshold([1.0], q)

    @given(
        st.lists(st.floats(min_value=0, max_value=5, allow_nan=False), min_size=1, max_size=40),
        st.fractions(min_value=Fraction(1, 100), max_value=1),
    )
    def test_matches_oracle(self, scores, q):
        assert quantile_threshold(scores, q) == oracle_quantile(scores, q)

    @given(
        st.lists(st.floats(min_value=0, max_value=5, allow_nan=False), min_size=1, max_size=40),
        st.fractions(min_value=Fraction(1, 100), max_value=1),
    )
    def test_keeps_at_least_rank_count(self, scores, q):
        t = quantile_threshold(scores, q)
        rank = -(-q.numerator * len(scores) // q.denominator)
        assert sum(1 for s in scores if s <= t) >= rank


class TestFilter:
    def test_documented_default(self):
        assert DEFAULT_SLUR_THRESHOLD == 0.05

    def test_keep_at_or_below(self, mini_lexicon):
        songs = [
            build_song(["city night"], title="clean"),
            build_song(["grak grak grak grak"], title="dirty"),
        ]
        anns = annotate_corpus(songs, mini_lexicon)
        kept = filter_corpus(anns, threshold=1.0)
        assert [a.song.title for a in kept] == ["clean", "dirty"]
        kept = filter_corpus(anns, threshold=0.5)
        assert [a.song.title for a in kept] == ["clean"]

    def test_quantile_filter_reports_threshold(self, mini_lexicon):
        rng = random.Random(7)
        songs = [random_song(rng) for _ in range(40)]
        anns = annotate_corpus(songs, mini_lexicon)
        kept, threshold = filter_corpus_by_quantile(anns, 0.75)
        assert threshold == quantile_threshold([a.slur_score for a in anns], 0.75)
        assert len(kept) >= 30
        assert all(a.slur_score <= threshold for a in kept)

    def test_filter_never_raises_mean(self, mini_lexicon):
        rng = random.Random(13)
        songs = [random_song(rng) for _ in range(60)]
        anns = annotate_corpus(songs, mini_lexicon)
        before = sum(a.slur_score for a in anns) / len(anns)
        kept, _ = filter_corpus_by_quantile(anns, 0.75)
        after = sum(a.slur_score for a in kept) / len(kept)
        assert after <= before


class TestAnnotatedIO:
    def test_round_trip(self, tmp_path, mini_lexicon):
        rng = random.Random(3)
        anns = annotate_corpus([random_song(rng) for _ in range(5)], mini_lexicon)
        path = tmp_path / "annotated.jsonl"
        assert write_annotated_corpus(anns, path) == 5
        back = read_annotated_corpus(path)
        assert back == anns  # bit-identical floats via repr round-trip

    def test_record_superset_of_clean_record(self, mini_lexicon):
        ann = annotate_song(build_song(["grak city"]), mini_lexicon)
        rec = annotation_to_record(ann)
        assert {"artist", "title", "year", "verses", "slur_score", "lines"} <= set(rec)
        assert annotation_from_record(rec) == ann

    def test_bad_record_raises_with_line(self, tmp_path):
        path = tmp_path / "annotated.jsonl"
        path.write_text("{}\n")
        with pytest.raises(ParseError) as ei:
            read_annotated_corpus(path)
        assert "line 1" in str(ei.value)
