"""HTTP service tests: routing, contracts, and equality with library calls."""

import concurrent.futures
import json
import uuid

import pytest
import requests

from raplyr import service
from raplyr.corpus import Section, SectionKind, Song
from raplyr.generator import complete, complete_reranked, completion_rhyme_density, train
from raplyr.rhyme import rhyme_density
from raplyr.scoring import annotate_song, ws_score
from raplyr.service import ServiceConfig, ServiceThread

SERVICE_CORPUS = [
    "i walk the night with a light",
    "you talk and talk tonight",
    "money in the game all night",
    "see me flow see me go",
    "free game free show",
    "grak on the party splug on the show",
    "believe me i receive the right",
    "cat in a hat night after night",
]


@pytest.fixture(scope="module")
def model():
    return train(SERVICE_CORPUS, order=3, name="service-test")


@pytest.fixture(scope="module")
def config(model, mini_lexicon, fixture_pdict):
    return ServiceConfig(model=model, lexicon=mini_lexicon, pdict=fixture_pdict)


@pytest.fixture(scope="module")
def base_url(config):
    with ServiceThread(config) as svc:
        yield svc.base_url


def post(base_url, path, body):
    return requests.post(base_url + path, json=body, timeout=10)


class TestHealth:
    def test_ok(self, base_url):
        resp = requests.get(base_url + "/v1/health", timeout=10)
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "model": "service-test"}

    def test_unknown_get_path_404(self, base_url):
        resp = requests.get(base_url + "/v1/nope", timeout=10)
        assert resp.status_code == 404


class TestComplete:
    CONTEXT = ["i walk the night", "you talk tonight"]

    def test_matches_library_call(self, base_url, model, config):
        body = {"context": self.CONTEXT, "seed": 7, "k": 5, "min_tokens": 3, "max_tokens": 12}
        resp = post(base_url, "/v1/complete", body)
        assert resp.status_code == 200
        got = resp.json()

        comp = complete(model, self.CONTEXT, seed=7, k=5, min_tokens=3, max_tokens=12)
        assert got["line"] == comp.text
        assert got["tokens"] == list(comp.tokens)
        assert got["seed"] == 7
        assert got["ended_by_separator"] == comp.ended_by_separator
        assert got["rhyme_density"] == completion_rhyme_density(
            self.CONTEXT, comp.tokens, config.pdict, config.window
        )
        assert got["slur_score"] == ws_score(comp.text, config.lexicon)
        assert len(got["candidates"]) == 1
        assert got["candidates"][0]["line"] == comp.text
        assert got["candidates"][0]["seed_offset"] == 0

    def test_defaults_match_library_defaults(self, base_url, model):
        resp = post(base_url, "/v1/complete", {"context": self.CONTEXT})
        assert resp.status_code == 200
        comp = complete(model, self.CONTEXT, seed=0)
        assert resp.json()["line"] == comp.text

    def test_rerank_matches_library_call(self, base_url, model, config):
        body = {"context": self.CONTEXT, "seed": 3, "rerank": True, "num_candidates": 4}
        resp = post(base_url, "/v1/complete", body)
        assert resp.status_code == 200
        got = resp.json()

        rr = complete_reranked(
            model,
            self.CONTEXT,
            seed=3,
            num_candidates=4,
            pdict=config.pdict,
            window=config.window,
            lexicon=config.lexicon,
        )
        assert got["line"] == rr.chosen.completion.text
        assert got["rhyme_density"] == rr.chosen.rhyme_density
        assert got["slur_score"] == rr.chosen.slur_score
        assert len(got["candidates"]) == 4
        assert got["candidates"] == [
            {
                "line": c.completion.text,
                "rhyme_density": c.rhyme_density,
                "slur_score": c.slur_score,
                "seed_offset": c.seed_offset,
            }
            for c in rr.candidates
        ]

    def test_repeat_request_identical(self, base_url):
        body = {"context": self.CONTEXT, "seed": 11}
        first = post(base_url, "/v1/complete", body)
        second = post(base_url, "/v1/complete", body)
        assert first.content == second.content

    def test_missing_context_422(self, base_url):
        resp = post(base_url, "/v1/complete", {"seed": 1})
        assert resp.status_code == 422
        assert "context" in resp.json()["error"]

    def test_context_wrong_type_422(self, base_url):
        resp = post(base_url, "/v1/complete", {"context": "one line"})
        assert resp.status_code == 422

    def test_context_mixed_list_422(self, base_url):
        resp = post(base_url, "/v1/complete", {"context": ["fine", 3]})
        assert resp.status_code == 422

    def test_bool_is_not_an_int_422(self, base_url):
        resp = post(base_url, "/v1/complete", {"context": self.CONTEXT, "seed": True})
        assert resp.status_code == 422

    def test_tokenless_context_422(self, base_url):
        resp = post(base_url, "/v1/complete", {"context": ["???", "..."]})
        assert resp.status_code == 422

    def test_bad_bounds_422(self, base_url):
        body = {"context": self.CONTEXT, "min_tokens": 9, "max_tokens": 2}
        resp = post(base_url, "/v1/complete", body)
        assert resp.status_code == 422


class TestScore:
    def test_matches_library_call(self, base_url, mini_lexicon):
        lines = ["grak city zorp", "all clean here", ""]
        resp = post(base_url, "/v1/score", {"lines": lines})
        assert resp.status_code == 200
        got = resp.json()

        song = Song("request", "request", None, (Section(SectionKind.VERSE, tuple(lines)),))
        ann = annotate_song(song, mini_lexicon)
        assert got["slur_score"] == ann.slur_score
        assert got["matches"] == [
            {
                "line_index": ln.line_index,
                "token_index": m.token_index,
                "surface": m.surface,
                "category": m.category.value,
                "severity": m.severity,
            }
            for ln in ann.lines
            for m in ln.matches
        ]
        assert got["lines"] == [
            {
                "line_index": ln.line_index,
                "token_count": ln.token_count,
                "ws_score": ln.ws_score,
            }
            for ln in ann.lines
        ]

    def test_match_details_present(self, base_url):
        resp = post(base_url, "/v1/score", {"lines": ["all clean", "you grak the zorp"]})
        matches = resp.json()["matches"]
        assert {m["surface"] for m in matches} == {"grak", "zorp"}
        assert all(m["line_index"] == 1 for m in matches)
        indexes = {m["surface"]: m["token_index"] for m in matches}
        assert indexes == {"grak": 1, "zorp": 3}

    def test_missing_lines_422(self, base_url):
        resp = post(base_url, "/v1/score", {})
        assert resp.status_code == 422

    def test_all_tokenless_422(self, base_url):
        resp = post(base_url, "/v1/score", {"lines": ["???", ""]})
        assert resp.status_code == 422


class TestRhymeDensity:
    def test_text_matches_library_call(self, base_url, fixture_pdict):
        text = "i walk the night\nyou talk the light"
        resp = post(base_url, "/v1/rhyme-density", {"text": text})
        assert resp.status_code == 200
        got = resp.json()

        result = rhyme_density(text, fixture_pdict)
        assert got["density"] == result.density
        assert got["high"] == result.high
        assert got["oov_count"] == result.oov_count
        assert got["window"] == result.window
        assert got["tokens"] == [
            {"token": t.token, "skeleton": list(t.skeleton), "score": t.score}
            for t in result.tokens
        ]

    def test_tokens_matches_library_call(self, base_url, fixture_pdict):
        tokens = ["walk", "talk", "stalk"]
        resp = post(base_url, "/v1/rhyme-density", {"tokens": tokens})
        assert resp.status_code == 200
        result = rhyme_density(tokens, fixture_pdict)
        assert resp.json()["density"] == result.density

    def test_window_respected(self, base_url, fixture_pdict):
        tokens = ["walk", "me", "me", "talk"]
        narrow = post(base_url, "/v1/rhyme-density", {"tokens": tokens, "window": 1})
        wide = post(base_url, "/v1/rhyme-density", {"tokens": tokens, "window": 10})
        assert narrow.json()["density"] == rhyme_density(tokens, fixture_pdict, window=1).density
        assert wide.json()["density"] == rhyme_density(tokens, fixture_pdict, window=10).density
        assert narrow.json()["density"] < wide.json()["density"]

    def test_both_text_and_tokens_422(self, base_url):
        resp = post(base_url, "/v1/rhyme-density", {"text": "a", "tokens": ["a"]})
        assert resp.status_code == 422

    def test_neither_422(self, base_url):
        resp = post(base_url, "/v1/rhyme-density", {})
        assert resp.status_code == 422

    def test_all_oov_422(self, base_url):
        resp = post(base_url, "/v1/rhyme-density", {"tokens": ["zzzqqq", "xxxyyy"]})
        assert resp.status_code == 422


class TestProtocol:
    def test_malformed_json_400(self, base_url):
        resp = requests.post(
            base_url + "/v1/complete",
            data=b"{not json",
            headers={"Content-Type": "application/json"},
            timeout=10,
        )
        assert resp.status_code == 400

    def test_empty_body_400(self, base_url):
        resp = requests.post(base_url + "/v1/complete", timeout=10)
        assert resp.status_code == 400

    def test_non_object_body_422(self, base_url):
        resp = requests.post(base_url + "/v1/complete", json=[1, 2, 3], timeout=10)
        assert resp.status_code == 422

    def test_unknown_post_path_404(self, base_url):
        resp = post(base_url, "/v1/unknown", {})
        assert resp.status_code == 404

    def test_options_preflight(self, base_url):
        resp = requests.options(base_url + "/v1/complete", timeout=10)
        assert resp.status_code == 204
        assert resp.headers["Access-Control-Allow-Origin"] == "*"
        assert "POST" in resp.headers["Access-Control-Allow-Methods"]

    def test_cors_on_responses(self, base_url):
        resp = requests.get(base_url + "/v1/health", timeout=10)
        assert resp.headers["Access-Control-Allow-Origin"] == "*"
        resp = post(base_url, "/v1/score", {"lines": ["hey"]})
        assert resp.headers["Access-Control-Allow-Origin"] == "*"

    def test_internal_error_opaque_500(self, base_url, monkeypatch):
        def boom(config, body):
            raise RuntimeError("secret detail that must not leak")

        monkeypatch.setitem(service._POST_ROUTES, "/v1/score", boom)
        resp = post(base_url, "/v1/score", {"lines": ["hey"]})
        assert resp.status_code == 500
        got = resp.json()
        assert got["error"] == "internal error"
        assert "secret" not in json.dumps(got)
        uuid.UUID(got["id"])  # opaque but well-formed incident id

    def test_concurrent_requests_match_sequential(self, base_url):
        def hit(seed):
            body = {"context": ["i walk the night"], "seed": seed}
            return post(base_url, "/v1/complete", body).json()["line"]

        seeds = [5, 6, 7, 8] * 4
        sequential = {s: hit(s) for s in sorted(set(seeds))}
        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(hit, seeds))
        assert results == [sequential[s] for s in seeds]
