"""Local HTTP API exposing completion, scoring, and rhyme metrics.

Endpoints (JSON in, JSON out):
  GET  /v1/health         -> {"status": "ok", "model": <name>}
  POST /v1/complete       -> {"line", "rhyme_density", "slur_score", "candidates"}
                             for {"context": [lines, ...], "seed", "k", ...}
  POST /v1/score          -> slur score + profanity matches for {"lines": [...]}
  POST /v1/rhyme-density  -> density report for {"text": ...} or {"tokens": [...]}

Malformed JSON is 400, contract violations are 422, unexpected failures are
500 with an opaque incident id (details stay in the server log). Every
response carries permissive CORS headers so a browser front end on another
port can call the API directly.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .errors import EmptyInput, RaplyrError, TooShort
from .corpus import Section, SectionKind, Song
from .generator import (
    DEFAULT_CANDIDATES,
    DEFAULT_MAX_TOKENS,
    DEFAULT_MIN_TOKENS,
    DEFAULT_TOP_K,
    NgramModel,
    RankedCandidate,
    complete,
    complete_reranked,
    completion_rhyme_density,
)
from .lexicon import Lexicon
from .rhyme import DEFAULT_WINDOW, PronouncingDict, rhyme_density
from .scoring import annotate_song, ws_score

log = logging.getLogger("raplyr.service")


class ContractViolation(RaplyrError):
    """Request body does not match the endpoint contract."""


@dataclass(frozen=True)
class ServiceConfig:
    """Shared read-only resources; safe across handler threads."""

    model: NgramModel
    lexicon: Lexicon
    pdict: PronouncingDict
    window: int = DEFAULT_WINDOW


def _field(body: dict, key: str, kind, default=None, required: bool = False):
    if key not in body:
        if required:
            raise ContractViolation(f"missing field {key!r}")
        return default
    value = body[key]
    if kind is int and isinstance(value, bool):
        raise ContractViolation(f"field {key!r} must be an integer")
    if not isinstance(value, kind):
        raise ContractViolation(f"field {key!r} has wrong type")
    return value


def _string_list(body: dict, key: str, required: bool = False) -> list[str] | None:
    value = _field(body, key, list, required=required)
    if value is None:
        return None
    if not all(isinstance(item, str) for item in value):
        raise ContractViolation(f"field {key!r} must be a list of strings")
    return value


def handle_complete(config: ServiceConfig, body: dict) -> dict:
    context = _string_list(body, "context", required=True)
    seed = _field(body, "seed", int, default=0)
    k = _field(body, "k", int, default=DEFAULT_TOP_K)
    min_tokens = _field(body, "min_tokens", int, default=DEFAULT_MIN_TOKENS)
    max_tokens = _field(body, "max_tokens", int, default=DEFAULT_MAX_TOKENS)
    window = _field(body, "window", int, default=config.window)
    rerank = _field(body, "rerank", bool, default=False)
    num_candidates = _field(body, "num_candidates", int, default=DEFAULT_CANDIDATES)
    if rerank:
        rr = complete_reranked(
            config.model,
            context,
            seed=seed,
            num_candidates=num_candidates,
            k=k,
            min_tokens=min_tokens,
            max_tokens=max_tokens,
            pdict=config.pdict,
            window=window,
            lexicon=config.lexicon,
        )
        chosen, candidates = rr.chosen, rr.candidates
    else:
        comp = complete(
            config.model, context, seed=seed, k=k, min_tokens=min_tokens, max_tokens=max_tokens
        )
        rd = completion_rhyme_density(context, comp.tokens, config.pdict, window)
        slur = ws_score(comp.text, config.lexicon) if comp.text else 0.0
        chosen = RankedCandidate(comp, rd, slur, 0)
        candidates = (chosen,)
    return {
        "line": chosen.completion.text,
        "tokens": list(chosen.completion.tokens),
        "seed": chosen.completion.seed,
        "ended_by_separator": chosen.completion.ended_by_separator,
        "rhyme_density": chosen.rhyme_density,
        "slur_score": chosen.slur_score,
        "candidates": [
            {
                "line": c.completion.text,
                "rhyme_density": c.rhyme_density,
                "slur_score": c.slur_score,
                "seed_offset": c.seed_offset,
            }
            for c in candidates
        ],
    }


def handle_score(config: ServiceConfig, body: dict) -> dict:
    lines = _string_list(body, "lines", required=True)
    song = Song("request", "request", None, (Section(SectionKind.VERSE, tuple(lines)),))
    ann = annotate_song(song, config.lexicon)
    return {
        "slur_score": ann.slur_score,
        "matches": [
            {
                "line_index": ln.line_index,
                "token_index": m.token_index,
                "surface": m.surface,
                "category": m.category.value,
                "severity": m.severity,
            }
            for ln in ann.lines
            for m in ln.matches
        ],
        "lines": [
            {
                "line_index": ln.line_index,
                "token_count": ln.token_count,
                "ws_score": ln.ws_score,
            }
            for ln in ann.lines
        ],
    }


def handle_rhyme_density(config: ServiceConfig, body: dict) -> dict:
    text = _field(body, "text", str)
    tokens = _string_list(body, "tokens")
    if (text is None) == (tokens is None):
        raise ContractViolation("provide exactly one of 'text' or 'tokens'")
    window = _field(body, "window", int, default=config.window)
    result = rhyme_density(
        text if text is not None else tokens, config.pdict, window=window
    )
    return {
        "density": result.density,
        "high": result.high,
        "oov_count": result.oov_count,
        "window": result.window,
        "tokens": [
            {"token": t.token, "skeleton": list(t.skeleton), "score": t.score}
            for t in result.tokens
        ],
    }


_POST_ROUTES = {
    "/v1/complete": handle_complete,
    "/v1/score": handle_score,
    "/v1/rhyme-density": handle_rhyme_density,
}


class _Handler(BaseHTTPRequestHandler):
    server_version = "raplyr"
    config: ServiceConfig  # injected by make_server

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        log.debug("%s - %s", self.address_string(), format % args)

    def _send(self, code: int, payload: dict) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self._cors_headers()
        self.end_headers()
        self.wfile.write(data)

    def _cors_headers(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors_headers()
        self.end_headers()

    def do_GET(self):
        if self.path == "/v1/health":
            self._send(200, {"status": "ok", "model": self.config.model.name})
        else:
            self._send(404, {"error": f"no such endpoint: {self.path}"})

    def do_POST(self):
        handler = _POST_ROUTES.get(self.path)
        if handler is None:
            self._send(404, {"error": f"no such endpoint: {self.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            body = json.loads(raw.decode("utf-8"))
            if not isinstance(body, dict):
                raise ContractViolation("request body must be a JSON object")
        except (json.JSONDecodeError, UnicodeDecodeError):
            self._send(400, {"error": "malformed JSON body"})
            return
        except ContractViolation as exc:
            self._send(422, {"error": str(exc)})
            return
        try:
            payload = handler(self.config, body)
        except (ContractViolation, EmptyInput, TooShort, ValueError) as exc:
            self._send(422, {"error": str(exc)})
        except Exception:
            incident = str(uuid.uuid4())
            log.exception("unhandled error %s on %s", incident, self.path)
            self._send(500, {"error": "internal error", "id": incident})
        else:
            self._send(200, payload)


def make_server(config: ServiceConfig, host: str = "127.0.0.1", port: int = 8787) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"config": config})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


def serve(config: ServiceConfig, host: str = "127.0.0.1", port: int = 8787) -> None:
    """Blocking server loop; Ctrl-C stops it."""
    server = make_server(config, host, port)
    log.info("serving model %r on http://%s:%d", config.model.name, host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


class ServiceThread:
    """Run the service on a background thread; handy for tests and demos."""

    def __init__(self, config: ServiceConfig, host: str = "127.0.0.1", port: int = 0):
        self.server = make_server(config, host, port)
        self.host, self.port = self.server.server_address[:2]
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def __enter__(self) -> "ServiceThread":
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self.server.shutdown()
        self.server.server_close()
        self._thread.join(timeout=5)
