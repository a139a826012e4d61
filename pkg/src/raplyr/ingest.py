"""Lyrics catalog ingestion over a Genius-style JSON API.

The remote contract: GET {base}/artists/{name}/songs?page=N returns
{"songs": [{artist, title, year, lyrics, url}, ...], "next_page": N+1 | null}.
Requests are paced by a shared token bucket and retried with exponential
backoff on rate limits and transient network failures.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator
from urllib.parse import quote

import requests

from .corpus import Song, parse_sections
from .errors import AuthError, NetworkError, ParseError, RateLimited

TOKEN_ENV_VAR = "RAPLYR_GENIUS_TOKEN"
DEFAULT_BASE_URL = "https://api.genius.com"
DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_BACKOFF_BASE = 0.5
DEFAULT_REQUESTS_PER_SECOND = 2.0


@dataclass(frozen=True)
class RawSongRecord:
    artist: str
    title: str
    year: int | None
    lyrics: str
    url: str


class RateLimiter:
    """Token bucket with capacity one: at most one request per 1/rps seconds.

    Thread-safe so one limiter can pace several workers against the same API.
    """

    def __init__(
        self,
        requests_per_second: float = DEFAULT_REQUESTS_PER_SECOND,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if requests_per_second <= 0:
            raise ValueError(f"requests_per_second must be positive, got {requests_per_second}")
        self.min_interval = 1.0 / requests_per_second
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_free = clock()

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            wait = self._next_free - now
            self._next_free = max(now, self._next_free) + self.min_interval
        if wait > 0:
            self._sleep(wait)


class GeniusClient:
    """Paginated catalog reader with auth, pacing, and retry policy."""

    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        token: str | None = None,
        session: requests.Session | None = None,
        rate_limiter: RateLimiter | None = None,
        max_attempts: int = DEFAULT_MAX_ATTEMPTS,
        backoff_base: float = DEFAULT_BACKOFF_BASE,
        sleep: Callable[[float], None] = time.sleep,
        timeout: float = 30.0,
    ):
        if max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        self.base_url = base_url.rstrip("/")
        # the environment wins so a deployed token never lands in config files
        self.token = os.environ.get(TOKEN_ENV_VAR) or token
        self.session = session if session is not None else requests.Session()
        self.rate_limiter = rate_limiter
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self._sleep = sleep
        self.timeout = timeout

    def _headers(self) -> dict[str, str]:
        if not self.token:
            return {}
        return {"Authorization": f"Bearer {self.token}"}

    def _get(self, url: str, params: dict) -> dict:
        last_error: Exception = NetworkError(f"no attempts made for {url}")
        for attempt in range(self.max_attempts):
            if attempt > 0:
                self._sleep(self.backoff_base * (2 ** (attempt - 1)))
            if self.rate_limiter is not None:
                self.rate_limiter.acquire()
            try:
                resp = self.session.get(
                    url, params=params, headers=self._headers(), timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = NetworkError(f"request to {url} failed: {exc}")
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"API rejected token (HTTP {resp.status_code})")
            if resp.status_code == 429:
                last_error = RateLimited(f"HTTP 429 from {url}")
                continue
            if resp.status_code >= 500:
                last_error = NetworkError(f"HTTP {resp.status_code} from {url}")
                continue
            if resp.status_code != 200:
                raise NetworkError(f"HTTP {resp.status_code} from {url}")
            try:
                return resp.json()
            except ValueError as exc:
                last_error = NetworkError(f"bad JSON from {url}: {exc}")
                continue
        raise last_error

    def artist_songs(self, artist_name: str, max_pages: int | None = None) -> Iterator[dict]:
        """Yield raw song dicts across the pages of one artist's catalog."""
        url = f"{self.base_url}/artists/{quote(artist_name)}/songs"
        page: int | None = 1
        fetched = 0
        while page is not None and (max_pages is None or fetched < max_pages):
            data = self._get(url, params={"page": page})
            fetched += 1
            yield from data.get("songs", [])
            page = data.get("next_page")


def _record_from_payload(payload: dict, artist_fallback: str) -> RawSongRecord:
    year = payload.get("year")
    return RawSongRecord(
        artist=str(payload.get("artist") or artist_fallback),
        title=str(payload.get("title") or ""),
        year=int(year) if year is not None else None,
        lyrics=str(payload.get("lyrics") or ""),
        url=str(payload.get("url") or ""),
    )


def fetch_artist_catalog(
    client: GeniusClient,
    artist_name: str,
    errors: list[Exception] | None = None,
    max_pages: int | None = None,
) -> list[RawSongRecord]:
    """All songs for one artist.

    On rate-limit or network failure that survives retries: with an `errors`
    sink the partial page set fetched so far is returned and the failure is
    appended to the sink; without one the failure propagates. Auth failures
    always propagate.
    """
    records: list[RawSongRecord] = []
    try:
        for payload in client.artist_songs(artist_name, max_pages=max_pages):
            records.append(_record_from_payload(payload, artist_name))
    except (NetworkError, RateLimited) as exc:
        if errors is None:
            raise
        errors.append(exc)
    return records


def crawl_artists(
    client: GeniusClient,
    artist_names: Iterable[str],
    errors: list[Exception] | None = None,
    on_progress: Callable[[str, int], None] | None = None,
    max_pages: int | None = None,
) -> list[RawSongRecord]:
    """Fetch every artist in order; one artist's failure never stops the crawl.

    Auth errors abort only the artist that hit them and land in the sink (or
    propagate when no sink is given), matching the partial-result contract.
    """
    all_records: list[RawSongRecord] = []
    for name in artist_names:
        try:
            records = fetch_artist_catalog(client, name, errors=errors, max_pages=max_pages)
        except AuthError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        all_records.extend(records)
        if on_progress is not None:
            on_progress(name, len(records))
    return all_records


def load_artists_file(path: str | Path) -> list[str]:
    """One artist name per line; blank lines and '#' comments are skipped."""
    names: list[str] = []
    for raw in Path(path).read_text("utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            names.append(line)
    return names


def raw_record_to_song(record: RawSongRecord) -> Song:
    return Song(
        artist=record.artist,
        title=record.title,
        year=record.year,
        sections=tuple(parse_sections(record.lyrics)),
    )


# -- raw corpus files ------------------------------------------------------------


def write_raw_corpus(records: Iterable[RawSongRecord], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "artist": rec.artist,
                        "title": rec.title,
                        "year": rec.year,
                        "lyrics": rec.lyrics,
                        "url": rec.url,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
            count += 1
    return count


def read_raw_corpus(path: str | Path) -> list[RawSongRecord]:
    records: list[RawSongRecord] = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
                records.append(
                    RawSongRecord(
                        artist=data["artist"],
                        title=data["title"],
                        year=data.get("year"),
                        lyrics=data["lyrics"],
                        url=data.get("url", ""),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"bad raw record: {exc}", line_no=no) from exc
    return records
