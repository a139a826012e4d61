"""Exercise the local HTTP service end to end on an ephemeral port.

The service exposes the same completion, scoring, and rhyme endpoints the
CLI uses, so anything shown here also works against `raplyr serve`. Run
directly:

    python3 demos/05_http_service.py
"""

import json

import requests

from raplyr import Category, Lexicon, LexiconEntry, load_default_dict, train
from raplyr.service import ServiceConfig, ServiceThread

lines = [
    "i walk the street at night",
    "the street at night feels right",
    "chasing every light in sight",
    "the game is mine tonight",
] * 4

config = ServiceConfig(
    model=train(lines, order=3, name="demo-service"),
    lexicon=Lexicon([LexiconEntry("muck", "muck", Category.GENERAL_INSULT, 3.0)]),
    pdict=load_default_dict(),
)


def show(label, resp):
    print(f"{label} -> HTTP {resp.status_code}")
    print(json.dumps(resp.json(), indent=2)[:600])
    print()


with ServiceThread(config) as svc:
    print(f"service up at {svc.base_url}\n")

    show("GET /v1/health", requests.get(svc.base_url + "/v1/health", timeout=5))

    show(
        "POST /v1/complete",
        requests.post(
            svc.base_url + "/v1/complete",
            json={"context": ["i walk the street at night"], "seed": 42, "k": 5},
            timeout=5,
        ),
    )

    show(
        "POST /v1/score",
        requests.post(
            svc.base_url + "/v1/score",
            json={"lines": ["muck on the street", "clean as they come"]},
            timeout=5,
        ),
    )

    show(
        "POST /v1/rhyme-density",
        requests.post(
            svc.base_url + "/v1/rhyme-density",
            json={"text": "night light sight tonight"},
            timeout=5,
        ),
    )

print("service shut down")
