"""Command line for the lyrics pipeline.

Subcommands mirror the pipeline stages: fetch raw lyrics, clean them into a
verse corpus, annotate and filter profanity, train the line model, sample
completions, evaluate, account energy, and serve the local HTTP API. A JSON
file passed with --config supplies flag defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import shlex
import signal
import sys
from pathlib import Path

from .corpus import (
    DEFAULT_ENGLISH_THRESHOLD,
    clean_song,
    dedupe_corpus,
    is_english,
    read_clean_corpus,
    write_clean_corpus,
)
from .errors import EmptyQuery, EmptySong, ParseError, RaplyrError
from .evaluation import EvalParams, compare_reports, energy_kwh, evaluate, report_to_dict
from .generator import (
    DEFAULT_ADD_K,
    DEFAULT_BACKOFF,
    DEFAULT_CANDIDATES,
    DEFAULT_MAX_TOKENS,
    DEFAULT_MIN_TOKENS,
    DEFAULT_ORDER,
    DEFAULT_TOP_K,
    NgramModel,
    complete,
    complete_reranked,
    completion_rhyme_density,
)
from .generator import train as train_ngrams
from .ingest import (
    DEFAULT_BASE_URL,
    GeniusClient,
    RateLimiter,
    crawl_artists,
    load_artists_file,
    raw_record_to_song,
    read_raw_corpus,
    write_raw_corpus,
)
from .lexicon import Lexicon, load_lexicon_csv
from .rhyme import (
    DEFAULT_WINDOW,
    ExternalPhonemizer,
    PronouncingDict,
    load_default_dict,
    rhyme_density,
)
from .scoring import (
    DEFAULT_FILTER_QUANTILE,
    DEFAULT_SLUR_THRESHOLD,
    annotate_song,
    filter_corpus,
    filter_corpus_by_quantile,
    read_annotated_corpus,
    write_annotated_corpus,
    ws_score,
)
from .service import ServiceConfig, serve

log = logging.getLogger("raplyr.cli")


# -- shared resource loading -----------------------------------------------------


def _load_pdict(path: str | None) -> PronouncingDict:
    return PronouncingDict.load(path) if path else load_default_dict()


def _load_lexicon(path: str | None) -> Lexicon | None:
    return load_lexicon_csv(path) if path else None


# -- subcommand handlers ----------------------------------------------------------


def cmd_fetch(args: argparse.Namespace) -> int:
    names = load_artists_file(args.artists_file)
    client = GeniusClient(
        base_url=args.base_url,
        token=args.token,
        rate_limiter=RateLimiter(requests_per_second=args.rps),
    )
    errors: list[Exception] = []
    records = crawl_artists(
        client,
        names,
        errors=errors,
        on_progress=lambda name, n: log.info("%s: %d songs", name, n),
        max_pages=args.max_pages,
    )
    count = write_raw_corpus(records, args.out)
    for err in errors:
        print(f"warning: {err}", file=sys.stderr)
    print(f"wrote {count} raw songs from {len(names)} artists to {args.out}")
    return 0


def cmd_clean(args: argparse.Namespace) -> int:
    records = read_raw_corpus(args.infile)
    songs = []
    for rec in records:
        cleaned = clean_song(raw_record_to_song(rec))
        if cleaned is not None and is_english(cleaned, args.english_threshold):
            songs.append(cleaned)
    deduped = dedupe_corpus(songs)
    count = write_clean_corpus(deduped, args.out)
    print(
        f"read {len(records)} raw songs; {len(songs)} survived cleaning and the "
        f"language check; wrote {count} after dedupe to {args.out}"
    )
    return 0


def cmd_annotate(args: argparse.Namespace) -> int:
    songs = read_clean_corpus(args.infile)
    lex = load_lexicon_csv(args.lexicon)
    annotations = []
    skipped = 0
    for song in songs:
        try:
            annotations.append(annotate_song(song, lex))
        except EmptySong:
            skipped += 1
    count = write_annotated_corpus(annotations, args.out)
    tail = f" ({skipped} songs had no scorable lines)" if skipped else ""
    print(f"annotated {count} songs to {args.out}{tail}")
    return 0


def cmd_filter(args: argparse.Namespace) -> int:
    annotations = read_annotated_corpus(args.infile)
    if args.quantile is not None:
        kept, threshold = filter_corpus_by_quantile(annotations, args.quantile)
    else:
        threshold = args.threshold if args.threshold is not None else DEFAULT_SLUR_THRESHOLD
        kept = filter_corpus(annotations, threshold)
    count = write_annotated_corpus(kept, args.out)
    print(
        f"kept {count} of {len(annotations)} songs at slur threshold "
        f"{threshold:.6g}; wrote {args.out}"
    )
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    songs = read_clean_corpus(args.infile)
    lines = [line for song in songs for line in song.verse_lines()]
    name = args.name if args.name else Path(args.out).stem
    model = train_ngrams(
        lines, order=args.order, add_k=args.add_k, backoff=args.backoff, name=name
    )
    model.save(args.out)
    print(
        f"trained order-{model.order} model {model.name!r} on {len(songs)} songs "
        f"({len(lines)} lines, vocabulary {len(model.vocab)}); saved to {args.out}"
    )
    return 0


def cmd_complete(args: argparse.Namespace) -> int:
    model = NgramModel.load(args.model)
    pdict = _load_pdict(args.dict)
    lex = _load_lexicon(args.lexicon)
    if args.rerank:
        rr = complete_reranked(
            model,
            args.context,
            seed=args.seed,
            num_candidates=args.candidates,
            k=args.k,
            min_tokens=args.min_tokens,
            max_tokens=args.max_tokens,
            pdict=pdict,
            window=args.window,
            lexicon=lex,
        )
        chosen = rr.chosen
        payload = {
            "line": chosen.completion.text,
            "rhyme_density": chosen.rhyme_density,
            "slur_score": chosen.slur_score,
            "candidates": [
                {
                    "line": c.completion.text,
                    "rhyme_density": c.rhyme_density,
                    "slur_score": c.slur_score,
                    "seed_offset": c.seed_offset,
                }
                for c in rr.candidates
            ],
        }
    else:
        comp = complete(
            model,
            args.context,
            seed=args.seed,
            k=args.k,
            min_tokens=args.min_tokens,
            max_tokens=args.max_tokens,
        )
        rd = completion_rhyme_density(args.context, comp.tokens, pdict, args.window)
        slur = ws_score(comp.text, lex) if lex is not None and comp.text else 0.0
        payload = {"line": comp.text, "rhyme_density": rd, "slur_score": slur}
    if args.json:
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(payload["line"])
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    model = NgramModel.load(args.model)
    songs = read_clean_corpus(args.test)
    if args.lexicon:
        lex = load_lexicon_csv(args.lexicon)
    else:
        lex = Lexicon([])
        print("note: no --lexicon given, generated slur scores will be 0", file=sys.stderr)
    pdict = _load_pdict(args.dict)
    params = EvalParams(
        seed=args.seed,
        k=args.k,
        min_tokens=args.min_tokens,
        max_tokens=args.max_tokens,
        num_candidates=args.candidates,
        window=args.window,
        rerank=not args.no_rerank,
    )
    report = evaluate(model, songs, lex, pdict, params)
    print(compare_reports([report]))
    if args.out:
        Path(args.out).write_text(
            json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n",
            "utf-8",
        )
        print(f"report written to {args.out}")
    return 0


def cmd_energy(args: argparse.Namespace) -> int:
    kwh = energy_kwh(args.watts, args.hours)
    print(f"{args.watts:g} W for {args.hours:g} h = {float(kwh):g} kWh")
    return 0


def cmd_rd(args: argparse.Namespace) -> int:
    text = sys.stdin.read() if args.text == "-" else Path(args.text).read_text("utf-8")
    pdict = _load_pdict(args.dict)
    phonemizer = (
        ExternalPhonemizer(shlex.split(args.phonemizer_cmd)) if args.phonemizer_cmd else None
    )
    result = rhyme_density(text, pdict, window=args.window, phonemizer=phonemizer)
    print(f"rhyme density: {result.density:.4f}")
    print(
        f"tokens scored: {result.scored_count}  out of vocabulary: {result.oov_count}  "
        f"window: {result.window}"
    )
    if result.high:
        print("note: density above 1.0 suggests repeated or copied rhyme material")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    config = ServiceConfig(
        model=NgramModel.load(args.model),
        lexicon=load_lexicon_csv(args.lexicon),
        pdict=_load_pdict(args.dict),
        window=args.window,
    )

    def _sigterm(signum, frame):
        raise KeyboardInterrupt

    signal.signal(signal.SIGTERM, _sigterm)
    serve(config, host=args.host, port=args.port)
    return 0


def cmd_repl(args: argparse.Namespace) -> int:
    repl(
        NgramModel.load(args.model),
        lexicon=_load_lexicon(args.lexicon),
        pdict=_load_pdict(args.dict),
        seed=args.seed,
        k=args.k,
        min_tokens=args.min_tokens,
        max_tokens=args.max_tokens,
        window=args.window,
    )
    return 0


# -- interactive session -----------------------------------------------------------


REPL_HELP = """commands:
  :reset    clear the accumulated context
  :seed N   set the sampler seed
  :k N      set the top-k cutoff
  :quit     leave the session"""


def repl(
    model: NgramModel,
    lexicon: Lexicon | None = None,
    pdict: PronouncingDict | None = None,
    seed: int = 0,
    k: int = DEFAULT_TOP_K,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    window: int = DEFAULT_WINDOW,
    input_fn=None,
    output_fn=print,
) -> None:
    """Call-and-response loop: you type a bar after "A:", the model answers "B:".

    Both sides of the exchange accumulate as context for later completions.
    input_fn and output_fn are injectable so the session logic is testable.
    """
    if input_fn is None:
        input_fn = lambda: input("A: ")  # noqa: E731 - terminal prompt default
    context: list[str] = []
    while True:
        try:
            line = input_fn()
        except (EOFError, KeyboardInterrupt):
            break
        if line is None:
            break
        line = line.strip()
        if not line:
            continue
        if line.startswith(":"):
            parts = line.split()
            if parts[0] == ":quit":
                break
            if parts[0] == ":reset" and len(parts) == 1:
                context.clear()
                output_fn("(context cleared)")
                continue
            if parts[0] in (":seed", ":k") and len(parts) == 2:
                try:
                    value = int(parts[1])
                except ValueError:
                    output_fn(REPL_HELP)
                    continue
                if parts[0] == ":seed":
                    seed = value
                    output_fn(f"(seed set to {value})")
                elif value < 1:
                    output_fn("(k must be >= 1)")
                else:
                    k = value
                    output_fn(f"(k set to {value})")
                continue
            output_fn(REPL_HELP)
            continue
        context.append(line)
        try:
            comp = complete(
                model, context, seed=seed, k=k, min_tokens=min_tokens, max_tokens=max_tokens
            )
        except EmptyQuery:
            context.pop()
            output_fn("(type a line with at least one word)")
            continue
        rd = completion_rhyme_density(context, comp.tokens, pdict, window)
        slur = ws_score(comp.text, lexicon) if lexicon is not None and comp.text else 0.0
        output_fn(f"B: {comp.text}")
        output_fn(f"   rd {rd:.3f} | slur {slur:.3f}")
        context.append(comp.text)


# -- parser wiring ------------------------------------------------------------------


def _config_defaults(argv: list[str]) -> dict:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    ns, _ = pre.parse_known_args(argv)
    if ns.config is None:
        return {}
    data = json.loads(Path(ns.config).read_text("utf-8"))
    if not isinstance(data, dict):
        raise ParseError("config file must hold a JSON object")
    return data


def _apply_config(sub: argparse.ArgumentParser, name: str, config: dict) -> None:
    dests = {action.dest for action in sub._actions}
    overrides = {}
    for key, value in config.items():
        if key == name and isinstance(value, dict):
            overrides.update({k.replace("-", "_"): v for k, v in value.items()})
        elif not isinstance(value, dict) and key.replace("-", "_") in dests:
            overrides[key.replace("-", "_")] = value
    unknown = set(overrides) - dests
    if unknown:
        raise ParseError(f"unknown config keys for {name}: {sorted(unknown)}")
    sub.set_defaults(**overrides)
    # a config-supplied value satisfies a required flag
    for action in sub._actions:
        if action.dest in overrides:
            action.required = False


def build_parser(config: dict | None = None) -> argparse.ArgumentParser:
    config = config or {}
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of flag defaults")
    # SUPPRESS keeps a subcommand's re-parse from clobbering a value given
    # before the subcommand; main() falls back to "warning" when absent
    common.add_argument(
        "--log-level",
        default=argparse.SUPPRESS,
        choices=["debug", "info", "warning", "error"],
        help="logging verbosity (default warning)",
    )

    parser = argparse.ArgumentParser(
        prog="raplyr",
        parents=[common],
        description="rap lyrics pipeline: fetch, clean, score, train, generate, serve",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=handler)
        return p

    p = add("fetch", cmd_fetch, "crawl an artist list into a raw lyrics file")
    p.add_argument("--artists-file", required=True, help="one artist name per line")
    p.add_argument("--out", required=True, help="raw corpus JSONL to write")
    p.add_argument("--rps", type=float, default=1.0, help="max requests per second")
    p.add_argument("--max-pages", type=int, default=None, help="page cap per artist")
    p.add_argument("--token", default=None, help="API token (env RAPLYR_GENIUS_TOKEN wins)")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)

    p = add("clean", cmd_clean, "raw lyrics to deduplicated English verse corpus")
    p.add_argument("--in", dest="infile", required=True, help="raw corpus JSONL")
    p.add_argument("--out", required=True, help="clean corpus JSONL to write")
    p.add_argument("--english-threshold", type=float, default=DEFAULT_ENGLISH_THRESHOLD)

    p = add("annotate", cmd_annotate, "attach profanity scores to a clean corpus")
    p.add_argument("--in", dest="infile", required=True, help="clean corpus JSONL")
    p.add_argument("--lexicon", required=True, help="profanity lexicon CSV")
    p.add_argument("--out", required=True, help="annotated corpus JSONL to write")

    p = add("filter", cmd_filter, "drop songs above a slur score threshold")
    p.add_argument("--in", dest="infile", required=True, help="annotated corpus JSONL")
    p.add_argument("--out", required=True, help="filtered corpus JSONL to write")
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--threshold",
        type=float,
        default=None,
        help=f"absolute slur score cutoff (default {DEFAULT_SLUR_THRESHOLD})",
    )
    group.add_argument(
        "--quantile",
        type=float,
        default=None,
        help=f"corpus quantile cutoff, e.g. {DEFAULT_FILTER_QUANTILE}",
    )

    p = add("train", cmd_train, "fit the line model on a corpus")
    p.add_argument("--in", dest="infile", required=True, help="corpus JSONL (clean or filtered)")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--add-k", type=float, default=DEFAULT_ADD_K)
    p.add_argument("--backoff", type=float, default=DEFAULT_BACKOFF)
    p.add_argument("--name", default=None, help="model name (default: output file stem)")

    p = add("complete", cmd_complete, "sample one line continuing the given context")
    p.add_argument("--model", required=True, help="trained model file")
    p.add_argument(
        "--context",
        action="append",
        required=True,
        help="context line; repeat the flag for multi-line context",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--min-tokens", type=int, default=DEFAULT_MIN_TOKENS)
    p.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    p.add_argument("--rerank", action="store_true", help="sample candidates, keep best rhyme")
    p.add_argument("--candidates", type=int, default=DEFAULT_CANDIDATES)
    p.add_argument("--lexicon", default=None, help="lexicon CSV for slur tie-breaks")
    p.add_argument("--dict", default=None, help="pronouncing dictionary (default: bundled)")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--json", action="store_true", help="emit the full result as JSON")

    p = add("eval", cmd_eval, "run the completion protocol over a test corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True, help="test corpus JSONL")
    p.add_argument("--lexicon", default=None, help="profanity lexicon CSV (omit to skip slur scoring)")
    p.add_argument("--dict", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--min-tokens", type=int, default=DEFAULT_MIN_TOKENS)
    p.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    p.add_argument("--candidates", type=int, default=DEFAULT_CANDIDATES)
    p.add_argument("--no-rerank", action="store_true")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--out", default=None, help="also write the report as JSON")

    p = add("energy", cmd_energy, "kWh for a power draw over a duration")
    p.add_argument("--watts", type=float, required=True)
    p.add_argument("--hours", type=float, required=True)

    p = add("rd", cmd_rd, "rhyme density of a text file")
    p.add_argument("--text", required=True, help="text file, or - for stdin")
    p.add_argument("--dict", default=None, help="pronouncing dictionary (default: bundled)")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument(
        "--phonemizer-cmd",
        default=None,
        help="command producing one IPA line per input token, for unknown words",
    )

    p = add("serve", cmd_serve, "run the local HTTP API")
    p.add_argument("--model", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--dict", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)

    p = add("repl", cmd_repl, "interactive call-and-response writing session")
    p.add_argument("--model", required=True)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--dict", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--min-tokens", type=int, default=DEFAULT_MIN_TOKENS)
    p.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)

    for name, subparser in sub.choices.items():
        _apply_config(subparser, name, config)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        config = _config_defaults(argv)
        parser = build_parser(config)
        args = parser.parse_args(argv)
        level = getattr(args, "log_level", None) or "warning"
        logging.basicConfig(
            level=getattr(logging, level.upper()),
            format="%(levelname)s %(name)s: %(message)s",
        )
        return args.func(args)
    except (RaplyrError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
