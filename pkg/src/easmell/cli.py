"""Command line interface.

Subcommands: ingest, synth corpus, synth dataset, detect, eval, report,
serve.  Settings resolve as flags > environment (EASMELL_*) > config file;
the config file is plain `key = value` lines with dots for nesting, e.g.

    window = 3000
    profile.mistral.kind = remote_chat
    profile.mistral.endpoint = http://127.0.0.1:8080/v1/chat/completions
    profile.mistral.model = mistral-7b-instruct
    profile.mistral.auth_env = EASMELL_API_TOKEN
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus import load_corpus
from .detect.types import BackendProfile, DetectionProtocol, DetectionRequest
from .detect.runner import run_detection
from .errors import EasmellError
from .evaluation import (
    doc_exact_accuracy,
    load_annotations,
    metrics_from_counts,
    metrics_json,
    metrics_table_markdown,
    pair_confusion,
)
from .report import render_report
from .smells import catalog
from .store import RunStore
from .synth import build_training_dataset, generate_case_corpus, training_dataset_jsonl, write_case_corpus
from .verify import classify_errors
from .service import DEFAULT_HOST, DEFAULT_PORT

ENV_PREFIX = "EASMELL_"

CONFIG_KEYS = ("out", "window", "overlap", "concurrency", "profile", "protocol", "seed", "data_dir")


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment, blank lines ignored."""
    values: dict[str, str] = {}
    for raw_line in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise EasmellError(f"config line without '=': {raw_line.strip()!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


class Settings:
    """Layered settings: CLI flags beat environment variables beat config file."""

    def __init__(self, args: argparse.Namespace):
        self.flags = vars(args)
        self.config: dict[str, str] = {}
        config_path = self.flags.get("config") or os.environ.get(ENV_PREFIX + "CONFIG")
        if config_path:
            self.config = read_config_file(config_path)

    def get(self, key: str, default=None):
        flag = self.flags.get(key)
        if flag is not None:
            return flag
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            return env
        if key in self.config:
            return self.config[key]
        return default

    def profiles(self) -> dict[str, BackendProfile]:
        """Profiles from the config file plus the built-in lexical baseline."""
        profiles = {"baseline": BackendProfile(id="baseline", kind="lexical_baseline")}
        grouped: dict[str, dict[str, str]] = {}
        for key, value in self.config.items():
            if key.startswith("profile."):
                _, name, field = key.split(".", 2)
                grouped.setdefault(name, {})[field] = value
        for name, fields in grouped.items():
            profiles[name] = BackendProfile(
                id=name,
                kind=fields.get("kind", "remote_chat"),
                endpoint=fields.get("endpoint"),
                model=fields.get("model"),
                auth_token_env=fields.get("auth_env"),
                replay_dir=fields.get("dir"),
                max_docs_per_call=int(fields["max_docs_per_call"]) if "max_docs_per_call" in fields else None,
            )
        return profiles

    def resolve_profile(self, name: str, replay_dir: str | None) -> BackendProfile:
        if name == "replay":
            if not replay_dir:
                raise EasmellError("profile 'replay' needs --replay-dir")
            return BackendProfile(id="replay", kind="replay", replay_dir=str(replay_dir))
        profiles = self.profiles()
        if name not in profiles:
            raise EasmellError(
                f"unknown profile {name!r}; known: {', '.join(sorted(profiles))} "
                f"(define more in the config file)"
            )
        return profiles[name]


def _out_dir(settings: Settings, default: str = ".") -> Path:
    return Path(settings.get("out", default))


def cmd_ingest(settings: Settings) -> int:
    corpus = load_corpus(settings.flags["directory"], settings.flags.get("annotations"))
    print(f"{len(corpus.documents)} documents ingested")
    for doc in corpus.documents:
        print(f"  {doc.id}  {len(doc.body):>6} chars  {len(doc.paragraph_offsets):>3} paragraphs  {doc.title}")
    if corpus.annotations:
        planted = sum(len(a.planted) for a in corpus.annotations)
        print(f"{len(corpus.annotations)} annotation entries, {planted} planted smells")
    out = settings.flags.get("out")
    if out:
        out_path = Path(out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(json.dumps([d.to_dict() for d in corpus.documents], indent=2), encoding="utf-8")
        print(f"wrote {out_path}")
    return 0


def cmd_synth_corpus(settings: Settings) -> int:
    seed = int(settings.get("seed", 7))
    out = _out_dir(settings, "corpus")
    corpus = generate_case_corpus(seed)
    write_case_corpus(corpus, out)
    smelly = sum(1 for a in corpus.annotations if a.planted)
    print(f"wrote {len(corpus.documents)} documents to {out} "
          f"({smelly} with planted smells, seed {seed})")
    return 0


def cmd_synth_dataset(settings: Settings) -> int:
    seed = int(settings.get("seed", 7))
    out = Path(settings.get("out", "dataset.jsonl"))
    records = build_training_dataset(seed)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(training_dataset_jsonl(records), encoding="utf-8")
    positives = sum(1 for r in records if r.label)
    print(f"wrote {len(records)} records to {out} ({positives} positive, "
          f"{len(records) - positives} negative, seed {seed})")
    return 0


def cmd_detect(settings: Settings) -> int:
    corpus = load_corpus(settings.flags["corpus"], settings.flags.get("annotations"))
    profile = settings.resolve_profile(settings.get("profile", "baseline"), settings.flags.get("replay_dir"))
    protocol = DetectionProtocol.parse(settings.get("protocol", "single"))
    seed = settings.get("seed")
    request = DetectionRequest(
        documents=tuple(corpus.documents),
        protocol=protocol,
        backend_id=profile.id,
        seed=int(seed) if seed is not None else None,
        temperature=float(settings.get("temperature", 0.0)),
    )
    report = run_detection(request, profile, concurrency=int(settings.get("concurrency", 4)))

    from .verify import verify_report_findings
    docs_by_id = {d.id: d for d in corpus.documents}
    documents_by_call = {
        t.call_index: [docs_by_id[d] for d in t.doc_ids if d in docs_by_id]
        for t in report.transcripts
    }
    verified = verify_report_findings(report.findings, documents_by_call)

    store = RunStore(_out_dir(settings, "runs"))
    store.save_run(report, verified)
    print(f"run {report.run_id}: {len(report.findings)} findings over {len(report.doc_ids)} documents "
          f"in {len(report.transcripts)} calls ({report.total_seconds:.2f}s)")
    print(f"report: {store.report_path(report.run_id)}")
    return 0


def _load_run_record(run_ref: str) -> dict:
    path = Path(run_ref)
    if path.is_dir():
        path = path / "report.json"
    if not path.exists():
        raise EasmellError(f"no run report at {run_ref!r}")
    return json.loads(path.read_text(encoding="utf-8"))


def cmd_eval(settings: Settings) -> int:
    from .detect.types import DetectionReport

    record = _load_run_record(settings.flags["run"])
    report = DetectionReport.from_dict(record["report"] if "report" in record else record)
    truth = load_annotations(settings.flags["truth"])
    truth = [t for t in truth if t.doc_id in set(report.doc_ids)]
    counts = pair_confusion(report, truth)
    row = metrics_from_counts(counts)
    fmt = settings.get("format", "md")
    if fmt == "json":
        payload = json.loads(metrics_json(row, counts))
        payload["doc_exact_accuracy"] = doc_exact_accuracy(report, truth)
        print(json.dumps(payload, indent=2))
    else:
        print(metrics_table_markdown({report.backend_id: row}))
        print()
        print(f"pair confusion: tp={counts.tp} fp={counts.fp} fn={counts.fn} tn={counts.tn}")
        print(f"document exact-match accuracy: {doc_exact_accuracy(report, truth):.3f}")
    return 0


def cmd_report(settings: Settings) -> int:
    from .detect.types import DetectionReport
    from .service import _verified_from_record

    record = _load_run_record(settings.flags["run"])
    report = DetectionReport.from_dict(record["report"] if "report" in record else record)
    verified = _verified_from_record(report, record.get("verification") or [])

    metrics = confusion = breakdown = None
    truth_path = settings.flags.get("truth")
    if truth_path:
        truth = [t for t in load_annotations(truth_path) if t.doc_id in set(report.doc_ids)]
        confusion = pair_confusion(report, truth)
        metrics = metrics_from_counts(confusion)
        breakdown = classify_errors(verified, truth, catalog())

    documents = None
    corpus_dir = settings.flags.get("corpus")
    if corpus_dir:
        documents = {d.id: d for d in load_corpus(corpus_dir).documents}

    fmt = {"md": "markdown", "markdown": "markdown", "json": "json"}.get(settings.get("format", "md"))
    if fmt is None:
        raise EasmellError(f"unknown report format {settings.get('format')!r} (use md or json)")
    text = render_report(report, verified, metrics=metrics, confusion=confusion,
                         error_breakdown=breakdown, documents=documents, fmt=fmt)
    out = settings.flags.get("out")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {out}")
    else:
        print(text, end="")
    return 0


def cmd_serve(settings: Settings) -> int:
    from .service import serve

    serve(
        data_dir=str(settings.get("data_dir", "data")),
        host=str(settings.get("host", DEFAULT_HOST)),
        port=int(settings.get("port", DEFAULT_PORT)),
        profiles=settings.profiles(),
        static_dir=settings.flags.get("static_dir"),
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="easmell",
        description="Detect architecture smells in business documents.",
    )
    parser.add_argument("--config", help="path to a key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and normalize a document directory")
    p.add_argument("directory")
    p.add_argument("--annotations", help="annotation file to cross-check")
    p.add_argument("--out", help="write ingested documents as JSON")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("synth", help="generate synthetic corpora and datasets")
    synth_sub = p.add_subparsers(dest="synth_command", required=True)
    pc = synth_sub.add_parser("corpus", help="30-document case corpus with planted smells")
    pc.add_argument("--seed", type=int)
    pc.add_argument("--out", help="output directory (default corpus)")
    pc.set_defaults(fn=cmd_synth_corpus)
    pd = synth_sub.add_parser("dataset", help="labeled smell/no-smell training records")
    pd.add_argument("--seed", type=int)
    pd.add_argument("--out", help="output JSON-lines file (default dataset.jsonl)")
    pd.set_defaults(fn=cmd_synth_dataset)

    p = sub.add_parser("detect", help="run detection over a corpus")
    p.add_argument("--corpus", required=True, help="document directory")
    p.add_argument("--annotations", help="annotation file (optional)")
    p.add_argument("--profile", help="backend profile name (default baseline)")
    p.add_argument("--replay-dir", dest="replay_dir", help="response directory for the replay profile")
    p.add_argument("--protocol", help="single or batch:N (default single)")
    p.add_argument("--seed", type=int)
    p.add_argument("--temperature", type=float)
    p.add_argument("--concurrency", type=int)
    p.add_argument("--out", help="runs directory (default runs)")
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("eval", help="score a run against ground truth")
    p.add_argument("--run", required=True, help="run directory or report.json")
    p.add_argument("--truth", required=True, help="annotation file")
    p.add_argument("--format", choices=("md", "json"))
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("report", help="render a run report")
    p.add_argument("--run", required=True, help="run directory or report.json")
    p.add_argument("--truth", help="annotation file for metrics")
    p.add_argument("--corpus", help="document directory for quoting spans")
    p.add_argument("--format", choices=("md", "markdown", "json"))
    p.add_argument("--out", help="write to file instead of stdout")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("serve", help="start the review service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--data-dir", dest="data_dir", help="service data directory (default data)")
    p.add_argument("--static-dir", dest="static_dir", help="serve a built console from this directory")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args)
        return args.fn(settings)
    except EasmellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
