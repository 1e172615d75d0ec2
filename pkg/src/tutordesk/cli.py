"""Command-line entry points.

One executable with subcommands for the whole toolchain: serving the
chat API, replaying scenario suites, generating simulated corpora,
debugging the fuzzy index, exporting the rule table and stored
dialogues, and building/training/evaluating the learned units.
"""

import argparse
import json
import sys

from tutordesk.config import EngineConfig


def _engine_config(args) -> EngineConfig:
    config = EngineConfig.load(getattr(args, "config", None))
    for key in ("host", "port", "storage_path", "catalog_path",
                "templates_path", "locale", "api_token"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(config, key, value)
    return config


def _add_config_flags(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--host")
    parser.add_argument("--port", type=int)
    parser.add_argument("--storage-path", dest="storage_path")
    parser.add_argument("--catalog-path", dest="catalog_path")
    parser.add_argument("--templates-path", dest="templates_path")
    parser.add_argument("--locale")
    parser.add_argument("--api-token", dest="api_token")


def cmd_serve(args) -> int:
    import uvicorn

    from tutordesk.service import create_app

    config = _engine_config(args)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_run(args) -> int:
    from tutordesk.config import EngineConfig as _Cfg
    from tutordesk.engine import Engine
    from tutordesk.harness import format_report, load_scenarios, run_suite

    if args.scenarios:
        scenarios = load_scenarios(args.scenarios)
    else:
        from importlib import resources

        path = resources.files("tutordesk.data").joinpath("scenarios.json")
        scenarios = load_scenarios(str(path))

    def factory():
        return Engine(_Cfg(catalog_path=args.catalog_path, locale=args.locale),
                      clock=lambda: "1970-01-01T00:00:00Z")

    report = run_suite(scenarios, factory)
    if args.json:
        print(json.dumps(report, ensure_ascii=False, sort_keys=True))
    else:
        print(format_report(report))
    return 0 if not report["failed"] else 1


def cmd_generate(args) -> int:
    from tutordesk.harness import save_scenarios
    from tutordesk.simulate import generate_corpus

    corpus = generate_corpus(n=args.n, seed=args.seed,
                             storage_path=args.storage_path)
    if args.out:
        save_scenarios(corpus["scenarios"], args.out)
    print(json.dumps(corpus["stats"], ensure_ascii=False, sort_keys=True))
    return 0


def cmd_query(args) -> int:
    from tutordesk.catalog import build_index, load_catalog, search_with_history
    from tutordesk.normalizer import load_normalizer_config, normalize

    cfg = load_normalizer_config()
    catalog = load_catalog(args.catalog_path)
    index = build_index(catalog.entries, cfg)
    current = normalize(args.text, cfg)
    history = [normalize(h, cfg) for h in args.history]
    hits = search_with_history(index, current, history)
    rows = [
        {
            "entry_id": h.entry_id,
            "kind": h.kind,
            "title": catalog.by_id[h.entry_id].title,
            "score": round(h.score, 4),
            "coverage": round(h.coverage, 4),
            "matched_terms": [list(m) for m in h.matched_terms],
        }
        for h in hits[: args.top]
    ]
    if args.json:
        print(json.dumps(rows, ensure_ascii=False))
    else:
        print(f"tokens: {[t.normal for t in current.tokens]}")
        for r in rows:
            print(f"{r['score']:8.3f}  cov={r['coverage']:.2f}  "
                  f"{r['entry_id']:8s} {r['kind']:9s} {r['title']}")
    return 0


def cmd_export_transitions(args) -> int:
    from tutordesk.dialogue_state import (
        CURRENT_DESIGN,
        LEGACY_DESIGN,
        summarize_table,
        table_fingerprint,
        transition_table,
    )

    design = LEGACY_DESIGN if args.design == "legacy" else CURRENT_DESIGN
    rows = transition_table(design)
    if args.json:
        print(json.dumps({
            "design": args.design,
            "summary": summarize_table(design),
            "fingerprint": table_fingerprint(design),
            "rows": [
                {"state": r.state_id, "flags": list(r.flags),
                 "action": r.action, "rule": r.rule}
                for r in rows
            ],
        }, ensure_ascii=False, sort_keys=True))
    else:
        for r in rows:
            print(f"{r.state_id:24s} -> {r.action:22s} [{r.rule}]")
        summary = summarize_table(design)
        print(f"rows: {summary['rows']}  valid states: {summary['valid_states']}")
    return 0


def cmd_export(args) -> int:
    from tutordesk.export import ExportFilter, export_bundle
    from tutordesk.store import DialogueStore

    store = DialogueStore(args.storage_path)
    flt = ExportFilter(
        outcomes=tuple(args.outcomes.split(",")) if args.outcomes else ("handover",),
        since=args.since,
        until=args.until,
    )
    formats = tuple(args.formats.split(",")) if args.formats else None
    kwargs = {"flt": flt}
    if formats:
        kwargs["formats"] = formats
    result = export_bundle(store, args.out, **kwargs)
    print(json.dumps(result, ensure_ascii=False, sort_keys=True))
    return 0


def cmd_build_dataset(args) -> int:
    from tutordesk.learned.dataset import TokenizerConfig, build_dataset

    if args.storage_path:
        from tutordesk.export import bundle_dialogues
        from tutordesk.store import DialogueStore

        dialogues = bundle_dialogues(DialogueStore(args.storage_path))
    elif args.bundle_dir:
        from tutordesk.export import load_bundle

        dialogues = load_bundle(args.bundle_dir)
    else:
        print("build-dataset: need --storage-path or --bundle-dir", file=sys.stderr)
        return 2
    tokenizer = TokenizerConfig(lowercase=args.lowercase,
                                keep_punctuation=args.keep_punctuation)
    ds = build_dataset(dialogues, tokenizer=tokenizer, seed=args.seed)
    ds.save(args.out)
    print(json.dumps({
        "out": args.out,
        "splits": {name: {"dialogues": len(ds.dialogue_ids(name)),
                          "examples": len(ds.examples(name))}
                   for name in ("train", "eval", "test")},
    }, ensure_ascii=False, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    from tutordesk.learned.dataset import LabeledDataset

    ds = LabeledDataset.load(args.dataset)
    if args.model == "nap":
        from tutordesk.learned.nap import train_nap

        model = train_nap(ds, setting=args.setting, seed=args.seed)
    else:
        from tutordesk.learned.ner import train_ner

        model = train_ner(ds, seed=args.seed)
    model.save(args.out)
    print(json.dumps({"model": args.model, "out": args.out,
                      "setting": getattr(model, "setting", None)},
                     ensure_ascii=False, sort_keys=True))
    return 0


def cmd_evaluate(args) -> int:
    from tutordesk.learned.dataset import LabeledDataset
    from tutordesk.learned.metrics import evaluate

    ds = LabeledDataset.load(args.dataset)
    nap_model = None
    ner_model = None
    if args.nap:
        from tutordesk.learned.nap import NapModel

        nap_model = NapModel.load(args.nap)
    if args.ner:
        from tutordesk.learned.ner import NerModel

        ner_model = NerModel.load(args.ner)
    if nap_model is None and ner_model is None:
        print("evaluate: need --nap and/or --ner", file=sys.stderr)
        return 2
    report = evaluate(ds, nap_model=nap_model, ner_model=ner_model,
                      split=args.split)
    print(json.dumps(report, ensure_ascii=False, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tutordesk",
        description="Slot-filling support dialogue engine and its toolchain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the chat HTTP service")
    _add_config_flags(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("run", help="replay a scenario suite against the engine")
    p.add_argument("scenarios", nargs="?",
                   help="scenario .json file or directory (default: bundled suite)")
    p.add_argument("--catalog-path", dest="catalog_path")
    p.add_argument("--locale")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("generate", help="generate a simulated dialogue corpus")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", help="write generated scenarios to this file")
    p.add_argument("--storage-path", dest="storage_path",
                   help="persist the dialogues to this store directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("query", help="debug a fuzzy catalog query")
    p.add_argument("text")
    p.add_argument("--history", action="append", default=[],
                   help="earlier user message (repeatable, oldest first)")
    p.add_argument("--catalog-path", dest="catalog_path")
    p.add_argument("--top", type=int, default=8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("export-transitions", help="print the generated rule table")
    p.add_argument("--design", choices=("current", "legacy"), default="current")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_export_transitions)

    p = sub.add_parser("export", help="export stored dialogues as training data")
    p.add_argument("--storage-path", dest="storage_path", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--outcomes", help="comma-separated outcome filter")
    p.add_argument("--since", help="inclusive ISO-8601 lower bound")
    p.add_argument("--until", help="exclusive ISO-8601 upper bound")
    p.add_argument("--formats", help="comma-separated stream subset")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("build-dataset", help="build a labeled dataset from logs")
    p.add_argument("--storage-path", dest="storage_path")
    p.add_argument("--bundle-dir", dest="bundle_dir",
                   help="directory holding an exported bundle")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lowercase", action="store_true",
                   help="fold token case (ablation)")
    p.add_argument("--keep-punctuation", action="store_true",
                   help="keep punctuation tokens (ablation)")
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("train", help="train a learned unit on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", choices=("nap", "ner"), required=True)
    p.add_argument("--setting", choices=("default", "extended"), default="default")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate trained units on a dataset split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--nap", help="NAP model file")
    p.add_argument("--ner", help="NER model file")
    p.add_argument("--split", choices=("train", "eval", "test"), default="test")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
