"""Command-line interface: every pipeline stage plus the annotation server.

All stage commands share `--config` (YAML, see README) and `--out`
(overrides the configured output directory). `run` executes any subset of
stages in pipeline order.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline, report
from .pipeline import ConfigError, MissingArtifactError, StageError, load_config


def _add_config_args(parser: argparse.ArgumentParser):
    parser.add_argument("--config", required=True, help="pipeline config (YAML)")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    # field-level overrides; unset flags leave the config value in place
    parser.add_argument("--corpus", default=None, help="tweet corpus (JSONL)")
    parser.add_argument("--panel", default=None, help="panel responses (CSV)")
    parser.add_argument("--gold", default=None, help="gold labels (JSONL)")
    parser.add_argument("--simple-hypotheses", default=None)
    parser.add_argument("--survey-hypotheses", default=None)
    parser.add_argument("--backend-kind", default=None, choices=["mock", "process", "http"])
    parser.add_argument("--backend-rules", default=None, help="mock rules file")
    parser.add_argument("--backend-cmd", default=None, help="process backend argv (space-split)")
    parser.add_argument("--backend-url", default=None, help="http backend endpoint")
    parser.add_argument("--keywords", default=None, help="comma-separated keyword list")
    parser.add_argument("--keyword-mode", default=None, choices=["substring", "whole-word", "whole_word"])
    parser.add_argument("--year-min", type=int, default=None)
    parser.add_argument("--year-max", type=int, default=None)
    parser.add_argument("--min-tokens", type=int, default=None)
    parser.add_argument("--k-values", default=None, help="comma-separated k list")
    parser.add_argument("--baseline-n", type=int, default=None)
    parser.add_argument("--reverse-coded", default=None, help="comma-separated item indices")


def _apply_overrides(config, args) -> None:
    """Fold command-line field overrides into a loaded config."""
    cwd = Path.cwd()
    for flag, attr in (
        ("corpus", "corpus"),
        ("panel", "panel"),
        ("gold", "gold"),
        ("simple_hypotheses", "simple_hypotheses"),
        ("survey_hypotheses", "survey_hypotheses"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, attr, (cwd / value).resolve())
    if getattr(args, "backend_kind", None) is not None:
        config.backend.kind = args.backend_kind
    if getattr(args, "backend_rules", None) is not None:
        config.backend.rules = (cwd / args.backend_rules).resolve()
    if getattr(args, "backend_cmd", None) is not None:
        config.backend.cmd = args.backend_cmd.split()
    if getattr(args, "backend_url", None) is not None:
        config.backend.url = args.backend_url
    if getattr(args, "keywords", None) is not None:
        config.keywords = [k for k in args.keywords.split(",") if k]
    if getattr(args, "keyword_mode", None) is not None:
        config.keyword_mode = args.keyword_mode
    for flag in ("year_min", "year_max", "min_tokens", "baseline_n"):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, flag, value)
    if getattr(args, "k_values", None) is not None:
        config.k_values = [int(k) for k in args.k_values.split(",") if k]
    if getattr(args, "reverse_coded", None) is not None:
        config.reverse_coded = [int(i) for i in args.reverse_coded.split(",") if i]
    pipeline.validate_config(config)


def _load_with_overrides(args):
    config = load_config(args.config)
    _apply_overrides(config, args)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stancekit",
        description="Zero-shot stance detection via textual entailment",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the pipeline end to end")
    _add_config_args(run_p)
    run_p.add_argument(
        "--stages",
        default=None,
        help=f"comma-separated subset of: {', '.join(pipeline.STAGES)}",
    )

    for stage in ("ingest", "filter", "score", "aggregate", "evaluate"):
        stage_p = sub.add_parser(stage, help=f"run only the {stage} stage")
        _add_config_args(stage_p)

    baseline_p = sub.add_parser("baseline", help="draw the random baseline samples")
    _add_config_args(baseline_p)
    baseline_p.add_argument("--seed", required=True, type=int, help="sampling seed")

    panel_p = sub.add_parser("panel-rank", help="score and rank parties from panel data")
    _add_config_args(panel_p)

    report_p = sub.add_parser("report", help="render figures and CSV from the report")
    _add_config_args(report_p)

    serve_p = sub.add_parser("serve-annotation", help="start the annotation API server")
    serve_p.add_argument("--store", required=True, help="event log path")
    serve_p.add_argument("--task-file", default=None, help="JSON task bootstrap file")
    serve_p.add_argument("--static-dir", default=None, help="directory with the built UI")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8400)

    return parser


def _run_stages(args, stages: list[str]) -> int:
    config = _load_with_overrides(args)
    out = pipeline.run(config, stages=stages, out_dir=args.out)
    print(f"wrote artifacts to {out}")
    return 0


def _print_party_ranking(out: Path):
    path = out / pipeline.ARTIFACTS["party_scores_overall"]
    print(f"{'party':<14} score")
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            print(f"{record['party']:<14} {record['score']:.2f}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            stages = args.stages.split(",") if args.stages else None
            config = _load_with_overrides(args)
            out = pipeline.run(config, stages=stages, out_dir=args.out)
            print(f"wrote artifacts to {out}")
            return 0
        if args.command in ("ingest", "filter", "score", "aggregate", "evaluate"):
            return _run_stages(args, [args.command])
        if args.command == "baseline":
            config = _load_with_overrides(args)
            out = Path(args.out) if args.out else config.output_dir
            if out is None:
                raise ConfigError("no output directory configured")
            out.mkdir(parents=True, exist_ok=True)
            pipeline.stage_baseline(config, out, seed=args.seed)
            pipeline.update_manifest(config, out)
            print(f"wrote baseline samples to {out} (seed {args.seed})")
            return 0
        if args.command == "panel-rank":
            config = _load_with_overrides(args)
            out = Path(args.out) if args.out else config.output_dir
            if out is None:
                raise ConfigError("no output directory configured")
            out.mkdir(parents=True, exist_ok=True)
            pipeline.stage_panel(config, out)
            pipeline.update_manifest(config, out)
            _print_party_ranking(out)
            return 0
        if args.command == "report":
            config = _load_with_overrides(args)
            out = Path(args.out) if args.out else config.output_dir
            if out is None:
                raise ConfigError("no output directory configured")
            report_path = out / pipeline.ARTIFACTS["eval_report"]
            if not report_path.exists():
                raise MissingArtifactError("evaluate", report_path)
            for path in report.render(report_path, out):
                print(f"wrote {path}")
            return 0
        if args.command == "serve-annotation":
            return _serve_annotation(args)
    except (ConfigError, MissingArtifactError, StageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command!r}")


def _serve_annotation(args) -> int:
    import uvicorn

    from .annostore import AnnotationStore
    from .api import create_app

    store = AnnotationStore(args.store)
    if args.task_file:
        with open(args.task_file, encoding="utf-8") as fh:
            spec = json.load(fh)
        if spec["task_id"] not in store.tasks:
            store.create_task(spec["task_id"], spec["annotators"], spec["items"])
    app = create_app(store, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
