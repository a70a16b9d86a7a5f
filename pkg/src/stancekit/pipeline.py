"""End-to-end pipeline: stages, artifacts, and the run manifest.

Each stage reads its predecessor's artifact from the output directory and
writes its own, so stages are individually re-runnable and a full run is a
plain sequence. All artifacts are deterministic for a fixed config and
seed, which the manifest makes checkable via content hashes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import gateway, metrics
from .hypotheses import HypothesisSet, load_set
from .ingest import (
    CleaningRules,
    clean_corpus,
    clean_tweet_to_record,
    filter_by_keywords,
    load_panel,
    load_tweets,
    record_to_clean_tweet,
)
from .metrics import GoldLabel, PartyScore, panel_scores
from .stance import build_tweet_stance, record_to_stance, stance_to_record

STAGES = ("ingest", "filter", "score", "aggregate", "baseline", "panel", "evaluate")

CORPUS_CONDITIONS = ("all", "filtered")
HYPOTHESIS_CONDITIONS = ("without_survey", "with_survey")

ARTIFACTS = {
    "clean_tweets": "clean_tweets.jsonl",
    "ingest_stats": "ingest_stats.json",
    "filtered_tweets": "filtered_tweets.jsonl",
    "party_scores_by_year": "party_scores_by_year.jsonl",
    "party_scores_overall": "party_scores_overall.jsonl",
    "eval_report": "eval_report.json",
    "manifest": "manifest.json",
}


class ConfigError(ValueError):
    """Invalid or incomplete pipeline configuration."""


class MissingArtifactError(RuntimeError):
    """A stage's input artifact is absent; names the stage that makes it."""

    def __init__(self, stage: str, path: Path):
        super().__init__(
            f"missing artifact {path.name}: run the {stage!r} stage first"
        )
        self.stage = stage
        self.path = path


class StageError(RuntimeError):
    """A stage failed; carries the stage name with the underlying cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


@dataclass
class BackendSpec:
    kind: str  # mock | process | http
    rules: Path | None = None
    cmd: list[str] = field(default_factory=list)
    url: str | None = None
    batch_size: int = gateway.DEFAULT_BATCH_SIZE
    retries: int = gateway.DEFAULT_RETRIES


@dataclass
class PipelineConfig:
    corpus: Path
    panel: Path
    gold: Path
    simple_hypotheses: Path
    survey_hypotheses: Path
    backend: BackendSpec
    keywords: list[str]
    keyword_mode: str = "substring"
    year_min: int = 2017
    year_max: int = 2021
    min_tokens: int = 5
    k_values: list[int] = field(default_factory=lambda: [10, 50, 100])
    baseline_n: int = 100
    seed: int | None = None
    reverse_coded: list[int] = field(default_factory=lambda: [1, 4, 6, 7])
    output_dir: Path | None = None

    def cleaning_rules(self) -> CleaningRules:
        return CleaningRules(
            year_min=self.year_min, year_max=self.year_max, min_tokens=self.min_tokens
        )


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else (base / path).resolve()


def load_config(path: str | Path) -> PipelineConfig:
    """Load and validate a YAML pipeline config.

    Input paths are resolved relative to the config file; the output
    directory is taken as given (relative to the working directory).
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    base = path.parent.resolve()

    try:
        hyp = raw["hypotheses"]
        backend_raw = raw["backend"]
        config = PipelineConfig(
            corpus=_resolve(base, raw["corpus"]),
            panel=_resolve(base, raw["panel"]),
            gold=_resolve(base, raw["gold"]),
            simple_hypotheses=_resolve(base, hyp["simple"]),
            survey_hypotheses=_resolve(base, hyp["survey"]),
            backend=BackendSpec(
                kind=str(backend_raw.get("kind", "mock")),
                rules=(
                    _resolve(base, backend_raw["rules"])
                    if backend_raw.get("rules")
                    else None
                ),
                cmd=[str(c) for c in backend_raw.get("cmd", [])],
                url=backend_raw.get("url"),
                batch_size=int(backend_raw.get("batch_size", gateway.DEFAULT_BATCH_SIZE)),
                retries=int(backend_raw.get("retries", gateway.DEFAULT_RETRIES)),
            ),
            keywords=[str(k) for k in raw["keywords"]["terms"]],
            keyword_mode=str(raw["keywords"].get("mode", "substring")),
            year_min=int(raw.get("cleaning", {}).get("year_min", 2017)),
            year_max=int(raw.get("cleaning", {}).get("year_max", 2021)),
            min_tokens=int(raw.get("cleaning", {}).get("min_tokens", 5)),
            k_values=[int(k) for k in raw.get("evaluation", {}).get("k_values", [10, 50, 100])],
            baseline_n=int(raw.get("evaluation", {}).get("baseline_n", 100)),
            seed=(
                int(raw["evaluation"]["seed"])
                if raw.get("evaluation", {}).get("seed") is not None
                else None
            ),
            reverse_coded=[
                int(i) for i in raw.get("panel_scoring", {}).get("reverse_coded", [1, 4, 6, 7])
            ],
            output_dir=Path(raw["output_dir"]) if raw.get("output_dir") else None,
        )
    except KeyError as exc:
        raise ConfigError(f"{path}: missing config key {exc}") from exc

    validate_config(config)
    return config


def validate_config(config: PipelineConfig) -> None:
    for name in ("corpus", "panel", "gold", "simple_hypotheses", "survey_hypotheses"):
        target: Path = getattr(config, name)
        if not target.exists():
            raise ConfigError(f"{name} file not found: {target}")
    if any(k <= 0 for k in config.k_values):
        raise ConfigError(f"k values must be positive: {config.k_values}")
    if not config.k_values:
        raise ConfigError("at least one k value is required")
    if config.baseline_n <= 0:
        raise ConfigError(f"baseline_n must be positive: {config.baseline_n}")
    if not config.keywords:
        raise ConfigError("keyword list must not be empty")
    if config.backend.kind == "mock" and config.backend.rules is None:
        raise ConfigError("mock backend needs a rules file")
    if config.backend.kind == "mock" and not config.backend.rules.exists():
        raise ConfigError(f"mock rules file not found: {config.backend.rules}")
    if config.backend.kind == "process" and not config.backend.cmd:
        raise ConfigError("process backend needs a command")
    if config.backend.kind == "http" and not config.backend.url:
        raise ConfigError("http backend needs a url")
    if config.backend.kind not in ("mock", "process", "http"):
        raise ConfigError(f"unknown backend kind {config.backend.kind!r}")


def make_scorer(spec: BackendSpec):
    if spec.kind == "mock":
        return gateway.load_mock_rules(spec.rules)
    if spec.kind == "process":
        return gateway.ProcessScorer(spec.cmd)
    if spec.kind == "http":
        return gateway.HttpScorer(spec.url)
    raise ConfigError(f"unknown backend kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Artifact helpers
# ---------------------------------------------------------------------------

def _write_jsonl(path: Path, records: list[dict]):
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def _write_json(path: Path, payload: dict):
    path.write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def _require(path: Path, stage: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(stage, path)
    return path


def scores_path(out: Path, corpus: str, hyp_condition: str) -> Path:
    return out / f"scores_{corpus}_{hyp_condition}.jsonl"


def stances_path(out: Path, corpus: str, hyp_condition: str) -> Path:
    return out / f"stances_{corpus}_{hyp_condition}.jsonl"


def baseline_path(out: Path, corpus: str) -> Path:
    return out / f"baseline_{corpus}.jsonl"


def _config_fingerprint(config: PipelineConfig) -> str:
    payload = {
        "corpus": str(config.corpus),
        "panel": str(config.panel),
        "gold": str(config.gold),
        "simple_hypotheses": str(config.simple_hypotheses),
        "survey_hypotheses": str(config.survey_hypotheses),
        "backend": {
            "kind": config.backend.kind,
            "rules": str(config.backend.rules) if config.backend.rules else None,
            "cmd": config.backend.cmd,
            "url": config.backend.url,
            "batch_size": config.backend.batch_size,
            "retries": config.backend.retries,
        },
        "keywords": config.keywords,
        "keyword_mode": config.keyword_mode,
        "year_min": config.year_min,
        "year_max": config.year_max,
        "min_tokens": config.min_tokens,
        "k_values": config.k_values,
        "baseline_n": config.baseline_n,
        "seed": config.seed,
        "reverse_coded": config.reverse_coded,
    }
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def update_manifest(config: PipelineConfig, out: Path):
    artifacts = {}
    for path in sorted(out.iterdir()):
        if path.name == ARTIFACTS["manifest"] or not path.is_file():
            continue
        artifacts[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    _write_json(
        out / ARTIFACTS["manifest"],
        {
            "config_sha256": _config_fingerprint(config),
            "seed": config.seed,
            "artifacts": artifacts,
        },
    )


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def stage_ingest(config: PipelineConfig, out: Path):
    raw = load_tweets(config.corpus)
    result = clean_corpus(raw, config.cleaning_rules())
    _write_jsonl(
        out / ARTIFACTS["clean_tweets"],
        [clean_tweet_to_record(t) for t in result.tweets],
    )
    _write_json(
        out / ARTIFACTS["ingest_stats"],
        {
            "input": result.n_input,
            "kept": len(result.tweets),
            "dropped": result.dropped,
        },
    )


def _load_clean(out: Path, corpus: str):
    if corpus == "all":
        path = _require(out / ARTIFACTS["clean_tweets"], "ingest")
    else:
        path = _require(out / ARTIFACTS["filtered_tweets"], "filter")
    return [record_to_clean_tweet(r) for r in _read_jsonl(path)]


def stage_filter(config: PipelineConfig, out: Path):
    tweets = _load_clean(out, "all")
    kept = filter_by_keywords(tweets, config.keywords, config.keyword_mode)
    _write_jsonl(
        out / ARTIFACTS["filtered_tweets"], [clean_tweet_to_record(t) for t in kept]
    )


def _hypothesis_sets(config: PipelineConfig) -> dict[str, HypothesisSet]:
    return {
        "without_survey": load_set(config.simple_hypotheses),
        "with_survey": load_set(config.survey_hypotheses),
    }


def stage_score(config: PipelineConfig, out: Path):
    scorer = make_scorer(config.backend)
    sets = _hypothesis_sets(config)
    try:
        for corpus in CORPUS_CONDITIONS:
            tweets = _load_clean(out, corpus)
            for hyp_condition, hyp_set in sets.items():
                pairs = [
                    gateway.PremiseHypothesisPair(
                        tweet_id=t.id,
                        hypothesis_id=h.id,
                        premise=t.text,
                        hypothesis=h.text,
                    )
                    for t in tweets
                    for h in hyp_set
                ]
                dists = gateway.score_batch(
                    pairs,
                    scorer,
                    batch_size=config.backend.batch_size,
                    retries=config.backend.retries,
                )
                records = [
                    {
                        "tweet_id": pair.tweet_id,
                        "hypothesis_id": pair.hypothesis_id,
                        "entailment": dist.p_entail,
                        "neutral": dist.p_neutral,
                        "contradiction": dist.p_contra,
                    }
                    for pair, dist in zip(pairs, dists)
                ]
                _write_jsonl(scores_path(out, corpus, hyp_condition), records)
    finally:
        scorer.close()


def stage_aggregate(config: PipelineConfig, out: Path):
    sets = _hypothesis_sets(config)
    for corpus in CORPUS_CONDITIONS:
        tweets = {t.id: t for t in _load_clean(out, corpus)}
        for hyp_condition, hyp_set in sets.items():
            polarity = {h.id: h.polarity for h in hyp_set}
            path = _require(scores_path(out, corpus, hyp_condition), "score")
            by_tweet: dict[str, dict[str, gateway.EntailmentDistribution]] = {}
            for record in _read_jsonl(path):
                by_tweet.setdefault(record["tweet_id"], {})[record["hypothesis_id"]] = (
                    gateway.EntailmentDistribution(
                        record["entailment"], record["neutral"], record["contradiction"]
                    )
                )
            stances = []
            for tweet_id in tweets:  # corpus file order
                if tweet_id not in by_tweet:
                    continue
                tweet = tweets[tweet_id]
                stances.append(
                    build_tweet_stance(
                        tweet_id,
                        by_tweet[tweet_id],
                        polarity,
                        party=tweet.party,
                        year=tweet.year,
                    )
                )
            _write_jsonl(
                stances_path(out, corpus, hyp_condition),
                [stance_to_record(s) for s in stances],
            )


def stage_baseline(config: PipelineConfig, out: Path, seed: int | None = None):
    seed = config.seed if seed is None else seed
    if seed is None:
        raise ConfigError("baseline sampling needs an explicit seed")
    for corpus in CORPUS_CONDITIONS:
        tweets = _load_clean(out, corpus)
        sample = metrics.sample_baseline(tweets, config.baseline_n, seed)
        _write_jsonl(baseline_path(out, corpus), [clean_tweet_to_record(t) for t in sample])


def stage_panel(config: PipelineConfig, out: Path):
    responses = load_panel(config.panel)
    reverse = set(config.reverse_coded)
    by_year = panel_scores(responses, reverse, metrics.GROUP_BY_PARTY_YEAR)
    overall = panel_scores(responses, reverse, metrics.GROUP_BY_PARTY)
    _write_jsonl(
        out / ARTIFACTS["party_scores_by_year"],
        [{"party": s.party, "year": s.year, "score": s.score} for s in by_year],
    )
    _write_jsonl(
        out / ARTIFACTS["party_scores_overall"],
        [{"party": s.party, "year": s.year, "score": s.score} for s in overall],
    )


def load_gold(path: Path) -> dict[str, GoldLabel]:
    gold = {}
    for record in _read_jsonl(path):
        label = GoldLabel(
            tweet_id=str(record["tweet_id"]),
            label=str(record["label"]),
            origin=str(record.get("origin", "agreed")),
        )
        if label.tweet_id in gold:
            raise ValueError(f"duplicate gold label for tweet {label.tweet_id!r}")
        gold[label.tweet_id] = label
    return gold


def stage_evaluate(config: PipelineConfig, out: Path):
    gold = load_gold(_require(config.gold, "gold labels (config)"))
    stances_by_condition = {}
    for corpus in CORPUS_CONDITIONS:
        for hyp_condition in HYPOTHESIS_CONDITIONS:
            path = _require(stances_path(out, corpus, hyp_condition), "aggregate")
            stances_by_condition[(corpus, hyp_condition)] = [
                record_to_stance(r) for r in _read_jsonl(path)
            ]
    score_records = _read_jsonl(_require(out / ARTIFACTS["party_scores_by_year"], "panel"))
    score_records += _read_jsonl(_require(out / ARTIFACTS["party_scores_overall"], "panel"))
    party_scores_list = [
        PartyScore(party=r["party"], year=r["year"], score=r["score"]) for r in score_records
    ]
    baselines = {}
    for corpus in CORPUS_CONDITIONS:
        path = _require(baseline_path(out, corpus), "baseline")
        baselines[corpus] = [str(r["id"]) for r in _read_jsonl(path)]
    report = metrics.build_report(
        stances_by_condition,
        gold,
        party_scores_list,
        baselines,
        config.k_values,
        baseline_seed=config.seed,
    )
    _write_json(out / ARTIFACTS["eval_report"], report)


STAGE_FUNCTIONS = {
    "ingest": stage_ingest,
    "filter": stage_filter,
    "score": stage_score,
    "aggregate": stage_aggregate,
    "baseline": stage_baseline,
    "panel": stage_panel,
    "evaluate": stage_evaluate,
}


def run(
    config: PipelineConfig,
    stages: list[str] | None = None,
    out_dir: str | Path | None = None,
) -> Path:
    """Run the requested stages in pipeline order; returns the output dir."""
    selected = list(STAGES) if stages is None else list(stages)
    unknown = [s for s in selected if s not in STAGES]
    if unknown:
        raise ConfigError(f"unknown stage(s): {', '.join(unknown)}")
    out = Path(out_dir) if out_dir is not None else config.output_dir
    if out is None:
        raise ConfigError("no output directory configured (set output_dir or pass --out)")
    out.mkdir(parents=True, exist_ok=True)
    for stage in STAGES:
        if stage not in selected:
            continue
        try:
            STAGE_FUNCTIONS[stage](config, out)
        except (gateway.BackendTransportError, gateway.BackendProtocolError) as exc:
            raise StageError(stage, exc) from exc
        update_manifest(config, out)
    return out
