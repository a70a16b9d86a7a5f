"""Acceptance suite: one test per release criterion, each printing a
pass/fail line (run with -v and/or -s for the full listing)."""

import itertools
import json
import random
import time

import pytest

from stancekit import pipeline
from stancekit.annostore import AnnotationStore
from stancekit.gateway import EntailmentDistribution
from stancekit.ingest import PanelResponse, RawTweet, clean_corpus, clean_text
from stancekit.metrics import GoldLabel, panel_scores, spearman_rho, topk_precision
from stancekit.pipeline import load_config
from stancekit.stance import build_tweet_stance

from oracles import spearman_oracle


def _report(name):
    print(f"ACCEPTANCE PASS: {name}")


def test_end_to_end_determinism_on_demo_fixture(demo_config_path, tmp_path):
    config = load_config(demo_config_path)
    started = time.monotonic()
    out1 = pipeline.run(config, out_dir=tmp_path / "run1")
    elapsed = time.monotonic() - started
    out2 = pipeline.run(config, out_dir=tmp_path / "run2")

    report1 = (out1 / "eval_report.json").read_bytes()
    report2 = (out2 / "eval_report.json").read_bytes()
    assert report1 == report2, "evaluation report differs between identical runs"
    assert elapsed < 10.0, f"full pipeline took {elapsed:.1f}s"

    # every Table-shaped cell must be populated
    report = json.loads(report1)
    for corpus in ("all", "filtered"):
        for hyp in ("without_survey", "with_survey"):
            block = report["conditions"][corpus][hyp]
            for k in ("5", "10"):
                assert set(block["precision"][k]) == {"p_entail", "p_nonneutral"}
                assert set(block["spearman"][k]) == {"rho", "n_pairs"}
            assert "all" in block["spearman"]
        assert set(report["conditions"][corpus]["baseline"]) >= {"n", "p_entail", "p_nonneutral"}
    _report("end-to-end determinism (byte-identical report, < 10 s)")


def _write_engineered_fixture(root):
    """Twelve tweets whose ranking and gold labels are fully controlled:
    exactly 7 of the top-10 are gold favor and 1 is gold against."""
    root.mkdir()
    parties = ["p1", "p2", "p3", "p4"]
    rules = []
    with (root / "tweets.jsonl").open("w") as fh:
        for i in range(12):
            tid = f"e{i:02d}"
            marker = f"patroon{i:02d}"
            year = 2018 + (i % 2)
            fh.write(
                json.dumps(
                    {
                        "id": tid,
                        "account": "@x",
                        "party": parties[i % 4],
                        "timestamp": f"{year}-05-01T10:00:00",
                        "text": f"{marker} vrouw woord woord woord",
                    }
                )
                + "\n"
            )
            if i < 10:
                entail = 0.95 - 0.03 * i
                rules.append(
                    {
                        "premise_contains": marker,
                        "entailment": entail,
                        "neutral": round(1 - entail - 0.02, 10),
                        "contradiction": 0.02,
                    }
                )
    (root / "mock_rules.json").write_text(
        json.dumps(
            {"default": {"entailment": 0.05, "neutral": 0.9, "contradiction": 0.05}, "rules": rules}
        )
    )
    gold = {f"e{i:02d}": "favor" for i in range(7)}
    gold["e07"] = "against"
    gold.update({f"e{i:02d}": "neutral" for i in range(8, 12)})
    with (root / "gold.jsonl").open("w") as fh:
        for tid, label in gold.items():
            fh.write(json.dumps({"tweet_id": tid, "label": label, "origin": "agreed"}) + "\n")

    for name, source in (("simple.jsonl", "simple"), ("survey.jsonl", "survey_item")):
        with (root / name).open("w") as fh:
            fh.write(
                json.dumps(
                    {
                        "id": f"{source}_1",
                        "text": "De stelling over het doel.",
                        "polarity": "pro_target",
                        "source": source,
                        "target_id": "doel",
                    }
                )
                + "\n"
            )

    header = "respondent_id,year,party," + ",".join(f"item_{i}" for i in range(1, 12))
    rows = [header]
    value_of = {"p1": 4, "p2": 2, "p3": 5, "p4": 3}
    n = 0
    for party, value in value_of.items():
        for year in (2018, 2019):
            items = [6 - value if i in (1, 4, 6, 7) else value for i in range(1, 12)]
            rows.append(f"r{n},{year},{party}," + ",".join(map(str, items)))
            n += 1
    (root / "panel.csv").write_text("\n".join(rows) + "\n")

    import yaml

    config = {
        "corpus": "tweets.jsonl",
        "panel": "panel.csv",
        "gold": "gold.jsonl",
        "hypotheses": {"simple": "simple.jsonl", "survey": "survey.jsonl"},
        "backend": {"kind": "mock", "rules": "mock_rules.json"},
        "keywords": {"terms": ["vrouw"], "mode": "substring"},
        "cleaning": {"year_min": 2017, "year_max": 2021, "min_tokens": 5},
        "evaluation": {"k_values": [10], "baseline_n": 4, "seed": 3},
        "panel_scoring": {"reverse_coded": [1, 4, 6, 7]},
    }
    path = root / "config.yaml"
    path.write_text(yaml.safe_dump(config))
    return path


def test_top10_report_cell_reads_070_080(tmp_path):
    config_path = _write_engineered_fixture(tmp_path / "engineered")
    out = pipeline.run(load_config(config_path), out_dir=tmp_path / "out")
    report = json.loads((out / "eval_report.json").read_text())
    for corpus in ("all", "filtered"):
        for hyp in ("without_survey", "with_survey"):
            cell = report["conditions"][corpus][hyp]["precision"]["10"]
            assert cell["p_entail"] == 0.70, (corpus, hyp, cell)
            assert cell["p_nonneutral"] == 0.80, (corpus, hyp, cell)
    _report("engineered top-10 report cell reads exactly 0.70 (0.80)")


def test_spearman_matches_bruteforce_oracle():
    started = time.monotonic()
    # (a) every permutation up to length 6 against the identity, no ties
    checked = 0
    for n in range(2, 7):
        base = list(range(1, n + 1))
        for perm in itertools.permutations(base):
            assert spearman_rho(base, list(perm)) == pytest.approx(
                spearman_oracle(base, list(perm)), abs=1e-12
            )
            checked += 1
    assert checked >= 720

    # (b) 500 random tie-bearing vectors of length <= 10
    rng = random.Random(4242)
    done = 0
    while done < 500:
        n = rng.randint(2, 10)
        xs = [float(rng.randint(0, 3)) for _ in range(n)]
        ys = [float(rng.randint(0, 3)) for _ in range(n)]
        if len(set(xs)) == 1 or len(set(ys)) == 1:
            continue
        assert spearman_rho(xs, ys) == pytest.approx(spearman_oracle(xs, ys), abs=1e-9)
        done += 1
    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"oracle comparison took {elapsed:.1f}s"
    _report("spearman_rho equals the brute-force oracle (872 permutations + 500 tie vectors)")


# Published all-years panel ranking: party -> mean score.
PANEL_RANKING = [
    ("SGP", 2.86),
    ("DENK", 2.56),
    ("PVV", 2.47),
    ("PLUS50", 2.38),
    ("CU", 2.35),
    ("CDA", 2.28),
    ("FVD", 2.26),
    ("SP", 2.16),
    ("VVD", 2.14),
    ("PVDD", 2.03),
    ("PVDA", 1.98),
    ("D66", 1.96),
    ("GROENLINKS", 1.83),
]
REVERSE_CODED = {1, 4, 6, 7}


def _responses_with_mean(party, target):
    """100 respondents whose post-reverse-coding item mean is exactly target."""
    total = round(target * 1100)
    base = total // 1100
    remainder = total % 1100
    values = [base + 1] * remainder + [base] * (1100 - remainder)
    responses = []
    for r in range(100):
        chunk = values[r * 11 : (r + 1) * 11]
        raw = [6 - v if i in REVERSE_CODED else v for i, v in enumerate(chunk, start=1)]
        responses.append(
            PanelResponse(
                respondent_id=f"{party}_{r}",
                year=2019,
                party_voted=party,
                item_responses=tuple(raw),
            )
        )
    return responses


def test_panel_scores_reproduce_published_party_ranking():
    responses = []
    for party, target in PANEL_RANKING:
        responses.extend(_responses_with_mean(party, target))
    scores = panel_scores(responses, reverse_coded=REVERSE_CODED, grouping="by_party")
    assert [s.party for s in scores] == [party for party, _ in PANEL_RANKING]
    for score, (party, target) in zip(scores, PANEL_RANKING):
        assert abs(score.score - target) <= 1e-9, (party, score.score, target)
    _report("panel scoring reproduces the 13-party ranking within 1e-9")


def test_precision_invariant_on_1000_random_instances():
    rng = random.Random(271828)
    violations = 0
    for _ in range(1000):
        k = rng.randint(1, 30)
        gold = {
            f"t{i}": GoldLabel(
                tweet_id=f"t{i}",
                label=rng.choice(["favor", "against", "neutral"]),
                origin=rng.choice(["agreed", "adjudicated"]),
            )
            for i in range(k)
        }
        topk = [
            build_tweet_stance(
                f"t{i}",
                {"h": EntailmentDistribution(p := rng.random(), 1 - p, 0.0)},
                {"h": "pro_target"},
            )
            for i in range(k)
        ]
        report = topk_precision(topk, gold, k)
        if report.p_nonneutral < report.p_entail:
            violations += 1
    assert violations == 0
    _report("p_nonneutral >= p_entail on 1000 random instances (0 violations)")


def _random_distribution(rng):
    parts = [rng.random() + 1e-9 for _ in range(3)]
    total = sum(parts)
    return EntailmentDistribution(parts[0] / total, parts[1] / total, parts[2] / total)


def test_polarity_flip_metamorphic_invariance():
    rng = random.Random(161803)
    flip = {"pro_target": "anti_target", "anti_target": "pro_target"}
    for _ in range(200):
        hyp_ids = [f"h{i}" for i in range(rng.randint(1, 11))]
        polarities = {h: rng.choice(["pro_target", "anti_target"]) for h in hyp_ids}
        dists = {h: _random_distribution(rng) for h in hyp_ids}

        original = build_tweet_stance("t", dists, polarities)
        flipped = build_tweet_stance(
            "t",
            {
                h: EntailmentDistribution(d.p_contra, d.p_neutral, d.p_entail)
                for h, d in dists.items()
            },
            {h: flip[p] for h, p in polarities.items()},
        )
        assert abs(original.aggregated.p_favor - flipped.aggregated.p_favor) <= 1e-12
        assert abs(original.aggregated.p_against - flipped.aggregated.p_against) <= 1e-12
        assert abs(original.aggregated.p_neutral - flipped.aggregated.p_neutral) <= 1e-12
        assert original.label == flipped.label
    _report("polarity flip + entail/contra swap leaves aggregates unchanged (200 instances)")


def test_cleaning_property_suite_on_1000_fuzzed_inputs():
    rng = random.Random(314159)
    words = [
        "Vrouw", "MAN", "moeder!", "vader?", "jongen,", "meisje.", "Kamer", "debat",
        "zorg", "école", "straße", "geld", "100", "#actie", "@lid", "én", "wet's",
    ]
    urls = [
        "https://t.co/xYz1", "http://kort.nl/a?b=c", "www.partij.nl/plan",
        "HTTPS://LOUD.example.COM/PAD", "www.x.y",
    ]
    from datetime import datetime

    raws = []
    for i in range(1000):
        parts = [rng.choice(words) for _ in range(rng.randint(0, 14))]
        for _ in range(rng.randint(0, 3)):
            parts.insert(rng.randint(0, len(parts)), rng.choice(urls))
        raws.append(
            RawTweet(
                id=f"f{i}",
                account="@x",
                party="x",
                timestamp=datetime(rng.randint(2012, 2025), rng.randint(1, 12), 15),
                text=" ".join(parts),
            )
        )
    result = clean_corpus(raws)
    assert len(result.tweets) + sum(result.dropped.values()) == 1000
    out_of_range = {t.id for t in raws if not 2017 <= t.timestamp.year <= 2021}
    for tweet in result.tweets:
        assert "http://" not in tweet.text and "https://" not in tweet.text
        assert "www." not in tweet.text
        assert tweet.token_count >= 5
        assert clean_text(tweet.text) == tweet.text
        assert 2017 <= tweet.year <= 2021
        assert tweet.id not in out_of_range
    _report("cleaning fuzz: URL-free, >= 5 tokens, idempotent, year-bounded (1000 inputs)")


def test_annotation_gold_partition_and_reopen_on_100_random_sequences(tmp_path):
    rng = random.Random(599)
    labels = ["favor", "against", "neutral"]
    for round_no in range(100):
        path = tmp_path / f"events_{round_no}.jsonl"
        store = AnnotationStore(path)
        tweet_ids = [f"t{i}" for i in range(rng.randint(2, 10))]
        store.create_task("t", ["a", "b"], [{"tweet_id": t} for t in tweet_ids])
        for _ in range(rng.randint(1, 50)):
            if rng.random() < 0.8:
                store.submit_label(
                    "t", rng.choice(["a", "b"]), rng.choice(tweet_ids), rng.choice(labels)
                )
            else:
                open_items = store.unresolved_disagreements("t")
                if open_items:
                    store.adjudicate("t", rng.choice(open_items)["tweet_id"], rng.choice(labels))
        gold, pending = store.gold_labels("t")
        assert set(gold) | set(pending) == set(tweet_ids)
        assert not set(gold) & set(pending)
        # agreement xor adjudication must match gold membership
        task = store.task("t")
        for tweet_id in tweet_ids:
            current = task.current.get(tweet_id, {})
            agreed = len(current) == 2 and len(set(current.values())) == 1
            adjudicated = tweet_id in task.adjudications
            assert (tweet_id in gold) == (agreed ^ adjudicated)

        reopened = AnnotationStore(path)
        assert reopened.gold_labels("t") == (gold, pending)
        assert reopened.task("t").current == task.current
        assert reopened.task("t").history == task.history
        assert reopened.disagreements("t") == store.disagreements("t")
    _report("gold/pending partition + reopen fidelity on 100 random event sequences")
