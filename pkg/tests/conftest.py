import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DEMO_CONFIG = (
    Path(__file__).parent.parent / "src" / "stancekit" / "fixtures" / "demo" / "config.yaml"
)

# Six-tweet corpus small enough that every pipeline artifact can be checked
# against hand-computed numbers (see test_pipeline for the arithmetic).
MINI_TWEETS = [
    ("m1", "cda", 2018, "alpha vrouw woord woord woord"),
    ("m2", "vvd", 2019, "beta man woord woord woord"),
    ("m3", "cda", 2019, "vrouw woord woord woord woord"),
    ("m4", "d66", 2018, "gamma woord woord woord woord"),
    ("m5", "vvd", 2018, "woord woord woord woord woord"),
    ("m6", "d66", 2019, "beta meisje woord woord woord"),
]
MINI_GOLD = {
    "m1": "favor",
    "m2": "against",
    "m3": "neutral",
    "m4": "favor",
    "m5": "neutral",
    "m6": "against",
}
MINI_RULES = {
    "default": {"entailment": 0.1, "neutral": 0.8, "contradiction": 0.1},
    "rules": [
        {"premise_contains": "alpha", "entailment": 0.9, "neutral": 0.06, "contradiction": 0.04},
        {"premise_contains": "beta", "entailment": 0.2, "neutral": 0.2, "contradiction": 0.6},
        {"premise_contains": "gamma", "entailment": 0.82, "neutral": 0.12, "contradiction": 0.06},
    ],
}
# Panel score (post reverse-coding) per (party, year).
MINI_PANEL = {
    ("cda", 2018): 4,
    ("vvd", 2019): 2,
    ("cda", 2019): 3,
    ("d66", 2018): 1,
    ("vvd", 2018): 2,
    ("d66", 2019): 5,
}
REVERSE_CODED = {1, 4, 6, 7}


def write_mini_fixture(root: Path) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    with (root / "tweets.jsonl").open("w", encoding="utf-8") as fh:
        for tid, party, year, text in MINI_TWEETS:
            fh.write(
                json.dumps(
                    {
                        "id": tid,
                        "account": f"@{party}",
                        "party": party,
                        "timestamp": f"{year}-06-01T12:00:00",
                        "text": text,
                    }
                )
                + "\n"
            )
    with (root / "gold.jsonl").open("w", encoding="utf-8") as fh:
        for tid, label in MINI_GOLD.items():
            fh.write(json.dumps({"tweet_id": tid, "label": label, "origin": "agreed"}) + "\n")
    (root / "mock_rules.json").write_text(json.dumps(MINI_RULES), encoding="utf-8")

    header = "respondent_id,year,party," + ",".join(f"item_{i}" for i in range(1, 12))
    rows = [header]
    for n, ((party, year), value) in enumerate(sorted(MINI_PANEL.items())):
        items = [6 - value if i in REVERSE_CODED else value for i in range(1, 12)]
        rows.append(f"r{n},{year},{party}," + ",".join(str(v) for v in items))
    (root / "panel.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    with (root / "simple.jsonl").open("w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "id": "simple",
                    "text": "Ik ben voorstander van het doel.",
                    "polarity": "pro_target",
                    "source": "simple",
                    "target_id": "mini",
                }
            )
            + "\n"
        )
    with (root / "survey.jsonl").open("w", encoding="utf-8") as fh:
        for hid, polarity in (("s1", "pro_target"), ("s2", "pro_target"), ("s3", "anti_target")):
            fh.write(
                json.dumps(
                    {
                        "id": hid,
                        "text": f"Stelling {hid} over het doel.",
                        "polarity": polarity,
                        "source": "survey_item",
                        "target_id": "mini",
                    }
                )
                + "\n"
            )

    config = {
        "corpus": "tweets.jsonl",
        "panel": "panel.csv",
        "gold": "gold.jsonl",
        "hypotheses": {"simple": "simple.jsonl", "survey": "survey.jsonl"},
        "backend": {"kind": "mock", "rules": "mock_rules.json"},
        "keywords": {"terms": ["vrouw", "man", "meisje"], "mode": "substring"},
        "cleaning": {"year_min": 2017, "year_max": 2021, "min_tokens": 5},
        "evaluation": {"k_values": [2], "baseline_n": 3, "seed": 7},
        "panel_scoring": {"reverse_coded": sorted(REVERSE_CODED)},
    }
    import yaml

    (root / "config.yaml").write_text(yaml.safe_dump(config), encoding="utf-8")
    return root / "config.yaml"


@pytest.fixture
def mini_config_path(tmp_path):
    return write_mini_fixture(tmp_path / "mini")


@pytest.fixture
def demo_config_path():
    assert DEMO_CONFIG.exists()
    return DEMO_CONFIG
