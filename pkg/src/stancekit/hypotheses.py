"""Hypothesis construction and validation.

A hypothesis is a stance-to-target statement scored against each tweet. Two
kinds are supported: a single templated statement, and a bank of survey items
loaded from disk. Each hypothesis carries a polarity telling the stance
mapper whether entailing it means favouring or opposing the target (survey
scales mix both directions, e.g. reverse-coded items).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

POLARITY_PRO = "pro_target"
POLARITY_ANTI = "anti_target"
POLARITIES = (POLARITY_PRO, POLARITY_ANTI)
SOURCES = ("simple", "survey_item")

SIMPLE_TEMPLATE = "Ik ben voorstander van {statement}"

HYPOTHESIS_FIELDS = ("id", "text", "polarity", "source", "target_id")


class HypothesisError(ValueError):
    """Invalid hypothesis record or set."""


@dataclass(frozen=True)
class Hypothesis:
    id: str
    text: str
    polarity: str
    source: str
    target_id: str

    def __post_init__(self):
        if not self.id:
            raise HypothesisError("hypothesis id must be non-empty")
        if not self.text or not self.text.strip():
            raise HypothesisError(f"hypothesis {self.id!r} has empty text")
        if self.polarity not in POLARITIES:
            raise HypothesisError(
                f"hypothesis {self.id!r} has invalid polarity {self.polarity!r}; "
                f"expected one of {POLARITIES}"
            )
        if self.source not in SOURCES:
            raise HypothesisError(
                f"hypothesis {self.id!r} has invalid source {self.source!r}; "
                f"expected one of {SOURCES}"
            )


@dataclass(frozen=True)
class HypothesisSet:
    target_id: str
    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        if not self.hypotheses:
            raise HypothesisError("hypothesis set must not be empty")
        seen: set[str] = set()
        for hyp in self.hypotheses:
            if hyp.id in seen:
                raise HypothesisError(f"duplicate hypothesis id {hyp.id!r}")
            seen.add(hyp.id)
            if hyp.target_id != self.target_id:
                raise HypothesisError(
                    f"hypothesis {hyp.id!r} targets {hyp.target_id!r}, "
                    f"set targets {self.target_id!r}"
                )

    def polarity_of(self, hypothesis_id: str) -> str:
        for hyp in self.hypotheses:
            if hyp.id == hypothesis_id:
                return hyp.polarity
        raise KeyError(hypothesis_id)

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)


def build_simple(target_statement: str, target_id: str = "target") -> HypothesisSet:
    """Build a one-hypothesis set from a target description.

    The statement is embedded in a first-person endorsement template, so a
    text entailing the hypothesis favours the target.
    """
    statement = target_statement.strip()
    if not statement:
        raise HypothesisError("target statement must be non-empty")
    text = SIMPLE_TEMPLATE.format(statement=statement)
    if not text.endswith((".", "!", "?")):
        text += "."
    hypothesis = Hypothesis(
        id="simple",
        text=text,
        polarity=POLARITY_PRO,
        source="simple",
        target_id=target_id,
    )
    return HypothesisSet(target_id=target_id, hypotheses=(hypothesis,))


def load_set(path: str | Path) -> HypothesisSet:
    """Load a hypothesis set from a line-delimited JSON file."""
    path = Path(path)
    if not path.exists():
        raise HypothesisError(f"hypothesis file not found: {path}")
    hypotheses: list[Hypothesis] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise HypothesisError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            missing = [f for f in HYPOTHESIS_FIELDS if f not in record]
            if missing:
                raise HypothesisError(
                    f"{path}:{lineno}: missing field(s): {', '.join(missing)}"
                )
            hypotheses.append(
                Hypothesis(
                    id=str(record["id"]),
                    text=str(record["text"]),
                    polarity=str(record["polarity"]),
                    source=str(record["source"]),
                    target_id=str(record["target_id"]),
                )
            )
    if not hypotheses:
        raise HypothesisError(f"{path}: no hypotheses found")
    return HypothesisSet(target_id=hypotheses[0].target_id, hypotheses=tuple(hypotheses))


# Spec'd name for the survey-item loading path; same format either way.
load_survey_set = load_set


def save_set(hypothesis_set: HypothesisSet, path: str | Path) -> None:
    """Write a hypothesis set as line-delimited JSON (round-trips load_set)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for hyp in hypothesis_set.hypotheses:
            fh.write(
                json.dumps(
                    {
                        "id": hyp.id,
                        "text": hyp.text,
                        "polarity": hyp.polarity,
                        "source": hyp.source,
                        "target_id": hyp.target_id,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


def fixture_path(name: str) -> Path:
    """Path of a hypothesis fixture shipped with the package."""
    return Path(resources.files("stancekit") / "fixtures" / name)
