"""Mapping entailment distributions into stance space.

Entailing a pro-target hypothesis favours the target; entailing an
anti-target hypothesis opposes it. Mapping each hypothesis's distribution
through its polarity first makes per-hypothesis results commensurable, so a
plain arithmetic mean across hypotheses is meaningful. Tweets are ranked by
the aggregated favour probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean

from .gateway import SUM_TOLERANCE, EntailmentDistribution
from .hypotheses import POLARITY_ANTI, POLARITY_PRO

LABEL_FAVOR = "favor"
LABEL_AGAINST = "against"
LABEL_NEUTRAL = "neutral"
LABELS = (LABEL_FAVOR, LABEL_AGAINST, LABEL_NEUTRAL)

# Exact ties resolve conservatively: neutral beats against beats favor.
TIE_ORDER = (LABEL_NEUTRAL, LABEL_AGAINST, LABEL_FAVOR)


@dataclass(frozen=True)
class StanceDistribution:
    p_favor: float
    p_against: float
    p_neutral: float

    def __post_init__(self):
        for name, value in (
            ("p_favor", self.p_favor),
            ("p_against", self.p_against),
            ("p_neutral", self.p_neutral),
        ):
            if value < 0:
                raise ValueError(f"negative probability {name}={value}")
        total = self.p_favor + self.p_against + self.p_neutral
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"stance distribution sums to {total}")

    def component(self, label: str) -> float:
        return {
            LABEL_FAVOR: self.p_favor,
            LABEL_AGAINST: self.p_against,
            LABEL_NEUTRAL: self.p_neutral,
        }[label]


@dataclass
class TweetStance:
    tweet_id: str
    per_hypothesis: dict[str, StanceDistribution]
    aggregated: StanceDistribution
    label: str
    favor_prob: float
    party: str | None = None
    year: int | None = None


def to_stance_space(dist: EntailmentDistribution, polarity: str) -> StanceDistribution:
    """Map an entailment distribution into stance space via polarity.

    pro_target:  (favor, against, neutral) = (entail, contra, neutral)
    anti_target: (favor, against, neutral) = (contra, entail, neutral)
    """
    if polarity == POLARITY_PRO:
        return StanceDistribution(dist.p_entail, dist.p_contra, dist.p_neutral)
    if polarity == POLARITY_ANTI:
        return StanceDistribution(dist.p_contra, dist.p_entail, dist.p_neutral)
    raise ValueError(f"unknown polarity {polarity!r}")


def aggregate(dists: list[StanceDistribution]) -> StanceDistribution:
    """Componentwise arithmetic mean across hypotheses."""
    if not dists:
        raise ValueError("cannot aggregate an empty list of distributions")
    return StanceDistribution(
        fmean(d.p_favor for d in dists),
        fmean(d.p_against for d in dists),
        fmean(d.p_neutral for d in dists),
    )


def classify(dist: StanceDistribution) -> str:
    """Argmax label; exact ties resolve by TIE_ORDER."""
    best = max(dist.p_favor, dist.p_against, dist.p_neutral)
    for label in TIE_ORDER:
        if dist.component(label) == best:
            return label
    raise AssertionError("unreachable")


def build_tweet_stance(
    tweet_id: str,
    entailment_by_hypothesis: dict[str, EntailmentDistribution],
    polarity_by_hypothesis: dict[str, str],
    party: str | None = None,
    year: int | None = None,
) -> TweetStance:
    """Assemble one tweet's stance from its per-hypothesis NLI outputs."""
    if not entailment_by_hypothesis:
        raise ValueError(f"tweet {tweet_id!r}: no hypothesis scores")
    per_hypothesis = {
        hyp_id: to_stance_space(dist, polarity_by_hypothesis[hyp_id])
        for hyp_id, dist in entailment_by_hypothesis.items()
    }
    agg = aggregate(list(per_hypothesis.values()))
    return TweetStance(
        tweet_id=tweet_id,
        per_hypothesis=per_hypothesis,
        aggregated=agg,
        label=classify(agg),
        favor_prob=agg.p_favor,
        party=party,
        year=year,
    )


def rank_top_k(stances: list[TweetStance], k: int) -> list[TweetStance]:
    """The k stances with highest favour probability, descending.

    Ties break by ascending tweet id so the ranking is reproducible.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if k > len(stances):
        raise ValueError(f"k={k} exceeds the {len(stances)} available stances")
    return sorted(stances, key=lambda s: (-s.favor_prob, s.tweet_id))[:k]


def _dist_to_record(dist: StanceDistribution) -> dict:
    return {"favor": dist.p_favor, "against": dist.p_against, "neutral": dist.p_neutral}


def _record_to_dist(record: dict) -> StanceDistribution:
    return StanceDistribution(
        float(record["favor"]), float(record["against"]), float(record["neutral"])
    )


def stance_to_record(stance: TweetStance) -> dict:
    record = {
        "tweet_id": stance.tweet_id,
        "per_hypothesis": {
            hyp_id: _dist_to_record(d) for hyp_id, d in sorted(stance.per_hypothesis.items())
        },
        "aggregated": _dist_to_record(stance.aggregated),
        "label": stance.label,
        "favor_prob": stance.favor_prob,
    }
    if stance.party is not None:
        record["party"] = stance.party
    if stance.year is not None:
        record["year"] = stance.year
    return record


def record_to_stance(record: dict) -> TweetStance:
    return TweetStance(
        tweet_id=str(record["tweet_id"]),
        per_hypothesis={
            hyp_id: _record_to_dist(d) for hyp_id, d in record["per_hypothesis"].items()
        },
        aggregated=_record_to_dist(record["aggregated"]),
        label=str(record["label"]),
        favor_prob=float(record["favor_prob"]),
        party=record.get("party"),
        year=int(record["year"]) if record.get("year") is not None else None,
    )
