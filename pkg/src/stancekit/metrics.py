"""Tweet- and party-level evaluation.

Tweet level: precision of the k highest-ranked tweets against
human-adjudicated gold labels, with seeded random-sample baselines.
Party level: Likert panel responses are reverse-coded where needed and
averaged into per-party scores, then rank-correlated (Spearman, average
ranks for ties) with the model's per-party mean favour probability.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .ingest import N_PANEL_ITEMS, CleanTweet, PanelResponse
from .stance import LABEL_FAVOR, LABEL_NEUTRAL, LABELS, TweetStance, rank_top_k

GOLD_ORIGINS = ("agreed", "adjudicated")

GROUP_BY_PARTY = "by_party"
GROUP_BY_PARTY_YEAR = "by_party_year"

LIKERT_FLIP = 6  # reverse-coded item value x scores as 6 - x on the 1..5 scale


@dataclass(frozen=True)
class GoldLabel:
    tweet_id: str
    label: str
    origin: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"invalid gold label {self.label!r}")
        if self.origin not in GOLD_ORIGINS:
            raise ValueError(f"invalid gold origin {self.origin!r}")


@dataclass
class PrecisionReport:
    k: int
    p_entail: float
    p_nonneutral: float
    survey: bool | None = None
    filtered: bool | None = None


@dataclass(frozen=True)
class PartyScore:
    party: str
    year: int | None  # None marks the all-years average
    score: float

    def __post_init__(self):
        if not 1.0 <= self.score <= 5.0:
            raise ValueError(f"party score {self.score} outside the Likert range [1, 5]")


@dataclass
class CorrelationReport:
    k: int | None  # None marks the all-tweets condition
    rho: float
    n_pairs: int


def topk_precision(
    topk: list[TweetStance],
    gold: dict[str, GoldLabel],
    k: int,
    survey: bool | None = None,
    filtered: bool | None = None,
) -> PrecisionReport:
    """Fraction of the top-k tweets whose gold label is favor / non-neutral."""
    if len(topk) != k:
        raise ValueError(f"expected exactly {k} ranked tweets, got {len(topk)}")
    missing = [s.tweet_id for s in topk if s.tweet_id not in gold]
    if missing:
        raise ValueError(f"no gold label for tweet(s): {', '.join(missing)}")
    labels = [gold[s.tweet_id].label for s in topk]
    n_favor = sum(1 for lbl in labels if lbl == LABEL_FAVOR)
    n_nonneutral = sum(1 for lbl in labels if lbl != LABEL_NEUTRAL)
    return PrecisionReport(
        k=k,
        p_entail=n_favor / k,
        p_nonneutral=n_nonneutral / k,
        survey=survey,
        filtered=filtered,
    )


def sample_baseline(corpus: list[CleanTweet], n: int, seed: int) -> list[CleanTweet]:
    """Uniform sample without replacement; the seed fixes the sample."""
    if n > len(corpus):
        raise ValueError(f"cannot sample {n} tweets from a corpus of {len(corpus)}")
    return random.Random(seed).sample(corpus, n)


def gold_fractions(sample_ids: list[str], gold: dict[str, GoldLabel]) -> tuple[float, float]:
    """(favor fraction, non-neutral fraction) of a sample under gold labels."""
    missing = [t for t in sample_ids if t not in gold]
    if missing:
        raise ValueError(f"no gold label for tweet(s): {', '.join(missing)}")
    labels = [gold[t].label for t in sample_ids]
    n = len(labels)
    if n == 0:
        raise ValueError("empty sample")
    return (
        sum(1 for lbl in labels if lbl == LABEL_FAVOR) / n,
        sum(1 for lbl in labels if lbl != LABEL_NEUTRAL) / n,
    )


def panel_scores(
    responses: list[PanelResponse],
    reverse_coded: set[int] | frozenset[int] = frozenset({1, 4, 6, 7}),
    grouping: str = GROUP_BY_PARTY,
) -> list[PartyScore]:
    """Average panel responses into per-party (or per-party-year) scores.

    ``reverse_coded`` holds 1-based item indices whose value x counts as
    6 - x, aligning every item so that higher means more in favour of the
    target. Scores are sorted descending, ties by party then year.
    """
    if not responses:
        raise ValueError("empty response list")
    if grouping not in (GROUP_BY_PARTY, GROUP_BY_PARTY_YEAR):
        raise ValueError(f"unknown grouping {grouping!r}")
    bad = [i for i in reverse_coded if not 1 <= i <= N_PANEL_ITEMS]
    if bad:
        raise ValueError(f"reverse-coded indices out of range: {sorted(bad)}")

    sums: dict[tuple[str, int | None], float] = {}
    counts: dict[tuple[str, int | None], int] = {}
    for resp in responses:
        key = (
            (resp.party_voted, resp.year)
            if grouping == GROUP_BY_PARTY_YEAR
            else (resp.party_voted, None)
        )
        total = 0
        for index, value in enumerate(resp.item_responses, start=1):
            total += LIKERT_FLIP - value if index in reverse_coded else value
        sums[key] = sums.get(key, 0) + total
        counts[key] = counts.get(key, 0) + len(resp.item_responses)

    scores = [
        PartyScore(party=party, year=year, score=sums[(party, year)] / counts[(party, year)])
        for party, year in sums
    ]
    scores.sort(key=lambda s: (-s.score, s.party, s.year if s.year is not None else -1))
    return scores


def _average_ranks(values: list[float]) -> list[float]:
    """1-based ranks; tied values all get the mean rank of their span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2 + 1
        for t in range(i, j + 1):
            ranks[order[t]] = mean_rank
        i = j + 1
    return ranks


def spearman_rho(xs: list[float], ys: list[float]) -> float:
    """Spearman's rank correlation: Pearson over average ranks."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least 2 observations")
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise ValueError("correlation is undefined for constant input")
    rx = _average_ranks(list(xs))
    ry = _average_ranks(list(ys))
    mean_x = sum(rx) / len(rx)
    mean_y = sum(ry) / len(ry)
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(rx, ry))
    var_x = sum((a - mean_x) ** 2 for a in rx)
    var_y = sum((b - mean_y) ** 2 for b in ry)
    return cov / math.sqrt(var_x * var_y)


def party_level_eval(
    stances: list[TweetStance],
    party_scores_list: list[PartyScore],
    k: int | None = None,
) -> CorrelationReport:
    """Rank-correlate per-(party, year) mean favour probability with panel scores.

    Restricts to the top-k tweets when k is given; groups absent from the
    panel scores are dropped and the number of surviving pairs is reported.
    """
    selected = stances if k is None else rank_top_k(stances, k)
    missing = [s.tweet_id for s in selected if s.party is None or s.year is None]
    if missing:
        raise ValueError(f"stance(s) missing party/year: {', '.join(missing)}")

    by_group: dict[tuple[str, int], list[float]] = {}
    for s in selected:
        by_group.setdefault((s.party, s.year), []).append(s.favor_prob)

    by_year = {(p.party, p.year): p.score for p in party_scores_list if p.year is not None}
    overall = {p.party: p.score for p in party_scores_list if p.year is None}

    xs: list[float] = []
    ys: list[float] = []
    for (party, year) in sorted(by_group):
        if (party, year) in by_year:
            score = by_year[(party, year)]
        elif party in overall:
            score = overall[party]
        else:
            continue
        xs.append(sum(by_group[(party, year)]) / len(by_group[(party, year)]))
        ys.append(score)

    if len(xs) < 2:
        raise ValueError(
            f"only {len(xs)} (party, year) group(s) matched panel scores; need at least 2"
        )
    return CorrelationReport(k=k, rho=spearman_rho(xs, ys), n_pairs=len(xs))


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

def build_report(
    stances_by_condition: dict[tuple[str, str], list[TweetStance]],
    gold: dict[str, GoldLabel],
    party_scores_list: list[PartyScore],
    baselines: dict[str, list[str]],
    k_values: list[int],
    baseline_seed: int | None = None,
) -> dict:
    """Assemble the evaluation grid as a plain JSON-ready dict.

    ``stances_by_condition`` keys are (corpus, hypothesis_condition) with
    corpus in {"all", "filtered"} and hypothesis_condition in
    {"without_survey", "with_survey"}; ``baselines`` maps corpus name to the
    sampled tweet ids.
    """
    report: dict = {"k_values": sorted(k_values), "conditions": {}}
    for corpus in ("all", "filtered"):
        corpus_cell: dict = {}
        for hyp_condition in ("without_survey", "with_survey"):
            stances = stances_by_condition[(corpus, hyp_condition)]
            precision = {}
            spearman = {}
            for k in sorted(k_values):
                topk = rank_top_k(stances, k)
                pr = topk_precision(topk, gold, k)
                precision[str(k)] = {
                    "p_entail": pr.p_entail,
                    "p_nonneutral": pr.p_nonneutral,
                }
                corr = party_level_eval(stances, party_scores_list, k)
                spearman[str(k)] = {"rho": corr.rho, "n_pairs": corr.n_pairs}
            corr_all = party_level_eval(stances, party_scores_list, None)
            spearman["all"] = {"rho": corr_all.rho, "n_pairs": corr_all.n_pairs}
            corpus_cell[hyp_condition] = {"precision": precision, "spearman": spearman}
        p_entail, p_nonneutral = gold_fractions(baselines[corpus], gold)
        corpus_cell["baseline"] = {
            "n": len(baselines[corpus]),
            "p_entail": p_entail,
            "p_nonneutral": p_nonneutral,
        }
        if baseline_seed is not None:
            corpus_cell["baseline"]["seed"] = baseline_seed
        report["conditions"][corpus] = corpus_cell
    return report
