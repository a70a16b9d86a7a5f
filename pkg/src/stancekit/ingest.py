"""Tweet corpus and survey-panel ingestion.

Loads line-delimited tweet records, normalizes the text (lowercase, URL and
special-character removal, whitespace collapse), drops tweets that are too
short or outside the configured year range, filters by target keywords, and
reads the panel-response CSV that supplies party-level ground truth.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

TWEET_FIELDS = ("id", "account", "party", "timestamp", "text")

LIKERT_MIN = 1
LIKERT_MAX = 5
N_PANEL_ITEMS = 11
PANEL_ITEM_COLUMNS = tuple(f"item_{i}" for i in range(1, N_PANEL_ITEMS + 1))
PANEL_COLUMNS = ("respondent_id", "year", "party") + PANEL_ITEM_COLUMNS

URL_RE = re.compile(r"https?://\S*|www\.\S*", re.IGNORECASE)
# Keep letters, digits, whitespace and basic sentence punctuation; \w alone
# would also keep underscores, hence the extra branch.
SPECIAL_RE = re.compile(r"[^\w\s.,!?'-]|_")
WHITESPACE_RE = re.compile(r"\s+")

KEYWORD_MODES = ("substring", "whole_word")


class CorpusError(ValueError):
    """Malformed corpus or panel input."""


@dataclass(frozen=True)
class RawTweet:
    id: str
    account: str
    party: str
    timestamp: datetime
    text: str


@dataclass(frozen=True)
class CleanTweet:
    id: str
    party: str
    year: int
    text: str
    token_count: int


@dataclass(frozen=True)
class PanelResponse:
    respondent_id: str
    year: int
    party_voted: str
    item_responses: tuple[int, ...]


@dataclass(frozen=True)
class CleaningRules:
    year_min: int = 2017
    year_max: int = 2021
    min_tokens: int = 5


@dataclass
class CleaningResult:
    tweets: list[CleanTweet]
    dropped: dict[str, int] = field(default_factory=dict)

    @property
    def n_input(self) -> int:
        return len(self.tweets) + sum(self.dropped.values())


def clean_text(text: str) -> str:
    """Normalize one tweet text.

    Removing special characters can fuse the remainder into new URL-shaped
    spans (e.g. ``www@.x`` -> ``www.x``), so the pass repeats until the text
    stops changing.  Every pass after the first only deletes characters, so
    the loop terminates and the function is idempotent by construction.
    """
    prev = None
    while text != prev:
        prev = text
        text = URL_RE.sub(" ", text)
        text = text.lower()
        text = SPECIAL_RE.sub("", text)
        text = WHITESPACE_RE.sub(" ", text).strip()
    return text


def _parse_timestamp(value: str) -> datetime:
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


def load_tweets(path: str | Path) -> list[RawTweet]:
    """Read a line-delimited JSON tweet file into RawTweet records.

    Raises CorpusError (with the offending line number) for unparseable
    lines, missing fields, bad timestamps, and duplicate ids.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"tweet file not found: {path}")

    tweets: list[RawTweet] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            missing = [f for f in TWEET_FIELDS if f not in record]
            if missing:
                raise CorpusError(
                    f"{path}:{lineno}: missing field(s): {', '.join(missing)}"
                )
            tweet_id = str(record["id"])
            if tweet_id in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate tweet id {tweet_id!r}")
            seen.add(tweet_id)
            try:
                timestamp = _parse_timestamp(str(record["timestamp"]))
            except ValueError as exc:
                raise CorpusError(
                    f"{path}:{lineno}: unparseable timestamp "
                    f"{record['timestamp']!r}"
                ) from exc
            tweets.append(
                RawTweet(
                    id=tweet_id,
                    account=str(record["account"]),
                    party=str(record["party"]),
                    timestamp=timestamp,
                    text=str(record["text"]),
                )
            )
    return tweets


def clean_corpus(raw: list[RawTweet], rules: CleaningRules | None = None) -> CleaningResult:
    """Clean every tweet, dropping (never failing on) bad content.

    Drop reasons are counted so that len(kept) + sum(dropped) always equals
    the input size.
    """
    rules = rules or CleaningRules()
    kept: list[CleanTweet] = []
    dropped = {"year_out_of_range": 0, "too_short": 0}
    for tweet in raw:
        year = tweet.timestamp.year
        if not rules.year_min <= year <= rules.year_max:
            dropped["year_out_of_range"] += 1
            continue
        text = clean_text(tweet.text)
        tokens = text.split()
        if len(tokens) < rules.min_tokens:
            dropped["too_short"] += 1
            continue
        kept.append(
            CleanTweet(
                id=tweet.id,
                party=tweet.party,
                year=year,
                text=text,
                token_count=len(tokens),
            )
        )
    return CleaningResult(tweets=kept, dropped=dropped)


def filter_by_keywords(
    tweets: list[CleanTweet],
    keywords: list[str],
    mode: str = "substring",
) -> list[CleanTweet]:
    """Keep the tweets matching at least one keyword, preserving order.

    ``substring`` mode matches anywhere (so "man" also hits "mannen");
    ``whole_word`` requires a word-boundary match.
    """
    if not keywords:
        raise ValueError("keyword list must not be empty")
    mode = mode.replace("-", "_")
    if mode not in KEYWORD_MODES:
        raise ValueError(f"unknown keyword mode {mode!r}; expected one of {KEYWORD_MODES}")
    terms = [kw.lower() for kw in keywords]
    if mode == "whole_word":
        pattern = re.compile(r"\b(?:" + "|".join(re.escape(t) for t in terms) + r")\b")
        return [t for t in tweets if pattern.search(t.text)]
    return [t for t in tweets if any(term in t.text for term in terms)]


def load_panel(path: str | Path) -> list[PanelResponse]:
    """Read and validate the panel-response CSV.

    Expects the header ``respondent_id,year,party,item_1..item_11``; every
    item value must be an integer Likert response in [1, 5].  Violations are
    reported with their row number.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"panel file not found: {path}")

    responses: list[PanelResponse] = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in PANEL_COLUMNS if c not in header]
        if missing:
            raise CorpusError(f"{path}: missing column(s): {', '.join(missing)}")
        stray_items = [
            c for c in header if re.fullmatch(r"item_\d+", c) and c not in PANEL_ITEM_COLUMNS
        ]
        if stray_items:
            raise CorpusError(
                f"{path}: unexpected item column(s): {', '.join(stray_items)}; "
                f"exactly {N_PANEL_ITEMS} items are expected"
            )
        # Data rows start at 2 (row 1 is the header).
        for rownum, row in enumerate(reader, start=2):
            try:
                year = int(row["year"])
            except (TypeError, ValueError):
                raise CorpusError(f"{path}:{rownum}: invalid year {row.get('year')!r}")
            items = []
            for column in PANEL_ITEM_COLUMNS:
                value = row[column]
                try:
                    likert = int(value)
                except (TypeError, ValueError):
                    raise CorpusError(
                        f"{path}:{rownum}: non-integer response {value!r} in {column}"
                    )
                if not LIKERT_MIN <= likert <= LIKERT_MAX:
                    raise CorpusError(
                        f"{path}:{rownum}: response {likert} in {column} outside "
                        f"[{LIKERT_MIN}, {LIKERT_MAX}]"
                    )
                items.append(likert)
            responses.append(
                PanelResponse(
                    respondent_id=str(row["respondent_id"]),
                    year=year,
                    party_voted=str(row["party"]),
                    item_responses=tuple(items),
                )
            )
    return responses


def clean_tweet_to_record(tweet: CleanTweet) -> dict:
    return {
        "id": tweet.id,
        "party": tweet.party,
        "year": tweet.year,
        "text": tweet.text,
        "token_count": tweet.token_count,
    }


def record_to_clean_tweet(record: dict) -> CleanTweet:
    return CleanTweet(
        id=str(record["id"]),
        party=str(record["party"]),
        year=int(record["year"]),
        text=str(record["text"]),
        token_count=int(record["token_count"]),
    )
