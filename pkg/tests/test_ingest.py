import json
import random

import pytest

from stancekit.ingest import (
    CleaningRules,
    CorpusError,
    RawTweet,
    clean_corpus,
    clean_text,
    filter_by_keywords,
    load_panel,
    load_tweets,
)

from conftest import MINI_TWEETS


def _raw(tweet_id="t1", text="Een prima tekst met genoeg woorden erin", year=2019, party="cda"):
    from datetime import datetime

    return RawTweet(
        id=tweet_id,
        account=f"@{party}",
        party=party,
        timestamp=datetime(year, 6, 15, 12, 0, 0),
        text=text,
    )


class TestLoadTweets:
    def test_well_formed_line(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        path.write_text(
            json.dumps(
                {
                    "id": "a1",
                    "account": "@cda",
                    "party": "cda",
                    "timestamp": "2019-03-01T09:30:00",
                    "text": "Hallo wereld",
                }
            )
            + "\n",
            encoding="utf-8",
        )
        tweets = load_tweets(path)
        assert len(tweets) == 1
        assert tweets[0].id == "a1"
        assert tweets[0].party == "cda"
        assert tweets[0].timestamp.year == 2019
        assert tweets[0].text == "Hallo wereld"

    def test_missing_text_field_reports_line_number(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        ok = {"id": "a1", "account": "@x", "party": "x", "timestamp": "2019-01-01T00:00:00", "text": "a"}
        bad = {"id": "a2", "account": "@x", "party": "x", "timestamp": "2019-01-01T00:00:00"}
        path.write_text(json.dumps(ok) + "\n" + json.dumps(bad) + "\n", encoding="utf-8")
        with pytest.raises(CorpusError, match=r":2: missing field\(s\): text"):
            load_tweets(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        record = {"id": "a1", "account": "@x", "party": "x", "timestamp": "2019-01-01T00:00:00", "text": "a"}
        path.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="duplicate tweet id 'a1'"):
            load_tweets(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CorpusError, match="not found"):
            load_tweets(tmp_path / "nope.jsonl")

    def test_bad_timestamp(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        record = {"id": "a1", "account": "@x", "party": "x", "timestamp": "gisteren", "text": "a"}
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(CorpusError, match=":1: unparseable timestamp"):
            load_tweets(path)

    def test_file_order_preserved(self, tmp_path):
        path = tmp_path / "tweets.jsonl"
        with path.open("w") as fh:
            for i in range(5):
                fh.write(
                    json.dumps(
                        {
                            "id": f"t{i}",
                            "account": "@x",
                            "party": "x",
                            "timestamp": "2019-01-01T00:00:00",
                            "text": str(i),
                        }
                    )
                    + "\n"
                )
        assert [t.id for t in load_tweets(path)] == [f"t{i}" for i in range(5)]


class TestCleanCorpus:
    def test_url_and_case_handling_drops_short_remainder(self):
        result = clean_corpus([_raw(text="Check https://t.co/abc Dit Is GEWELDIG!!", year=2019)])
        assert result.tweets == []
        assert result.dropped["too_short"] == 1
        # The surviving words alone are four tokens, below the threshold.
        assert len(clean_text("Check https://t.co/abc Dit Is GEWELDIG!!").split()) == 4

    def test_kept_tweet_lowercased_with_token_count(self):
        result = clean_corpus([_raw(text="De vrouw en de man werken beiden fulltime", year=2018)])
        assert len(result.tweets) == 1
        tweet = result.tweets[0]
        assert tweet.text == "de vrouw en de man werken beiden fulltime"
        assert tweet.token_count == 8
        assert tweet.year == 2018

    def test_year_before_range_dropped(self):
        result = clean_corpus([_raw(year=2016)])
        assert result.tweets == []
        assert result.dropped["year_out_of_range"] == 1

    def test_year_bounds_inclusive(self):
        result = clean_corpus([_raw(tweet_id="a", year=2017), _raw(tweet_id="b", year=2021)])
        assert [t.id for t in result.tweets] == ["a", "b"]

    def test_custom_rules(self):
        rules = CleaningRules(year_min=2000, year_max=2001, min_tokens=2)
        result = clean_corpus([_raw(text="twee woorden", year=2000)], rules)
        assert len(result.tweets) == 1

    def test_bookkeeping_adds_up(self):
        raws = [
            _raw(tweet_id=f"t{i}", year=2015 + i % 10, text="w " * (i % 8 + 1))
            for i in range(200)
        ]
        result = clean_corpus(raws)
        assert len(result.tweets) + sum(result.dropped.values()) == 200
        assert result.n_input == 200


class TestCleanText:
    def test_strips_special_characters_keeps_diacritics(self):
        assert clean_text("Actie! Café #zomer @lid 100% zeker…") == "actie! café zomer lid 100 zeker"

    def test_removes_www_urls(self):
        assert clean_text("zie www.voorbeeld.nl/pagina nu") == "zie nu"

    def test_fuzz_properties(self):
        rng = random.Random(20240517)
        words = ["Vrouw", "mán", "werk", "GEZIN", "zorg!", "école", "123", "#tag", "@lid", "a_b"]
        urls = ["https://t.co/Ab1", "http://x.y/z?q=1", "www.site.nl/p", "HTTPS://LOUD.COM/X"]
        for _ in range(500):
            n = rng.randint(0, 12)
            parts = [rng.choice(words) for _ in range(n)]
            for _ in range(rng.randint(0, 3)):
                parts.insert(rng.randint(0, len(parts)), rng.choice(urls))
            text = " ".join(parts)
            cleaned = clean_text(text)
            assert clean_text(cleaned) == cleaned  # idempotent
            assert "http://" not in cleaned and "https://" not in cleaned
            assert "www." not in cleaned

    def test_fixed_point_kills_emergent_urls(self):
        # Stripping the @ fuses the text into a URL-shaped span; the
        # fixed-point pass must remove it too.
        cleaned = clean_text("zie www@.gevaar.nl hier")
        assert "www." not in cleaned


class TestFilterByKeywords:
    KEYWORDS = ["vrouw", "man", "moeder", "vader", "jongen", "meisje"]

    def _tweet(self, text, tweet_id="t1"):
        from stancekit.ingest import CleanTweet

        return CleanTweet(id=tweet_id, party="x", year=2019, text=text, token_count=len(text.split()))

    def test_keyword_match_kept(self):
        tweets = [self._tweet("de moeder zorgt voor de kinderen")]
        assert filter_by_keywords(tweets, self.KEYWORDS) == tweets

    def test_no_keyword_dropped(self):
        tweets = [self._tweet("wij verlagen de belastingen volgend jaar")]
        assert filter_by_keywords(tweets, self.KEYWORDS) == []

    def test_substring_mode_matches_compounds(self):
        tweets = [self._tweet("mannen moeten meer huishoudelijk werk doen")]
        assert filter_by_keywords(tweets, self.KEYWORDS, mode="substring") == tweets

    def test_whole_word_mode_skips_compounds(self):
        tweets = [
            self._tweet("mannen moeten meer huishoudelijk werk doen", "t1"),
            self._tweet("de man moet meer huishoudelijk werk doen", "t2"),
        ]
        kept = filter_by_keywords(tweets, self.KEYWORDS, mode="whole-word")
        assert [t.id for t in kept] == ["t2"]

    def test_empty_keywords_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            filter_by_keywords([], [])

    def test_idempotent_and_subset(self):
        rng = random.Random(7)
        vocabulary = ["vrouw", "fiets", "mannen", "belasting", "moederdag", "zon"]
        tweets = [
            self._tweet(" ".join(rng.choice(vocabulary) for _ in range(6)), f"t{i}")
            for i in range(100)
        ]
        once = filter_by_keywords(tweets, self.KEYWORDS)
        twice = filter_by_keywords(once, self.KEYWORDS)
        assert twice == once
        assert set(t.id for t in once) <= set(t.id for t in tweets)
        # order preserved
        positions = {t.id: i for i, t in enumerate(tweets)}
        assert [positions[t.id] for t in once] == sorted(positions[t.id] for t in once)


class TestLoadPanel:
    HEADER = "respondent_id,year,party," + ",".join(f"item_{i}" for i in range(1, 12))

    def test_well_formed_row(self, tmp_path):
        path = tmp_path / "panel.csv"
        path.write_text(self.HEADER + "\nr1,2019,cda," + ",".join(["3"] * 11) + "\n")
        responses = load_panel(path)
        assert len(responses) == 1
        assert responses[0].item_responses == (3,) * 11
        assert responses[0].party_voted == "cda"

    def test_out_of_range_value_reports_row(self, tmp_path):
        path = tmp_path / "panel.csv"
        path.write_text(self.HEADER + "\nr1,2019,cda," + ",".join(["3"] * 10 + ["6"]) + "\n")
        with pytest.raises(CorpusError, match=r":2: response 6 in item_11"):
            load_panel(path)

    def test_missing_item_column_is_schema_error(self, tmp_path):
        header = "respondent_id,year,party," + ",".join(f"item_{i}" for i in range(1, 11))
        path = tmp_path / "panel.csv"
        path.write_text(header + "\nr1,2019,cda," + ",".join(["3"] * 10) + "\n")
        with pytest.raises(CorpusError, match="missing column"):
            load_panel(path)

    def test_extra_item_column_is_schema_error(self, tmp_path):
        header = self.HEADER + ",item_12"
        path = tmp_path / "panel.csv"
        path.write_text(header + "\nr1,2019,cda," + ",".join(["3"] * 12) + "\n")
        with pytest.raises(CorpusError, match="unexpected item column"):
            load_panel(path)

    def test_non_integer_response(self, tmp_path):
        path = tmp_path / "panel.csv"
        path.write_text(self.HEADER + "\nr1,2019,cda," + ",".join(["3"] * 10 + ["vier"]) + "\n")
        with pytest.raises(CorpusError, match="non-integer"):
            load_panel(path)


def test_mini_corpus_texts_survive_cleaning_verbatim():
    # The pipeline tests hand-compute from these texts; they must pass
    # through cleaning untouched.
    for _, _, _, text in MINI_TWEETS:
        assert clean_text(text) == text
