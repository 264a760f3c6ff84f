"""Account records, labeling helpers, dataset splits, and NDJSON persistence.

Every downstream stage (feature extraction, training, evaluation) consumes
the types defined here. Records are immutable once constructed; operations
are pure functions over their inputs.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .errors import (
    IoFailure,
    MalformedJson,
    MissingCountField,
    NegativeCount,
    TrainSizeTooLarge,
    UnlabeledRecord,
)

# Lifetime counters a record must carry explicitly. Defaulting these to zero
# would fabricate feature values, so their absence is a hard error.
COUNT_FIELDS = ("statuses_count", "followers_count", "listed_count", "friends_count")
BOOL_FIELDS = ("default_profile", "verified", "protected")

# Upper bound on how many recent tweets a record keeps. The lifetime
# statuses_count may exceed it; the tweet list is a sample.
DEFAULT_TWEET_CAP = 200


class Label(Enum):
    HUMAN = "human"
    BOT = "bot"
    UNLABELED = "unlabeled"


def _count_tokens(text: str) -> tuple[int, int]:
    """Count http(s) tokens and #-prefixed tokens in whitespace-split text."""
    urls = 0
    hashtags = 0
    for token in text.split():
        if token.startswith(("http://", "https://")):
            urls += 1
        elif token.startswith("#") and len(token) > 1:
            hashtags += 1
    return urls, hashtags


@dataclass(frozen=True)
class TweetRecord:
    """One collected tweet: its text plus pre-counted URL/hashtag tallies."""

    text: str
    external_url_count: int
    hashtag_count: int

    def __post_init__(self):
        if self.external_url_count < 0:
            raise NegativeCount("external_url_count", self.external_url_count)
        if self.hashtag_count < 0:
            raise NegativeCount("hashtag_count", self.hashtag_count)

    @classmethod
    def from_text(cls, text: str) -> "TweetRecord":
        urls, hashtags = _count_tokens(text)
        return cls(text=text, external_url_count=urls, hashtag_count=hashtags)


@dataclass(frozen=True)
class AccountRecord:
    """One Twitter-shaped user: profile metadata, recent tweets, optional label."""

    account_id: str
    screen_name: str
    default_profile: bool
    statuses_count: int
    followers_count: int
    listed_count: int
    friends_count: int
    verified: bool
    protected: bool
    tweets: tuple[TweetRecord, ...] = ()
    label: Label = Label.UNLABELED

    def __post_init__(self):
        for name in COUNT_FIELDS:
            value = getattr(self, name)
            if value < 0:
                raise NegativeCount(name, value)


@dataclass
class Dataset:
    """An ordered collection of accounts plus a note on where they came from."""

    records: list[AccountRecord] = field(default_factory=list)
    provenance: str = ""

    def __post_init__(self):
        seen: set[str] = set()
        for record in self.records:
            if record.account_id in seen:
                raise MalformedJson(f"duplicate account_id: {record.account_id}")
            seen.add(record.account_id)

    def __len__(self) -> int:
        return len(self.records)


def _parse_tweet(raw: Any) -> TweetRecord:
    if isinstance(raw, str):
        return TweetRecord.from_text(raw)
    if not isinstance(raw, dict):
        raise MalformedJson(f"tweet entry must be an object or string, got {type(raw).__name__}")
    text = raw.get("text", "")
    if not isinstance(text, str):
        raise MalformedJson("tweet text must be a string")
    urls, hashtags = _count_tokens(text)
    if "external_url_count" in raw:
        urls = _require_int(raw["external_url_count"], "external_url_count")
    if "hashtag_count" in raw:
        hashtags = _require_int(raw["hashtag_count"], "hashtag_count")
    return TweetRecord(text=text, external_url_count=urls, hashtag_count=hashtags)


def _require_int(value: Any, name: str) -> int:
    # bool is an int subclass, reject it explicitly
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedJson(f"field {name} must be an integer, got {value!r}")
    return value


def parse_label(raw: Any) -> Label:
    if raw is None:
        return Label.UNLABELED
    if raw == "human":
        return Label.HUMAN
    if raw == "bot":
        return Label.BOT
    raise MalformedJson(f"unknown label: {raw!r}")


def account_from_parts(
    profile: dict,
    tweets: Iterable[Any] = (),
    tweet_cap: int = DEFAULT_TWEET_CAP,
) -> AccountRecord:
    """Assemble an AccountRecord from a parsed profile dict and a tweet list.

    Missing booleans default to false; missing counts raise MissingCountField;
    negative counts raise NegativeCount. The tweet list is truncated to
    ``tweet_cap`` entries.
    """
    account_id = profile.get("account_id")
    if not isinstance(account_id, str) or not account_id:
        raise MalformedJson("account document lacks a non-empty account_id")
    screen_name = profile.get("screen_name", "")
    if not isinstance(screen_name, str):
        raise MalformedJson("screen_name must be a string")

    counts = {}
    for name in COUNT_FIELDS:
        if name not in profile:
            raise MissingCountField(name)
        value = _require_int(profile[name], name)
        if value < 0:
            raise NegativeCount(name, value)
        counts[name] = value

    bools = {}
    for name in BOOL_FIELDS:
        value = profile.get(name, False)
        if not isinstance(value, bool):
            raise MalformedJson(f"field {name} must be a boolean, got {value!r}")
        bools[name] = value

    tweet_list = list(tweets)
    parsed_tweets = tuple(_parse_tweet(t) for t in tweet_list[:tweet_cap])

    return AccountRecord(
        account_id=account_id,
        screen_name=screen_name,
        statuses_count=counts["statuses_count"],
        followers_count=counts["followers_count"],
        listed_count=counts["listed_count"],
        friends_count=counts["friends_count"],
        tweets=parsed_tweets,
        label=parse_label(profile.get("label")),
        **bools,
    )


def parse_account(document: str | bytes, tweet_cap: int = DEFAULT_TWEET_CAP) -> AccountRecord:
    """Parse one JSON account document into an AccountRecord."""
    try:
        raw = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJson(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise MalformedJson(f"account document must be an object, got {type(raw).__name__}")
    tweets = raw.get("tweets", [])
    if not isinstance(tweets, list):
        raise MalformedJson("tweets must be a list")
    return account_from_parts(raw, tweets, tweet_cap=tweet_cap)


def serialize_account(record: AccountRecord) -> dict:
    """Render a record as a JSON-ready dict with a fixed key order."""
    return {
        "account_id": record.account_id,
        "screen_name": record.screen_name,
        "default_profile": record.default_profile,
        "statuses_count": record.statuses_count,
        "followers_count": record.followers_count,
        "listed_count": record.listed_count,
        "friends_count": record.friends_count,
        "verified": record.verified,
        "protected": record.protected,
        "tweets": [
            {
                "text": t.text,
                "external_url_count": t.external_url_count,
                "hashtag_count": t.hashtag_count,
            }
            for t in record.tweets
        ],
        "label": None if record.label is Label.UNLABELED else record.label.value,
    }


def tff_ratio(account: AccountRecord) -> float:
    """Follower-friend ratio; +inf when friends is 0, and 0 when both are 0."""
    if account.friends_count == 0:
        return math.inf if account.followers_count > 0 else 0.0
    return account.followers_count / account.friends_count


def flag_by_tff(dataset: Dataset, threshold: float) -> list[str]:
    """List ids of accounts whose follower-friend ratio is at least ``threshold``.

    Sorted by ratio descending, ties broken by account_id ascending. This is
    a candidate list for human review, not a classification.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    hits = [
        (tff_ratio(record), record.account_id)
        for record in dataset.records
        if tff_ratio(record) >= threshold
    ]
    hits.sort(key=lambda pair: (-pair[0], pair[1]))
    return [account_id for _, account_id in hits]


def split(dataset: Dataset, train_size: int, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then cut into (first ``train_size`` rows, remainder).

    Both outputs together hold exactly the input records. Every record must
    be labeled; splitting unlabeled data would poison supervised training.
    """
    if train_size < 0:
        raise ValueError("train_size must be >= 0")
    for record in dataset.records:
        if record.label is Label.UNLABELED:
            raise UnlabeledRecord(f"record {record.account_id} has no label")
    if train_size > len(dataset.records):
        raise TrainSizeTooLarge(
            f"train_size {train_size} exceeds dataset size {len(dataset.records)}"
        )
    shuffled = list(dataset.records)
    random.Random(seed).shuffle(shuffled)
    note = f"{dataset.provenance} | split(train_size={train_size}, seed={seed})"
    return (
        Dataset(records=shuffled[:train_size], provenance=note + " train"),
        Dataset(records=shuffled[train_size:], provenance=note + " test"),
    )


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write one account object per line (UTF-8 newline-delimited JSON)."""
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for record in dataset.records:
                fh.write(json.dumps(serialize_account(record), separators=(",", ":")))
                fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write dataset to {path}: {exc}") from exc


def load_dataset(path: str | Path, tweet_cap: int = DEFAULT_TWEET_CAP) -> Dataset:
    """Read a newline-delimited JSON dataset; errors name the offending line."""
    records = []
    seen: set[str] = set()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoFailure(f"cannot read dataset from {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = parse_account(line, tweet_cap=tweet_cap)
        except (MalformedJson, MissingCountField, NegativeCount) as exc:
            raise MalformedJson(f"line {lineno}: {exc}") from exc
        if record.account_id in seen:
            raise MalformedJson(f"line {lineno}: duplicate account_id: {record.account_id}")
        seen.add(record.account_id)
        records.append(record)
    return Dataset(records=records, provenance=str(path))
