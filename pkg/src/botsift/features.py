"""Map account records to the nine-column raw feature vector.

FEATURE_COLUMNS is the single definition of the canonical column order;
the CSV layout, normalization statistics, and model inputs all follow it.
"""
from __future__ import annotations

from typing import NamedTuple

from .ingest import AccountRecord, Dataset, Label

FEATURE_COLUMNS = (
    "default_profile",
    "statuses_count",
    "followers_count",
    "listed_count",
    "friends_count",
    "urls_ratio",
    "verified",
    "protected",
    "hashtags_ratio",
)

N_FEATURES = len(FEATURE_COLUMNS)


class FeatureVector(NamedTuple):
    default_profile: float
    statuses_count: float
    followers_count: float
    listed_count: float
    friends_count: float
    urls_ratio: float
    verified: float
    protected: float
    hashtags_ratio: float


def extract_features(account: AccountRecord) -> FeatureVector:
    """Raw (pre-normalization) features for one account.

    urls_ratio is the fraction of collected tweets containing at least one
    external URL, so it stays in [0, 1]. hashtags_ratio is total hashtags
    over tweet count and may exceed 1. Accounts with no collected tweets get
    0 for both ratios; the pipeline stays total rather than erroring.
    """
    n_tweets = len(account.tweets)
    if n_tweets == 0:
        urls_ratio = 0.0
        hashtags_ratio = 0.0
    else:
        urls_ratio = sum(1 for t in account.tweets if t.external_url_count >= 1) / n_tweets
        hashtags_ratio = sum(t.hashtag_count for t in account.tweets) / n_tweets
    return FeatureVector(
        default_profile=float(account.default_profile),
        statuses_count=float(account.statuses_count),
        followers_count=float(account.followers_count),
        listed_count=float(account.listed_count),
        friends_count=float(account.friends_count),
        urls_ratio=urls_ratio,
        verified=float(account.verified),
        protected=float(account.protected),
        hashtags_ratio=hashtags_ratio,
    )


def extract_all(dataset: Dataset) -> list[tuple[FeatureVector, Label]]:
    """Order-preserving feature extraction over a whole dataset."""
    return [(extract_features(record), record.label) for record in dataset.records]
