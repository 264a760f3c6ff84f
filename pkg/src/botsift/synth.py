"""Deterministic generator of labeled synthetic account datasets.

Stands in for a real labeled collection at desk scale. Only the per-tweet
URL probabilities (0.97 for bots, 0.29 for humans) are anchored to
published behavioral statistics; every other default below is invented
plumbing, tuned so the two classes are separable but still overlap enough
that a trained classifier stays below 100% accuracy.

Count fields use floor-1 shifted lognormal draws. Keeping every count
column strictly positive in a typical training sample matters: the default
log-ratio normalization collapses any column whose fitted minimum is 0
down to {0, 1}, which would throw away the count signal.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import AccountRecord, Dataset, Label, TweetRecord

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ClassProfile:
    """Generative parameters for one class (lognormal pairs are (mu, sigma))."""

    tweet_count_range: tuple[int, int]
    url_probability: float
    hashtag_mean: float
    statuses_lognorm: tuple[float, float]
    followers_lognorm: tuple[float, float]
    listed_lognorm: tuple[float, float]
    friends_lognorm: tuple[float, float]
    default_profile_probability: float
    verified_probability: float
    protected_probability: float

    def __post_init__(self):
        lo, hi = self.tweet_count_range
        if lo < 0 or hi < lo:
            raise ValueError(f"empty tweet_count_range: {self.tweet_count_range}")
        for name in (
            "url_probability",
            "default_profile_probability",
            "verified_probability",
            "protected_probability",
        ):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.hashtag_mean < 0:
            raise ValueError("hashtag_mean must be >= 0")


BOT_PROFILE = ClassProfile(
    tweet_count_range=(20, 60),
    url_probability=0.97,
    hashtag_mean=2.2,
    statuses_lognorm=(5.6, 1.0),
    followers_lognorm=(2.6, 1.1),
    listed_lognorm=(0.5, 0.8),
    friends_lognorm=(5.9, 1.0),
    default_profile_probability=0.7,
    verified_probability=0.01,
    protected_probability=0.05,
)

HUMAN_PROFILE = ClassProfile(
    tweet_count_range=(20, 60),
    url_probability=0.29,
    hashtag_mean=0.8,
    statuses_lognorm=(4.6, 1.0),
    followers_lognorm=(4.4, 1.1),
    listed_lognorm=(1.4, 1.0),
    friends_lognorm=(4.4, 1.0),
    default_profile_probability=0.25,
    verified_probability=0.2,
    protected_probability=0.15,
)


@dataclass(frozen=True)
class SynthProfile:
    bot: ClassProfile = BOT_PROFILE
    human: ClassProfile = HUMAN_PROFILE


_FILLER = ("just", "another", "day", "online", "hello", "world", "news", "update")


def _make_tweet(rng: np.random.Generator, profile: ClassProfile, tag_base: int) -> TweetRecord:
    has_url = bool(rng.random() < profile.url_probability)
    n_hashtags = int(rng.poisson(profile.hashtag_mean))
    tokens = [str(_FILLER[int(rng.integers(len(_FILLER)))]) for _ in range(2)]
    tokens += [f"#t{tag_base + j}" for j in range(n_hashtags)]
    if has_url:
        tokens.append("https://t.co/" + "".join(rng.choice(list("abcdefgh"), size=6)))
    return TweetRecord(
        text=" ".join(tokens),
        external_url_count=1 if has_url else 0,
        hashtag_count=n_hashtags,
    )


def _count(rng: np.random.Generator, params: tuple[float, float]) -> int:
    mu, sigma = params
    return 1 + int(rng.lognormal(mu, sigma))


def _make_account(
    rng: np.random.Generator, index: int, label: Label, profile: ClassProfile
) -> AccountRecord:
    lo, hi = profile.tweet_count_range
    n_tweets = int(rng.integers(lo, hi + 1))
    tweets = tuple(_make_tweet(rng, profile, tag_base=i * 7) for i in range(n_tweets))
    # the lifetime tweet counter can never undercut the collected sample
    statuses = max(_count(rng, profile.statuses_lognorm), n_tweets)
    return AccountRecord(
        account_id=f"synth-{index:05d}",
        screen_name=f"user{index:05d}",
        default_profile=bool(rng.random() < profile.default_profile_probability),
        statuses_count=statuses,
        followers_count=_count(rng, profile.followers_lognorm),
        listed_count=_count(rng, profile.listed_lognorm),
        friends_count=_count(rng, profile.friends_lognorm),
        verified=bool(rng.random() < profile.verified_probability),
        protected=bool(rng.random() < profile.protected_probability),
        tweets=tweets,
        label=label,
    )


def generate(
    n: int,
    bot_fraction: float,
    profile: SynthProfile | None = None,
    seed: int = 42,
) -> Dataset:
    """Generate ``n`` labeled accounts, deterministically from the seed.

    round(n * bot_fraction) records (half-up) are bots, the rest humans;
    the final record order is a seeded shuffle.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= bot_fraction <= 1.0:
        raise ValueError("bot_fraction must lie in [0, 1]")
    profile = profile or SynthProfile()
    rng = np.random.default_rng(seed & _SEED_MASK)
    n_bot = int(n * bot_fraction + 0.5)
    records = []
    for i in range(n):
        is_bot = i < n_bot
        records.append(
            _make_account(
                rng,
                index=i,
                label=Label.BOT if is_bot else Label.HUMAN,
                profile=profile.bot if is_bot else profile.human,
            )
        )
    order = rng.permutation(n)
    return Dataset(
        records=[records[i] for i in order],
        provenance=f"synth(n={n}, bot_fraction={bot_fraction}, seed={seed})",
    )
