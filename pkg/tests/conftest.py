import random
from pathlib import Path

import pytest

from botsift.ingest import AccountRecord, Dataset, Label, TweetRecord

FIXTURES = Path(__file__).parent / "fixtures"

# committed benchmark fixture: regenerate with
#   botsift synth --n 860 --bot-fraction 0.5 --seed 8601 --out tests/fixtures/benchmark_860.ndjson
BENCHMARK_PATH = FIXTURES / "benchmark_860.ndjson"
BENCHMARK_SEED = 8601


@pytest.fixture
def star_fixture() -> Path:
    return FIXTURES / "star"


@pytest.fixture
def hand_tagged_path() -> Path:
    return FIXTURES / "accounts" / "hand_tagged.json"


def make_account(
    account_id: str,
    followers: int = 0,
    friends: int = 0,
    statuses: int = 0,
    listed: int = 0,
    tweets: tuple[TweetRecord, ...] = (),
    label: Label = Label.UNLABELED,
    **bools,
) -> AccountRecord:
    return AccountRecord(
        account_id=account_id,
        screen_name=f"sn_{account_id}",
        default_profile=bools.get("default_profile", False),
        statuses_count=statuses,
        followers_count=followers,
        listed_count=listed,
        friends_count=friends,
        verified=bools.get("verified", False),
        protected=bools.get("protected", False),
        tweets=tweets,
        label=label,
    )


def random_dataset(rng: random.Random, n: int, labeled: bool = False) -> Dataset:
    records = []
    for i in range(n):
        label = Label.UNLABELED
        if labeled:
            label = Label.BOT if rng.random() < 0.5 else Label.HUMAN
        records.append(
            make_account(
                f"acct-{i:04d}",
                followers=rng.randrange(0, 5000),
                friends=rng.randrange(0, 500),
                statuses=rng.randrange(0, 10000),
                listed=rng.randrange(0, 50),
                label=label,
            )
        )
    return Dataset(records=records, provenance="random test data")
