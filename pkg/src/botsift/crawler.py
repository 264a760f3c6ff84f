"""Breadth-first account crawler with a sliding-window request budget.

The crawl walks followers/friends edges outward from seed accounts against
an abstract AccountSource. Collecting one account costs four requests
(profile, tweets, friend ids, follower ids); a sliding-window limiter
guarantees the issued requests never exceed the budget in any window, under
any alignment. State checkpoints to versioned JSON so an interrupted crawl
resumes exactly where it stopped.

Clocks are injected: production code uses SystemClock, tests drive
SimulatedClock so a budget wait never actually sleeps.
"""
from __future__ import annotations

import json
import logging
import os
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .errors import (
    ConfigError,
    CorruptCheckpoint,
    EmptyInput,
    IoFailure,
    TransientSourceFailure,
    UnknownAccount,
)
from .ingest import (
    AccountRecord,
    Dataset,
    account_from_parts,
    serialize_account,
)

logger = logging.getLogger(__name__)

CHECKPOINT_SCHEMA_VERSION = 1

# one collected account = profile + tweets + friend ids + follower ids
REQUESTS_PER_ACCOUNT = 4


class Clock(Protocol):
    def now(self) -> float: ...

    def sleep_until(self, t: float) -> None: ...


class SystemClock:
    """Monotonic wall clock; sleep_until really sleeps."""

    def now(self) -> float:
        return time.monotonic()

    def sleep_until(self, t: float) -> None:
        delay = t - time.monotonic()
        if delay > 0:
            time.sleep(delay)


@dataclass
class SimulatedClock:
    """Manually advanced clock for tests; sleep_until just jumps forward."""

    current: float = 0.0

    def now(self) -> float:
        return self.current

    def advance(self, dt: float) -> None:
        self.current += dt

    def sleep_until(self, t: float) -> None:
        if t > self.current:
            self.current = t


@dataclass(frozen=True)
class RateLimitPolicy:
    max_requests: int = 150
    window_seconds: float = 3600.0

    def __post_init__(self):
        if self.max_requests < 1:
            raise ConfigError("max_requests must be >= 1")
        if self.window_seconds <= 0:
            raise ConfigError("window_seconds must be positive")


@dataclass
class CrawlState:
    """Everything a crawl needs to continue: queue, history, and the haul."""

    frontier: deque[str]
    visited: set[str] = field(default_factory=set)
    requests_log: list[float] = field(default_factory=list)
    collected: Dataset = field(default_factory=Dataset)
    checkpoint_epoch: int = 0
    wait_until: float | None = None


class AccountSource(Protocol):
    """Behavioral contract for anything the crawler can pull accounts from.

    Each fetch costs one request against the caller's budget and may raise
    TransientSourceFailure. Implementations only need to tolerate
    sequential calls.
    """

    def fetch_profile(self, account_id: str) -> dict: ...

    def fetch_tweets(self, account_id: str) -> list: ...

    def fetch_friend_ids(self, account_id: str) -> list[str]: ...

    def fetch_follower_ids(self, account_id: str) -> list[str]: ...


class FixtureSource:
    """Directory-backed account source.

    Layout: ``<root>/accounts/<id>.json`` holds one account document
    (profile fields, optional tweets, optional label) and
    ``<root>/adjacency.json`` maps id -> {"friends": [...], "followers": [...]}.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        adjacency_path = self.root / "adjacency.json"
        if not self.root.is_dir() or not adjacency_path.is_file():
            raise IoFailure(f"fixture directory not found or incomplete: {self.root}")
        try:
            with open(adjacency_path, "r", encoding="utf-8") as fh:
                self._adjacency = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise IoFailure(f"cannot read adjacency from {adjacency_path}: {exc}") from exc

    def _load(self, account_id: str) -> dict:
        path = self.root / "accounts" / f"{account_id}.json"
        if not path.is_file():
            raise UnknownAccount(f"no fixture account file for id {account_id}")
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise IoFailure(f"cannot read account file {path}: {exc}") from exc

    def fetch_profile(self, account_id: str) -> dict:
        doc = self._load(account_id)
        return {k: v for k, v in doc.items() if k != "tweets"}

    def fetch_tweets(self, account_id: str) -> list:
        return self._load(account_id).get("tweets", [])

    def _edges(self, account_id: str, kind: str) -> list[str]:
        if account_id not in self._adjacency:
            raise UnknownAccount(f"id {account_id} missing from adjacency file")
        return list(self._adjacency[account_id].get(kind, []))

    def fetch_friend_ids(self, account_id: str) -> list[str]:
        return self._edges(account_id, "friends")

    def fetch_follower_ids(self, account_id: str) -> list[str]:
        return self._edges(account_id, "followers")


def new_crawl_state(seeds: list[str], provenance: str = "") -> CrawlState:
    """Fresh state with the (deduplicated) seeds queued."""
    if not seeds:
        raise EmptyInput("crawl needs at least one seed account id")
    frontier: deque[str] = deque()
    seen = set()
    for seed in seeds:
        if seed not in seen:
            frontier.append(seed)
            seen.add(seed)
    return CrawlState(frontier=frontier, collected=Dataset(provenance=provenance))


def _prune_log(state: CrawlState, policy: RateLimitPolicy, now: float) -> None:
    cutoff = now - policy.window_seconds
    state.requests_log = [t for t in state.requests_log if t >= cutoff]


def crawl_step(
    state: CrawlState,
    source: AccountSource,
    policy: RateLimitPolicy,
    clock: Clock,
    tweet_cap: int = 200,
) -> CrawlState:
    """Process one frontier account, or instruct a wait if the budget is spent.

    When fewer than four request slots remain in the current window, no id
    is dequeued and ``wait_until`` is set to the moment the oldest logged
    request ages out; the caller re-invokes after waiting. A transient
    source failure re-enqueues the id at the back and stores nothing, but
    the requests already issued still count against the budget.
    """
    if not state.frontier:
        raise EmptyInput("crawl_step requires a nonempty frontier")
    now = clock.now()
    _prune_log(state, policy, now)
    if len(state.requests_log) + REQUESTS_PER_ACCOUNT > policy.max_requests:
        state.wait_until = state.requests_log[0] + policy.window_seconds
        return state
    state.wait_until = None

    account_id = state.frontier.popleft()

    def issue(fetch, *args):
        # log before calling so a failing request still costs budget
        state.requests_log.append(clock.now())
        return fetch(*args)

    try:
        profile = issue(source.fetch_profile, account_id)
        tweets = issue(source.fetch_tweets, account_id)
        friend_ids = issue(source.fetch_friend_ids, account_id)
        follower_ids = issue(source.fetch_follower_ids, account_id)
    except TransientSourceFailure as exc:
        logger.warning("transient failure on %s, re-enqueued: %s", account_id, exc)
        state.frontier.append(account_id)
        state.checkpoint_epoch += 1
        return state

    profile = dict(profile)
    profile.setdefault("account_id", account_id)
    record: AccountRecord = account_from_parts(profile, tweets, tweet_cap=tweet_cap)
    state.collected.records.append(record)
    state.visited.add(account_id)
    for neighbor in list(friend_ids) + list(follower_ids):
        if neighbor not in state.visited and neighbor not in state.frontier:
            state.frontier.append(neighbor)
    state.checkpoint_epoch += 1
    return state


def run_crawl(
    seeds: list[str],
    source: AccountSource,
    policy: RateLimitPolicy,
    budget_steps: int | None = None,
    clock: Clock | None = None,
    *,
    state: CrawlState | None = None,
    checkpoint_path: str | Path | None = None,
    checkpoint_every: int = 10,
    tweet_cap: int = 200,
    provenance: str = "",
) -> CrawlState:
    """Drive crawl_step until the frontier empties or budget_steps complete.

    Pass ``state`` (e.g. from resume()) to continue an earlier crawl; seeds
    are ignored then. Budget waits do not count as steps. With a
    checkpoint_path, state is persisted every ``checkpoint_every`` completed
    steps and once more on exit.
    """
    if policy.max_requests < REQUESTS_PER_ACCOUNT:
        raise ConfigError(
            f"max_requests must be at least {REQUESTS_PER_ACCOUNT} to fetch one account"
        )
    if state is None:
        state = new_crawl_state(seeds, provenance=provenance)
    clock = clock if clock is not None else SystemClock()
    steps = 0
    while state.frontier and (budget_steps is None or steps < budget_steps):
        state = crawl_step(state, source, policy, clock, tweet_cap=tweet_cap)
        if state.wait_until is not None:
            logger.info("request budget exhausted, waiting until t=%.1f", state.wait_until)
            clock.sleep_until(state.wait_until)
            state.wait_until = None
            continue
        steps += 1
        if checkpoint_path is not None and steps % checkpoint_every == 0:
            checkpoint(state, checkpoint_path)
    if checkpoint_path is not None:
        checkpoint(state, checkpoint_path)
    return state


def checkpoint(state: CrawlState, path: str | Path) -> None:
    """Persist crawl state as versioned JSON (atomic rename on POSIX)."""
    payload = {
        "schema_version": CHECKPOINT_SCHEMA_VERSION,
        "frontier": list(state.frontier),
        "visited": sorted(state.visited),
        "requests_log": list(state.requests_log),
        "checkpoint_epoch": state.checkpoint_epoch,
        "wait_until": state.wait_until,
        "collected": {
            "provenance": state.collected.provenance,
            "records": [serialize_account(r) for r in state.collected.records],
        },
    }
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, separators=(",", ":"))
            fh.write("\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write checkpoint to {path}: {exc}") from exc


def resume(path: str | Path) -> CrawlState:
    """Rebuild crawl state from a checkpoint file.

    Logged request timestamps are carried over as-is: when the resuming
    process has a different clock epoch they can only over-count the
    window, never under-count, so the budget stays safe.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read checkpoint from {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptCheckpoint(f"checkpoint {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("schema_version") != CHECKPOINT_SCHEMA_VERSION:
        raise CorruptCheckpoint(
            f"checkpoint {path} carries unsupported schema_version: "
            f"{payload.get('schema_version') if isinstance(payload, dict) else payload!r}"
        )
    try:
        collected = payload["collected"]
        records = [account_from_parts(doc, doc.get("tweets", [])) for doc in collected["records"]]
        state = CrawlState(
            frontier=deque(str(x) for x in payload["frontier"]),
            visited={str(x) for x in payload["visited"]},
            requests_log=[float(t) for t in payload["requests_log"]],
            collected=Dataset(records=records, provenance=collected.get("provenance", "")),
            checkpoint_epoch=int(payload["checkpoint_epoch"]),
            wait_until=payload.get("wait_until"),
        )
    except Exception as exc:
        raise CorruptCheckpoint(f"checkpoint {path} is malformed: {exc}") from exc
    return state
