"""Labeled post collections: JSONL loading/saving and cross-validation fold plans."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Optional

LABEL_POSITIVE = "positive"
LABEL_NEGATIVE = "negative"
LABEL_OBJECTIVE = "objective"
LABEL_UNLABELED = "unlabeled"

LABELS = (LABEL_POSITIVE, LABEL_NEGATIVE, LABEL_OBJECTIVE, LABEL_UNLABELED)
GOLD_LABELS = (LABEL_POSITIVE, LABEL_NEGATIVE, LABEL_OBJECTIVE)


class CorpusError(ValueError):
    """Raised for malformed corpus files or invalid fold requests."""


def parse_timestamp(raw: str) -> datetime:
    """Parse an ISO-8601 timestamp and normalize it to UTC (naive treated as UTC)."""
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True)
class Post:
    """One document: text plus optional topic/timestamp metadata and a gold label."""

    id: str
    text: str
    topic: Optional[str] = None
    timestamp: Optional[datetime] = None
    label: str = LABEL_UNLABELED

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise CorpusError(f"post {self.id!r}: text is empty after whitespace trimming")
        if self.label not in LABELS:
            raise CorpusError(f"post {self.id!r}: unknown label {self.label!r}")

    @property
    def is_labeled(self) -> bool:
        return self.label != LABEL_UNLABELED

    def to_record(self) -> dict:
        record: dict = {"id": self.id, "text": self.text}
        if self.topic is not None:
            record["topic"] = self.topic
        if self.timestamp is not None:
            record["timestamp"] = self.timestamp.isoformat().replace("+00:00", "Z")
        if self.label != LABEL_UNLABELED:
            record["label"] = self.label
        return record


@dataclass(frozen=True)
class Corpus:
    """Ordered collection of posts with pairwise-distinct ids."""

    posts: tuple[Post, ...]

    def __post_init__(self) -> None:
        seen: dict[str, int] = {}
        for pos, post in enumerate(self.posts):
            if post.id in seen:
                raise CorpusError(
                    f"duplicate post id {post.id!r} (posts {seen[post.id]} and {pos})"
                )
            seen[post.id] = pos

    def __iter__(self) -> Iterator[Post]:
        return iter(self.posts)

    def __len__(self) -> int:
        return len(self.posts)

    def labeled(self) -> tuple[Post, ...]:
        return tuple(p for p in self.posts if p.is_labeled)

    def by_id(self, post_id: str) -> Post:
        for post in self.posts:
            if post.id == post_id:
                return post
        raise KeyError(post_id)


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of labeled post ids to folds 0..k-1."""

    k: int
    assignment: dict[str, int] = field(hash=False)

    def fold_ids(self, fold: int) -> tuple[str, ...]:
        return tuple(pid for pid, f in self.assignment.items() if f == fold)


def _post_from_record(record: dict, line_no: int) -> Post:
    if not isinstance(record, dict):
        raise CorpusError(f"line {line_no}: expected a JSON object, got {type(record).__name__}")
    for key in ("id", "text"):
        if key not in record:
            raise CorpusError(f"line {line_no}: missing required field {key!r}")
        if not isinstance(record[key], str):
            raise CorpusError(f"line {line_no}: field {key!r} must be a string")
    label = record.get("label", LABEL_UNLABELED)
    if label not in LABELS:
        raise CorpusError(f"line {line_no}: unknown label {label!r}")
    topic = record.get("topic")
    if topic is not None and not isinstance(topic, str):
        raise CorpusError(f"line {line_no}: field 'topic' must be a string")
    timestamp = None
    if record.get("timestamp") is not None:
        try:
            timestamp = parse_timestamp(record["timestamp"])
        except (ValueError, TypeError) as exc:
            raise CorpusError(f"line {line_no}: bad timestamp {record['timestamp']!r}: {exc}") from exc
    try:
        return Post(id=record["id"], text=record["text"], topic=topic, timestamp=timestamp, label=label)
    except CorpusError as exc:
        raise CorpusError(f"line {line_no}: {exc}") from exc


def load_corpus(path: str | Path) -> Corpus:
    """Load a JSON-Lines corpus file, validating records in file order.

    Each line is an object with fields ``id``, ``text`` and optional ``topic``,
    ``timestamp`` (ISO-8601), ``label``. A missing label means unlabeled.
    """
    posts: list[Post] = []
    line_of_id: dict[str, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {line_no}: malformed JSON: {exc.msg}") from exc
            post = _post_from_record(record, line_no)
            if post.id in line_of_id:
                raise CorpusError(
                    f"duplicate id {post.id!r} on lines {line_of_id[post.id]} and {line_no}"
                )
            line_of_id[post.id] = line_no
            posts.append(post)
    return Corpus(posts=tuple(posts))


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to JSONL; load_corpus(save_corpus(c)) == c."""
    with open(path, "w", encoding="utf-8") as handle:
        for post in corpus:
            handle.write(json.dumps(post.to_record(), ensure_ascii=False) + "\n")


def split_folds(corpus: Corpus, k: int, seed: int, stratified: bool = True) -> FoldPlan:
    """Deterministically assign labeled posts to k folds; unlabeled posts are excluded.

    Stratified mode deals each class round-robin after a seeded shuffle, so
    per-fold class proportions deviate from global ones by at most one post.
    """
    if k <= 0:
        raise CorpusError(f"k must be positive, got {k}")
    labeled = corpus.labeled()
    if len(labeled) < k:
        raise CorpusError(f"need at least k={k} labeled posts, have {len(labeled)}")
    rng = random.Random(seed)
    assignment: dict[str, int] = {}
    if stratified:
        classes = sorted({p.label for p in labeled})
        for cls in classes:
            ids = sorted(p.id for p in labeled if p.label == cls)
            rng.shuffle(ids)
            for i, pid in enumerate(ids):
                assignment[pid] = i % k
    else:
        ids = sorted(p.id for p in labeled)
        rng.shuffle(ids)
        for i, pid in enumerate(ids):
            assignment[pid] = i % k
    return FoldPlan(k=k, assignment=assignment)
