"""Two-annotator hierarchical annotation sessions with Jaccard agreement.

A session holds a fixed post list and exactly two annotator ids. Labels are
last-write-wins per (annotator, post). Agreement per sub-task is the set
Jaccard of the two (post, label) assignment sets over commonly labeled
posts: with m agreements out of n common posts, J = m / (2n - m). For
levels B and C the common set is restricted to posts where BOTH annotators
assigned the parent label that makes the level applicable.

Sessions can be persisted to an append-only JSONL log and replayed.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import Dataset, HierLabel, Lexicon, Post
from .errors import InsufficientDataError, NotFoundError, ValidationError
from .features import tokenize

RESOLVERS = ("annotator1", "annotator2", "agreements_only")


@dataclass
class AnnotationSession:
    session_id: str
    posts: list[Post]
    annotators: tuple[str, str]
    guideline_version: str = "v1"
    profanity: Lexicon | None = None
    records: dict[tuple[str, str], HierLabel] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.annotators) != 2 or self.annotators[0] == self.annotators[1]:
            raise ValidationError("a session needs exactly two distinct annotators")
        ids = [p.id for p in self.posts]
        if len(set(ids)) != len(ids):
            raise ValidationError("session posts contain duplicate ids")
        self._by_id = {p.id: p for p in self.posts}

    def post(self, post_id: str) -> Post:
        try:
            return self._by_id[post_id]
        except KeyError:
            raise NotFoundError(f"unknown post {post_id!r} in session {self.session_id!r}") from None

    def _check_annotator(self, annotator: str) -> None:
        if annotator not in self.annotators:
            raise NotFoundError(f"unknown annotator {annotator!r} in session {self.session_id!r}")

    def label_of(self, annotator: str, post_id: str) -> HierLabel | None:
        return self.records.get((annotator, post_id))


def submit(
    session: AnnotationSession, annotator: str, post_id: str, label: HierLabel
) -> list[str]:
    """Store one label (overwriting the annotator's previous label for the
    post) and return non-blocking guideline warnings."""
    session._check_annotator(annotator)
    post = session.post(post_id)
    session.records[(annotator, post_id)] = label

    warnings: list[str] = []
    if session.profanity is not None and label.a == "NOT":
        hits = sorted(set(tokenize(post.text)) & session.profanity.terms)
        if hits:
            warnings.append(
                f"post contains profanity ({', '.join(hits)}) but was labeled NOT; "
                "guideline: any post containing profanity is offensive"
            )
    return warnings


def next_unlabeled(session: AnnotationSession, annotator: str) -> Post | None:
    """The first post (in session order) the annotator has not labeled."""
    session._check_annotator(annotator)
    for post in session.posts:
        if (annotator, post.id) not in session.records:
            return post
    return None


def progress(session: AnnotationSession) -> dict[str, int]:
    done = {a: 0 for a in session.annotators}
    for annotator, _ in session.records:
        done[annotator] += 1
    return done


@dataclass(frozen=True)
class AgreementReport:
    jaccard_a: float
    jaccard_b: float | None
    jaccard_c: float | None
    n_common: dict[str, int]

    def as_dict(self) -> dict:
        return {
            "jaccard_a": self.jaccard_a,
            "jaccard_b": self.jaccard_b,
            "jaccard_c": self.jaccard_c,
            "n_common": dict(self.n_common),
        }


def _jaccard(n_common: int, n_agree: int) -> float:
    # |X ∩ Y| / |X ∪ Y| over assignment sets of equal size n
    return n_agree / (2 * n_common - n_agree) if n_common else 0.0


def agreement(session: AnnotationSession) -> AgreementReport:
    a1, a2 = session.annotators
    common = [
        p.id
        for p in session.posts
        if (a1, p.id) in session.records and (a2, p.id) in session.records
    ]
    if not common:
        raise InsufficientDataError("annotators share no commonly labeled posts")

    n_a = len(common)
    m_a = 0
    pairs_b: list[tuple[HierLabel, HierLabel]] = []
    pairs_c: list[tuple[HierLabel, HierLabel]] = []
    for pid in common:
        l1 = session.records[(a1, pid)]
        l2 = session.records[(a2, pid)]
        if l1.a == l2.a:
            m_a += 1
        if l1.a == "OFF" and l2.a == "OFF":
            pairs_b.append((l1, l2))
        if l1.b == "TIN" and l2.b == "TIN":
            pairs_c.append((l1, l2))

    n_b = len(pairs_b)
    m_b = sum(1 for l1, l2 in pairs_b if l1.b == l2.b)
    n_c = len(pairs_c)
    m_c = sum(1 for l1, l2 in pairs_c if l1.c == l2.c)
    return AgreementReport(
        jaccard_a=_jaccard(n_a, m_a),
        jaccard_b=_jaccard(n_b, m_b) if n_b else None,
        jaccard_c=_jaccard(n_c, m_c) if n_c else None,
        n_common={"a": n_a, "b": n_b, "c": n_c},
    )


def disagreements(session: AnnotationSession) -> list[dict]:
    """Posts labeled by both annotators with differing full labels."""
    a1, a2 = session.annotators
    out = []
    for post in session.posts:
        l1 = session.records.get((a1, post.id))
        l2 = session.records.get((a2, post.id))
        if l1 is not None and l2 is not None and l1 != l2:
            out.append({"post": post, "labels": {a1: l1, a2: l2}})
    return out


def export(session: AnnotationSession, resolver: str) -> Dataset:
    """Resolve the session into a Dataset: one annotator's labels, or only
    the posts both annotators labeled identically."""
    if resolver not in RESOLVERS:
        raise ValueError(f"unknown resolver {resolver!r}, expected one of {RESOLVERS}")
    a1, a2 = session.annotators
    rows: list[tuple[Post, HierLabel]] = []
    for post in session.posts:
        if resolver == "agreements_only":
            l1 = session.records.get((a1, post.id))
            l2 = session.records.get((a2, post.id))
            if l1 is not None and l1 == l2:
                rows.append((post, l1))
        else:
            annotator = a1 if resolver == "annotator1" else a2
            label = session.records.get((annotator, post.id))
            if label is not None:
                rows.append((post, label))
    if not rows:
        raise InsufficientDataError(f"resolver {resolver!r} produced an empty dataset")
    return Dataset(f"{session.session_id}-{resolver}", tuple(rows))


class SessionStore:
    """In-memory session registry with an optional append-only JSONL log.

    Writes are serialized under a lock: the two annotators may submit
    concurrently and last-write-wins per (annotator, post).
    """

    def __init__(self, log_path: str | Path | None = None):
        self._sessions: dict[str, AnnotationSession] = {}
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path is not None else None
        if self._log_path is not None and self._log_path.exists():
            self._replay()

    def _append(self, event: dict) -> None:
        if self._log_path is None:
            return
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay(self) -> None:
        with open(self._log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["type"] == "create":
                    self._create_from_event(event, log=False)
                elif event["type"] == "submit":
                    session = self._sessions[event["session_id"]]
                    label = HierLabel(event["a"], event.get("b"), event.get("c"))
                    submit(session, event["annotator"], event["post_id"], label)

    def _create_from_event(self, event: dict, log: bool = True) -> AnnotationSession:
        posts = [Post(p["id"], p["text"], p.get("source", "other")) for p in event["posts"]]
        profanity = (
            Lexicon.from_terms(event["profanity_terms"]) if event.get("profanity_terms") else None
        )
        session = AnnotationSession(
            session_id=event["session_id"],
            posts=posts,
            annotators=tuple(event["annotators"]),
            guideline_version=event.get("guideline_version", "v1"),
            profanity=profanity,
        )
        if event["session_id"] in self._sessions:
            raise ValidationError(f"session {event['session_id']!r} already exists")
        self._sessions[event["session_id"]] = session
        if log:
            self._append(event)
        return session

    def create(
        self,
        session_id: str,
        posts: Iterable[Post],
        annotators: tuple[str, str],
        guideline_version: str = "v1",
        profanity: Lexicon | None = None,
    ) -> AnnotationSession:
        with self._lock:
            event = {
                "type": "create",
                "session_id": session_id,
                "posts": [{"id": p.id, "text": p.text, "source": p.source} for p in posts],
                "annotators": list(annotators),
                "guideline_version": guideline_version,
                "profanity_terms": sorted(profanity.terms) if profanity else None,
            }
            return self._create_from_event(event)

    def get(self, session_id: str) -> AnnotationSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def submit(self, session_id: str, annotator: str, post_id: str, label: HierLabel) -> list[str]:
        with self._lock:
            session = self.get(session_id)
            warnings = submit(session, annotator, post_id, label)
            self._append(
                {
                    "type": "submit",
                    "session_id": session_id,
                    "annotator": annotator,
                    "post_id": post_id,
                    "a": label.a,
                    "b": label.b,
                    "c": label.c,
                }
            )
            return warnings

    def session_ids(self) -> list[str]:
        return sorted(self._sessions)
