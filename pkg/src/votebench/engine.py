"""Campaign orchestration: lifecycle, tag visibility, ballot intake, tallying.

The engine is an event-sourced state machine. Every command validates against
current state, appends exactly one event to the store, then applies it; state
is a pure function of the event sequence, so replaying a log rebuilds the
engine byte-identically (verified via state_hash).

Time discipline: the server-receipt time passed by the caller gates the
voting window. Client-side trace timestamps are stored as behavioral data
only and never decide whether a ballot counts.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from . import errors
from .consistency import ConsistencyReport, build_rank_profile, consistency_report
from .eventlog import EventRecord, EventStore, MemoryEventStore
from .methods import (
    MethodId,
    Question,
    RawBallot,
    ScoreVector,
    Violation,
    normalize_scores,
    validate_ballot,
)
from .serialize import (
    dt_str,
    parse_dt,
    question_from_doc,
    question_to_doc,
    raw_ballot_from_doc,
    raw_ballot_to_doc,
    report_to_doc,
    score_vector_from_doc,
    score_vector_to_doc,
    tally_from_doc,
    tally_to_doc,
)
from .tally import TallyResult, aggregate

logger = logging.getLogger(__name__)

DEFAULT_MAX_CLOCK_SKEW = timedelta(minutes=5)

CampaignStatus = str  # "draft" | "open" | "closed" | "tallied"


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class ChoiceTrace:
    """Client-reported behavioral metadata for one ballot submission."""

    ballot_opened_at: datetime
    first_interaction_at: datetime
    submitted_at: datetime
    in_form_changes: int = 0

    @property
    def duration(self) -> timedelta:
        return self.submitted_at - self.ballot_opened_at

    def ordered(self) -> bool:
        return self.ballot_opened_at <= self.first_interaction_at <= self.submitted_at

    def to_doc(self) -> dict:
        return {
            "ballot_opened_at": dt_str(self.ballot_opened_at),
            "first_interaction_at": dt_str(self.first_interaction_at),
            "submitted_at": dt_str(self.submitted_at),
            "in_form_changes": self.in_form_changes,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ChoiceTrace":
        return cls(
            ballot_opened_at=parse_dt(doc["ballot_opened_at"]),
            first_interaction_at=parse_dt(doc["first_interaction_at"]),
            submitted_at=parse_dt(doc["submitted_at"]),
            in_form_changes=int(doc.get("in_form_changes", 0)),
        )


@dataclass
class Revision:
    scores: ScoreVector
    raw: RawBallot
    trace: ChoiceTrace
    received_at: datetime
    idempotency_key: str | None = None

    def to_doc(self) -> dict:
        return {
            "scores": score_vector_to_doc(self.scores),
            "raw": raw_ballot_to_doc(self.raw),
            "trace": self.trace.to_doc(),
            "received_at": dt_str(self.received_at),
            "idempotency_key": self.idempotency_key,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Revision":
        return cls(
            scores=score_vector_from_doc(doc["scores"]),
            raw=raw_ballot_from_doc(doc["raw"]),
            trace=ChoiceTrace.from_doc(doc["trace"]),
            received_at=parse_dt(doc["received_at"]),
            idempotency_key=doc.get("idempotency_key"),
        )


@dataclass
class BallotRecord:
    """All submissions of one voter for one (question, method).

    The counted vote is always the last revision present at tally time.
    """

    ballot_id: str
    voter: str
    campaign_id: str
    question_id: str
    method_id: MethodId
    revisions: list[Revision] = field(default_factory=list)

    @property
    def current(self) -> Revision:
        return self.revisions[-1]

    @property
    def change_count(self) -> int:
        return len(self.revisions) - 1

    @property
    def in_form_changes(self) -> int:
        return sum(r.trace.in_form_changes for r in self.revisions)

    def to_doc(self) -> dict:
        return {
            "ballot_id": self.ballot_id,
            "voter": self.voter,
            "campaign_id": self.campaign_id,
            "question_id": self.question_id,
            "method_id": self.method_id.value,
            "revisions": [r.to_doc() for r in self.revisions],
        }


@dataclass
class FeedbackRecord:
    voter: str
    campaign_id: str
    question_id: str
    rating: int
    text: str | None
    created_at: datetime

    def to_doc(self) -> dict:
        return {
            "voter": self.voter,
            "campaign_id": self.campaign_id,
            "question_id": self.question_id,
            "rating": self.rating,
            "text": self.text,
            "created_at": dt_str(self.created_at),
        }


@dataclass
class Campaign:
    campaign_id: str
    title: str
    designer_id: str
    status: CampaignStatus
    open_at: datetime
    close_at: datetime
    tags: set[str]
    questions: list[Question]
    method_order_policy: str = "fixed"
    parent_campaign_id: str | None = None
    seed: int = 0
    opened_seq: int | None = None
    released: bool = False
    tallied_at: datetime | None = None
    ballots: dict[tuple[str, str, str], BallotRecord] = field(default_factory=dict)
    frozen_results: dict[str, list[TallyResult]] = field(default_factory=dict)
    frozen_consistency: dict[str, ConsistencyReport] = field(default_factory=dict)

    def question(self, question_id: str) -> Question:
        for q in self.questions:
            if q.question_id == question_id:
                return q
        raise errors.UnknownQuestion(f"no question {question_id!r} in campaign {self.campaign_id}")

    def method_order(self) -> list[MethodId]:
        order: list[MethodId] = []
        for q in self.questions:
            for spec in q.enabled_methods:
                if spec.method_id not in order:
                    order.append(spec.method_id)
        return order

    def is_open(self, now: datetime) -> bool:
        return self.status == "open" and self.open_at <= now < self.close_at

    def definition_doc(self) -> dict:
        return {
            "campaign_id": self.campaign_id,
            "title": self.title,
            "designer_id": self.designer_id,
            "open_at": dt_str(self.open_at),
            "close_at": dt_str(self.close_at),
            "tags": sorted(self.tags),
            "questions": [question_to_doc(q) for q in self.questions],
            "method_order_policy": self.method_order_policy,
            "parent_campaign_id": self.parent_campaign_id,
            "seed": self.seed,
        }

    def to_doc(self) -> dict:
        doc = self.definition_doc()
        doc.update(
            {
                "status": self.status,
                "released": self.released,
                "tallied_at": None if self.tallied_at is None else dt_str(self.tallied_at),
                "ballots": {
                    "|".join(k): rec.to_doc() for k, rec in sorted(self.ballots.items())
                },
                "results": {
                    qid: [tally_to_doc(t) for t in ts] for qid, ts in self.frozen_results.items()
                },
                "consistency": {
                    qid: report_to_doc(r) for qid, r in self.frozen_consistency.items()
                },
            }
        )
        return doc


def parse_campaign_definition(doc: dict, designer_id: str) -> Campaign:
    """Validate and materialize a campaign definition document.

    Collects all problems into one InvalidDefinition instead of failing on
    the first, so the designer UI can show per-field diagnostics.
    """
    problems: list[str] = []
    title = doc.get("title") or ""
    if not title:
        problems.append("title: required")

    open_at = close_at = None
    for fld in ("open_at", "close_at"):
        if not doc.get(fld):
            problems.append(f"{fld}: required")
    try:
        if doc.get("open_at"):
            open_at = parse_dt(doc["open_at"])
        if doc.get("close_at"):
            close_at = parse_dt(doc["close_at"])
    except ValueError as exc:
        problems.append(f"open_at/close_at: {exc}")
    if open_at and close_at and not open_at < close_at:
        problems.append("close_at: must be after open_at")

    tags = set(doc.get("tags", []))
    if any(not t for t in tags):
        problems.append("tags: empty tag not allowed")

    questions: list[Question] = []
    qdocs = doc.get("questions") or []
    if not qdocs:
        problems.append("questions: at least one required")
    seen_qids: set[str] = set()
    for i, qdoc in enumerate(qdocs):
        try:
            q = question_from_doc(qdoc)
            if not q.enabled_methods:
                problems.append(f"questions[{i}].enabled_methods: at least one required")
            if q.question_id in seen_qids:
                problems.append(f"questions[{i}].question_id: duplicate {q.question_id!r}")
            seen_qids.add(q.question_id)
            questions.append(q)
        except (KeyError, ValueError) as exc:
            problems.append(f"questions[{i}]: {exc}")

    policy = doc.get("method_order_policy", "fixed")
    if policy not in ("fixed", "randomized_per_voter"):
        problems.append(f"method_order_policy: unknown policy {policy!r}")

    if problems:
        raise errors.InvalidDefinition("; ".join(problems))

    return Campaign(
        campaign_id=doc.get("campaign_id") or f"c-{uuid.uuid4()}",
        title=title,
        designer_id=designer_id,
        status="draft",
        open_at=open_at,
        close_at=close_at,
        tags=tags,
        questions=questions,
        method_order_policy=policy,
        parent_campaign_id=doc.get("parent_campaign_id"),
        seed=int(doc.get("seed", 0)),
    )


class Engine:
    """The stateful campaign engine over an event store.

    A single re-entrant lock serializes mutations: ballot writes for the
    same (voter, question, method) become last-writer-wins revisions, and
    the close->tally transition is atomic with respect to intake, so a
    frozen result is always a consistent snapshot and happens exactly once.
    Reads take the same lock briefly to copy references and can interleave
    freely with writes.
    """

    def __init__(self, store: EventStore | None = None, max_clock_skew: timedelta = DEFAULT_MAX_CLOCK_SKEW):
        self.store = store if store is not None else MemoryEventStore()
        self.max_clock_skew = max_clock_skew
        self._lock = threading.RLock()
        self.campaigns: dict[str, Campaign] = {}
        self.subscriptions: dict[str, set[str]] = {}
        self.feedback: dict[tuple[str, str, str], FeedbackRecord] = {}
        self.feedback_history: dict[tuple[str, str, str], list[FeedbackRecord]] = {}
        for event in self.store.events():
            self._apply(event)

    # ------------------------------------------------------------------ io

    def _emit(self, kind: str, payload: dict, now: datetime) -> EventRecord:
        rec = self.store.append(kind, payload, dt_str(now))
        self._apply(rec)
        return rec

    def _campaign(self, campaign_id: str) -> Campaign:
        try:
            return self.campaigns[campaign_id]
        except KeyError:
            raise errors.UnknownCampaign(f"no campaign {campaign_id!r}") from None

    # ------------------------------------------------------- command side

    def create_campaign(self, designer_id: str, definition: dict, now: datetime | None = None) -> Campaign:
        now = now or utcnow()
        campaign = parse_campaign_definition(definition, designer_id)
        with self._lock:
            if campaign.campaign_id in self.campaigns:
                raise errors.InvalidDefinition(f"campaign_id: {campaign.campaign_id!r} already exists")
            self._emit("campaign_created", {"campaign": campaign.definition_doc()}, now)
            return self._campaign(campaign.campaign_id)

    def update_campaign(self, campaign_id: str, designer_id: str, definition: dict, now: datetime | None = None) -> Campaign:
        now = now or utcnow()
        with self._lock:
            current = self._campaign(campaign_id)
            if current.designer_id != designer_id:
                raise errors.NotAuthorized("only the campaign's designer may edit it")
            if current.status != "draft":
                raise errors.CampaignFinalized("campaigns are immutable once opened")
            merged = current.definition_doc()
            merged.update({k: v for k, v in definition.items() if k != "campaign_id"})
            parse_campaign_definition(merged, designer_id)  # validate before emitting
            self._emit("campaign_updated", {"campaign_id": campaign_id, "definition": merged}, now)
            return self._campaign(campaign_id)

    def clone_campaign(self, campaign_id: str, designer_id: str, overrides: dict | None = None, now: datetime | None = None) -> Campaign:
        now = now or utcnow()
        with self._lock:
            parent = self._campaign(campaign_id)
            doc = parent.definition_doc()
            doc["campaign_id"] = f"c-{uuid.uuid4()}"
            doc["parent_campaign_id"] = parent.campaign_id
            doc.update(overrides or {})
            return self.create_campaign(designer_id, doc, now)

    def open_campaign(self, campaign_id: str, designer_id: str, now: datetime | None = None) -> Campaign:
        now = now or utcnow()
        with self._lock:
            campaign = self._campaign(campaign_id)
            if campaign.designer_id != designer_id:
                raise errors.NotAuthorized("only the campaign's designer may open it")
            if campaign.status != "draft":
                raise errors.CampaignFinalized(f"campaign is {campaign.status}, not draft")
            self._emit("opened", {"campaign_id": campaign_id, "at": dt_str(now)}, now)
            return campaign

    def close_campaign(self, campaign_id: str, now: datetime | None = None) -> Campaign:
        """Close voting early (or at deadline); tallying happens on the next tick."""
        now = now or utcnow()
        with self._lock:
            campaign = self._campaign(campaign_id)
            if campaign.status != "open":
                raise errors.CampaignNotOpen(f"campaign is {campaign.status}")
            self._emit("closed", {"campaign_id": campaign_id, "at": dt_str(now)}, now)
            return campaign

    def assign_tags(self, campaign_id: str, tags: set[str], now: datetime | None = None) -> Campaign:
        now = now or utcnow()
        tags = set(tags)
        if not tags or any(not t for t in tags):
            raise errors.EmptyTagSet("tags must be non-empty strings")
        with self._lock:
            campaign = self._campaign(campaign_id)
            if campaign.status == "tallied":
                raise errors.CampaignFinalized("cannot retag a tallied campaign")
            self._emit("tag_assigned", {"campaign_id": campaign_id, "tags": sorted(tags)}, now)
            return campaign

    def subscribe(self, voter: str, tags: set[str], now: datetime | None = None) -> set[str]:
        now = now or utcnow()
        tags = set(tags)
        if not tags or any(not t for t in tags):
            raise errors.EmptyTagSet("tags must be non-empty strings")
        with self._lock:
            self._emit("subscribed", {"voter": voter, "tags": sorted(tags)}, now)
            return set(self.subscriptions[voter])

    def submit_ballot(
        self,
        voter: str,
        campaign_id: str,
        question_id: str,
        method_id: MethodId,
        raw: RawBallot,
        trace: ChoiceTrace,
        now: datetime | None = None,
        idempotency_key: str | None = None,
    ) -> BallotRecord:
        now = now or utcnow()
        with self._lock:
            campaign = self._campaign(campaign_id)
            if not campaign.is_open(now):
                raise errors.CampaignNotOpen(
                    f"campaign {campaign_id!r} is not accepting ballots at {dt_str(now)}"
                )
            if not (self.subscriptions.get(voter, set()) & campaign.tags):
                raise errors.NotVisibleToVoter(f"campaign {campaign_id!r} is not visible to this voter")
            question = campaign.question(question_id)
            try:
                spec = question.method_spec(method_id)
            except KeyError as exc:
                raise errors.ValidationFailed(
                    [Violation("MethodNotEnabled", str(exc))]
                ) from exc

            if not trace.ordered():
                raise errors.ClockSkew("trace timestamps out of order")
            if abs(trace.submitted_at - now) > self.max_clock_skew:
                raise errors.ClockSkew(
                    f"client submit time deviates from server receipt by more than {self.max_clock_skew}"
                )

            verdict = validate_ballot(question, spec, raw)
            if not verdict.ok:
                raise errors.ValidationFailed(verdict.violations)
            scores = normalize_scores(question, spec, raw)

            key = (voter, question_id, method_id.value)
            existing = campaign.ballots.get(key)
            if existing and idempotency_key is not None:
                if existing.current.idempotency_key == idempotency_key:
                    return existing  # client retry of an acknowledged write

            payload = {
                "campaign_id": campaign_id,
                "voter": voter,
                "question_id": question_id,
                "method_id": method_id.value,
                "revision": {
                    "scores": score_vector_to_doc(scores),
                    "raw": raw_ballot_to_doc(raw),
                    "trace": trace.to_doc(),
                    "received_at": dt_str(now),
                    "idempotency_key": idempotency_key,
                },
            }
            kind = "ballot_revised" if existing else "ballot_submitted"
            self._emit(kind, payload, now)
            return campaign.ballots[key]

    def scheduler_tick(self, now: datetime | None = None) -> list[str]:
        """Close campaigns past their deadline and tally anything closed.

        Idempotent: campaigns already tallied are untouched; a failure in
        one campaign's tally is logged and retried on the next tick.
        """
        now = now or utcnow()
        tallied: list[str] = []
        with self._lock:
            for campaign in list(self.campaigns.values()):
                try:
                    if campaign.status == "open" and now >= campaign.close_at:
                        self._emit("closed", {"campaign_id": campaign.campaign_id, "at": dt_str(now)}, now)
                    if campaign.status == "closed":
                        self._tally_campaign(campaign, now)
                        tallied.append(campaign.campaign_id)
                except Exception:
                    logger.exception("tally failed for campaign %s; will retry", campaign.campaign_id)
        return tallied

    def _tally_campaign(self, campaign: Campaign, now: datetime) -> None:
        results, reports = self._compute_tallies(campaign, interim=False)
        payload = {
            "campaign_id": campaign.campaign_id,
            "at": dt_str(now),
            "results": {qid: [tally_to_doc(t) for t in ts] for qid, ts in results.items()},
            "consistency": {qid: report_to_doc(r) for qid, r in reports.items()},
        }
        self._emit("tallied", payload, now)

    def _compute_tallies(
        self, campaign: Campaign, interim: bool
    ) -> tuple[dict[str, list[TallyResult]], dict[str, ConsistencyReport]]:
        results: dict[str, list[TallyResult]] = {}
        reports: dict[str, ConsistencyReport] = {}
        for question in campaign.questions:
            tallies = []
            for spec in question.enabled_methods:
                ballots = [
                    rec.current.scores
                    for key, rec in campaign.ballots.items()
                    if key[1] == question.question_id and key[2] == spec.method_id.value
                ]
                tallies.append(aggregate(question, spec, ballots, interim=interim))
            results[question.question_id] = tallies
            if len(tallies) >= 2:
                reports[question.question_id] = consistency_report(build_rank_profile(tallies))
        return results, reports

    def on_demand_results(
        self, campaign_id: str, requester: str, now: datetime | None = None
    ) -> tuple[dict[str, list[TallyResult]], dict[str, ConsistencyReport]]:
        """Fresh interim snapshot for the designer; never touches frozen results."""
        with self._lock:
            campaign = self._campaign(campaign_id)
            if campaign.designer_id != requester:
                raise errors.NotAuthorized("interim results are designer-only")
            if campaign.status == "draft":
                raise errors.CampaignDraft("campaign has not been opened yet")
            return self._compute_tallies(campaign, interim=True)

    def release_results(self, campaign_id: str, designer_id: str, now: datetime | None = None) -> Campaign:
        now = now or utcnow()
        with self._lock:
            campaign = self._campaign(campaign_id)
            if campaign.designer_id != designer_id:
                raise errors.NotAuthorized("only the campaign's designer may release results")
            if campaign.status != "tallied":
                raise errors.ResultsNotReady(f"campaign is {campaign.status}")
            if not campaign.released:
                self._emit("released", {"campaign_id": campaign_id, "at": dt_str(now)}, now)
            return campaign

    def get_results(
        self, principal: str, campaign_id: str
    ) -> tuple[dict[str, list[TallyResult]], dict[str, ConsistencyReport]]:
        with self._lock:
            campaign = self._campaign(campaign_id)
            if campaign.status != "tallied":
                raise errors.ResultsNotReady(f"campaign is {campaign.status}")
            if principal != campaign.designer_id:
                if not campaign.released:
                    raise errors.ResultsNotReady("results have not been released")
                if not (self.subscriptions.get(principal, set()) & campaign.tags):
                    raise errors.NotVisibleToVoter("campaign is not visible to this voter")
            return dict(campaign.frozen_results), dict(campaign.frozen_consistency)

    def submit_feedback(
        self,
        voter: str,
        campaign_id: str,
        question_id: str,
        rating: int,
        text: str | None = None,
        now: datetime | None = None,
    ) -> FeedbackRecord:
        now = now or utcnow()
        if not isinstance(rating, int) or not 1 <= rating <= 5:
            raise errors.RatingOutOfRange(f"rating {rating!r} outside 1..5")
        with self._lock:
            campaign = self._campaign(campaign_id)
            campaign.question(question_id)  # existence check
            if not campaign.released:
                raise errors.ResultsNotReleased("feedback opens once results are released")
            if not (self.subscriptions.get(voter, set()) & campaign.tags):
                raise errors.NotVisibleToVoter("campaign is not visible to this voter")
            payload = {
                "voter": voter,
                "campaign_id": campaign_id,
                "question_id": question_id,
                "rating": rating,
                "text": text,
                "created_at": dt_str(now),
            }
            self._emit("feedback", payload, now)
            return self.feedback[(campaign_id, voter, question_id)]

    # --------------------------------------------------------- query side

    def visible_campaigns(self, voter: str, now: datetime | None = None) -> list[Campaign]:
        now = now or utcnow()
        with self._lock:
            if voter not in self.subscriptions:
                raise errors.UnknownVoter(f"no subscription for voter {voter!r}")
            tags = self.subscriptions[voter]
            out = [
                c
                for c in self.campaigns.values()
                if c.is_open(now) and (c.tags & tags)
            ]
        return sorted(out, key=lambda c: (c.close_at, c.campaign_id))

    def feed(self, voter: str, now: datetime | None = None, cursor: int = 0) -> tuple[list[Campaign], int]:
        """Pull-based notification feed: campaigns opened after ``cursor``."""
        visible = self.visible_campaigns(voter, now)
        items = [c for c in visible if (c.opened_seq or 0) > cursor]
        return items, self.store.last_seq

    def assign_method_order(self, voter: str, campaign_id: str) -> list[MethodId]:
        with self._lock:
            campaign = self._campaign(campaign_id)
            order = campaign.method_order()
            if campaign.method_order_policy == "randomized_per_voter":
                rng = random.Random(f"{campaign.seed}:{voter}")
                rng.shuffle(order)
            return order

    def state_doc(self) -> dict:
        with self._lock:
            return {
                "campaigns": {cid: c.to_doc() for cid, c in sorted(self.campaigns.items())},
                "subscriptions": {v: sorted(t) for v, t in sorted(self.subscriptions.items())},
                "feedback": {
                    "|".join(k): rec.to_doc() for k, rec in sorted(self.feedback.items())
                },
                "feedback_history": {
                    "|".join(k): [r.to_doc() for r in hist]
                    for k, hist in sorted(self.feedback_history.items())
                },
            }

    def state_hash(self) -> str:
        blob = json.dumps(self.state_doc(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    # ---------------------------------------------------------- event apply

    def _apply(self, event: EventRecord) -> None:
        handler = getattr(self, f"_apply_{event.kind}")
        handler(event)

    def _apply_campaign_created(self, event: EventRecord) -> None:
        doc = event.payload["campaign"]
        campaign = parse_campaign_definition(doc, doc["designer_id"])
        self.campaigns[campaign.campaign_id] = campaign

    def _apply_campaign_updated(self, event: EventRecord) -> None:
        doc = event.payload["definition"]
        old = self.campaigns[event.payload["campaign_id"]]
        campaign = parse_campaign_definition(doc, doc["designer_id"])
        campaign.ballots = old.ballots
        self.campaigns[campaign.campaign_id] = campaign

    def _apply_opened(self, event: EventRecord) -> None:
        campaign = self.campaigns[event.payload["campaign_id"]]
        campaign.status = "open"
        campaign.opened_seq = event.seq

    def _apply_closed(self, event: EventRecord) -> None:
        campaign = self.campaigns[event.payload["campaign_id"]]
        campaign.status = "closed"
        campaign.close_at = min(campaign.close_at, parse_dt(event.payload["at"]))

    def _apply_tag_assigned(self, event: EventRecord) -> None:
        campaign = self.campaigns[event.payload["campaign_id"]]
        campaign.tags = set(event.payload["tags"])

    def _apply_subscribed(self, event: EventRecord) -> None:
        self.subscriptions[event.payload["voter"]] = set(event.payload["tags"])

    def _apply_ballot_submitted(self, event: EventRecord) -> None:
        p = event.payload
        campaign = self.campaigns[p["campaign_id"]]
        key = (p["voter"], p["question_id"], p["method_id"])
        record = BallotRecord(
            ballot_id=f"{p['campaign_id']}:{p['question_id']}:{p['method_id']}:{p['voter']}",
            voter=p["voter"],
            campaign_id=p["campaign_id"],
            question_id=p["question_id"],
            method_id=MethodId(p["method_id"]),
        )
        record.revisions.append(Revision.from_doc(p["revision"]))
        campaign.ballots[key] = record

    def _apply_ballot_revised(self, event: EventRecord) -> None:
        p = event.payload
        campaign = self.campaigns[p["campaign_id"]]
        record = campaign.ballots[(p["voter"], p["question_id"], p["method_id"])]
        record.revisions.append(Revision.from_doc(p["revision"]))

    def _apply_tallied(self, event: EventRecord) -> None:
        p = event.payload
        campaign = self.campaigns[p["campaign_id"]]
        campaign.status = "tallied"
        campaign.tallied_at = parse_dt(p["at"])
        campaign.frozen_results = {
            qid: [tally_from_doc(t) for t in ts] for qid, ts in p["results"].items()
        }
        campaign.frozen_consistency = {
            qid: _report_from_doc(doc) for qid, doc in p["consistency"].items()
        }

    def _apply_released(self, event: EventRecord) -> None:
        self.campaigns[event.payload["campaign_id"]].released = True

    def _apply_feedback(self, event: EventRecord) -> None:
        p = event.payload
        rec = FeedbackRecord(
            voter=p["voter"],
            campaign_id=p["campaign_id"],
            question_id=p["question_id"],
            rating=p["rating"],
            text=p.get("text"),
            created_at=parse_dt(p["created_at"]),
        )
        key = (rec.campaign_id, rec.voter, rec.question_id)
        self.feedback_history.setdefault(key, []).append(rec)
        self.feedback[key] = rec


def _report_from_doc(doc: dict) -> ConsistencyReport:
    from fractions import Fraction

    return ConsistencyReport(
        question_id=doc["question_id"],
        methods=tuple(MethodId(m) for m in doc["methods"]),
        per_rank=tuple(Fraction(c) for c in doc["per_rank"]),
        mean=Fraction(doc["mean"]),
        tie_groups={
            MethodId(m): tuple(tuple(g) for g in groups)
            for m, groups in doc.get("tie_groups", {}).items()
        },
    )
