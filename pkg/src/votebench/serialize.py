"""JSON document conversion for domain objects.

One canonical wire/file schema used everywhere: event payloads, API bodies,
campaign import/export, and the UI. Rationals are carried as exact fraction
strings (with decimal companions where humans read them); timestamps are
ISO-8601 UTC.
"""

from __future__ import annotations

from datetime import datetime, timezone
from fractions import Fraction

from .consistency import ConsistencyReport
from .methods import (
    BallotShape,
    MethodId,
    Option,
    Question,
    RawBallot,
    ScoreVector,
    VotingMethodSpec,
    as_fraction,
)
from .tally import TallyResult

SCHEMA_VERSION = 1


def frac_str(f: Fraction) -> str:
    return str(f)


def dt_str(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_dt(s: str) -> datetime:
    return datetime.fromisoformat(s.replace("Z", "+00:00")).astimezone(timezone.utc)


def spec_to_doc(spec: VotingMethodSpec) -> dict:
    return {
        "method_id": spec.method_id.value,
        "score_levels": [frac_str(v) for v in spec.score_levels],
        "ballot_shape": spec.ballot_shape.value,
        "params": dict(spec.params),
    }


def spec_from_doc(doc: dict) -> VotingMethodSpec:
    return VotingMethodSpec(
        method_id=MethodId(doc["method_id"]),
        score_levels=tuple(Fraction(v) for v in doc.get("score_levels", [])),
        ballot_shape=BallotShape(doc["ballot_shape"]),
        params=dict(doc.get("params", {})),
    )


def question_to_doc(q: Question) -> dict:
    return {
        "question_id": q.question_id,
        "text": q.text,
        "options": [{"option_id": o.option_id, "label": o.label} for o in q.options],
        "enabled_methods": [spec_to_doc(s) for s in q.enabled_methods],
    }


def question_from_doc(doc: dict) -> Question:
    return Question(
        question_id=doc["question_id"],
        text=doc.get("text", ""),
        options=tuple(Option(o["option_id"], o.get("label", "")) for o in doc["options"]),
        enabled_methods=tuple(spec_from_doc(s) for s in doc.get("enabled_methods", [])),
    )


def raw_ballot_to_doc(b: RawBallot) -> dict:
    doc: dict = {"shape": b.shape.value}
    if b.choice is not None:
        doc["choice"] = b.choice
    if b.scores is not None:
        doc["scores"] = {k: frac_str(v) for k, v in b.scores.items()}
    if b.ranking is not None:
        doc["ranking"] = list(b.ranking)
    if b.allocation is not None:
        doc["allocation"] = dict(b.allocation)
    return doc


def raw_ballot_from_doc(doc: dict) -> RawBallot:
    shape = BallotShape(doc["shape"])
    if shape == BallotShape.SINGLE_CHOICE:
        return RawBallot.single_choice(doc["choice"])
    if shape == BallotShape.PER_OPTION_SCORE:
        return RawBallot.per_option({k: as_fraction(v) for k, v in doc["scores"].items()})
    if shape == BallotShape.RANKED_SUBSET:
        return RawBallot.ranked(doc["ranking"])
    return RawBallot.allocated({k: int(v) for k, v in doc["allocation"].items()})


def score_vector_to_doc(sv: ScoreVector) -> dict:
    return {"method_id": sv.method_id.value, "scores": [frac_str(s) for s in sv.scores]}


def score_vector_from_doc(doc: dict) -> ScoreVector:
    return ScoreVector(MethodId(doc["method_id"]), tuple(Fraction(s) for s in doc["scores"]))


def tally_to_doc(t: TallyResult) -> dict:
    return {
        "question_id": t.question_id,
        "method_id": t.method_id.value,
        "option_ids": list(t.option_ids),
        "aggregates": [frac_str(a) for a in t.aggregates],
        "aggregates_decimal": [float(a) for a in t.aggregates],
        "normalized_share": None
        if t.normalized_share is None
        else [frac_str(s) for s in t.normalized_share],
        "normalized_share_decimal": None
        if t.normalized_share is None
        else [float(s) for s in t.normalized_share],
        "ranking": [list(g) for g in t.ranking],
        "linear_ranking": list(t.linear_ranking),
        "first_choice_share": {k: frac_str(v) for k, v in t.first_choice_share.items()},
        "counted_ballots": t.counted_ballots,
        "interim": t.interim,
    }


def tally_from_doc(doc: dict) -> TallyResult:
    shares = doc.get("normalized_share")
    return TallyResult(
        question_id=doc["question_id"],
        method_id=MethodId(doc["method_id"]),
        option_ids=tuple(doc["option_ids"]),
        aggregates=tuple(Fraction(a) for a in doc["aggregates"]),
        normalized_share=None if shares is None else tuple(Fraction(s) for s in shares),
        ranking=tuple(tuple(g) for g in doc["ranking"]),
        linear_ranking=tuple(doc["linear_ranking"]),
        first_choice_share={k: Fraction(v) for k, v in doc.get("first_choice_share", {}).items()},
        counted_ballots=doc.get("counted_ballots", 0),
        interim=doc.get("interim", False),
    )


def report_to_doc(r: ConsistencyReport) -> dict:
    return r.to_dict()
