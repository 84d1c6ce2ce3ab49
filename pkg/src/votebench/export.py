"""Columnar dataset export for analysis.

Every export is keyed by voter pseudonym only; identity data lives in a
separate table that exports never join against. Rationals appear twice, as
exact fraction strings and as decimals, so downstream tools can pick either.
Column order is fixed and versioned via the schema_version column.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .engine import Campaign, Engine
from .errors import ResultsNotReady
from .serialize import SCHEMA_VERSION, dt_str, report_to_doc, tally_to_doc

EXPORT_KINDS = ("ballots", "traces", "results", "feedback", "consistency")


def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _sorted_ballots(campaign: Campaign):
    return [campaign.ballots[k] for k in sorted(campaign.ballots)]


def export_ballots(campaign: Campaign, fmt: str = "csv") -> str:
    """One row per (voter, question, method): the counted revision's scores."""
    if fmt == "json":
        docs = [
            {
                "schema_version": SCHEMA_VERSION,
                "campaign_id": rec.campaign_id,
                "question_id": rec.question_id,
                "method_id": rec.method_id.value,
                "voter_pseudonym": rec.voter,
                "revision_count": len(rec.revisions),
                "received_at": dt_str(rec.current.received_at),
                "scores": [str(s) for s in rec.current.scores.scores],
                "scores_decimal": [float(s) for s in rec.current.scores.scores],
            }
            for rec in _sorted_ballots(campaign)
        ]
        return json.dumps(docs, indent=2)
    header = [
        "schema_version",
        "campaign_id",
        "question_id",
        "method_id",
        "voter_pseudonym",
        "revision_count",
        "received_at",
        "scores",
        "scores_decimal",
    ]
    rows = [
        [
            SCHEMA_VERSION,
            rec.campaign_id,
            rec.question_id,
            rec.method_id.value,
            rec.voter,
            len(rec.revisions),
            dt_str(rec.current.received_at),
            "|".join(str(s) for s in rec.current.scores.scores),
            "|".join(str(float(s)) for s in rec.current.scores.scores),
        ]
        for rec in _sorted_ballots(campaign)
    ]
    return _csv(rows, header)


def export_traces(campaign: Campaign, fmt: str = "csv") -> str:
    """Behavioral metadata per ballot: timing, duration, change counts."""
    entries = []
    for rec in _sorted_ballots(campaign):
        trace = rec.current.trace
        entries.append(
            {
                "schema_version": SCHEMA_VERSION,
                "campaign_id": rec.campaign_id,
                "question_id": rec.question_id,
                "method_id": rec.method_id.value,
                "voter_pseudonym": rec.voter,
                "ballot_opened_at": dt_str(trace.ballot_opened_at),
                "first_interaction_at": dt_str(trace.first_interaction_at),
                "submitted_at": dt_str(trace.submitted_at),
                "duration_seconds": trace.duration.total_seconds(),
                "change_count": rec.change_count,
                "in_form_changes": rec.in_form_changes,
            }
        )
    if fmt == "json":
        return json.dumps(entries, indent=2)
    header = list(entries[0]) if entries else [
        "schema_version", "campaign_id", "question_id", "method_id", "voter_pseudonym",
        "ballot_opened_at", "first_interaction_at", "submitted_at",
        "duration_seconds", "change_count", "in_form_changes",
    ]
    return _csv([[e[h] for h in header] for e in entries], header)


def export_results(campaign: Campaign, fmt: str = "csv", results=None) -> str:
    """One row per (question, method, option) with aggregate, share, rank."""
    results = results if results is not None else campaign.frozen_results
    if fmt == "json":
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "campaign_id": campaign.campaign_id,
                "results": {qid: [tally_to_doc(t) for t in ts] for qid, ts in results.items()},
            },
            indent=2,
        )
    header = [
        "schema_version", "campaign_id", "question_id", "method_id", "option_id",
        "aggregate", "aggregate_decimal", "share", "share_decimal",
        "rank", "counted_ballots", "interim",
    ]
    rows = []
    for qid in sorted(results):
        for t in results[qid]:
            rank_of = {oid: i + 1 for i, grp in enumerate(t.ranking) for oid in grp}
            for i, oid in enumerate(t.option_ids):
                share = None if t.normalized_share is None else t.normalized_share[i]
                rows.append(
                    [
                        SCHEMA_VERSION,
                        campaign.campaign_id,
                        qid,
                        t.method_id.value,
                        oid,
                        str(t.aggregates[i]),
                        float(t.aggregates[i]),
                        "" if share is None else str(share),
                        "" if share is None else float(share),
                        rank_of[oid],
                        t.counted_ballots,
                        t.interim,
                    ]
                )
    return _csv(rows, header)


def export_feedback(engine: Engine, campaign: Campaign, fmt: str = "csv") -> str:
    records = [
        rec
        for key, rec in sorted(engine.feedback.items())
        if rec.campaign_id == campaign.campaign_id
    ]
    if fmt == "json":
        docs = [
            {
                "schema_version": SCHEMA_VERSION,
                "campaign_id": r.campaign_id,
                "question_id": r.question_id,
                "voter_pseudonym": r.voter,
                "rating": r.rating,
                "text": r.text,
                "created_at": dt_str(r.created_at),
            }
            for r in records
        ]
        return json.dumps(docs, indent=2)
    header = ["schema_version", "campaign_id", "question_id", "voter_pseudonym", "rating", "text", "created_at"]
    rows = [
        [SCHEMA_VERSION, r.campaign_id, r.question_id, r.voter, r.rating, r.text or "", dt_str(r.created_at)]
        for r in records
    ]
    return _csv(rows, header)


def export_consistency(campaign: Campaign, fmt: str = "csv", reports=None) -> str:
    reports = reports if reports is not None else campaign.frozen_consistency
    if fmt == "json":
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "campaign_id": campaign.campaign_id,
                "consistency": {qid: report_to_doc(r) for qid, r in reports.items()},
            },
            indent=2,
        )
    header = [
        "schema_version", "campaign_id", "question_id", "rank",
        "consistency", "consistency_decimal", "mean", "mean_decimal",
    ]
    rows = []
    for qid in sorted(reports):
        r = reports[qid]
        for k, c in enumerate(r.per_rank, start=1):
            rows.append(
                [SCHEMA_VERSION, campaign.campaign_id, qid, k, str(c), float(c), str(r.mean), float(r.mean)]
            )
    return _csv(rows, header)


def export_dataset(engine: Engine, campaign_id: str, kind: str, fmt: str = "csv", allow_interim: bool = False) -> str:
    """Export one dataset for a campaign; final exports require a frozen tally."""
    if kind not in EXPORT_KINDS:
        raise ValueError(f"unknown export kind {kind!r}; expected one of {EXPORT_KINDS}")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    campaign = engine.campaigns.get(campaign_id)
    if campaign is None:
        raise ResultsNotReady(f"no campaign {campaign_id!r}")
    interim = campaign.status != "tallied"
    if interim and not allow_interim:
        raise ResultsNotReady(f"campaign is {campaign.status}; pass allow_interim for a snapshot")

    results = reports = None
    if interim and kind in ("results", "consistency"):
        results, reports = engine._compute_tallies(campaign, interim=True)

    if kind == "ballots":
        return export_ballots(campaign, fmt)
    if kind == "traces":
        return export_traces(campaign, fmt)
    if kind == "results":
        return export_results(campaign, fmt, results=results)
    if kind == "feedback":
        return export_feedback(engine, campaign, fmt)
    return export_consistency(campaign, fmt, reports=reports)


def file_extension(fmt: str) -> str:
    return "json" if fmt == "json" else "csv"


def parse_ballots_csv(text: str) -> list[dict]:
    """Round-trip helper: parse a ballots CSV back into row dicts."""
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for row in reader:
        row["scores"] = [Fraction(s) for s in row["scores"].split("|")]
        rows.append(row)
    return rows
