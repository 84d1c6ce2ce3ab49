"""Seed an engine with the built-in demonstration study.

Everything runs on a fixed synthetic timeline in July 2021, so two seeds of
fresh stores with the same seed flag produce byte-identical event logs and
exports: ids are natural keys, timestamps are derived from the voter index,
and ballot content comes from the deterministic fixture generator.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from . import fixture
from .engine import ChoiceTrace, Engine
from .errors import StoreNotEmpty
from .serialize import dt_str, question_to_doc

SEED_DESIGNER = "d-fixture-designer"
SEED_TAGS = ("covid", "health")

BASE_TIME = datetime(2021, 7, 1, 12, 0, 0, tzinfo=timezone.utc)
VOTING_DAYS = 7


def campaign_definition(seed: int = 0, designer_id: str = SEED_DESIGNER) -> dict:
    """The study campaign as a definition document (also the UI's target)."""
    return {
        "campaign_id": fixture.FIXTURE_CAMPAIGN_ID,
        "title": "COVID-19 preference study",
        "designer_id": designer_id,
        "open_at": dt_str(BASE_TIME),
        "close_at": dt_str(BASE_TIME + timedelta(days=VOTING_DAYS)),
        "tags": sorted(SEED_TAGS),
        "questions": [question_to_doc(q) for q in fixture.covid_questions()],
        "method_order_policy": "randomized_per_voter",
        "parent_campaign_id": None,
        "seed": seed,
    }


def seed_covid_fixture(engine: Engine, seed: int = 0, designer_id: str = SEED_DESIGNER) -> str:
    """Create, open, and fully populate the demonstration campaign.

    Leaves the campaign in open state (its close date is on the synthetic
    timeline, so a later scheduler tick at wall-clock time will tally it).
    Returns the campaign id.
    """
    if engine.campaigns:
        raise StoreNotEmpty("refusing to seed into a non-empty store")

    created_at = BASE_TIME - timedelta(hours=1)
    engine.create_campaign(designer_id, campaign_definition(seed, designer_id), now=created_at)
    engine.open_campaign(fixture.FIXTURE_CAMPAIGN_ID, designer_id, now=BASE_TIME)

    voters = fixture.voter_pseudonyms()
    for i, voter in enumerate(voters):
        engine.subscribe(voter, {"covid"}, now=BASE_TIME + timedelta(seconds=i))

    ballots = {
        (qid, mid): fixture.synthetic_ballots(qid, mid, seed=seed)
        for qid in fixture.SHARE_TABLE
        for mid in fixture.FIXTURE_METHODS
    }
    for i, voter in enumerate(voters):
        # each synthetic voter answers all questions under every method in
        # their personally assigned order, one minute apart
        step = 0
        for qid in fixture.SHARE_TABLE:
            for mid in engine.assign_method_order(voter, fixture.FIXTURE_CAMPAIGN_ID):
                received = BASE_TIME + timedelta(hours=1, minutes=i * 20 + step)
                trace = ChoiceTrace(
                    ballot_opened_at=received - timedelta(seconds=55),
                    first_interaction_at=received - timedelta(seconds=50),
                    submitted_at=received,
                    in_form_changes=(i + step) % 3,
                )
                engine.submit_ballot(
                    voter,
                    fixture.FIXTURE_CAMPAIGN_ID,
                    qid,
                    mid,
                    ballots[(qid, mid)][i],
                    trace,
                    now=received,
                )
                step += 1
    return fixture.FIXTURE_CAMPAIGN_ID
