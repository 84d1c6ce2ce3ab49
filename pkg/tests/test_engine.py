import threading
from datetime import timedelta
from fractions import Fraction

import pytest

from votebench import errors
from votebench.engine import ChoiceTrace, Engine
from votebench.methods import MethodId, RawBallot

from conftest import T0, definition, make_question, trace_at

VOTE_AT = T0 + timedelta(hours=2)
AFTER_CLOSE = T0 + timedelta(days=8)


def submit(engine, voter="voter-1", choice="o1", at=VOTE_AT, campaign="camp", **kw):
    return engine.submit_ballot(
        voter, campaign, "q1", MethodId.MV, RawBallot.single_choice(choice), trace_at(at), now=at, **kw
    )


def test_draft_campaigns_take_no_ballots(engine):
    engine.create_campaign("designer-1", definition(), now=T0)
    engine.subscribe("voter-1", {"demo"}, now=T0)
    with pytest.raises(errors.CampaignNotOpen):
        submit(engine)


def test_window_is_half_open(open_campaign):
    submit(open_campaign, at=T0)  # open_at itself counts
    close = T0 + timedelta(days=7)
    with pytest.raises(errors.CampaignNotOpen):
        submit(open_campaign, at=close)
    with pytest.raises(errors.CampaignNotOpen):
        submit(open_campaign, at=close + timedelta(seconds=1))


def test_unsubscribed_voter_cannot_vote(open_campaign):
    open_campaign.subscribe("stranger", {"unrelated"}, now=T0)
    with pytest.raises(errors.NotVisibleToVoter):
        submit(open_campaign, voter="stranger")


def test_revisions_count_last_only(open_campaign):
    submit(open_campaign, choice="o1")
    rec = submit(open_campaign, choice="o3", at=VOTE_AT + timedelta(minutes=5))
    assert rec.change_count == 1
    assert len(rec.revisions) == 2
    open_campaign.scheduler_tick(AFTER_CLOSE)
    t = open_campaign.campaigns["camp"].frozen_results["q1"][0]
    assert t.counted_ballots == 1
    assert t.aggregate_of("o3") == 1 and t.aggregate_of("o1") == 0


def test_idempotent_retry_does_not_revise(open_campaign):
    submit(open_campaign, idempotency_key="k1")
    rec = submit(open_campaign, idempotency_key="k1")
    assert rec.change_count == 0
    rec = submit(open_campaign, choice="o2", at=VOTE_AT + timedelta(minutes=1), idempotency_key="k2")
    assert rec.change_count == 1


def test_clock_skew_rejected(open_campaign):
    trace = trace_at(VOTE_AT - timedelta(minutes=30))
    with pytest.raises(errors.ClockSkew):
        open_campaign.submit_ballot(
            "voter-1", "camp", "q1", MethodId.MV, RawBallot.single_choice("o1"), trace, now=VOTE_AT
        )
    disordered = ChoiceTrace(
        ballot_opened_at=VOTE_AT,
        first_interaction_at=VOTE_AT - timedelta(seconds=10),
        submitted_at=VOTE_AT,
    )
    with pytest.raises(errors.ClockSkew):
        open_campaign.submit_ballot(
            "voter-1", "camp", "q1", MethodId.MV, RawBallot.single_choice("o1"), disordered, now=VOTE_AT
        )


def test_invalid_ballot_reports_violations(open_campaign):
    with pytest.raises(errors.ValidationFailed) as exc:
        submit(open_campaign, choice="nope")
    assert exc.value.violations[0].code == "UnknownOption"


def test_scheduler_closes_and_tallies_once(open_campaign):
    submit(open_campaign)
    assert open_campaign.scheduler_tick(VOTE_AT) == []
    assert open_campaign.scheduler_tick(AFTER_CLOSE) == ["camp"]
    first_hash = open_campaign.state_hash()
    assert open_campaign.scheduler_tick(AFTER_CLOSE + timedelta(hours=1)) == []
    assert open_campaign.state_hash() == first_hash


def test_concurrent_ticks_tally_exactly_once(open_campaign):
    submit(open_campaign)
    results = []
    threads = [
        threading.Thread(target=lambda: results.extend(open_campaign.scheduler_tick(AFTER_CLOSE)))
        for _ in range(8)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == ["camp"]
    tallied_events = [e for e in open_campaign.store.events() if e.kind == "tallied"]
    assert len(tallied_events) == 1


def test_early_close(open_campaign):
    submit(open_campaign)
    open_campaign.close_campaign("camp", now=VOTE_AT + timedelta(hours=1))
    with pytest.raises(errors.CampaignNotOpen):
        submit(open_campaign, at=VOTE_AT + timedelta(hours=2))
    open_campaign.scheduler_tick(VOTE_AT + timedelta(hours=3))
    assert open_campaign.campaigns["camp"].status == "tallied"


def test_results_gated_on_release(open_campaign):
    submit(open_campaign)
    open_campaign.scheduler_tick(AFTER_CLOSE)
    # designer reads the frozen tally immediately
    results, _ = open_campaign.get_results("designer-1", "camp")
    assert results["q1"][0].counted_ballots == 1
    with pytest.raises(errors.ResultsNotReady):
        open_campaign.get_results("voter-1", "camp")
    open_campaign.release_results("camp", "designer-1", now=AFTER_CLOSE)
    results, _ = open_campaign.get_results("voter-1", "camp")
    assert results["q1"][0].counted_ballots == 1


def test_feedback_opens_after_release(open_campaign):
    submit(open_campaign)
    open_campaign.scheduler_tick(AFTER_CLOSE)
    with pytest.raises(errors.ResultsNotReleased):
        open_campaign.submit_feedback("voter-1", "camp", "q1", 4)
    open_campaign.release_results("camp", "designer-1")
    open_campaign.submit_feedback("voter-1", "camp", "q1", 4, "fine")
    open_campaign.submit_feedback("voter-1", "camp", "q1", 2, "changed my mind")
    key = ("camp", "voter-1", "q1")
    assert open_campaign.feedback[key].rating == 2
    assert [r.rating for r in open_campaign.feedback_history[key]] == [4, 2]
    with pytest.raises(errors.RatingOutOfRange):
        open_campaign.submit_feedback("voter-1", "camp", "q1", 6)


def test_interim_results_designer_only(open_campaign):
    submit(open_campaign)
    results, _ = open_campaign.on_demand_results("camp", "designer-1")
    assert results["q1"][0].interim
    with pytest.raises(errors.NotAuthorized):
        open_campaign.on_demand_results("camp", "voter-1")


def test_draft_edit_and_finalize(engine):
    engine.create_campaign("designer-1", definition(), now=T0 - timedelta(hours=1))
    engine.update_campaign("camp", "designer-1", {"title": "Renamed"}, now=T0 - timedelta(minutes=30))
    assert engine.campaigns["camp"].title == "Renamed"
    with pytest.raises(errors.NotAuthorized):
        engine.update_campaign("camp", "other", {"title": "x"})
    engine.open_campaign("camp", "designer-1", now=T0)
    with pytest.raises(errors.CampaignFinalized):
        engine.update_campaign("camp", "designer-1", {"title": "too late"})


def test_clone_links_parent(engine):
    engine.create_campaign("designer-1", definition(), now=T0)
    clone = engine.clone_campaign("camp", "designer-1", {"title": "Round 2"}, now=T0)
    assert clone.parent_campaign_id == "camp"
    assert clone.title == "Round 2"
    assert clone.status == "draft"
    assert [q.question_id for q in clone.questions] == ["q1"]


def test_invalid_definition_collects_all_problems(engine):
    with pytest.raises(errors.InvalidDefinition) as exc:
        engine.create_campaign("designer-1", {"questions": []})
    message = str(exc.value)
    for needle in ("title", "open_at", "close_at", "questions"):
        assert needle in message


def test_visibility_matches_tag_intersection(engine):
    now = T0 + timedelta(hours=1)
    for i, tags in enumerate([{"a"}, {"b"}, {"a", "b"}, {"c"}]):
        doc = definition(campaign_id=f"c{i}", tags=sorted(tags))
        engine.create_campaign("designer-1", doc, now=T0 - timedelta(hours=1))
        engine.open_campaign(f"c{i}", "designer-1", now=T0)
    engine.subscribe("v", {"b", "c"}, now=T0)
    visible = {c.campaign_id for c in engine.visible_campaigns("v", now)}
    assert visible == {"c1", "c2", "c3"}
    with pytest.raises(errors.UnknownVoter):
        engine.visible_campaigns("ghost", now)


def test_feed_cursor_advances(open_campaign):
    items, cursor = open_campaign.feed("voter-1", now=VOTE_AT)
    assert [c.campaign_id for c in items] == ["camp"]
    items, _ = open_campaign.feed("voter-1", now=VOTE_AT, cursor=cursor)
    assert items == []


def test_randomized_method_order_is_stable_per_voter(engine):
    doc = definition(
        methods=(MethodId.MV, MethodId.CAV, MethodId.SV, MethodId.MBC),
        method_order_policy="randomized_per_voter",
        seed=5,
    )
    engine.create_campaign("designer-1", doc, now=T0)
    orders = {v: engine.assign_method_order(v, "camp") for v in ("a", "b", "c", "d", "e")}
    for v, order in orders.items():
        assert engine.assign_method_order(v, "camp") == order
    assert len({tuple(o) for o in orders.values()}) > 1


def test_replay_reproduces_state_hash(open_campaign):
    submit(open_campaign)
    submit(open_campaign, choice="o2", at=VOTE_AT + timedelta(minutes=2))
    open_campaign.scheduler_tick(AFTER_CLOSE)
    open_campaign.release_results("camp", "designer-1", now=AFTER_CLOSE)
    open_campaign.submit_feedback("voter-1", "camp", "q1", 5, now=AFTER_CLOSE)
    replayed = Engine(open_campaign.store)
    assert replayed.state_hash() == open_campaign.state_hash()
    assert replayed.campaigns["camp"].frozen_results["q1"][0].aggregates == (
        Fraction(0),
        Fraction(1),
        Fraction(0),
    )
