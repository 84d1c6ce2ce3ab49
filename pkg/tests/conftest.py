from datetime import datetime, timedelta, timezone

import pytest

from votebench.engine import ChoiceTrace, Engine
from votebench.methods import MethodId, Option, Question, builtin_spec
from votebench.serialize import dt_str

T0 = datetime(2024, 3, 1, 9, 0, 0, tzinfo=timezone.utc)


def make_question(question_id="q1", n=3, methods=(MethodId.MV,)):
    options = tuple(Option(f"o{i}", f"Option {i}") for i in range(1, n + 1))
    specs = tuple(builtin_spec(m) for m in methods)
    return Question(question_id, "pick one", options, specs)


def definition(campaign_id="camp", n=3, methods=(MethodId.MV,), tags=("demo",), days=7, **extra):
    from votebench.serialize import question_to_doc

    doc = {
        "campaign_id": campaign_id,
        "title": "Test campaign",
        "open_at": dt_str(T0),
        "close_at": dt_str(T0 + timedelta(days=days)),
        "tags": list(tags),
        "questions": [question_to_doc(make_question(n=n, methods=methods))],
    }
    doc.update(extra)
    return doc


def trace_at(when):
    return ChoiceTrace(
        ballot_opened_at=when - timedelta(seconds=30),
        first_interaction_at=when - timedelta(seconds=25),
        submitted_at=when,
    )


@pytest.fixture
def engine():
    return Engine()


@pytest.fixture
def open_campaign(engine):
    """An engine with one open MV campaign and one subscribed voter."""
    engine.create_campaign("designer-1", definition(), now=T0 - timedelta(hours=1))
    engine.open_campaign("camp", "designer-1", now=T0)
    engine.subscribe("voter-1", {"demo"}, now=T0)
    return engine
