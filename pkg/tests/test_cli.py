import csv
import io
import json

import pytest
from click.testing import CliRunner

from votebench.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def store(tmp_path):
    return str(tmp_path / "events.log")


def invoke(runner, store, *args):
    return runner.invoke(main, ["--store", store, *args])


@pytest.fixture
def seeded(runner, store):
    result = invoke(runner, store, "seed", "covid-fixture", "--seed", "0")
    assert result.exit_code == 0, result.output
    return store


@pytest.fixture
def tallied(runner, seeded):
    result = invoke(runner, seeded, "tally", "--now")
    assert result.exit_code == 0
    assert json.loads(result.output)["tallied"] == ["covid-study"]
    return seeded


def test_seed_reports_campaign(runner, seeded):
    pass  # the fixture's assertions are the test


def test_seeding_twice_is_a_conflict(runner, seeded):
    result = invoke(runner, seeded, "seed", "covid-fixture")
    assert result.exit_code == 3
    assert "StoreNotEmpty" in result.output


def test_results_json(runner, tallied):
    result = invoke(runner, tallied, "results", "covid-study")
    assert result.exit_code == 0
    doc = json.loads(result.output)
    assert set(doc["results"]) == {"vaccine", "icu", "protection", "lockdown"}
    assert doc["consistency"]["protection"]["mean"] == "1"
    assert doc["interim"] is False


def test_results_before_tally_is_a_conflict(runner, seeded):
    result = invoke(runner, seeded, "results", "covid-study")
    assert result.exit_code == 3
    assert "ResultsNotReady" in result.output


def test_interim_results_work_while_open(runner, seeded):
    result = invoke(runner, seeded, "results", "covid-study", "--interim")
    assert result.exit_code == 0
    assert json.loads(result.output)["interim"] is True


def test_export_to_directory(runner, tallied, tmp_path):
    out = tmp_path / "exports"
    for kind in ("ballots", "traces", "results", "consistency", "feedback"):
        result = runner.invoke(
            main, ["--store", tallied, "--format", "csv", "export", "covid-study", kind, "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO((out / "covid-study-ballots.csv").read_text())))
    assert len(rows) == 120 * 4 * 4
    assert rows[0]["voter_pseudonym"].startswith("synthetic-voter-")


def test_consistency_report_csv(runner, tallied):
    result = runner.invoke(
        main, ["--store", tallied, "--format", "csv", "report", "consistency", "covid-study"]
    )
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(result.output)))
    assert len(rows) == 4 * 5
    protection = [r for r in rows if r["question_id"] == "protection"]
    assert all(r["consistency"] == "1" for r in protection)


def test_verify_prints_stable_hash(runner, tallied):
    first = invoke(runner, tallied, "verify")
    second = invoke(runner, tallied, "verify")
    assert first.exit_code == second.exit_code == 0
    assert json.loads(first.output) == json.loads(second.output)
    assert json.loads(first.output)["events"] > 2000


def test_unknown_campaign_fails(runner, tallied):
    result = invoke(runner, tallied, "results", "ghost")
    assert result.exit_code == 1
    assert "UnknownCampaign" in result.output


def test_seeds_are_byte_identical(runner, tmp_path):
    paths = [str(tmp_path / f"log{i}") for i in (1, 2)]
    for p in paths:
        assert invoke(runner, p, "seed", "covid-fixture", "--seed", "42").exit_code == 0
    a, b = (open(p, "rb").read() for p in paths)
    assert a == b


def test_tally_requires_a_mode(runner, store):
    result = invoke(runner, store, "tally")
    assert result.exit_code != 0
