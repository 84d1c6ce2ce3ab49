"""Command line front door.

Two transports behind one set of commands: by default the CLI opens the
event store directly (embedded mode, full operator access, no login); with
--api-url it talks to a running server over HTTP and needs a session token.
Output is identical either way so scripts do not care which transport ran.

Exit codes: 0 success, 2 input/validation problem, 3 state conflict
(wrong lifecycle phase, non-empty store, results not ready), 1 anything else.
"""

from __future__ import annotations

import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import click

from . import errors, export, seeding
from .config import Config
from .engine import Engine, utcnow
from .eventlog import open_store
from .serialize import parse_dt, report_to_doc, tally_to_doc

VALIDATION_CODES = {
    "ValidationFailed",
    "InvalidDefinition",
    "RatingOutOfRange",
    "EmptyTagSet",
    "ClockSkew",
    "RankOutOfRange",
}
CONFLICT_CODES = {
    "CampaignNotOpen",
    "CampaignFinalized",
    "CampaignDraft",
    "ResultsNotReady",
    "ResultsNotReleased",
    "StoreNotEmpty",
    "DuplicateMethod",
    "MixedQuestions",
}


class Context:
    def __init__(self, store: str | None, api_url: str | None, token: str | None, fmt: str):
        self.store = store
        self.api_url = api_url.rstrip("/") if api_url else None
        self.token = token
        self.fmt = fmt
        self._engine: Engine | None = None

    @property
    def engine(self) -> Engine:
        if self._engine is None:
            self._engine = Engine(open_store(self.store))
        return self._engine

    def http(self):
        import httpx

        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        return httpx.Client(base_url=self.api_url, headers=headers, timeout=30.0)


def fail(code: str, message: str) -> None:
    click.echo(f"error: {code}: {message}", err=True)
    if code in VALIDATION_CODES:
        sys.exit(2)
    if code in CONFLICT_CODES:
        sys.exit(3)
    sys.exit(1)


def run_guarded(fn):
    try:
        return fn()
    except errors.VotebenchError as exc:
        fail(exc.code, exc.message)
    except ValueError as exc:
        fail("ValidationFailed", str(exc))


def api_call(ctx: Context, method: str, path: str, **kwargs) -> dict | list | str:
    with ctx.http() as client:
        resp = client.request(method, path, **kwargs)
    if resp.status_code >= 400:
        try:
            doc = resp.json()
            fail(doc.get("code", "HTTPError"), doc.get("message", resp.text))
        except ValueError:
            fail("HTTPError", f"{resp.status_code}: {resp.text[:200]}")
    ctype = resp.headers.get("content-type", "")
    return resp.json() if "json" in ctype else resp.text


@click.group()
@click.option("--store", default=None, help="Event store: file path, DSN, or :memory:")
@click.option("--api-url", default=None, help="Talk to a running server instead of the local store")
@click.option("--token", default=None, envvar="VOTEBENCH_TOKEN", help="Session token for --api-url")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.pass_context
def main(ctx, store, api_url, token, fmt):
    """Experimentation platform for online collective decision making."""
    if store is None and api_url is None:
        store = Config().store
    ctx.obj = Context(store, api_url, token, fmt)


# --------------------------------------------------------------------- seed


@main.group()
def seed():
    """Load a built-in fixture into the store."""


@seed.command("covid-fixture")
@click.option("--seed", "seed_value", type=int, default=0, show_default=True)
@click.pass_obj
def seed_covid(ctx: Context, seed_value: int):
    """Seed the four-question demonstration study (120 synthetic voters)."""
    if ctx.api_url:
        doc = api_call(ctx, "POST", "/v1/admin/seed", params={"seed": seed_value})
        click.echo(json.dumps({"campaign_id": doc["campaign_id"], "status": doc["status"]}))
        return
    campaign_id = run_guarded(lambda: seeding.seed_covid_fixture(ctx.engine, seed=seed_value))
    campaign = ctx.engine.campaigns[campaign_id]
    click.echo(json.dumps({"campaign_id": campaign_id, "status": campaign.status}))


# -------------------------------------------------------------------- tally


@main.command()
@click.option("--now", "run_now", is_flag=True, help="Run one scheduler pass and exit")
@click.option("--watch", is_flag=True, help="Keep running scheduler passes")
@click.option("--period", type=float, default=10.0, show_default=True)
@click.option("--at", "at_time", default=None, hidden=True, help="Override the clock (ISO-8601)")
@click.pass_obj
def tally(ctx: Context, run_now: bool, watch: bool, period: float, at_time: str | None):
    """Close campaigns past their deadline and freeze their results."""
    if not run_now and not watch:
        raise click.UsageError("pass --now for one pass or --watch to keep running")
    if ctx.api_url:
        doc = api_call(ctx, "POST", "/v1/admin/tick")
        click.echo(json.dumps(doc))
        return
    when = parse_dt(at_time) if at_time else None
    while True:
        tallied = run_guarded(lambda: ctx.engine.scheduler_tick(when or utcnow()))
        if run_now:
            click.echo(json.dumps({"tallied": tallied}))
            return
        if tallied:
            click.echo(json.dumps({"tallied": tallied, "at": utcnow().isoformat()}))
        time.sleep(period)


# ------------------------------------------------------------------ results


def _results_doc(engine: Engine, campaign_id: str, interim: bool) -> dict:
    campaign = engine._campaign(campaign_id)
    if interim:
        results, reports = engine._compute_tallies(campaign, interim=True)
    else:
        if campaign.status != "tallied":
            raise errors.ResultsNotReady(f"campaign is {campaign.status}")
        results, reports = campaign.frozen_results, campaign.frozen_consistency
    return {
        "results": {qid: [tally_to_doc(t) for t in ts] for qid, ts in results.items()},
        "consistency": {qid: report_to_doc(r) for qid, r in reports.items()},
        "interim": interim,
    }


@main.command()
@click.argument("campaign_id")
@click.option("--interim", is_flag=True, help="Fresh snapshot instead of the frozen tally")
@click.pass_obj
def results(ctx: Context, campaign_id: str, interim: bool):
    """Print tallied results and cross-method consistency for a campaign."""
    if ctx.api_url:
        doc = api_call(ctx, "GET", f"/v1/campaigns/{campaign_id}/results", params={"interim": interim})
    else:
        doc = run_guarded(lambda: _results_doc(ctx.engine, campaign_id, interim))
    if ctx.fmt == "csv":
        engine = ctx.engine if not ctx.api_url else None
        if engine is None:
            fail("ValidationFailed", "csv results output needs embedded mode; use export over the API")
        body = run_guarded(
            lambda: export.export_dataset(engine, campaign_id, "results", "csv", allow_interim=interim)
        )
        click.echo(body, nl=False)
    else:
        click.echo(json.dumps(doc, indent=2))


@main.command()
@click.argument("campaign_id")
@click.pass_obj
def show(ctx: Context, campaign_id: str):
    """Print a campaign's definition document."""
    if ctx.api_url:
        doc = api_call(ctx, "GET", f"/v1/campaigns/{campaign_id}")
    else:
        doc = run_guarded(lambda: ctx.engine._campaign(campaign_id).definition_doc())
    click.echo(json.dumps(doc, indent=2))


# ------------------------------------------------------------------- export


@main.command("export")
@click.argument("campaign_id")
@click.argument("kind", type=click.Choice(export.EXPORT_KINDS))
@click.option("-o", "--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--interim", is_flag=True, help="Allow exporting before the final tally")
@click.pass_obj
def export_cmd(ctx: Context, campaign_id: str, kind: str, out_dir: str | None, interim: bool):
    """Write one dataset (ballots, traces, results, feedback, consistency)."""
    if ctx.api_url:
        body = api_call(
            ctx,
            "GET",
            f"/v1/campaigns/{campaign_id}/export/{kind}",
            params={"format": ctx.fmt},
        )
        if not isinstance(body, str):
            body = json.dumps(body, indent=2)
    else:
        body = run_guarded(
            lambda: export.export_dataset(ctx.engine, campaign_id, kind, ctx.fmt, allow_interim=interim)
        )
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        target = path / f"{campaign_id}-{kind}.{export.file_extension(ctx.fmt)}"
        target.write_text(body)
        click.echo(str(target))
    else:
        click.echo(body, nl=False)


# ------------------------------------------------------------------- report


@main.group()
def report():
    """Analysis reports."""


@report.command("consistency")
@click.argument("campaign_id")
@click.option("--interim", is_flag=True)
@click.pass_obj
def report_consistency(ctx: Context, campaign_id: str, interim: bool):
    """Per-rank agreement across methods, one line per (question, rank)."""
    if ctx.api_url:
        body = api_call(
            ctx,
            "GET",
            f"/v1/campaigns/{campaign_id}/export/consistency",
            params={"format": ctx.fmt},
        )
        if not isinstance(body, str):
            body = json.dumps(body, indent=2)
    else:
        body = run_guarded(
            lambda: export.export_dataset(
                ctx.engine, campaign_id, "consistency", ctx.fmt, allow_interim=interim
            )
        )
    click.echo(body, nl=False)


# ------------------------------------------------------------------ serve


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.pass_obj
def serve(ctx: Context, config_path: str | None, host: str | None, port: int | None):
    """Run the HTTP server."""
    import uvicorn

    from .api import create_app

    config = Config.load(config_path)
    if ctx.store is not None:
        config.store = ctx.store
    if host:
        config.bind_host = host
    if port:
        config.bind_port = port
    uvicorn.run(create_app(config), host=config.bind_host, port=config.bind_port)


# ------------------------------------------------------------------- verify


@main.command()
@click.pass_obj
def verify(ctx: Context):
    """Replay the event log and print the resulting state hash."""
    if ctx.api_url:
        fail("ValidationFailed", "verify needs direct store access")
    engine = run_guarded(lambda: ctx.engine)
    click.echo(
        json.dumps({"events": engine.store.last_seq, "state_hash": engine.state_hash()})
    )


if __name__ == "__main__":
    main()
