"""HTTP facade over the engine, identity service, and exports.

Thin adapters only: every route checks the session and role, then delegates
to an engine or identity operation; no business logic lives here. Domain
errors map one-to-one onto problem documents {code, message, field?} with
conventional status classes (401/403 auth, 404 absent, 409 state conflicts,
422 validation).
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
from datetime import timedelta

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import errors, export, seeding
from .config import Config
from .engine import Campaign, ChoiceTrace, Engine
from .eventlog import open_store
from .identity import FileMailSink, IdentityService, MailTransport, SessionToken
from .methods import MethodId, builtin_specs
from .serialize import (
    dt_str,
    parse_dt,
    raw_ballot_from_doc,
    report_to_doc,
    spec_to_doc,
    tally_to_doc,
)

logger = logging.getLogger(__name__)

STATUS_BY_CODE = {
    "ValidationFailed": 422,
    "InvalidDefinition": 422,
    "RatingOutOfRange": 422,
    "EmptyTagSet": 422,
    "ClockSkew": 422,
    "RankOutOfRange": 422,
    "VerificationFailed": 401,
    "SessionExpired": 401,
    "NotAuthorized": 403,
    "NotVisibleToVoter": 403,
    "UnknownCampaign": 404,
    "UnknownQuestion": 404,
    "UnknownVoter": 404,
    "CampaignNotOpen": 409,
    "CampaignFinalized": 409,
    "CampaignDraft": 409,
    "ResultsNotReady": 409,
    "ResultsNotReleased": 409,
    "StoreNotEmpty": 409,
    "DuplicateMethod": 409,
    "MixedQuestions": 409,
    "StorageFull": 507,
    "CorruptEvent": 500,
}


class RegisterBody(BaseModel):
    email: str
    role: str


class LoginBody(BaseModel):
    email: str


class VerifyBody(BaseModel):
    email: str
    code: str


class TagsBody(BaseModel):
    tags: list[str]


class BallotBody(BaseModel):
    ballot: dict
    trace: dict


class FeedbackBody(BaseModel):
    question_id: str
    rating: int
    text: str | None = None


def campaign_view(c: Campaign) -> dict:
    doc = c.definition_doc()
    doc["status"] = c.status
    doc["released"] = c.released
    doc["tallied_at"] = None if c.tallied_at is None else dt_str(c.tallied_at)
    return doc


def results_view(results, reports) -> dict:
    return {
        "results": {qid: [tally_to_doc(t) for t in ts] for qid, ts in results.items()},
        "consistency": {qid: report_to_doc(r) for qid, r in reports.items()},
    }


def create_app(
    config: Config | None = None,
    engine: Engine | None = None,
    identity: IdentityService | None = None,
    mail: MailTransport | None = None,
    run_scheduler: bool = True,
) -> FastAPI:
    config = config or Config()
    if engine is None:
        engine = Engine(
            open_store(config.store),
            max_clock_skew=timedelta(seconds=config.max_clock_skew_seconds),
        )
    if identity is None:
        identity = IdentityService(
            mail or FileMailSink(config.mail_file),
            path=config.identity_path,
            session_ttl=timedelta(hours=config.session_ttl_hours),
        )

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = None
        if run_scheduler:
            async def ticker():
                while True:
                    await asyncio.sleep(config.scheduler_period_seconds)
                    try:
                        engine.scheduler_tick()
                    except Exception:
                        logger.exception("scheduler tick failed")

            task = asyncio.ensure_future(ticker())
        yield
        if task:
            task.cancel()

    app = FastAPI(title="votebench", version="1", lifespan=lifespan)
    app.state.engine = engine
    app.state.identity = identity
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[config.cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(errors.VotebenchError)
    async def domain_error(request: Request, exc: errors.VotebenchError):
        doc = exc.to_problem()
        if isinstance(exc, errors.ValidationFailed):
            doc["violations"] = [v.to_dict() for v in exc.violations]
        return JSONResponse(status_code=STATUS_BY_CODE.get(exc.code, 500), content=doc)

    def session(authorization: str = Header(default="")) -> SessionToken:
        if not authorization.startswith("Bearer "):
            raise errors.NotAuthorized("missing bearer token")
        return identity.authenticate(authorization.removeprefix("Bearer "))

    def designer(auth: SessionToken = Depends(session)) -> SessionToken:
        if auth.role != "designer":
            raise errors.NotAuthorized("designer role required")
        return auth

    def voter(auth: SessionToken = Depends(session)) -> SessionToken:
        if auth.role != "voter":
            raise errors.NotAuthorized("voter role required")
        return auth

    def own_campaign(campaign_id: str, auth: SessionToken) -> Campaign:
        campaign = engine._campaign(campaign_id)
        if campaign.designer_id != auth.principal:
            raise errors.NotAuthorized("not your campaign")
        return campaign

    # ---------------------------------------------------------------- auth

    @app.post("/v1/auth/register", status_code=202)
    async def register(body: RegisterBody):
        identity.register(body.email, body.role)
        return {"status": "code sent"}

    @app.post("/v1/auth/login", status_code=202)
    async def login(body: LoginBody):
        identity.request_login_code(body.email)
        return {"status": "code sent"}

    @app.post("/v1/auth/verify")
    async def verify(body: VerifyBody):
        token = identity.verify(body.email, body.code)
        return {
            "token": token.token,
            "role": token.role,
            "principal": token.principal,
            "expires_at": dt_str(token.expires_at),
        }

    # ------------------------------------------------------------- catalog

    @app.get("/v1/methods")
    async def method_catalog():
        return {m.value: spec_to_doc(s) for m, s in builtin_specs().items()}

    # ------------------------------------------------------------ designer

    @app.post("/v1/campaigns", status_code=201)
    async def create_campaign(definition: dict, auth: SessionToken = Depends(designer)):
        campaign = engine.create_campaign(auth.principal, definition)
        return campaign_view(campaign)

    @app.get("/v1/campaigns")
    async def list_campaigns(auth: SessionToken = Depends(designer)):
        return [
            campaign_view(c)
            for c in sorted(engine.campaigns.values(), key=lambda c: c.campaign_id)
            if c.designer_id == auth.principal
        ]

    @app.get("/v1/campaigns/{campaign_id}")
    async def get_campaign(campaign_id: str, auth: SessionToken = Depends(session)):
        campaign = engine._campaign(campaign_id)
        if auth.role == "designer" and campaign.designer_id == auth.principal:
            return campaign_view(campaign)
        if not (engine.subscriptions.get(auth.principal, set()) & campaign.tags):
            raise errors.NotVisibleToVoter("campaign is not visible to you")
        return campaign_view(campaign)

    @app.patch("/v1/campaigns/{campaign_id}")
    async def update_campaign(campaign_id: str, patch: dict, auth: SessionToken = Depends(designer)):
        campaign = engine.update_campaign(campaign_id, auth.principal, patch)
        return campaign_view(campaign)

    @app.post("/v1/campaigns/{campaign_id}/tags")
    async def assign_tags(campaign_id: str, body: TagsBody, auth: SessionToken = Depends(designer)):
        own_campaign(campaign_id, auth)
        campaign = engine.assign_tags(campaign_id, set(body.tags))
        return campaign_view(campaign)

    @app.post("/v1/campaigns/{campaign_id}/open")
    async def open_campaign(campaign_id: str, auth: SessionToken = Depends(designer)):
        return campaign_view(engine.open_campaign(campaign_id, auth.principal))

    @app.post("/v1/campaigns/{campaign_id}/clone", status_code=201)
    async def clone_campaign(
        campaign_id: str, overrides: dict | None = None, auth: SessionToken = Depends(designer)
    ):
        return campaign_view(engine.clone_campaign(campaign_id, auth.principal, overrides))

    @app.post("/v1/campaigns/{campaign_id}/release")
    async def release_results(campaign_id: str, auth: SessionToken = Depends(designer)):
        return campaign_view(engine.release_results(campaign_id, auth.principal))

    @app.get("/v1/campaigns/{campaign_id}/export/{kind}")
    async def export_campaign(
        campaign_id: str,
        kind: str,
        format: str = Query(default="csv"),
        auth: SessionToken = Depends(designer),
    ):
        own_campaign(campaign_id, auth)
        body = export.export_dataset(engine, campaign_id, kind, format, allow_interim=True)
        media = "application/json" if format == "json" else "text/csv"
        return PlainTextResponse(body, media_type=media)

    @app.post("/v1/admin/tick")
    async def tick(auth: SessionToken = Depends(designer)):
        return {"tallied": engine.scheduler_tick()}

    @app.post("/v1/admin/seed")
    async def seed(seed: int = 0, auth: SessionToken = Depends(designer)):
        # the caller becomes the fixture's designer so they can release,
        # export, and re-run it over the API afterwards
        campaign_id = seeding.seed_covid_fixture(engine, seed=seed, designer_id=auth.principal)
        return campaign_view(engine.campaigns[campaign_id])

    # --------------------------------------------------------------- voter

    @app.post("/v1/subscriptions")
    async def subscribe(body: TagsBody, auth: SessionToken = Depends(voter)):
        return {"tags": sorted(engine.subscribe(auth.principal, set(body.tags)))}

    @app.get("/v1/subscriptions")
    async def get_subscriptions(auth: SessionToken = Depends(voter)):
        return {"tags": sorted(engine.subscriptions.get(auth.principal, set()))}

    @app.get("/v1/feed")
    async def feed(cursor: int = 0, limit: int = 50, auth: SessionToken = Depends(voter)):
        items, next_cursor = engine.feed(auth.principal, cursor=cursor)
        return {
            "campaigns": [campaign_view(c) for c in items[:limit]],
            "next_cursor": next_cursor,
        }

    @app.get("/v1/campaigns/{campaign_id}/order")
    async def method_order(campaign_id: str, auth: SessionToken = Depends(voter)):
        return {"order": [m.value for m in engine.assign_method_order(auth.principal, campaign_id)]}

    @app.get("/v1/campaigns/{campaign_id}/ballot/{question_id}/{method_id}")
    async def get_ballot(
        campaign_id: str, question_id: str, method_id: str, auth: SessionToken = Depends(voter)
    ):
        campaign = engine._campaign(campaign_id)
        if not (engine.subscriptions.get(auth.principal, set()) & campaign.tags):
            raise errors.NotVisibleToVoter("campaign is not visible to you")
        question = campaign.question(question_id)
        try:
            spec = question.method_spec(MethodId(method_id))
        except (KeyError, ValueError) as exc:
            raise errors.UnknownQuestion(str(exc)) from exc
        record = campaign.ballots.get((auth.principal, question_id, method_id))
        return {
            "spec": spec_to_doc(spec),
            "revision_count": 0 if record is None else len(record.revisions),
            "current": None if record is None else record.current.to_doc(),
        }

    @app.post("/v1/campaigns/{campaign_id}/ballot/{question_id}/{method_id}", status_code=201)
    async def submit_ballot(
        campaign_id: str,
        question_id: str,
        method_id: str,
        body: BallotBody,
        idempotency_key: str | None = Header(default=None),
        auth: SessionToken = Depends(voter),
    ):
        trace_doc = dict(body.trace)
        try:
            mid = MethodId(method_id)
        except ValueError as exc:
            raise errors.UnknownQuestion(str(exc)) from exc
        record = engine.submit_ballot(
            auth.principal,
            campaign_id,
            question_id,
            mid,
            raw_ballot_from_doc(body.ballot),
            ChoiceTrace(
                ballot_opened_at=parse_dt(trace_doc["ballot_opened_at"]),
                first_interaction_at=parse_dt(trace_doc["first_interaction_at"]),
                submitted_at=parse_dt(trace_doc["submitted_at"]),
                in_form_changes=int(trace_doc.get("in_form_changes", 0)),
            ),
            idempotency_key=idempotency_key,
        )
        return {
            "ballot_id": record.ballot_id,
            "revision_index": len(record.revisions) - 1,
            "change_count": record.change_count,
        }

    @app.get("/v1/campaigns/{campaign_id}/results")
    async def get_results(
        campaign_id: str, interim: bool = False, auth: SessionToken = Depends(session)
    ):
        if interim:
            results, reports = engine.on_demand_results(campaign_id, auth.principal)
            view = results_view(results, reports)
            view["interim"] = True
            return view
        results, reports = engine.get_results(auth.principal, campaign_id)
        view = results_view(results, reports)
        view["interim"] = False
        return view

    @app.post("/v1/campaigns/{campaign_id}/feedback", status_code=201)
    async def submit_feedback(
        campaign_id: str, body: FeedbackBody, auth: SessionToken = Depends(voter)
    ):
        record = engine.submit_feedback(
            auth.principal, campaign_id, body.question_id, body.rating, body.text
        )
        return record.to_doc()

    return app


def main() -> None:  # uvicorn entry point for deployments
    import uvicorn

    config = Config.load()
    uvicorn.run(create_app(config), host=config.bind_host, port=config.bind_port)


if __name__ == "__main__":
    main()
