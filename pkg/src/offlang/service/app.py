"""FastAPI application wrapping the annotation workflow.

Endpoints:
  POST /session                      create a session
  GET  /session/{id}                 status and progress
  GET  /session/{id}/next?annotator= next unlabeled post for one annotator
  POST /session/{id}/label           submit a label
  GET  /session/{id}/agreement       Jaccard agreement per sub-task
  GET  /session/{id}/export?resolver=[&format=tsv]
  GET  /session/{id}/disagreements   posts the two annotators label differently
"""

from __future__ import annotations

import io

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from ..annotation import (
    RESOLVERS,
    SessionStore,
    agreement,
    disagreements,
    export,
    next_unlabeled,
    progress,
)
from ..corpus import OLID_HEADER, HierLabel, Lexicon, Post
from ..errors import InsufficientDataError, NotFoundError, ValidationError
from .schemas import (
    AgreementResponse,
    DisagreementsResponse,
    ExportResponse,
    LabelPayload,
    NextPostResponse,
    PostPayload,
    SessionCreateRequest,
    SessionInfoResponse,
    SubmitRequest,
    SubmitResponse,
)


def _post_payload(post: Post) -> PostPayload:
    return PostPayload(id=post.id, text=post.text, source=post.source)


def _label_payload(label: HierLabel) -> LabelPayload:
    return LabelPayload(a=label.a, b=label.b, c=label.c)


def create_app(store: SessionStore | None = None) -> FastAPI:
    store = store or SessionStore()
    app = FastAPI(title="offlang annotation service")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/session", response_model=SessionInfoResponse, status_code=201)
    def create_session(req: SessionCreateRequest):
        try:
            posts = [Post(p.id, p.text, p.source) for p in req.posts]
            profanity = (
                Lexicon.from_terms(req.profanity_terms) if req.profanity_terms else None
            )
            session = store.create(
                req.session_id,
                posts,
                (req.annotators[0], req.annotators[1]),
                req.guideline_version,
                profanity,
            )
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return _session_info(session)

    def _session_info(session) -> SessionInfoResponse:
        return SessionInfoResponse(
            session_id=session.session_id,
            n_posts=len(session.posts),
            annotators=list(session.annotators),
            guideline_version=session.guideline_version,
            progress=progress(session),
        )

    def _get_session(session_id: str):
        try:
            return store.get(session_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/session/{session_id}", response_model=SessionInfoResponse)
    def session_info(session_id: str):
        return _session_info(_get_session(session_id))

    @app.get("/session/{session_id}/next", response_model=NextPostResponse)
    def next_post(session_id: str, annotator: str = Query(...)):
        session = _get_session(session_id)
        try:
            post = next_unlabeled(session, annotator)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        remaining = sum(
            1 for p in session.posts if (annotator, p.id) not in session.records
        )
        return NextPostResponse(
            post=_post_payload(post) if post else None,
            done=post is None,
            remaining=remaining,
        )

    @app.post("/session/{session_id}/label", response_model=SubmitResponse)
    def submit_label(session_id: str, req: SubmitRequest):
        _get_session(session_id)
        try:
            label = HierLabel(req.label.a, req.label.b, req.label.c)
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        try:
            warnings = store.submit(session_id, req.annotator, req.post_id, label)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return SubmitResponse(stored=True, warnings=warnings)

    @app.get("/session/{session_id}/agreement", response_model=AgreementResponse)
    def session_agreement(session_id: str):
        session = _get_session(session_id)
        try:
            report = agreement(session)
        except InsufficientDataError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return AgreementResponse(**report.as_dict())

    @app.get("/session/{session_id}/export")
    def session_export(
        session_id: str,
        resolver: str = Query(...),
        format: str = Query("json", pattern="^(json|tsv)$"),
    ):
        session = _get_session(session_id)
        if resolver not in RESOLVERS:
            raise HTTPException(status_code=422, detail=f"unknown resolver {resolver!r}")
        try:
            dataset = export(session, resolver)
        except InsufficientDataError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        if format == "tsv":
            buf = io.StringIO()
            buf.write("\t".join(OLID_HEADER) + "\n")
            for post, label in dataset:
                text = post.text.replace("\t", " ").replace("\n", " ").replace("\r", " ")
                buf.write(
                    f"{post.id}\t{text}\t{label.a}\t{label.b or 'NULL'}\t{label.c or 'NULL'}\n"
                )
            return PlainTextResponse(buf.getvalue(), media_type="text/tab-separated-values")
        return ExportResponse(
            name=dataset.name,
            posts=[
                {"post": _post_payload(post), "label": _label_payload(label)}
                for post, label in dataset
            ],
        )

    @app.get("/session/{session_id}/disagreements", response_model=DisagreementsResponse)
    def session_disagreements(session_id: str):
        session = _get_session(session_id)
        items = disagreements(session)
        return DisagreementsResponse(
            disagreements=[
                {
                    "post": _post_payload(d["post"]),
                    "labels": {a: _label_payload(l) for a, l in d["labels"].items()},
                }
                for d in items
            ]
        )

    return app
