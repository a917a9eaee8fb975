"""Pydantic request/response models for the annotation service.

Field names mirror the domain types verbatim so clients can map payloads
directly onto the corpus types.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class PostPayload(BaseModel):
    id: str
    text: str
    source: str = "other"


class LabelPayload(BaseModel):
    a: str
    b: str | None = None
    c: str | None = None


class SessionCreateRequest(BaseModel):
    session_id: str
    posts: list[PostPayload]
    annotators: list[str] = Field(min_length=2, max_length=2)
    guideline_version: str = "v1"
    profanity_terms: list[str] | None = None


class SessionInfoResponse(BaseModel):
    session_id: str
    n_posts: int
    annotators: list[str]
    guideline_version: str
    progress: dict[str, int]


class NextPostResponse(BaseModel):
    post: PostPayload | None
    done: bool
    remaining: int


class SubmitRequest(BaseModel):
    annotator: str
    post_id: str
    label: LabelPayload


class SubmitResponse(BaseModel):
    stored: bool
    warnings: list[str]


class AgreementResponse(BaseModel):
    jaccard_a: float
    jaccard_b: float | None
    jaccard_c: float | None
    n_common: dict[str, int]


class LabeledPostPayload(BaseModel):
    post: PostPayload
    label: LabelPayload


class ExportResponse(BaseModel):
    name: str
    posts: list[LabeledPostPayload]


class DisagreementPayload(BaseModel):
    post: PostPayload
    labels: dict[str, LabelPayload]


class DisagreementsResponse(BaseModel):
    disagreements: list[DisagreementPayload]
