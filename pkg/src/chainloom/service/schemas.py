"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class NodeKindInfo(BaseModel):
    kind: str
    description: str
    inputs: list[str]
    outputs: list[str]
    default_params: Optional[dict] = None


class TemplateSummary(BaseModel):
    template_id: str
    name: str
    created_at: float
    updated_at: float


class TemplateDetail(TemplateSummary):
    template: dict


class RunRequest(BaseModel):
    template_id: Optional[str] = None
    template: Optional[dict] = None
    overrides: dict[str, str] = Field(default_factory=dict)


class RunNodeRequest(BaseModel):
    template_id: Optional[str] = None
    template: Optional[dict] = None
    node_id: str
    cached: dict[str, dict] = Field(default_factory=dict)


class ChatPostRequest(BaseModel):
    message: str


class ErrorDetail(BaseModel):
    code: str
    message: str
    details: list[Any] = Field(default_factory=list)


class ErrorBody(BaseModel):
    error: ErrorDetail
