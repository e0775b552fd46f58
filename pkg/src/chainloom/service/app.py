"""FastAPI application: node catalog, template store, runs, images, chat."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Response
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from ..backends import (
    BackendConfig,
    BackendSet,
    GeneratedImage,
    http_backends,
    mock_backends,
)
from ..engine import run_graph, run_single_node
from ..errors import (
    BackendError,
    CycleError,
    EmptyPrompt,
    MissingDependency,
    OverrideTargetError,
    SchemaError,
    TypeMismatch,
    UnknownNode,
    ValidationFailed,
)
from ..model import ImageRef, NodeOutput, TextOutput
from ..model import (
    DEFAULT_MAX_OUTPUT_TOKENS,
    DEFAULT_TEMPERATURE,
    INPUT_HANDLES,
    OUTPUT_HANDLES,
    NodeKind,
)
from ..render import render_output, render_run_result
from ..template_io import parse_template, template_to_dict
from .chat import ChatManager
from .schemas import ChatPostRequest, RunNodeRequest, RunRequest
from .store import ImageStore, TemplateStore

NODE_DESCRIPTIONS = {
    NodeKind.TEXT_INPUT: "Placeholder for user text; its output is a copy of its body.",
    NodeKind.PROMPT: "Sends its body (plus any connected input) to the text model.",
    NodeKind.PROMPT_WITH_CONTEXT: "Like prompt, with a separate context input framed above the prompt.",
    NodeKind.VISUALISE: "Generates an image from the incoming prompt text.",
}

DEFAULT_EXAMPLE_QUERIES = [
    "Describe a protagonist for a mystery set in a small-town library.",
    "Suggest three plot twists for my current draft.",
    "/image a red fox in a moonlit forest, digital painting",
]


@dataclass
class ServiceConfig:
    storage_dir: Path
    port: int = 8080
    backend: BackendConfig = field(default_factory=BackendConfig)
    backend_kind: str = "mock"  # "mock" | "http"
    example_queries: list[str] = field(default_factory=lambda: list(DEFAULT_EXAMPLE_QUERIES))
    ui_dir: Optional[Path] = None


def _error(status: int, code: str, message: str, details: list | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, "details": details or []}},
    )


class _StoringImageGenerator:
    """Wraps an image backend so every generated image lands in the store."""

    def __init__(self, inner, store: ImageStore):
        self.inner = inner
        self.store = store

    def generate_image(self, prompt, params) -> GeneratedImage:
        image = self.inner.generate_image(prompt, params)
        self.store.put(image.image_id, image.data, image.media_type)
        return image


def _parse_cached(cached: dict[str, dict]) -> dict[str, NodeOutput]:
    outputs: dict[str, NodeOutput] = {}
    for node_id, doc in cached.items():
        if doc.get("type") == "image":
            outputs[node_id] = ImageRef(doc["image_id"], doc.get("media_type", "image/png"))
        else:
            outputs[node_id] = TextOutput(doc.get("content", ""))
    return outputs


def create_app(config: ServiceConfig, backends: BackendSet | None = None) -> FastAPI:
    app = FastAPI(title="chainloom", version="0.1.0")

    storage = Path(config.storage_dir)
    templates = TemplateStore(storage / "templates")
    images = ImageStore(storage / "images")

    if backends is None:
        backends = (http_backends(config.backend)
                    if config.backend_kind == "http" else mock_backends())
    run_backends = BackendSet(
        text=backends.text,
        image=_StoringImageGenerator(backends.image, images),
    )
    chat = ChatManager(
        backends,
        image_sink=lambda img: images.put(img.image_id, img.data, img.media_type),
    )
    app.state.backends = run_backends
    app.state.templates = templates
    app.state.images = images
    app.state.chat = chat

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/nodes")
    def list_node_kinds():
        catalog = []
        for kind in NodeKind:  # declaration order is the stable catalog order
            entry = {
                "kind": kind.value,
                "description": NODE_DESCRIPTIONS[kind],
                "inputs": list(INPUT_HANDLES[kind]),
                "outputs": list(OUTPUT_HANDLES[kind]),
            }
            if kind is not NodeKind.TEXT_INPUT:
                entry["default_params"] = {
                    "temperature": DEFAULT_TEMPERATURE,
                    "max_tokens": DEFAULT_MAX_OUTPUT_TOKENS,
                }
            catalog.append(entry)
        return catalog

    @app.post("/api/templates", status_code=201)
    def save_template(body: dict):
        import json as _json
        try:
            template = parse_template(_json.dumps(body))
        except SchemaError as exc:
            return _error(400, "schema_error", str(exc), [exc.path])
        try:
            record = templates.save(template)
        except OSError as exc:
            return _error(500, "storage_error", str(exc))
        return {
            "template_id": record.template_id,
            "name": template.name,
            "created_at": record.created_at,
            "updated_at": record.updated_at,
        }

    @app.get("/api/templates")
    def list_templates():
        return {
            "templates": [
                {
                    "template_id": r.template_id,
                    "name": r.template.name,
                    "created_at": r.created_at,
                    "updated_at": r.updated_at,
                }
                for r in templates.list()
            ]
        }

    @app.get("/api/templates/{template_id}")
    def get_template(template_id: str):
        record = templates.get(template_id)
        if record is None:
            return _error(404, "not_found", f"unknown template: {template_id!r}")
        return {
            "template_id": record.template_id,
            "name": record.template.name,
            "created_at": record.created_at,
            "updated_at": record.updated_at,
            "template": template_to_dict(record.template),
        }

    def _resolve_template(template_id, inline):
        import json as _json
        if inline is not None:
            return parse_template(_json.dumps(inline)), None
        if template_id is None:
            return None, _error(400, "schema_error",
                                "either template_id or template is required")
        record = templates.get(template_id)
        if record is None:
            return None, _error(404, "not_found",
                                f"unknown template: {template_id!r}")
        return record.template, None

    @app.post("/api/run")
    def run_template(body: RunRequest):
        try:
            template, err = _resolve_template(body.template_id, body.template)
        except SchemaError as exc:
            return _error(400, "schema_error", str(exc), [exc.path])
        if err is not None:
            return err
        try:
            result = run_graph(template, run_backends, body.overrides)
        except CycleError as exc:
            return _error(422, "cycle_error", str(exc), sorted(exc.nodes))
        except ValidationFailed as exc:
            return _error(422, "schema_error", str(exc),
                          [v.message for v in exc.violations])
        except OverrideTargetError as exc:
            return _error(400, "override_target_error", str(exc))
        except BackendError as exc:
            return _error(502, "backend_error", str(exc))
        return render_run_result(result)

    @app.post("/api/run-node")
    def run_node(body: RunNodeRequest):
        try:
            template, err = _resolve_template(body.template_id, body.template)
        except SchemaError as exc:
            return _error(400, "schema_error", str(exc), [exc.path])
        if err is not None:
            return err
        try:
            output = run_single_node(
                template, body.node_id, _parse_cached(body.cached), run_backends)
        except UnknownNode as exc:
            return _error(404, "not_found", str(exc))
        except MissingDependency as exc:
            return _error(409, "missing_dependency", str(exc), exc.missing)
        except TypeMismatch as exc:
            return _error(422, "type_mismatch", str(exc))
        except (BackendError, EmptyPrompt) as exc:
            return _error(502, "backend_error", str(exc))
        return render_output(output)

    @app.post("/api/chat/{session_id}")
    def chat_post(session_id: str, body: ChatPostRequest):
        if not body.message:
            return _error(400, "schema_error", "message must be non-empty")
        try:
            reply = chat.post(session_id, body.message)
        except EmptyPrompt as exc:
            return _error(400, "schema_error", str(exc))
        except BackendError as exc:
            return _error(502, "backend_error", str(exc))
        return {"session_id": session_id, "turn": reply.to_dict()}

    @app.get("/api/chat/{session_id}")
    def chat_get(session_id: str):
        session = chat.get(session_id)
        if session is None:
            return _error(404, "not_found", f"unknown session: {session_id!r}")
        return {
            "session_id": session_id,
            "created_at": session.created_at,
            "turns": [t.to_dict() for t in session.turns],
            "example_queries": config.example_queries,
        }

    @app.get("/api/chat-examples")
    def chat_examples():
        return {"example_queries": config.example_queries}

    @app.get("/api/images/{image_id}")
    def get_image(image_id: str):
        stored = images.get(image_id)
        if stored is None:
            return _error(404, "not_found", f"unknown image: {image_id!r}")
        data, media_type = stored
        return Response(content=data, media_type=media_type)

    ui_dir = config.ui_dir
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<!doctype html><title>chainloom</title>"
                "<h1>chainloom service</h1>"
                "<p>No UI bundle configured; the API lives under <code>/api</code>.</p>"
            )

    return app
