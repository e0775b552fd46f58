import copy
import json
import random

import pytest
from fastapi.testclient import TestClient

from chainloom.backends import BackendSet, MockImageGenerator, MockTextGenerator
from chainloom.model import GenerationParams
from chainloom.service import ServiceConfig, create_app
from chainloom.template_io import parse_template, serialize_template, template_to_dict

from helpers import random_template, reference_fnv1a_64_hex


class RecordingTextBackend:
    """Mock text backend that also records every (prompt, params) request."""

    def __init__(self):
        self.requests = []
        self.inner = MockTextGenerator()

    def generate_text(self, prompt, params):
        self.requests.append((prompt, params))
        return self.inner.generate_text(prompt, params)


@pytest.fixture()
def recording():
    return RecordingTextBackend()


@pytest.fixture()
def client(tmp_path, recording):
    config = ServiceConfig(storage_dir=tmp_path)
    backends = BackendSet(text=recording, image=MockImageGenerator())
    app = create_app(config, backends=backends)
    return TestClient(app)


@pytest.fixture()
def fig1_doc(fig1_text):
    return json.loads(fig1_text)


def test_health(client):
    assert client.get("/api/health").json() == {"status": "ok"}


def test_node_catalog(client):
    catalog = client.get("/api/nodes").json()
    assert [e["kind"] for e in catalog] == [
        "text_input", "prompt", "prompt_with_context", "visualise"]
    by_kind = {e["kind"]: e for e in catalog}
    assert by_kind["visualise"]["inputs"] == ["prompt"]
    assert by_kind["visualise"]["outputs"] == ["image"]
    assert by_kind["prompt_with_context"]["inputs"] == ["input", "context"]
    assert by_kind["text_input"]["outputs"] == ["output"]
    assert "default_params" not in by_kind["text_input"]
    assert by_kind["prompt"]["default_params"] == {"temperature": 0.7, "max_tokens": 256}


# --- templates -------------------------------------------------------------

def test_save_and_get_template(client, fig1_doc, fig1):
    response = client.post("/api/templates", json=fig1_doc)
    assert response.status_code == 201
    template_id = response.json()["template_id"]

    got = client.get(f"/api/templates/{template_id}")
    assert got.status_code == 200
    assert got.json()["template"] == template_to_dict(fig1)


def test_save_draft_with_cycle_allowed(client):
    doc = {"version": 1, "name": "draft",
           "nodes": [{"id": "a", "kind": "prompt"}, {"id": "b", "kind": "prompt"}],
           "edges": [
               {"id": "e1", "source": "a", "source_handle": "output",
                "target": "b", "target_handle": "input"},
               {"id": "e2", "source": "b", "source_handle": "output",
                "target": "a", "target_handle": "input"}]}
    assert client.post("/api/templates", json=doc).status_code == 201


def test_save_empty_template(client):
    doc = {"version": 1, "name": "empty", "nodes": [], "edges": []}
    assert client.post("/api/templates", json=doc).status_code == 201


def test_save_malformed_kind_names_path(client, fig1_doc):
    doc = copy.deepcopy(fig1_doc)
    doc["nodes"][2]["kind"] = "promt"
    response = client.post("/api/templates", json=doc)
    assert response.status_code == 400
    body = response.json()
    assert body["error"]["code"] == "schema_error"
    assert "$.nodes[2].kind" in body["error"]["message"]


def test_list_templates_order_and_empty(client, fig1_doc):
    assert client.get("/api/templates").json() == {"templates": []}
    first = client.post("/api/templates", json=fig1_doc).json()["template_id"]
    second = client.post(
        "/api/templates",
        json={"version": 1, "name": "later", "nodes": [], "edges": []},
    ).json()["template_id"]
    listed = client.get("/api/templates").json()["templates"]
    assert [r["template_id"] for r in listed] == [second, first]


def test_get_unknown_template(client):
    response = client.get("/api/templates/nope")
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "not_found"


def test_store_round_trip_random(client):
    rng = random.Random(7)
    for _ in range(10):
        t = random_template(rng, rich_text=True)
        doc = json.loads(serialize_template(t))
        template_id = client.post("/api/templates", json=doc).json()["template_id"]
        got = client.get(f"/api/templates/{template_id}").json()["template"]
        assert parse_template(json.dumps(got)) == t


# --- run -------------------------------------------------------------------

def test_run_fig1_inline(client, fig1_doc):
    response = client.post("/api/run", json={"template": fig1_doc})
    assert response.status_code == 200
    body = response.json()
    assert body["order"] == ["n1", "n2", "n3", "n4", "n5", "n6", "n7"]
    kinds = [body["outputs"][n]["type"] for n in body["order"]]
    assert kinds.count("text") == 5
    assert kinds.count("image") == 2
    assert body["errors"] == {}
    image = body["outputs"]["n6"]
    assert image["url"] == f"/api/images/{image['image_id']}"


def test_run_by_template_id_and_unknown(client, fig1_doc):
    template_id = client.post("/api/templates", json=fig1_doc).json()["template_id"]
    assert client.post("/api/run", json={"template_id": template_id}).status_code == 200
    response = client.post("/api/run", json={"template_id": "missing"})
    assert response.status_code == 404


def test_run_cycle_rejected_422(client):
    doc = {"version": 1, "name": "cyc",
           "nodes": [{"id": "a", "kind": "prompt"}, {"id": "b", "kind": "prompt"}],
           "edges": [
               {"id": "e1", "source": "a", "source_handle": "output",
                "target": "b", "target_handle": "input"},
               {"id": "e2", "source": "b", "source_handle": "output",
                "target": "a", "target_handle": "input"}]}
    response = client.post("/api/run", json={"template": doc})
    assert response.status_code == 422
    body = response.json()
    assert body["error"]["code"] == "cycle_error"
    assert set(body["error"]["details"]) == {"a", "b"}


def test_run_override_target_error(client, fig1_doc):
    response = client.post(
        "/api/run", json={"template": fig1_doc, "overrides": {"n2": "x"}})
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "override_target_error"


def test_run_stores_generated_images(client, fig1_doc):
    body = client.post("/api/run", json={"template": fig1_doc}).json()
    image_id = body["outputs"]["n6"]["image_id"]
    response = client.get(f"/api/images/{image_id}")
    assert response.status_code == 200
    assert response.headers["content-type"] == "image/png"
    assert response.content.startswith(b"\x89PNG")


# --- run-node --------------------------------------------------------------

def test_run_node_text_input(client, fig1_doc):
    response = client.post("/api/run-node", json={
        "template": fig1_doc, "node_id": "n1", "cached": {}})
    assert response.status_code == 200
    assert response.json() == {
        "type": "text", "content": fig1_doc["nodes"][0]["body"]}


def test_run_node_missing_dependency(client, fig1_doc):
    response = client.post("/api/run-node", json={
        "template": fig1_doc, "node_id": "n6", "cached": {}})
    assert response.status_code == 409
    body = response.json()
    assert body["error"]["code"] == "missing_dependency"
    assert body["error"]["details"] == ["n4"]


def test_run_node_with_cached(client, fig1_doc, recording):
    response = client.post("/api/run-node", json={
        "template": fig1_doc, "node_id": "n4",
        "cached": {"n2": {"type": "text", "content": "cached description"}}})
    assert response.status_code == 200
    assert response.json()["type"] == "text"
    assert "cached description" in response.json()["content"]
    # exactly one backend call: no other node executed
    assert len(recording.requests) == 1


def test_run_node_unknown(client, fig1_doc):
    response = client.post("/api/run-node", json={
        "template": fig1_doc, "node_id": "ghost"})
    assert response.status_code == 404


# --- chat ------------------------------------------------------------------

def test_chat_first_message(client, recording):
    response = client.post("/api/chat/s1", json={"message": "Hi"})
    assert response.status_code == 200
    turn = response.json()["turn"]
    assert turn["role"] == "assistant"
    assert turn["type"] == "text"
    assert turn["content"].startswith("GEN[t=0.70;n=256]:")
    assert "User: Hi" in turn["content"]
    (prompt, params) = recording.requests[0]
    assert prompt == "User: Hi"
    assert params == GenerationParams()


def test_chat_history_accumulates(client, recording):
    client.post("/api/chat/s2", json={"message": "one"})
    client.post("/api/chat/s2", json={"message": "two"})
    client.post("/api/chat/s2", json={"message": "three"})
    third_prompt = recording.requests[-1][0]
    session = client.get("/api/chat/s2").json()
    assert len(session["turns"]) == 6
    # all 4 prior turns appear verbatim in the third request
    for turn in session["turns"][:4]:
        label = "User" if turn["role"] == "user" else "Assistant"
        assert f"{label}: {turn['content']}" in third_prompt
    assert third_prompt.endswith("User: three")


def test_chat_turns_append_only(client):
    client.post("/api/chat/s3", json={"message": "alpha"})
    before = json.dumps(client.get("/api/chat/s3").json()["turns"][:2])
    client.post("/api/chat/s3", json={"message": "beta"})
    after = client.get("/api/chat/s3").json()["turns"]
    assert len(after) == 4
    assert json.dumps(after[:2]) == before


def test_chat_image_command(client):
    response = client.post("/api/chat/s4", json={"message": "/image a red fox"})
    turn = response.json()["turn"]
    assert turn["type"] == "image"
    assert turn["image_id"] == reference_fnv1a_64_hex("a red fox")
    image = client.get(f"/api/images/{turn['image_id']}")
    assert image.status_code == 200
    assert image.content.startswith(b"\x89PNG")


def test_chat_empty_message_rejected(client):
    response = client.post("/api/chat/s5", json={"message": ""})
    assert response.status_code == 400


def test_chat_unknown_session_404(client):
    assert client.get("/api/chat/never").status_code == 404


def test_chat_example_queries_exposed(client):
    client.post("/api/chat/s6", json={"message": "hey"})
    session = client.get("/api/chat/s6").json()
    assert isinstance(session["example_queries"], list)
    assert session["example_queries"]


# --- images ----------------------------------------------------------------

def test_image_unknown_404(client):
    assert client.get("/api/images/deadbeef").status_code == 404


def test_image_content_addressing_dedupe(client, tmp_path):
    client.post("/api/chat/a", json={"message": "/image same prompt"})
    client.post("/api/chat/b", json={"message": "/image same prompt"})
    image_id = reference_fnv1a_64_hex("same prompt")
    blobs = list((tmp_path / "images").glob("*.bin"))
    assert [b.stem for b in blobs] == [image_id]


def test_index_placeholder(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "chainloom" in response.text
