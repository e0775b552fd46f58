"""Template file (de)serialization.

The wire format is the version-1 JSON document described in the README.
Parsing is strict: unknown keys are rejected and every error names the
offending path. Parsing does NOT require acyclicity -- the editor is allowed
to round-trip work-in-progress graphs; acyclicity belongs to validation.

Serialization is canonical: fixed key order, defaults written explicitly,
node and edge list order preserved (edge order drives input concatenation).
"""

from __future__ import annotations

import json
import logging

from .errors import SchemaError
from .model import (
    ALL_INPUT_HANDLE_NAMES,
    ALL_OUTPUT_HANDLE_NAMES,
    TEMPLATE_VERSION,
    Edge,
    GenerationParams,
    HandleRef,
    NodeKind,
    NodeSpec,
    Template,
)

logger = logging.getLogger(__name__)

_TOP_KEYS = {"version", "name", "nodes", "edges"}
_NODE_KEYS = {"id", "kind", "label", "body", "params", "position"}
_PARAM_KEYS = {"temperature", "max_tokens"}
_POSITION_KEYS = {"x", "y"}
_EDGE_KEYS = {"id", "source", "source_handle", "target", "target_handle"}


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaError(f"missing required field {key!r}", path)
    return obj[key]


def _check_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(f"expected a string, got {type(value).__name__}", path)
    return value


def _check_keys(obj: dict, allowed: set, path: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"expected an object, got {type(obj).__name__}", path)
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown keys: {', '.join(sorted(unknown))}", path)


def _parse_params(obj, path: str) -> GenerationParams:
    _check_keys(obj, _PARAM_KEYS, path)
    temperature = obj.get("temperature", None)
    max_tokens = obj.get("max_tokens", None)
    if temperature is not None and not isinstance(temperature, (int, float)):
        raise SchemaError("temperature must be a number", f"{path}.temperature")
    if max_tokens is not None and (isinstance(max_tokens, bool) or not isinstance(max_tokens, int)):
        raise SchemaError("max_tokens must be an integer", f"{path}.max_tokens")
    kwargs = {}
    if temperature is not None:
        kwargs["temperature"] = float(temperature)
    if max_tokens is not None:
        kwargs["max_output_tokens"] = max_tokens
    try:
        return GenerationParams(**kwargs)
    except ValueError as exc:
        raise SchemaError(str(exc), path) from exc


def _parse_node(obj, path: str, warnings: list[str] | None) -> NodeSpec:
    _check_keys(obj, _NODE_KEYS, path)
    node_id = _check_str(_require(obj, "id", path), f"{path}.id")
    if not node_id or any(c.isspace() for c in node_id):
        raise SchemaError("node id must be non-empty and contain no whitespace", f"{path}.id")
    kind_str = _check_str(_require(obj, "kind", path), f"{path}.kind")
    try:
        kind = NodeKind(kind_str)
    except ValueError:
        raise SchemaError(f"unknown node kind {kind_str!r}", f"{path}.kind") from None
    label = _check_str(obj.get("label", ""), f"{path}.label")
    body = _check_str(obj.get("body", ""), f"{path}.body")

    params = None
    if "params" in obj:
        if kind is NodeKind.TEXT_INPUT:
            # Tolerate hand-edited files: text_input carries no params.
            message = f"{path}.params: params on text_input node {node_id!r} ignored"
            logger.warning(message)
            if warnings is not None:
                warnings.append(message)
        else:
            params = _parse_params(obj["params"], f"{path}.params")

    position = (0.0, 0.0)
    if "position" in obj:
        pos = obj["position"]
        _check_keys(pos, _POSITION_KEYS, f"{path}.position")
        x = pos.get("x", 0.0)
        y = pos.get("y", 0.0)
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            raise SchemaError("x and y must be numbers", f"{path}.position")
        position = (float(x), float(y))

    return NodeSpec(id=node_id, kind=kind, label=label, body=body,
                    params=params, position=position)


def _parse_edge(obj, path: str) -> Edge:
    _check_keys(obj, _EDGE_KEYS, path)
    edge_id = _check_str(_require(obj, "id", path), f"{path}.id")
    if not edge_id:
        raise SchemaError("edge id must be non-empty", f"{path}.id")
    source = _check_str(_require(obj, "source", path), f"{path}.source")
    source_handle = _check_str(_require(obj, "source_handle", path), f"{path}.source_handle")
    target = _check_str(_require(obj, "target", path), f"{path}.target")
    target_handle = _check_str(_require(obj, "target_handle", path), f"{path}.target_handle")
    if source_handle not in ALL_OUTPUT_HANDLE_NAMES:
        raise SchemaError(f"illegal source handle {source_handle!r}", f"{path}.source_handle")
    if target_handle not in ALL_INPUT_HANDLE_NAMES:
        raise SchemaError(f"illegal target handle {target_handle!r}", f"{path}.target_handle")
    return Edge(id=edge_id,
                source=HandleRef(source, source_handle),
                target=HandleRef(target, target_handle))


def parse_template(text: str | bytes, warnings: list[str] | None = None) -> Template:
    """Parse a version-1 template document.

    Structural checks only (unique ids, known kinds, known handle names,
    params in range). Kind-specific handle legality, dangling edge endpoints
    and acyclicity are the validator's job.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SyntaxError(f"malformed JSON: {exc}") from exc

    _check_keys(doc, _TOP_KEYS, "$")
    version = _require(doc, "version", "$")
    if version != TEMPLATE_VERSION:
        raise SchemaError(f"unsupported version {version!r}", "$.version")
    name = _check_str(_require(doc, "name", "$"), "$.name")

    raw_nodes = _require(doc, "nodes", "$")
    if not isinstance(raw_nodes, list):
        raise SchemaError("nodes must be a list", "$.nodes")
    nodes = []
    seen_ids: set[str] = set()
    for i, raw in enumerate(raw_nodes):
        node = _parse_node(raw, f"$.nodes[{i}]", warnings)
        if node.id in seen_ids:
            raise SchemaError(f"duplicate node id {node.id!r}", f"$.nodes[{i}].id")
        seen_ids.add(node.id)
        nodes.append(node)

    raw_edges = _require(doc, "edges", "$")
    if not isinstance(raw_edges, list):
        raise SchemaError("edges must be a list", "$.edges")
    edges = []
    seen_edge_ids: set[str] = set()
    for i, raw in enumerate(raw_edges):
        edge = _parse_edge(raw, f"$.edges[{i}]")
        if edge.id in seen_edge_ids:
            raise SchemaError(f"duplicate edge id {edge.id!r}", f"$.edges[{i}].id")
        seen_edge_ids.add(edge.id)
        edges.append(edge)

    return Template(name=name, nodes=tuple(nodes), edges=tuple(edges), version=version)


def template_to_dict(t: Template) -> dict:
    """Canonical dict form: fixed key order, defaults explicit."""
    nodes = []
    for n in t.nodes:
        node_doc: dict = {
            "id": n.id,
            "kind": n.kind.value,
            "label": n.label,
            "body": n.body,
        }
        if n.kind is not NodeKind.TEXT_INPUT:
            params = n.effective_params()
            node_doc["params"] = {
                "temperature": params.temperature,
                "max_tokens": params.max_output_tokens,
            }
        node_doc["position"] = {"x": n.position[0], "y": n.position[1]}
        nodes.append(node_doc)
    edges = [
        {
            "id": e.id,
            "source": e.source.node,
            "source_handle": e.source.handle,
            "target": e.target.node,
            "target_handle": e.target.handle,
        }
        for e in t.edges
    ]
    return {"version": t.version, "name": t.name, "nodes": nodes, "edges": edges}


def serialize_template(t: Template) -> str:
    """Serialize to the canonical text form; a fixed point under re-parse."""
    return json.dumps(template_to_dict(t), indent=2, ensure_ascii=False) + "\n"
