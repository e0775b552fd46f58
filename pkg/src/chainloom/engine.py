"""Execution engine: turns a template plus backends into a RunResult.

Nodes run sequentially in topological order. Input concatenation follows the
edge-list order of the template, so saved files give users explicit control
over how multiple inputs combine. A failing node poisons exactly its
descendant set; everything else still runs.
"""

from __future__ import annotations

import time

from .backends import BackendSet
from .errors import (
    BackendError,
    ChainloomError,
    MissingDependency,
    OverrideTargetError,
    TypeMismatch,
    UnknownNode,
    ValidationFailed,
)
from .graph import descendants, predecessors, topological_order
from .model import (
    Edge,
    HandleRef,
    ImageRef,
    NodeError,
    NodeKind,
    NodeOutput,
    NodeSpec,
    RunResult,
    Template,
    TextOutput,
)
from .validation import has_errors, validate


def concat_inputs(
    t: Template,
    node_id: str,
    handle: str,
    outputs: dict[str, NodeOutput],
) -> str:
    """Join all text arriving at (node, handle), in edge-list order, with
    newlines. No incoming edges yields the empty string."""
    parts: list[str] = []
    missing: list[str] = []
    for e in t.edges:
        if e.target.node != node_id or e.target.handle != handle:
            continue
        source_output = outputs.get(e.source.node)
        if source_output is None:
            missing.append(e.source.node)
            continue
        if isinstance(source_output, ImageRef):
            raise TypeMismatch(e.source.node, node_id, handle)
        parts.append(source_output.content)
    if missing:
        raise MissingDependency(missing, node_id=node_id)
    return "\n".join(parts)


def assemble_prompt(node: NodeSpec, resolved: dict[str, str]) -> str:
    """Build the final prompt for a node from its body and resolved inputs."""
    if node.kind is NodeKind.TEXT_INPUT:
        return node.body
    if node.kind is NodeKind.PROMPT:
        incoming = resolved.get("input", "")
        return node.body + "\n\n" + incoming if incoming else node.body
    if node.kind is NodeKind.PROMPT_WITH_CONTEXT:
        context = resolved.get("context", "")
        incoming = resolved.get("input", "")
        prompt = f"Context:\n{context}\n\n" if context else ""
        prompt += node.body
        if incoming:
            prompt += "\n\n" + incoming
        return prompt
    # visualise: style prefix and incoming prompt, skipping empty parts
    parts = [p for p in (node.body, resolved.get("prompt", "")) if p]
    return "\n".join(parts)


def resolve_inputs(
    t: Template, node: NodeSpec, outputs: dict[str, NodeOutput]
) -> dict[str, str]:
    return {h: concat_inputs(t, node.id, h, outputs) for h in node.input_handles()}


def execute_node(
    node: NodeSpec, resolved: dict[str, str], backends: BackendSet
) -> NodeOutput:
    """Execute one node. text_input never touches a backend."""
    if node.kind is NodeKind.TEXT_INPUT:
        return TextOutput(node.body)
    prompt = assemble_prompt(node, resolved)
    params = node.effective_params()
    if node.kind is NodeKind.VISUALISE:
        image = backends.image.generate_image(prompt, params)
        return ImageRef(image_id=image.image_id, media_type=image.media_type)
    try:
        return TextOutput(backends.text.generate_text(prompt, params))
    except BackendError:
        raise
    except ChainloomError:
        raise
    except Exception as exc:  # transport layer surprises become BackendError
        raise BackendError(f"node {node.id!r}: {exc}") from exc


def apply_overrides(t: Template, overrides: dict[str, str]) -> Template:
    """Replace text_input bodies. Every key must name a text_input node."""
    nodes = t.node_map()
    for node_id in overrides:
        node = nodes.get(node_id)
        if node is None:
            raise OverrideTargetError(node_id, "unknown node")
        if node.kind is not NodeKind.TEXT_INPUT:
            raise OverrideTargetError(
                node_id, f"not a text_input node (kind {node.kind.value})")
    if not overrides:
        return t
    new_nodes = tuple(
        NodeSpec(id=n.id, kind=n.kind, label=n.label,
                 body=overrides.get(n.id, n.body),
                 params=n.params, position=n.position)
        for n in t.nodes
    )
    return Template(name=t.name, nodes=new_nodes, edges=t.edges, version=t.version)


def run_graph(
    t: Template,
    backends: BackendSet,
    overrides: dict[str, str] | None = None,
) -> RunResult:
    """Run every node; skip descendants of failures, keep everything else."""
    violations = validate(t)
    if has_errors(violations):
        cycle_ids = {v.subject for v in violations if v.code == "cycle"}
        if cycle_ids:
            # Surface cycles through topological_order for the residual set.
            topological_order(t)
        raise ValidationFailed(violations)

    t = apply_overrides(t, overrides or {})
    order = topological_order(t)
    nodes = t.node_map()
    result = RunResult()
    skipped: set[str] = set()

    for node_id in order:
        if node_id in skipped:
            continue
        node = nodes[node_id]
        started = time.perf_counter()
        try:
            resolved = resolve_inputs(t, node, result.outputs)
            output = execute_node(node, resolved, backends)
        except ChainloomError as exc:
            result.order.append(node_id)
            result.durations_ms[node_id] = int(
                (time.perf_counter() - started) * 1000)
            result.errors[node_id] = NodeError(code=exc.code, message=str(exc))
            for descendant in descendants(t, node_id):
                if descendant not in skipped:
                    skipped.add(descendant)
                    result.errors[descendant] = NodeError(
                        code="skipped_dependency",
                        message=f"skipped: upstream node {node_id!r} failed")
            continue
        result.order.append(node_id)
        result.durations_ms[node_id] = int((time.perf_counter() - started) * 1000)
        result.outputs[node_id] = output
    return result


def run_single_node(
    t: Template,
    node_id: str,
    cached: dict[str, NodeOutput],
    backends: BackendSet,
) -> NodeOutput:
    """Execute exactly one node, resolving inputs from ``cached`` only."""
    node = t.node(node_id)
    if node is None:
        raise UnknownNode(node_id)
    missing = predecessors(t, node_id) - set(cached)
    if missing:
        raise MissingDependency(missing, node_id=node_id)
    resolved = resolve_inputs(t, node, cached)
    return execute_node(node, resolved, backends)


def instantiate_subgraph(
    workspace: Template,
    sub: Template,
    offset: tuple[float, float] = (0.0, 0.0),
    instance_counter: int = 1,
) -> Template:
    """Merge ``sub`` into ``workspace`` with ids remapped to
    ``inst<counter>:<old id>`` and positions shifted by ``offset``."""
    prefix = f"inst{instance_counter}:"
    dx, dy = offset
    new_nodes = tuple(
        NodeSpec(id=prefix + n.id, kind=n.kind, label=n.label, body=n.body,
                 params=n.params,
                 position=(n.position[0] + dx, n.position[1] + dy))
        for n in sub.nodes
    )
    new_edges = tuple(
        Edge(id=prefix + e.id,
             source=HandleRef(prefix + e.source.node, e.source.handle),
             target=HandleRef(prefix + e.target.node, e.target.handle))
        for e in sub.edges
    )
    return Template(
        name=workspace.name,
        nodes=workspace.nodes + new_nodes,
        edges=workspace.edges + new_edges,
        version=workspace.version,
    )
