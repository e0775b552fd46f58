"""Template validation: everything parse deliberately lets through.

Parsing keeps drafts loadable; only execution needs a clean report. The
validator checks edge endpoints against the actual node kinds, rejects
self-loops and duplicate connections, and finds cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import cycle_nodes
from .model import INPUT_HANDLES, OUTPUT_HANDLES, Template

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    severity: str
    code: str
    subject: str  # node or edge id
    message: str


def validate(t: Template) -> list[Violation]:
    """Return all violations; an empty list means the template is executable."""
    violations: list[Violation] = []
    nodes = t.node_map()
    seen_pairs: set[tuple[str, str, str, str]] = set()

    for e in t.edges:
        src = nodes.get(e.source.node)
        tgt = nodes.get(e.target.node)
        if src is None:
            violations.append(Violation(
                SEVERITY_ERROR, "unknown_node", e.id,
                f"edge {e.id!r} source references unknown node {e.source.node!r}"))
        elif e.source.handle not in OUTPUT_HANDLES[src.kind]:
            violations.append(Violation(
                SEVERITY_ERROR, "illegal_handle", e.id,
                f"edge {e.id!r}: node {src.id!r} ({src.kind.value}) has no "
                f"output handle {e.source.handle!r}"))
        if tgt is None:
            violations.append(Violation(
                SEVERITY_ERROR, "unknown_node", e.id,
                f"edge {e.id!r} target references unknown node {e.target.node!r}"))
        elif e.target.handle not in INPUT_HANDLES[tgt.kind]:
            violations.append(Violation(
                SEVERITY_ERROR, "illegal_handle", e.id,
                f"edge {e.id!r}: node {tgt.id!r} ({tgt.kind.value}) has no "
                f"input handle {e.target.handle!r}"))
        if e.source.node == e.target.node:
            violations.append(Violation(
                SEVERITY_ERROR, "self_loop", e.id,
                f"edge {e.id!r} connects node {e.source.node!r} to itself"))
        pair = (e.source.node, e.source.handle, e.target.node, e.target.handle)
        if pair in seen_pairs:
            violations.append(Violation(
                SEVERITY_ERROR, "duplicate_edge", e.id,
                f"edge {e.id!r} duplicates connection "
                f"{e.source.node}.{e.source.handle} -> {e.target.node}.{e.target.handle}"))
        seen_pairs.add(pair)

    for node_id in sorted(cycle_nodes(t)):
        violations.append(Violation(
            SEVERITY_ERROR, "cycle", node_id,
            f"node {node_id!r} lies on a cycle"))

    return violations


def has_errors(violations: list[Violation]) -> bool:
    return any(v.severity == SEVERITY_ERROR for v in violations)
