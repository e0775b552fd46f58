"""Exception types shared across the engine, backends, service and CLI."""

from __future__ import annotations

from typing import Iterable


class ChainloomError(Exception):
    """Base class for all domain errors."""

    code = "error"


class SchemaError(ChainloomError):
    """A template document violates the file schema.

    ``path`` names the offending location, e.g. ``nodes[2].kind``.
    """

    code = "schema_error"

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class CycleError(ChainloomError):
    """The graph cannot be topologically ordered.

    ``nodes`` is the residual node set left after Kahn's algorithm stalls;
    it contains every node on a cycle (plus nodes reachable only through one).
    """

    code = "cycle_error"

    def __init__(self, nodes: Iterable[str]):
        self.nodes = frozenset(nodes)
        super().__init__(f"cycle involving nodes: {', '.join(sorted(self.nodes))}")


class ValidationFailed(ChainloomError):
    """A template has error-severity validation violations other than a cycle."""

    code = "schema_error"

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations))


class MissingDependency(ChainloomError):
    """A required upstream output is absent."""

    code = "missing_dependency"

    def __init__(self, missing: Iterable[str], node_id: str | None = None):
        self.missing = sorted(set(missing))
        self.node_id = node_id
        where = f" for node {node_id!r}" if node_id else ""
        super().__init__(f"missing upstream outputs{where}: {', '.join(self.missing)}")


class TypeMismatch(ChainloomError):
    """An image output was wired into a text handle."""

    code = "type_mismatch"

    def __init__(self, source_node: str, target_node: str, handle: str):
        self.source_node = source_node
        self.target_node = target_node
        self.handle = handle
        super().__init__(
            f"image output of {source_node!r} cannot feed text handle "
            f"{target_node!r}.{handle}"
        )


class UnknownNode(ChainloomError):
    code = "not_found"

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node: {node_id!r}")


class OverrideTargetError(ChainloomError):
    """An override names a node that is missing or not a text_input."""

    code = "override_target_error"

    def __init__(self, node_id: str, reason: str):
        self.node_id = node_id
        super().__init__(f"override target {node_id!r}: {reason}")


class BackendError(ChainloomError):
    """A generation backend failed (transport, status, or malformed response)."""

    code = "backend_error"

    def __init__(
        self,
        message: str,
        endpoint: str | None = None,
        status: int | None = None,
        attempts: int = 1,
    ):
        self.endpoint = endpoint
        self.status = status
        self.attempts = attempts
        super().__init__(message)


class EmptyPrompt(ChainloomError):
    """Image generation requires a non-empty prompt."""

    code = "empty_prompt"

    def __init__(self):
        super().__init__("image generation requires a non-empty prompt")
