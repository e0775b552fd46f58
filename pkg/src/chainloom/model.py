"""Domain model: node kinds, templates, edges, and run results.

Everything here is immutable after construction so templates and results can
be shared freely across threads (see the service's concurrency model).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union


class NodeKind(str, Enum):
    TEXT_INPUT = "text_input"
    PROMPT = "prompt"
    PROMPT_WITH_CONTEXT = "prompt_with_context"
    VISUALISE = "visualise"


# Handle sets are fixed per kind; edges may only attach to these names.
INPUT_HANDLES: dict[NodeKind, tuple[str, ...]] = {
    NodeKind.TEXT_INPUT: (),
    NodeKind.PROMPT: ("input",),
    NodeKind.PROMPT_WITH_CONTEXT: ("input", "context"),
    NodeKind.VISUALISE: ("prompt",),
}

OUTPUT_HANDLES: dict[NodeKind, tuple[str, ...]] = {
    NodeKind.TEXT_INPUT: ("output",),
    NodeKind.PROMPT: ("output",),
    NodeKind.PROMPT_WITH_CONTEXT: ("output",),
    NodeKind.VISUALISE: ("image",),
}

ALL_INPUT_HANDLE_NAMES = frozenset(h for hs in INPUT_HANDLES.values() for h in hs)
ALL_OUTPUT_HANDLE_NAMES = frozenset(h for hs in OUTPUT_HANDLES.values() for h in hs)

DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_OUTPUT_TOKENS = 256
MAX_TEMPERATURE = 2.0
MAX_OUTPUT_TOKENS_CAP = 4096

TEMPLATE_VERSION = 1


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS

    def __post_init__(self):
        if not (0.0 <= self.temperature <= MAX_TEMPERATURE):
            raise ValueError(
                f"temperature must be in [0.0, {MAX_TEMPERATURE}], got {self.temperature}"
            )
        if not (1 <= self.max_output_tokens <= MAX_OUTPUT_TOKENS_CAP):
            raise ValueError(
                f"max_output_tokens must be in [1, {MAX_OUTPUT_TOKENS_CAP}], "
                f"got {self.max_output_tokens}"
            )


@dataclass(frozen=True)
class NodeSpec:
    id: str
    kind: NodeKind
    label: str = ""
    body: str = ""
    params: GenerationParams | None = None
    position: tuple[float, float] = (0.0, 0.0)

    def input_handles(self) -> tuple[str, ...]:
        return INPUT_HANDLES[self.kind]

    def output_handles(self) -> tuple[str, ...]:
        return OUTPUT_HANDLES[self.kind]

    def effective_params(self) -> GenerationParams:
        return self.params if self.params is not None else GenerationParams()


@dataclass(frozen=True)
class HandleRef:
    node: str
    handle: str


@dataclass(frozen=True)
class Edge:
    id: str
    source: HandleRef
    target: HandleRef


@dataclass(frozen=True)
class Template:
    name: str
    nodes: tuple[NodeSpec, ...] = ()
    edges: tuple[Edge, ...] = ()
    version: int = TEMPLATE_VERSION

    def node_map(self) -> dict[str, NodeSpec]:
        return {n.id: n for n in self.nodes}

    def node(self, node_id: str) -> NodeSpec | None:
        for n in self.nodes:
            if n.id == node_id:
                return n
        return None


@dataclass(frozen=True)
class TextOutput:
    content: str


@dataclass(frozen=True)
class ImageRef:
    image_id: str
    media_type: str


NodeOutput = Union[TextOutput, ImageRef]


@dataclass(frozen=True)
class NodeError:
    code: str
    message: str


@dataclass
class RunResult:
    """Outcome of one graph run.

    ``order`` lists executed nodes only; skipped nodes appear in ``errors``
    with code ``skipped_dependency`` and never in ``order``.
    """

    outputs: dict[str, NodeOutput] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)
    durations_ms: dict[str, int] = field(default_factory=dict)
    errors: dict[str, NodeError] = field(default_factory=dict)
