"""chainloom: a node-graph chaining engine for generative text and image
pipelines, with a template file format, an HTTP service, and a CLI."""

from .backends import (
    BackendConfig,
    BackendSet,
    GeneratedImage,
    http_backends,
    image_id_for_prompt,
    mock_backends,
)
from .engine import (
    assemble_prompt,
    concat_inputs,
    execute_node,
    instantiate_subgraph,
    run_graph,
    run_single_node,
)
from .errors import (
    BackendError,
    ChainloomError,
    CycleError,
    EmptyPrompt,
    MissingDependency,
    OverrideTargetError,
    SchemaError,
    TypeMismatch,
    UnknownNode,
    ValidationFailed,
)
from .graph import topological_order
from .model import (
    Edge,
    GenerationParams,
    HandleRef,
    ImageRef,
    NodeKind,
    NodeOutput,
    NodeSpec,
    RunResult,
    Template,
    TextOutput,
)
from .template_io import parse_template, serialize_template
from .validation import Violation, validate

__version__ = "0.1.0"
