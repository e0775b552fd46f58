"""Command-line interface: validate, topo, run, serve.

Exit codes for run/validate/topo are a total function of the outcome class:
0 clean, 1 validation failure, 2 user error (unreadable file, malformed
document, bad overrides), 3 node failures during a run (partial results are
still emitted).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .backends import (
    BackendConfig,
    BackendSet,
    GeneratedImage,
    http_backends,
    mock_backends,
)
from .engine import run_graph
from .errors import CycleError, OverrideTargetError, SchemaError, ValidationFailed
from .graph import topological_order
from .model import ImageRef, Template, TextOutput
from .render import render_run_result
from .template_io import parse_template
from .validation import validate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USER_ERROR = 2
EXIT_NODE_FAILURE = 3


def _load_template(path: str) -> Template:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_USER_ERROR)
    try:
        return parse_template(text)
    except (SchemaError, SyntaxError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USER_ERROR)


class _CollectingImageGenerator:
    """Keeps generated image payloads so the CLI can write them to disk."""

    def __init__(self, inner):
        self.inner = inner
        self.collected: dict[str, GeneratedImage] = {}

    def generate_image(self, prompt, params) -> GeneratedImage:
        image = self.inner.generate_image(prompt, params)
        self.collected[image.image_id] = image
        return image


@click.group()
def main():
    """Node-graph chaining engine for generative text and image pipelines."""


@main.command("validate")
@click.argument("template_path", type=click.Path())
def cli_validate(template_path):
    """Check a template file; print one violation per line."""
    template = _load_template(template_path)
    violations = validate(template)
    for v in violations:
        click.echo(f"{v.severity}: [{v.code}] {v.message}")
    sys.exit(EXIT_VALIDATION if violations else EXIT_OK)


@main.command("topo")
@click.argument("template_path", type=click.Path())
def cli_topo(template_path):
    """Print the execution order, one node id per line."""
    template = _load_template(template_path)
    try:
        order = topological_order(template)
    except CycleError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    for node_id in order:
        click.echo(node_id)
    sys.exit(EXIT_OK)


def _parse_overrides(pairs) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            click.echo(f"error: override {pair!r} is not of the form id=text", err=True)
            sys.exit(EXIT_USER_ERROR)
        node_id, _, value = pair.partition("=")
        overrides[node_id] = value
    return overrides


@main.command("run")
@click.argument("template_path", type=click.Path())
@click.option("--backend", "backend_kind", type=click.Choice(["mock", "http"]),
              default="mock", show_default=True)
@click.option("--set", "overrides", multiple=True, metavar="ID=TEXT",
              help="Override a text_input node's body; repeatable.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".",
              show_default=True, help="Directory for generated image files.")
@click.option("--format", "output_format", type=click.Choice(["json", "text"]),
              default="text", show_default=True)
def cli_run(template_path, backend_kind, overrides, out_dir, output_format):
    """Run all nodes; emit results and write images as <image_id>.png."""
    template = _load_template(template_path)
    overrides = _parse_overrides(overrides)

    if backend_kind == "http":
        base = http_backends(BackendConfig.from_env())
    else:
        base = mock_backends()
    collector = _CollectingImageGenerator(base.image)
    backends = BackendSet(text=base.text, image=collector)

    try:
        result = run_graph(template, backends, overrides)
    except (CycleError, ValidationFailed) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except OverrideTargetError as exc:
        click.echo(f"error: [override_target_error] {exc}", err=True)
        sys.exit(EXIT_USER_ERROR)

    out_path = Path(out_dir)
    written = set()
    for output in result.outputs.values():
        if isinstance(output, ImageRef) and output.image_id not in written:
            image = collector.collected.get(output.image_id)
            if image is not None:
                out_path.mkdir(parents=True, exist_ok=True)
                (out_path / f"{image.image_id}.png").write_bytes(image.data)
                written.add(output.image_id)

    if output_format == "json":
        click.echo(json.dumps(render_run_result(result), indent=2))
    else:
        for node_id in result.order:
            if node_id in result.outputs:
                output = result.outputs[node_id]
                if isinstance(output, TextOutput):
                    click.echo(f"{node_id}: {output.content}")
                else:
                    click.echo(f"{node_id}: image {output.image_id} ({output.media_type})")
            else:
                err = result.errors[node_id]
                click.echo(f"{node_id}: error [{err.code}] {err.message}")
        for node_id, err in result.errors.items():
            if node_id not in result.order:
                click.echo(f"{node_id}: error [{err.code}] {err.message}")

    sys.exit(EXIT_NODE_FAILURE if result.errors else EXIT_OK)


@main.command("serve")
@click.option("--port", type=int, default=None, help="Listen port.")
@click.option("--storage", "storage_dir", type=click.Path(file_okay=False),
              default=None, help="Template/image storage directory.")
@click.option("--backend", "backend_kind", type=click.Choice(["mock", "http"]),
              default="mock", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False), default=None,
              help="Directory with the built UI bundle to serve at /.")
def cli_serve(port, storage_dir, backend_kind, ui_dir):
    """Start the HTTP service."""
    import os

    import uvicorn

    from .service import ServiceConfig, create_app

    if port is None:
        port = int(os.environ.get("CHAIN_PORT", "8080"))
    if storage_dir is None:
        storage_dir = os.environ.get("CHAIN_STORAGE_DIR", "./chainloom-data")
    config = ServiceConfig(
        storage_dir=Path(storage_dir),
        port=port,
        backend=BackendConfig.from_env(),
        backend_kind=backend_kind,
        ui_dir=Path(ui_dir) if ui_dir else None,
    )
    uvicorn.run(create_app(config), host="0.0.0.0", port=config.port)


if __name__ == "__main__":
    main()
