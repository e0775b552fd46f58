"""JSON rendering of run results, shared by the service and the CLI so both
surfaces emit byte-identical documents for the same run."""

from __future__ import annotations

from .model import ImageRef, NodeOutput, RunResult, TextOutput


def render_output(output: NodeOutput) -> dict:
    if isinstance(output, TextOutput):
        return {"type": "text", "content": output.content}
    return {
        "type": "image",
        "image_id": output.image_id,
        "media_type": output.media_type,
        "url": f"/api/images/{output.image_id}",
    }


def render_run_result(result: RunResult) -> dict:
    return {
        "outputs": {nid: render_output(o) for nid, o in result.outputs.items()},
        "order": list(result.order),
        "durations_ms": dict(result.durations_ms),
        "errors": {
            nid: {"code": err.code, "message": err.message}
            for nid, err in result.errors.items()
        },
    }
