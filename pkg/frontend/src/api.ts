// Thin client for the service API. Every generative result comes from the
// server; the client performs no generation logic of its own.

import {
  ChatTurnDoc,
  NodeKindInfo,
  OutputDoc,
  RunResultDoc,
  TemplateDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public details: unknown[] = [],
    public status = 0,
  ) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const err = (body as { error?: { code: string; message: string; details?: unknown[] } })?.error;
    throw new ApiError(
      err?.code ?? "http_error",
      err?.message ?? response.statusText,
      err?.details ?? [],
      response.status,
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(private base = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async nodeKinds(): Promise<NodeKindInfo[]> {
    return unwrap(await fetch(this.url("/api/nodes")));
  }

  async saveTemplate(doc: TemplateDoc): Promise<{ template_id: string }> {
    return unwrap(
      await fetch(this.url("/api/templates"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(doc),
      }),
    );
  }

  async run(template: TemplateDoc, overrides: Record<string, string> = {}): Promise<RunResultDoc> {
    return unwrap(
      await fetch(this.url("/api/run"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ template, overrides }),
      }),
    );
  }

  async runNode(
    template: TemplateDoc,
    nodeId: string,
    cached: Record<string, OutputDoc>,
  ): Promise<OutputDoc> {
    return unwrap(
      await fetch(this.url("/api/run-node"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ template, node_id: nodeId, cached }),
      }),
    );
  }

  async chatPost(sessionId: string, message: string): Promise<{ turn: ChatTurnDoc }> {
    return unwrap(
      await fetch(this.url(`/api/chat/${encodeURIComponent(sessionId)}`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ message }),
      }),
    );
  }

  async chatGet(sessionId: string): Promise<{ turns: ChatTurnDoc[]; example_queries: string[] }> {
    return unwrap(await fetch(this.url(`/api/chat/${encodeURIComponent(sessionId)}`)));
  }
}
