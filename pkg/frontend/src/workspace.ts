// Pure workspace state: everything the editor mutates lives here so it can
// be tested without a DOM. The connection rules and template-merge semantics
// mirror the engine exactly; the serialized document is schema-valid at all
// times, cycles included (validation is deferred to run).

import {
  DEFAULT_PARAMS,
  EdgeDoc,
  INPUT_HANDLES,
  NodeDoc,
  NodeKindName,
  OUTPUT_HANDLES,
  OutputDoc,
  TemplateDoc,
} from "./types.js";

export interface ConnectResult {
  ok: boolean;
  reason?: string;
  edge?: EdgeDoc;
}

export class Workspace {
  name = "workspace";
  nodes: NodeDoc[] = [];
  edges: EdgeDoc[] = [];
  notepad = "";
  dirty = false;
  selection: string | null = null;
  lastOutputs: Record<string, OutputDoc> = {};
  lastErrors: Record<string, { code: string; message: string }> = {};

  private nodeCounter = 0;
  private edgeCounter = 0;
  private instanceCounter = 0;

  node(id: string): NodeDoc | undefined {
    return this.nodes.find((n) => n.id === id);
  }

  addNode(kind: NodeKindName, x: number, y: number): NodeDoc {
    let id: string;
    do {
      this.nodeCounter += 1;
      id = `${kind}_${this.nodeCounter}`;
    } while (this.node(id));
    const node: NodeDoc = {
      id,
      kind,
      label: kind.replace(/_/g, " "),
      body: "",
      position: { x, y },
    };
    if (kind !== "text_input") {
      node.params = { ...DEFAULT_PARAMS };
    }
    this.nodes.push(node);
    this.dirty = true;
    return node;
  }

  removeNode(id: string): void {
    this.nodes = this.nodes.filter((n) => n.id !== id);
    this.edges = this.edges.filter((e) => e.source !== id && e.target !== id);
    delete this.lastOutputs[id];
    delete this.lastErrors[id];
    this.dirty = true;
  }

  /** Append a new edge; illegal pairs are rejected with a visible reason.
   *  Edge order defines input concatenation order, so edges always append. */
  connect(
    sourceNode: string,
    sourceHandle: string,
    targetNode: string,
    targetHandle: string,
  ): ConnectResult {
    const src = this.node(sourceNode);
    const tgt = this.node(targetNode);
    if (!src || !tgt) return { ok: false, reason: "unknown node" };
    if (sourceNode === targetNode) {
      return { ok: false, reason: "a node cannot feed itself" };
    }
    if (!OUTPUT_HANDLES[src.kind].includes(sourceHandle)) {
      return { ok: false, reason: `${src.kind} has no output handle "${sourceHandle}"` };
    }
    if (!INPUT_HANDLES[tgt.kind].includes(targetHandle)) {
      return { ok: false, reason: `${tgt.kind} has no input handle "${targetHandle}"` };
    }
    if (sourceHandle === "image") {
      return { ok: false, reason: "image outputs cannot feed text handles" };
    }
    const duplicate = this.edges.some(
      (e) =>
        e.source === sourceNode &&
        e.source_handle === sourceHandle &&
        e.target === targetNode &&
        e.target_handle === targetHandle,
    );
    if (duplicate) return { ok: false, reason: "these handles are already connected" };

    this.edgeCounter += 1;
    const edge: EdgeDoc = {
      id: `edge_${this.edgeCounter}`,
      source: sourceNode,
      source_handle: sourceHandle,
      target: targetNode,
      target_handle: targetHandle,
    };
    this.edges.push(edge);
    this.dirty = true;
    return { ok: true, edge };
  }

  disconnect(edgeId: string): void {
    this.edges = this.edges.filter((e) => e.id !== edgeId);
    this.dirty = true;
  }

  /** Merge a template into the workspace: ids become "inst<N>:<old id>" and
   *  positions shift to the drop point — the engine's instantiation rule. */
  mergeTemplate(doc: TemplateDoc, dx: number, dy: number): string[] {
    this.instanceCounter += 1;
    const prefix = `inst${this.instanceCounter}:`;
    const added: string[] = [];
    for (const n of doc.nodes) {
      const copy: NodeDoc = {
        id: prefix + n.id,
        kind: n.kind,
        label: n.label ?? "",
        body: n.body ?? "",
        position: { x: (n.position?.x ?? 0) + dx, y: (n.position?.y ?? 0) + dy },
      };
      if (n.kind !== "text_input") {
        copy.params = n.params ? { ...n.params } : { ...DEFAULT_PARAMS };
      }
      this.nodes.push(copy);
      added.push(copy.id);
    }
    for (const e of doc.edges) {
      this.edges.push({
        id: prefix + e.id,
        source: prefix + e.source,
        source_handle: e.source_handle,
        target: prefix + e.target,
        target_handle: e.target_handle,
      });
    }
    this.dirty = true;
    return added;
  }

  setParams(id: string, temperature: number, maxTokens: number): void {
    const node = this.node(id);
    if (!node || node.kind === "text_input") return;
    // slider-enforced ranges; clamp anything out of range
    node.params = {
      temperature: Math.min(2.0, Math.max(0.0, temperature)),
      max_tokens: Math.min(4096, Math.max(1, Math.round(maxTokens))),
    };
    this.dirty = true;
  }

  setBody(id: string, body: string): void {
    const node = this.node(id);
    if (!node) return;
    node.body = body;
    this.dirty = true;
  }

  moveNode(id: string, x: number, y: number): void {
    const node = this.node(id);
    if (!node) return;
    node.position = { x, y };
    this.dirty = true;
  }

  /** The schema-valid template document for the current workspace. Node and
   *  edge order is preserved; defaults are written explicitly. */
  toTemplate(): TemplateDoc {
    return {
      version: 1,
      name: this.name,
      nodes: this.nodes.map((n) => {
        const doc: NodeDoc = {
          id: n.id,
          kind: n.kind,
          label: n.label,
          body: n.body,
          position: { x: n.position.x, y: n.position.y },
        };
        if (n.kind !== "text_input") {
          doc.params = n.params ? { ...n.params } : { ...DEFAULT_PARAMS };
        }
        return doc;
      }),
      edges: this.edges.map((e) => ({ ...e })),
    };
  }

  serialize(): string {
    return JSON.stringify(this.toTemplate(), null, 2) + "\n";
  }

  loadTemplate(doc: TemplateDoc): void {
    this.name = doc.name;
    this.nodes = doc.nodes.map((n) => ({
      id: n.id,
      kind: n.kind,
      label: n.label ?? "",
      body: n.body ?? "",
      ...(n.kind !== "text_input"
        ? { params: n.params ? { ...n.params } : { ...DEFAULT_PARAMS } }
        : {}),
      position: { x: n.position?.x ?? 0, y: n.position?.y ?? 0 },
    }));
    this.edges = doc.edges.map((e) => ({ ...e }));
    this.lastOutputs = {};
    this.lastErrors = {};
    this.dirty = false;
    // notepad is independent state and survives template loads
  }

  recordRun(outputs: Record<string, OutputDoc>, errors: Record<string, { code: string; message: string }>): void {
    this.lastOutputs = { ...this.lastOutputs, ...outputs };
    this.lastErrors = errors;
  }
}
