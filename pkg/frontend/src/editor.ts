// SVG node-graph editor: draggable nodes, connectable handles, pan/zoom and
// a minimap. Pure navigation (pan, zoom, minimap) never touches the
// workspace, so saving before and after navigation yields identical files.

import { Workspace } from "./workspace.js";
import { INPUT_HANDLES, NodeKindName, OUTPUT_HANDLES } from "./types.js";

const NODE_W = 180;
const NODE_H = 90;
const SVG_NS = "http://www.w3.org/2000/svg";

interface PendingConnection {
  node: string;
  handle: string;
}

export interface EditorCallbacks {
  onSelect(nodeId: string | null): void;
  onRunNode(nodeId: string): void;
  onReject(reason: string): void;
}

export class Editor {
  viewX = 0;
  viewY = 0;
  zoom = 1;
  private pending: PendingConnection | null = null;
  private dragging: { id: string; dx: number; dy: number } | null = null;
  private panning: { x: number; y: number } | null = null;

  constructor(
    private svg: SVGSVGElement,
    private minimap: SVGSVGElement,
    public workspace: Workspace,
    private callbacks: EditorCallbacks,
  ) {
    svg.addEventListener("pointerdown", (e) => this.onPointerDown(e));
    svg.addEventListener("pointermove", (e) => this.onPointerMove(e));
    svg.addEventListener("pointerup", () => this.onPointerUp());
    svg.addEventListener("wheel", (e) => this.onWheel(e), { passive: false });
  }

  toWorld(clientX: number, clientY: number): { x: number; y: number } {
    const rect = this.svg.getBoundingClientRect();
    return {
      x: (clientX - rect.left) / this.zoom + this.viewX,
      y: (clientY - rect.top) / this.zoom + this.viewY,
    };
  }

  zoomToFit(): void {
    const nodes = this.workspace.nodes;
    if (!nodes.length) return;
    const xs = nodes.map((n) => n.position.x);
    const ys = nodes.map((n) => n.position.y);
    const minX = Math.min(...xs) - 60;
    const minY = Math.min(...ys) - 60;
    const maxX = Math.max(...xs) + NODE_W + 60;
    const maxY = Math.max(...ys) + NODE_H + 60;
    const rect = this.svg.getBoundingClientRect();
    this.zoom = Math.min(2, Math.max(0.1,
      Math.min(rect.width / (maxX - minX), rect.height / (maxY - minY))));
    this.viewX = minX;
    this.viewY = minY;
    this.render();
  }

  private onWheel(e: WheelEvent): void {
    e.preventDefault();
    const before = this.toWorld(e.clientX, e.clientY);
    this.zoom = Math.min(2, Math.max(0.1, this.zoom * (e.deltaY < 0 ? 1.1 : 0.9)));
    const after = this.toWorld(e.clientX, e.clientY);
    this.viewX += before.x - after.x;
    this.viewY += before.y - after.y;
    this.render();
  }

  private onPointerDown(e: PointerEvent): void {
    const target = e.target as Element;
    const handleEl = target.closest("[data-handle]");
    const nodeEl = target.closest("[data-node]");
    if (handleEl) {
      const node = handleEl.getAttribute("data-node-id")!;
      const handle = handleEl.getAttribute("data-handle")!;
      const isOutput = handleEl.getAttribute("data-dir") === "out";
      if (isOutput) {
        this.pending = { node, handle };
      } else if (this.pending) {
        // long-distance friendly: click source handle, then target handle
        const result = this.workspace.connect(
          this.pending.node, this.pending.handle, node, handle);
        if (!result.ok) this.callbacks.onReject(result.reason ?? "rejected");
        this.pending = null;
        this.render();
      }
      return;
    }
    if (nodeEl) {
      const id = nodeEl.getAttribute("data-node")!;
      const world = this.toWorld(e.clientX, e.clientY);
      const node = this.workspace.node(id)!;
      this.dragging = { id, dx: world.x - node.position.x, dy: world.y - node.position.y };
      this.callbacks.onSelect(id);
      return;
    }
    this.panning = { x: e.clientX, y: e.clientY };
    this.pending = null;
    this.callbacks.onSelect(null);
  }

  private onPointerMove(e: PointerEvent): void {
    if (this.dragging) {
      const world = this.toWorld(e.clientX, e.clientY);
      this.workspace.moveNode(
        this.dragging.id, world.x - this.dragging.dx, world.y - this.dragging.dy);
      this.render();
    } else if (this.panning) {
      this.viewX -= (e.clientX - this.panning.x) / this.zoom;
      this.viewY -= (e.clientY - this.panning.y) / this.zoom;
      this.panning = { x: e.clientX, y: e.clientY };
      this.render();
    }
  }

  private onPointerUp(): void {
    this.dragging = null;
    this.panning = null;
  }

  render(): void {
    const ws = this.workspace;
    this.svg.innerHTML = "";
    const rect = this.svg.getBoundingClientRect();
    const w = Math.max(rect.width, 1) / this.zoom;
    const h = Math.max(rect.height, 1) / this.zoom;
    this.svg.setAttribute("viewBox", `${this.viewX} ${this.viewY} ${w} ${h}`);

    for (const e of ws.edges) {
      const src = ws.node(e.source);
      const tgt = ws.node(e.target);
      if (!src || !tgt) continue;
      const path = document.createElementNS(SVG_NS, "path");
      const x1 = src.position.x + NODE_W;
      const y1 = src.position.y + NODE_H / 2;
      const x2 = tgt.position.x;
      const y2 = tgt.position.y + NODE_H / 2;
      const mid = (x1 + x2) / 2;
      path.setAttribute("d", `M ${x1} ${y1} C ${mid} ${y1}, ${mid} ${y2}, ${x2} ${y2}`);
      path.setAttribute("class", "edge");
      this.svg.appendChild(path);
    }

    for (const n of ws.nodes) {
      const g = document.createElementNS(SVG_NS, "g");
      g.setAttribute("data-node", n.id);
      g.setAttribute("transform", `translate(${n.position.x}, ${n.position.y})`);
      const classes = ["node", n.kind];
      if (ws.selection === n.id) classes.push("selected");
      if (ws.lastErrors[n.id]) {
        classes.push(ws.lastErrors[n.id].code === "skipped_dependency" ? "skipped" : "failed");
      }
      g.setAttribute("class", classes.join(" "));

      const box = document.createElementNS(SVG_NS, "rect");
      box.setAttribute("width", String(NODE_W));
      box.setAttribute("height", String(NODE_H));
      box.setAttribute("rx", "8");
      g.appendChild(box);

      const title = document.createElementNS(SVG_NS, "text");
      title.setAttribute("x", "10");
      title.setAttribute("y", "20");
      title.setAttribute("class", "node-title");
      title.textContent = n.label || n.kind;
      g.appendChild(title);

      const runBtn = document.createElementNS(SVG_NS, "text");
      runBtn.setAttribute("x", String(NODE_W - 22));
      runBtn.setAttribute("y", "20");
      runBtn.setAttribute("class", "node-run");
      runBtn.textContent = "▶";
      runBtn.addEventListener("pointerdown", (e) => {
        e.stopPropagation();
        this.callbacks.onRunNode(n.id);
      });
      g.appendChild(runBtn);

      const preview = document.createElementNS(SVG_NS, "text");
      preview.setAttribute("x", "10");
      preview.setAttribute("y", "45");
      preview.setAttribute("class", "node-preview");
      const out = ws.lastOutputs[n.id];
      const err = ws.lastErrors[n.id];
      if (err) {
        preview.textContent = `⚠ ${err.code}`;
      } else if (out?.type === "text") {
        preview.textContent = out.content.slice(0, 24) + (out.content.length > 24 ? "…" : "");
      } else if (out?.type === "image") {
        const img = document.createElementNS(SVG_NS, "image");
        img.setAttribute("href", out.url);
        img.setAttribute("x", "10");
        img.setAttribute("y", "30");
        img.setAttribute("width", "50");
        img.setAttribute("height", "50");
        g.appendChild(img);
      } else {
        preview.textContent = n.body.slice(0, 24);
      }
      g.appendChild(preview);

      INPUT_HANDLES[n.kind].forEach((handle, i) => {
        g.appendChild(this.handleDot(n.id, handle, "in", -6, 30 + i * 26));
      });
      OUTPUT_HANDLES[n.kind].forEach((handle, i) => {
        g.appendChild(this.handleDot(n.id, handle, "out", NODE_W - 6, 30 + i * 26));
      });
      this.svg.appendChild(g);
    }

    this.renderMinimap(w, h);
  }

  private handleDot(nodeId: string, handle: string, dir: "in" | "out", x: number, y: number): SVGElement {
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("data-handle", handle);
    g.setAttribute("data-node-id", nodeId);
    g.setAttribute("data-dir", dir);
    g.setAttribute("class", `handle ${dir}`);
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "7");
    g.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(dir === "in" ? x + 10 : x - 10));
    label.setAttribute("y", String(y + 4));
    label.setAttribute("class", `handle-label ${dir}`);
    label.textContent = handle;
    g.appendChild(label);
    return g;
  }

  private renderMinimap(viewW: number, viewH: number): void {
    const nodes = this.workspace.nodes;
    this.minimap.innerHTML = "";
    const xs = nodes.map((n) => n.position.x).concat([this.viewX]);
    const ys = nodes.map((n) => n.position.y).concat([this.viewY]);
    const minX = Math.min(...xs) - 100;
    const minY = Math.min(...ys) - 100;
    const maxX = Math.max(...xs.concat([this.viewX + viewW])) + NODE_W + 100;
    const maxY = Math.max(...ys.concat([this.viewY + viewH])) + NODE_H + 100;
    this.minimap.setAttribute("viewBox", `${minX} ${minY} ${maxX - minX} ${maxY - minY}`);
    for (const n of nodes) {
      const r = document.createElementNS(SVG_NS, "rect");
      r.setAttribute("x", String(n.position.x));
      r.setAttribute("y", String(n.position.y));
      r.setAttribute("width", String(NODE_W));
      r.setAttribute("height", String(NODE_H));
      r.setAttribute("class", "mini-node");
      this.minimap.appendChild(r);
    }
    const view = document.createElementNS(SVG_NS, "rect");
    view.setAttribute("x", String(this.viewX));
    view.setAttribute("y", String(this.viewY));
    view.setAttribute("width", String(viewW));
    view.setAttribute("height", String(viewH));
    view.setAttribute("class", "mini-view");
    this.minimap.appendChild(view);
  }
}

export function kindFromDragEvent(e: DragEvent): NodeKindName | null {
  const kind = e.dataTransfer?.getData("application/x-node-kind");
  return kind ? (kind as NodeKindName) : null;
}
