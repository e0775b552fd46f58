// Application entry: sidebar, workspace editor, inspector, notepad, and the
// chat baseline view, all wired to the service API.

import { ApiClient } from "./api.js";
import { ChatView, renderTurn } from "./chat.js";
import { Editor, kindFromDragEvent } from "./editor.js";
import { NodeKindName, TemplateDoc } from "./types.js";
import { Workspace } from "./workspace.js";

const api = new ApiClient();
const workspace = new Workspace();
let runInFlight = false;

function $(id: string): HTMLElement {
  return document.getElementById(id)!;
}

function toast(message: string): void {
  const el = $("toast");
  el.textContent = message;
  el.classList.add("visible");
  setTimeout(() => el.classList.remove("visible"), 3500);
}

const editor = new Editor(
  $("canvas") as unknown as SVGSVGElement,
  $("minimap") as unknown as SVGSVGElement,
  workspace,
  {
    onSelect(nodeId) {
      workspace.selection = nodeId;
      renderInspector();
      editor.render();
    },
    async onRunNode(nodeId) {
      try {
        const output = await api.runNode(
          workspace.toTemplate(), nodeId, workspace.lastOutputs);
        workspace.lastOutputs[nodeId] = output;
        delete workspace.lastErrors[nodeId];
      } catch (err) {
        toast(err instanceof Error ? err.message : String(err));
      }
      editor.render();
      renderInspector();
    },
    onReject(reason) {
      toast(`Connection rejected: ${reason}`);
    },
  },
);

async function buildSidebar(): Promise<void> {
  const kinds = await api.nodeKinds();
  const container = $("node-palette");
  for (const info of kinds) {
    const item = document.createElement("div");
    item.className = "palette-item";
    item.draggable = true;
    item.innerHTML = `<strong>${info.kind.replace(/_/g, " ")}</strong><span>${info.description}</span>`;
    item.addEventListener("dragstart", (e) => {
      e.dataTransfer?.setData("application/x-node-kind", info.kind);
    });
    container.appendChild(item);
  }
}

function setupCanvasDrop(): void {
  const canvas = $("canvas");
  canvas.addEventListener("dragover", (e) => e.preventDefault());
  canvas.addEventListener("drop", (e) => {
    e.preventDefault();
    const world = editor.toWorld(e.clientX, e.clientY);
    const kind = kindFromDragEvent(e);
    if (kind) {
      const node = workspace.addNode(kind as NodeKindName, world.x, world.y);
      workspace.selection = node.id;
      editor.render();
      renderInspector();
      return;
    }
    const file = e.dataTransfer?.files?.[0];
    if (file) {
      file.text().then((text) => {
        try {
          const doc = JSON.parse(text) as TemplateDoc;
          if (doc.version !== 1 || !Array.isArray(doc.nodes)) {
            throw new Error("not a version-1 template file");
          }
          workspace.mergeTemplate(doc, world.x, world.y);
          editor.render();
        } catch (err) {
          toast(`Template rejected: ${err instanceof Error ? err.message : err}`);
        }
      });
    }
  });
}

function renderInspector(): void {
  const panel = $("inspector");
  const id = workspace.selection;
  const node = id ? workspace.node(id) : undefined;
  if (!node) {
    panel.innerHTML = "<p class='hint'>Select a node to edit it.</p>";
    return;
  }
  panel.innerHTML = "";
  const title = document.createElement("h3");
  title.textContent = `${node.label} (${node.kind})`;
  panel.appendChild(title);

  const body = document.createElement("textarea");
  body.value = node.body;
  body.placeholder = node.kind === "text_input" ? "Your input text…" : "Prompt text…";
  body.addEventListener("input", () => workspace.setBody(node.id, body.value));
  panel.appendChild(body);

  if (node.kind !== "text_input" && node.params) {
    const temp = document.createElement("input");
    temp.type = "range";
    temp.min = "0";
    temp.max = "2";
    temp.step = "0.05";
    temp.value = String(node.params.temperature);
    const tempLabel = document.createElement("label");
    tempLabel.textContent = `temperature ${node.params.temperature.toFixed(2)}`;
    temp.addEventListener("input", () => {
      workspace.setParams(node.id, Number(temp.value), node.params!.max_tokens);
      tempLabel.textContent = `temperature ${Number(temp.value).toFixed(2)}`;
    });
    panel.append(tempLabel, temp);

    const tokens = document.createElement("input");
    tokens.type = "number";
    tokens.min = "1";
    tokens.max = "4096";
    tokens.value = String(node.params.max_tokens);
    const tokensLabel = document.createElement("label");
    tokensLabel.textContent = "max output tokens";
    tokens.addEventListener("input", () => {
      workspace.setParams(node.id, node.params!.temperature, Number(tokens.value));
      if (Number(tokens.value) !== node.params!.max_tokens) {
        toast(`max tokens clamped to ${node.params!.max_tokens}`);
        tokens.value = String(node.params!.max_tokens);
      }
    });
    panel.append(tokensLabel, tokens);
  }

  const output = workspace.lastOutputs[node.id];
  if (output) {
    const pre = document.createElement("pre");
    pre.className = "node-output";
    if (output.type === "text") {
      pre.textContent = output.content;
      panel.appendChild(pre);
    } else {
      const img = document.createElement("img");
      img.src = output.url;
      img.className = "node-output-image";
      panel.appendChild(img);
    }
  }

  const remove = document.createElement("button");
  remove.textContent = "Delete node";
  remove.addEventListener("click", () => {
    workspace.removeNode(node.id);
    workspace.selection = null;
    editor.render();
    renderInspector();
  });
  panel.appendChild(remove);
}

function setupToolbar(): void {
  $("btn-save").addEventListener("click", () => {
    const blob = new Blob([workspace.serialize()], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = `${workspace.name || "template"}.json`;
    a.click();
    URL.revokeObjectURL(a.href);
    workspace.dirty = false;
  });

  const runButton = $("btn-run") as HTMLButtonElement;
  runButton.addEventListener("click", async () => {
    if (runInFlight) return;
    runInFlight = true;
    runButton.disabled = true;
    try {
      const result = await api.run(workspace.toTemplate());
      workspace.recordRun(result.outputs, result.errors);
    } catch (err) {
      const detail = err as { code?: string; details?: unknown[] };
      if (detail.code === "cycle_error") {
        for (const nodeId of (detail.details ?? []) as string[]) {
          workspace.lastErrors[nodeId] = { code: "cycle_error", message: "on a cycle" };
        }
      }
      toast(err instanceof Error ? err.message : String(err));
    } finally {
      runInFlight = false;
      runButton.disabled = false;
      editor.render();
      renderInspector();
    }
  });

  $("btn-fit").addEventListener("click", () => editor.zoomToFit());

  ($("notepad") as HTMLTextAreaElement).addEventListener("input", (e) => {
    workspace.notepad = (e.target as HTMLTextAreaElement).value;
  });

  $("workspace-name").addEventListener("input", (e) => {
    workspace.name = (e.target as HTMLInputElement).value || "workspace";
  });
}

function setupChat(): void {
  const chat = new ChatView(api);
  const log = $("chat-log");
  const input = $("chat-input") as HTMLInputElement;
  const examples = $("chat-examples");

  const redraw = () => {
    log.innerHTML = "";
    for (const turn of chat.turns) log.appendChild(renderTurn(turn));
    log.scrollTop = log.scrollHeight;
    if (chat.exampleQueries.length && !examples.childElementCount) {
      for (const query of chat.exampleQueries) {
        const button = document.createElement("button");
        button.className = "example-query";
        button.textContent = query;
        button.addEventListener("click", () => {
          input.value = query;
          input.focus();
        });
        examples.appendChild(button);
      }
    }
    if (chat.error) toast(chat.error);
  };

  $("chat-send").addEventListener("click", async () => {
    const message = input.value.trim();
    if (!message) return;
    input.value = "";
    await chat.send(message);
    redraw();
  });
  input.addEventListener("keydown", (e) => {
    if (e.key === "Enter") $("chat-send").click();
  });

  document.querySelectorAll("[data-tab]").forEach((tab) => {
    tab.addEventListener("click", () => {
      document.querySelectorAll(".view").forEach((v) => v.classList.remove("active"));
      document.querySelectorAll("[data-tab]").forEach((t) => t.classList.remove("active"));
      $(tab.getAttribute("data-tab")!).classList.add("active");
      tab.classList.add("active");
    });
  });
}

async function boot(): Promise<void> {
  await buildSidebar().catch(() => toast("Service unreachable; is `chainloom serve` running?"));
  setupCanvasDrop();
  setupToolbar();
  setupChat();
  editor.render();
  renderInspector();
  window.addEventListener("resize", () => editor.render());
}

boot();
