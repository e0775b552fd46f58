// Conversational baseline view state. Rendered turn order always mirrors the
// server session: after every post the full session is re-fetched.

import { ApiClient } from "./api.js";
import { ChatTurnDoc } from "./types.js";

export class ChatView {
  turns: ChatTurnDoc[] = [];
  exampleQueries: string[] = [];
  pending = false;
  error: string | null = null;

  constructor(
    private api: ApiClient,
    public sessionId: string = `s-${Date.now().toString(36)}-${Math.floor(Math.random() * 1e6).toString(36)}`,
  ) {}

  async send(message: string): Promise<void> {
    if (!message || this.pending) return;
    this.pending = true;
    this.error = null;
    try {
      await this.api.chatPost(this.sessionId, message);
      await this.refresh();
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
    } finally {
      this.pending = false;
    }
  }

  async refresh(): Promise<void> {
    const session = await this.api.chatGet(this.sessionId);
    this.turns = session.turns;
    this.exampleQueries = session.example_queries;
  }
}

export function renderTurn(turn: ChatTurnDoc): HTMLElement {
  const div = document.createElement("div");
  div.className = `chat-turn ${turn.role}`;
  if (turn.type === "image" && turn.url) {
    const img = document.createElement("img");
    img.src = turn.url;
    img.alt = `generated image ${turn.image_id}`;
    div.appendChild(img);
  } else {
    div.textContent = turn.content ?? "";
  }
  return div;
}
