"""Conversational baseline: linear chat sessions over the same backends.

The whole alternating history is serialized into a single user message as a
"User:/Assistant:" transcript so the request content is assertable against
the deterministic mock. Messages starting with "/image " are routed to the
image backend instead.
"""

from __future__ import annotations

import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field

from ..backends import BackendSet
from ..model import GenerationParams

IMAGE_COMMAND = "/image "


@dataclass
class ChatTurn:
    role: str  # "user" | "assistant"
    kind: str  # "text" | "image"
    content: str = ""
    image_id: str | None = None
    media_type: str | None = None

    def to_dict(self) -> dict:
        doc: dict = {"role": self.role, "type": self.kind}
        if self.kind == "text":
            doc["content"] = self.content
        else:
            doc["image_id"] = self.image_id
            doc["media_type"] = self.media_type
            doc["url"] = f"/api/images/{self.image_id}"
        return doc


@dataclass
class ChatSession:
    session_id: str
    turns: list[ChatTurn] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)


def serialize_history(turns: list[ChatTurn], new_message: str) -> str:
    """Transcript form sent as the user content of each text request."""
    lines = []
    for turn in turns:
        speaker = "User" if turn.role == "user" else "Assistant"
        body = turn.content if turn.kind == "text" else f"[image:{turn.image_id}]"
        lines.append(f"{speaker}: {body}")
    lines.append(f"User: {new_message}")
    return "\n".join(lines)


class ChatManager:
    """Sessions are in-memory; posts to one session are serialized."""

    def __init__(self, backends: BackendSet, image_sink=None):
        self.backends = backends
        self.image_sink = image_sink  # callable(GeneratedImage) -> None
        self.sessions: dict[str, ChatSession] = {}
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._registry_lock = threading.Lock()

    def get(self, session_id: str) -> ChatSession | None:
        return self.sessions.get(session_id)

    def post(self, session_id: str, message: str) -> ChatTurn:
        if not message:
            raise ValueError("message must be non-empty")
        with self._registry_lock:
            lock = self._locks[session_id]
        with lock:
            session = self.sessions.setdefault(session_id, ChatSession(session_id))
            if message.startswith(IMAGE_COMMAND):
                prompt = message[len(IMAGE_COMMAND):]
                image = self.backends.image.generate_image(prompt, GenerationParams())
                if self.image_sink is not None:
                    self.image_sink(image)
                reply = ChatTurn(role="assistant", kind="image",
                                 image_id=image.image_id,
                                 media_type=image.media_type)
            else:
                content = serialize_history(session.turns, message)
                text = self.backends.text.generate_text(content, GenerationParams())
                reply = ChatTurn(role="assistant", kind="text", content=text)
            session.turns.append(ChatTurn(role="user", kind="text", content=message))
            session.turns.append(reply)
            return reply
