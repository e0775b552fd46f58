from .app import ServiceConfig, create_app
from .chat import ChatManager, ChatSession, ChatTurn, serialize_history
from .store import ImageStore, TemplateRecord, TemplateStore

__all__ = [
    "ServiceConfig",
    "create_app",
    "ChatManager",
    "ChatSession",
    "ChatTurn",
    "serialize_history",
    "ImageStore",
    "TemplateRecord",
    "TemplateStore",
]
