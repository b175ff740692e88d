"""Message-observing session types: trace semantics and a typechecker."""

__version__ = "0.1.0"
