"""Multiplayer arena: newline-JSON protocol, match store, TCP/WS servers."""

from .arena import DEFAULT_TURN_TIMEOUT, GameTable, run_local_games
from .protocol import PROTOCOL_VERSION, ProtocolError
from .server import ArenaServer, ServiceConfig, serve
from .store import MatchRecord, RecordStore, ReplayMismatchError

__all__ = [
    "ArenaServer", "DEFAULT_TURN_TIMEOUT", "GameTable", "MatchRecord",
    "PROTOCOL_VERSION", "ProtocolError", "RecordStore",
    "ReplayMismatchError", "ServiceConfig", "run_local_games", "serve",
]
