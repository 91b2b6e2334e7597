"""Wire format for the arena: newline-delimited JSON messages.

One message per line, UTF-8, no framing beyond the newline.  The same
shapes travel over raw TCP and over the WebSocket bridge (one text
frame per message there).  Field-by-field documentation lives in
docs/protocol.md.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Optional

from ..cards import card_name, parse_card
from ..engine import PlayerView

PROTOCOL_VERSION = 1

MESSAGE_KINDS = frozenset({
    "hello", "seat", "deal", "your_turn", "play", "trick_result",
    "game_result", "error", "state_sync",
})

MAX_LINE_BYTES = 4096
MAX_NAME_LENGTH = 64


class ProtocolError(ValueError):
    """The peer sent something the protocol does not allow."""


def encode(message: dict) -> bytes:
    return json.dumps(message, separators=(",", ":")).encode() + b"\n"


def decode_line(line: bytes) -> dict:
    if len(line) > MAX_LINE_BYTES:
        raise ProtocolError("message too long")
    try:
        message = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise ProtocolError("not a JSON line") from None
    if not isinstance(message, dict):
        raise ProtocolError("message must be a JSON object")
    kind = message.get("kind")
    if kind not in MESSAGE_KINDS:
        raise ProtocolError(f"unknown message kind {kind!r}")
    return message


def parse_card_field(message: dict, field: str = "card") -> int:
    token = message.get(field)
    if not isinstance(token, str):
        raise ProtocolError(f"missing card token in {field!r}")
    try:
        return parse_card(token)
    except ValueError:
        raise ProtocolError(f"bad card token {token!r}") from None


def validate_hello(message: dict) -> str:
    name = message.get("name")
    if not isinstance(name, str) or not name or len(name) > MAX_NAME_LENGTH:
        raise ProtocolError("hello needs a name of 1..64 characters")
    version = message.get("protocol", PROTOCOL_VERSION)
    if version != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {version!r}")
    return name


def validate_seat_request(message: dict) -> Optional[int]:
    seat = message.get("seat")
    if seat is None:
        return None
    if not isinstance(seat, int) or not 0 <= seat <= 3:
        raise ProtocolError("seat must be an integer 0..3")
    return seat


# --- server -> client builders -------------------------------------------

def hello_reply(server_name: str) -> dict:
    return {"kind": "hello", "server": server_name,
            "protocol": PROTOCOL_VERSION}


def seat_reply(seat: int, players: List[str]) -> dict:
    return {"kind": "seat", "seat": seat, "players": players}


def _tokens(cards: Iterable[int]) -> List[str]:
    return [card_name(c) for c in sorted(cards)]


def deal_message(view: PlayerView, game_id: str) -> dict:
    return {"kind": "deal", "game": game_id, "hand": _tokens(view.hand),
            "leader": view.to_play}


def your_turn_message(view: PlayerView, deadline: float,
                      hint: Optional[Dict[int, float]] = None) -> dict:
    message = {
        "kind": "your_turn",
        "legal": _tokens(view.legal_moves()),
        "trick": [[e.player, card_name(e.card)] for e in view.current_trick],
        "deadline": deadline,
    }
    if hint is not None:
        message["hint"] = {card_name(c): q for c, q in sorted(hint.items())}
    return message


def play_message(seat: int, card: int) -> dict:
    return {"kind": "play", "seat": seat, "card": card_name(card),
            "legal": True}


def trick_result_message(winner: int, trick,
                         captured: Iterable[int]) -> dict:
    # point settlement happens only at game end (the ten of clubs
    # doubles), so tricks report the captured point cards, not a score
    return {"kind": "trick_result", "winner": winner,
            "trick": [[e.player, card_name(e.card)] for e in trick],
            "captured": _tokens(captured)}


def game_result_message(game_id: str, per_player, per_team) -> dict:
    return {"kind": "game_result", "game": game_id,
            "scores": list(per_player), "teams": list(per_team)}


def state_sync_message(view: PlayerView, game_id: str) -> dict:
    return {
        "kind": "state_sync",
        "game": game_id,
        "seat": view.player,
        "hand": _tokens(view.hand),
        "history": [[e.player, card_name(e.card)] for e in view.history],
        "trick": [[e.player, card_name(e.card)] for e in view.current_trick],
        "piles": [_tokens(pile) for pile in view.piles],
        "to_play": view.to_play,
    }


def error_message(reason: str, **extra) -> dict:
    message = {"kind": "error", "reason": reason}
    message.update(extra)
    return message
