"""Gongzhu engine, agents and training/evaluation tools."""

from .cards import (
    C10,
    CARD_POINTS,
    Card,
    DJ,
    HA,
    HJ,
    HK,
    HQ,
    POINT_CARDS,
    SQ,
    card_name,
    make_card,
    parse_card,
    rank_of,
    suit_of,
)
from .engine import (
    GameState,
    GongzhuError,
    IllegalMoveError,
    InvalidTrickError,
    PlayEvent,
    PlayerView,
    Score,
    TerminalStateError,
    deal,
    from_hands,
    legal_moves,
    play,
    resolve_trick,
    score,
    score_pile,
    team_of,
)
from .records import ParseError, parse_game, serialize_game

__version__ = "0.1.0"

__all__ = [
    "C10", "CARD_POINTS", "Card", "DJ", "HA", "HJ", "HK", "HQ",
    "POINT_CARDS", "SQ", "card_name", "make_card", "parse_card", "rank_of",
    "suit_of", "GameState", "GongzhuError", "IllegalMoveError",
    "InvalidTrickError", "PlayEvent", "PlayerView", "Score",
    "TerminalStateError", "deal", "from_hands", "legal_moves", "play",
    "resolve_trick", "score", "score_pile", "team_of", "ParseError",
    "parse_game", "serialize_game", "__version__",
]
