"""Text records of games: one line per game, human-readable.

Layout::

    DEAL seed=317 leader=2 ; PLAYS C5 CK C2 C7 ... ; SCORE 0 -25 0 -75

``DEAL`` carries either ``seed=`` (the deal came from a seeded shuffle)
or ``hands=`` with four explicit 13-card groups separated by ``|``.
``PLAYS`` lists the cards in play order and may be partial.  ``SCORE``
appears only for complete games and is re-checked on parse, so a stored
record can never disagree with the engine.
"""

from __future__ import annotations

import re

from .cards import card_name, parse_card
from .engine import GameState, GongzhuError, deal, from_hands, play

_TOKEN = re.compile(r"\S+")


class ParseError(ValueError):
    """Bad record text; ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


def initial_hands(state: GameState) -> tuple:
    """Recover the pre-play hands from a mid- or post-game state."""
    hands = [set(h) for h in state.hands]
    for event in state.history:
        hands[event.player].add(event.card)
    return tuple(frozenset(h) for h in hands)


def serialize_game(state: GameState) -> str:
    if state.deal_seed is not None:
        head = f"DEAL seed={state.deal_seed} leader={state.leader}"
    else:
        groups = "|".join(
            ",".join(card_name(c) for c in sorted(h))
            for h in initial_hands(state))
        head = f"DEAL hands={groups} leader={state.leader}"
    parts = [head]
    if state.history:
        parts.append(
            "PLAYS " + " ".join(card_name(e.card) for e in state.history))
    if state.finished:
        parts.append(
            "SCORE " + " ".join(str(v) for v in state.scores().per_player))
    return " ; ".join(parts)


def _tokens(section: str, base: int):
    return [(base + m.start(), m.group()) for m in _TOKEN.finditer(section)]


def _parse_deal(tokens) -> GameState:
    fields = {}
    for off, tok in tokens:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", off)
        key, _, value = tok.partition("=")
        if key in fields:
            raise ParseError(f"duplicate field {key!r}", off)
        fields[key] = (off, value)

    if "leader" not in fields:
        raise ParseError("DEAL is missing leader=", tokens[0][0] if tokens else 0)
    off, raw = fields.pop("leader")
    try:
        leader = int(raw)
    except ValueError:
        raise ParseError(f"bad leader {raw!r}", off) from None
    if not 0 <= leader <= 3:
        raise ParseError(f"leader must be 0..3, got {leader}", off)

    if "seed" in fields and "hands" not in fields:
        off, raw = fields.pop("seed")
        try:
            seed = int(raw)
        except ValueError:
            raise ParseError(f"bad seed {raw!r}", off) from None
        state = deal(seed, leader=leader)
    elif "hands" in fields and "seed" not in fields:
        off, raw = fields.pop("hands")
        groups = raw.split("|")
        if len(groups) != 4:
            raise ParseError(f"hands= needs 4 groups, got {len(groups)}", off)
        try:
            hands = [[parse_card(t) for t in g.split(",")] for g in groups]
            state = from_hands(hands, leader)
        except (ValueError, GongzhuError) as exc:
            raise ParseError(str(exc), off) from None
    else:
        raise ParseError("DEAL needs exactly one of seed= or hands=",
                         tokens[0][0] if tokens else 0)

    if fields:
        key = next(iter(fields))
        raise ParseError(f"unknown DEAL field {key!r}", fields[key][0])
    return state


def parse_game(text: str) -> GameState:
    """Parse one record line back into a (possibly mid-game) state."""
    sections = []
    pos = 0
    for chunk in text.split(";"):
        sections.append((pos, chunk))
        pos += len(chunk) + 1

    labelled = []
    for base, chunk in sections:
        toks = _tokens(chunk, base)
        if not toks:
            raise ParseError("empty section", base)
        labelled.append((toks[0][0], toks[0][1], toks[1:]))

    if labelled[0][1] != "DEAL":
        raise ParseError(f"record must start with DEAL, got {labelled[0][1]!r}",
                         labelled[0][0])
    state = _parse_deal(labelled[0][2])

    seen = {"DEAL"}
    score_tokens = None
    for off, label, toks in labelled[1:]:
        if label in seen:
            raise ParseError(f"duplicate section {label!r}", off)
        seen.add(label)
        if label == "PLAYS":
            if "SCORE" in seen:
                raise ParseError("PLAYS must come before SCORE", off)
            for toff, tok in toks:
                try:
                    card = parse_card(tok)
                except ValueError as exc:
                    raise ParseError(str(exc), toff) from None
                try:
                    state = play(state, card)
                except GongzhuError as exc:
                    raise ParseError(str(exc), toff) from None
        elif label == "SCORE":
            score_tokens = (off, toks)
        else:
            raise ParseError(f"unknown section {label!r}", off)

    if score_tokens is not None:
        off, toks = score_tokens
        if not state.finished:
            raise ParseError("SCORE on an unfinished game", off)
        if len(toks) != 4:
            raise ParseError(f"SCORE needs 4 values, got {len(toks)}", off)
        claimed = []
        for toff, tok in toks:
            try:
                claimed.append(int(tok))
            except ValueError:
                raise ParseError(f"bad score {tok!r}", toff) from None
        actual = list(state.scores().per_player)
        if claimed != actual:
            raise ParseError(
                f"stored score {claimed} disagrees with replay {actual}", off)
    return state
