"""Deterministic Gongzhu rules engine.

The single source of truth for dealing, legality, trick resolution and
scoring.  ``GameState`` is an immutable value: ``play`` returns a new
state, so states can be shared freely across threads.

Teams: seats 0 and 2 versus seats 1 and 3 (partners sit opposite).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from .cards import (
    C10,
    CARD_POINTS,
    Card,
    DJ,
    HEART,
    HEARTS,
    POINT_CARDS,
    SQ,
    card_name,
    rank_of,
    suit_of,
)


class GongzhuError(Exception):
    """Base class for rule and consistency errors."""


class TerminalStateError(GongzhuError):
    pass


class IllegalMoveError(GongzhuError):
    pass


class InvalidTrickError(GongzhuError):
    pass


class InconsistentPilesError(GongzhuError):
    pass


class PlayEvent(NamedTuple):
    player: int
    card: Card


def team_of(player: int) -> int:
    return player % 2


@dataclass(frozen=True)
class Score:
    per_player: tuple
    per_team: tuple


@dataclass(frozen=True)
class PlayerView:
    """What one seat is allowed to see: public history plus own hand."""

    player: int
    hand: frozenset
    history: tuple
    current_trick: tuple
    piles: tuple
    to_play: int

    def legal_moves(self) -> frozenset:
        return _legal_from_hand(self.hand, self.current_trick)

    @property
    def seen_cards(self) -> frozenset:
        played = frozenset(e.card for e in self.history)
        return self.hand | played

    @property
    def unseen_cards(self) -> frozenset:
        return frozenset(range(52)) - self.seen_cards


@dataclass(frozen=True)
class GameState:
    hands: tuple  # 4 frozensets of Card
    history: tuple  # PlayEvents, completed and in-progress tricks alike
    piles: tuple  # 4 frozensets of captured point cards
    to_play: int
    leader: int  # who led the first trick
    deal_seed: Optional[int] = None

    @property
    def stage(self) -> int:
        return len(self.history)

    @property
    def current_trick(self) -> tuple:
        u = len(self.history)
        return self.history[u - u % 4:]

    @property
    def finished(self) -> bool:
        return len(self.history) == 52

    def view(self, player: int) -> PlayerView:
        return PlayerView(
            player=player,
            hand=self.hands[player],
            history=self.history,
            current_trick=self.current_trick,
            piles=self.piles,
            to_play=self.to_play,
        )

    def scores(self) -> Score:
        if not self.finished:
            raise TerminalStateError("game not finished; no final score yet")
        return score(self.piles)

    def team_differential(self) -> int:
        s = self.scores()
        return s.per_team[0] - s.per_team[1]


def deal(seed: int, leader: Optional[int] = None) -> GameState:
    """Shuffle and deal four hands of 13; same seed, same deal.

    The first leader comes from the seed unless the caller overrides it
    (the arena rotates leaders by turns).
    """
    rng = random.Random(seed)
    deck = list(range(52))
    rng.shuffle(deck)
    hands = tuple(frozenset(deck[13 * i: 13 * (i + 1)]) for i in range(4))
    if leader is None:
        leader = rng.randrange(4)
    return GameState(
        hands=hands,
        history=(),
        piles=(frozenset(), frozenset(), frozenset(), frozenset()),
        to_play=leader,
        leader=leader,
        deal_seed=seed,
    )


def from_hands(hands: Iterable[Iterable[Card]], leader: int) -> GameState:
    """Build a fresh state from explicit initial hands."""
    hs = tuple(frozenset(h) for h in hands)
    if len(hs) != 4 or any(len(h) != 13 for h in hs):
        raise GongzhuError("need exactly 4 hands of 13 cards")
    if len(frozenset().union(*hs)) != 52:
        raise GongzhuError("hands must partition the 52-card deck")
    if not 0 <= leader <= 3:
        raise GongzhuError(f"bad leader {leader}")
    return GameState(
        hands=hs,
        history=(),
        piles=(frozenset(), frozenset(), frozenset(), frozenset()),
        to_play=leader,
        leader=leader,
    )


def _legal_from_hand(hand: frozenset, current_trick: tuple) -> frozenset:
    if not current_trick:
        return frozenset(hand)
    led = suit_of(current_trick[0].card)
    follow = frozenset(c for c in hand if suit_of(c) == led)
    return follow or frozenset(hand)


def legal_moves(state: GameState) -> frozenset:
    if state.finished:
        raise TerminalStateError("game is finished")
    return _legal_from_hand(state.hands[state.to_play], state.current_trick)


def resolve_trick(trick) -> int:
    """Winner of a completed trick: highest rank in the led suit.

    Off-suit cards never win; Gongzhu has no trump.
    """
    trick = tuple(trick)
    if len(trick) != 4:
        raise InvalidTrickError(f"trick needs 4 plays, got {len(trick)}")
    if len({e.card for e in trick}) != 4:
        raise InvalidTrickError("duplicate card in trick")
    if len({e.player for e in trick}) != 4:
        raise InvalidTrickError("duplicate player in trick")
    led = suit_of(trick[0].card)
    winner, best = trick[0].player, rank_of(trick[0].card)
    for e in trick[1:]:
        if suit_of(e.card) == led and rank_of(e.card) > best:
            winner, best = e.player, rank_of(e.card)
    return winner


def play(state: GameState, card: Card) -> GameState:
    """Apply one card for ``state.to_play``; returns the successor state."""
    if state.finished:
        raise TerminalStateError("game is finished")
    player = state.to_play
    hand = state.hands[player]
    if card not in hand:
        raise IllegalMoveError(
            f"{card_name(card)} is not in seat {player}'s hand")
    trick = state.current_trick
    if trick:
        led = suit_of(trick[0].card)
        if suit_of(card) != led and any(suit_of(c) == led for c in hand):
            raise IllegalMoveError(
                f"must follow suit: {card_name(trick[0].card)} was led and "
                f"seat {player} still holds that suit")

    hands = list(state.hands)
    hands[player] = hand - {card}
    history = state.history + (PlayEvent(player, card),)
    piles = state.piles

    if len(trick) == 3:
        full = trick + (PlayEvent(player, card),)
        winner = resolve_trick(full)
        points = frozenset(e.card for e in full if e.card in POINT_CARDS)
        if points:
            piles = list(piles)
            piles[winner] = piles[winner] | points
            piles = tuple(piles)
        to_play = winner
    else:
        to_play = (player + 1) % 4

    return GameState(
        hands=tuple(hands),
        history=history,
        piles=piles,
        to_play=to_play,
        leader=state.leader,
        deal_seed=state.deal_seed,
    )


def score_pile(pile: frozenset) -> int:
    """Game points for one player's captured point cards."""
    hearts = [c for c in pile if suit_of(c) == HEART]
    total = sum(CARD_POINTS[c] for c in hearts)
    if len(hearts) == 13:
        total = 200  # all hearts: -200 flips to +200
    if SQ in pile:
        total -= 100
    if DJ in pile:
        total += 100
    if C10 in pile:
        # Doubling acts on the player's own subtotal, after the
        # all-hearts flip; a bare C10 is worth +50.
        total = total * 2 if pile - {C10} else 50
    return total


def score(piles) -> Score:
    piles = tuple(frozenset(p) for p in piles)
    all_cards = [c for p in piles for c in p]
    if len(all_cards) != len(set(all_cards)):
        raise InconsistentPilesError("a point card appears in two piles")
    bad = [c for c in all_cards if c not in POINT_CARDS]
    if bad:
        raise InconsistentPilesError(
            f"non-point cards in piles: {[card_name(c) for c in bad]}")
    per_player = tuple(score_pile(p) for p in piles)
    per_team = (per_player[0] + per_player[2], per_player[1] + per_player[3])
    return Score(per_player=per_player, per_team=per_team)


def random_playout(state: GameState, rng: random.Random) -> GameState:
    """Finish the game with uniformly random legal moves."""
    while not state.finished:
        moves = sorted(legal_moves(state))
        state = play(state, moves[rng.randrange(len(moves))])
    return state
