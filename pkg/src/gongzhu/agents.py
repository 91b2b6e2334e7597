"""Baseline opponents: Mr. Random, Mr. If and Mr. Greed.

All agents implement ``choose(view, rng) -> Card`` and are stateless
between calls, so one instance can serve many concurrent games.  The
returned card is always legal for the view.
"""

from __future__ import annotations

import random
from typing import Protocol

from .cards import (
    C10,
    CARD_POINTS,
    CLUB,
    Card,
    DIAMOND,
    DJ,
    HEART,
    SPADE,
    SQ,
    make_card,
    rank_of,
    suit_of,
)
from .engine import PlayerView, PlayEvent, resolve_trick, team_of


class Agent(Protocol):
    name: str

    def choose(self, view: PlayerView, rng: random.Random) -> Card:
        ...


# Heuristic hold values for dangerous and valuable non-point cards.
# Negative: likely to force a bad capture while the matching point card
# is still out.  Positive: likely to catch the +100 diamond.
CARD_VALUE_TABLE = {
    make_card(SPADE, 14): -50,
    make_card(SPADE, 13): -30,
    make_card(CLUB, 14): -20,
    make_card(CLUB, 13): -15,
    make_card(CLUB, 12): -10,
    make_card(CLUB, 11): -5,
    make_card(DIAMOND, 14): +30,
    make_card(DIAMOND, 13): +20,
    make_card(DIAMOND, 12): +10,
}

# Desk constant: capturing C10 doubles a (usually negative) pile.
TRANSFORMER_CAPTURE_VALUE = -20

_WATCHED = {SPADE: SQ, CLUB: C10, DIAMOND: DJ}


def _trick_points(cards) -> int:
    pts = sum(CARD_POINTS.get(c, 0) for c in cards)
    if C10 in cards:
        pts += TRANSFORMER_CAPTURE_VALUE
    return pts


def _winning_event(trick):
    led = suit_of(trick[0].card)
    best = trick[0]
    for e in trick[1:]:
        if suit_of(e.card) == led and rank_of(e.card) > rank_of(best.card):
            best = e
    return best


class MrRandom:
    """Uniformly random legal card."""

    name = "random"

    def choose(self, view: PlayerView, rng: random.Random) -> Card:
        return rng.choice(sorted(view.legal_moves()))


class MrIf:
    """A fixed rule cascade standing in for folk card sense.

    Rules, in priority order:
      1. void in the led suit: dump SQ;
      2. never win a trick that already contains SQ if a lower card
         in the led suit exists;
      3. void in the led suit: dump the highest scoring heart;
      4. leading: lowest card of the longest safe suit (a suit is unsafe
         when it is hearts with heart points still out, spades while we
         hold SQ, or when our lowest card in it is queen or higher);
      5. third seat with points already in the trick: slip under the
         current winner with our highest non-winning card.
    Fillers keep every remaining case legal: clean last-seat tricks are
    won with the lowest sufficient card, poisoned tricks are ducked
    high, discards shed the riskiest card first (and hand DJ to a
    winning partner).
    """

    name = "if"

    def choose(self, view: PlayerView, rng: random.Random = None) -> Card:
        legal = sorted(view.legal_moves())
        if len(legal) == 1:
            return legal[0]
        trick = view.current_trick
        if not trick:
            return self._lead(view, legal)
        led = suit_of(trick[0].card)
        if suit_of(legal[0]) != led:
            return self._discard(view, legal, trick)
        return self._follow(view, legal, trick, led)

    def _lead(self, view, legal):
        unseen = view.unseen_cards
        by_suit = {s: [] for s in range(4)}
        for c in legal:
            by_suit[suit_of(c)].append(c)
        safe = []
        for s, cards in by_suit.items():
            if not cards:
                continue
            if s == HEART and any(CARD_POINTS.get(c, 1) < 0 for c in unseen
                                  if suit_of(c) == HEART):
                continue
            if s == SPADE and SQ in view.hand:
                continue
            if rank_of(min(cards)) >= 12:
                continue
            safe.append((len(cards), -min(cards), s))
        if safe:
            best = max(safe)
            return min(by_suit[best[2]])
        return min(legal, key=lambda c: (rank_of(c), c))

    def _discard(self, view, legal, trick):
        if SQ in view.hand and SQ in legal:
            return SQ
        partner_winning = _winning_event(trick).player == (view.player + 2) % 4
        if partner_winning and DJ in legal:
            return DJ
        hearts = [c for c in legal
                  if suit_of(c) == HEART and CARD_POINTS.get(c, 0) < 0]
        if hearts:
            return max(hearts, key=rank_of)
        risky = [c for c in legal
                 if CARD_VALUE_TABLE.get(c, 0) < 0
                 and _WATCHED[suit_of(c)] in view.unseen_cards]
        if risky:
            return min(risky, key=lambda c: CARD_VALUE_TABLE[c])
        plain = [c for c in legal
                 if c != DJ and not (suit_of(c) == DIAMOND
                                     and DJ in view.unseen_cards
                                     and rank_of(c) >= 12)]
        pool = plain or legal
        return max(pool, key=lambda c: (rank_of(c), -c))

    def _follow(self, view, legal, trick, led):
        top = rank_of(_winning_event(trick).card)
        under = [c for c in legal if rank_of(c) < top]
        over = [c for c in legal if rank_of(c) > top]
        if any(e.card == SQ for e in trick) and under:
            return max(under, key=rank_of)
        poisoned = _trick_points(tuple(e.card for e in trick)) < 0
        if len(trick) == 2 and poisoned and under:
            return max(under, key=rank_of)
        if len(trick) == 3:
            if not poisoned and over:
                return min(over, key=rank_of)
            if under:
                return max(under, key=rank_of)
        if under:
            return max(under, key=rank_of)
        return min(legal, key=rank_of)


class MrGreed:
    """One-trick expectation plus hold-value bookkeeping.

    Each legal card is scored by finishing the current trick 32 times
    with cards drawn from the unseen pool (drawn cards follow the led
    suit while the pool allows it).  A completion is worth the trick's
    points signed for our team, plus a small bonus for winning the
    trick ourselves; playing a card also realizes the negative of its
    hold value while the matching point card is still out.  Highest
    mean wins, ties broken by lowest card index.
    """

    name = "greed"
    samples = 32
    win_bonus = 2

    def choose(self, view: PlayerView, rng: random.Random) -> Card:
        legal = sorted(view.legal_moves())
        if len(legal) == 1:
            return legal[0]
        pool = sorted(view.unseen_cards)
        best_card, best_score = None, None
        for card in legal:
            s = self._score_move(view, card, pool, rng)
            if best_score is None or s > best_score:
                best_card, best_score = card, s
        return best_card

    def _score_move(self, view, card, pool, rng):
        trick = view.current_trick + (PlayEvent(view.player, card),)
        need = 4 - len(trick)
        value = -self._hold_value(view, card)
        if need == 0:
            return value + self._settle(view, trick) * 1.0
        led = suit_of(trick[0].card)
        in_suit = [c for c in pool if suit_of(c) == led]
        off_suit = [c for c in pool if suit_of(c) != led]
        total = 0.0
        for _ in range(self.samples):
            total += self._settle(
                view, trick + self._completion(trick, need, in_suit,
                                               off_suit, rng))
        return value + total / self.samples

    def _completion(self, trick, need, in_suit, off_suit, rng):
        takeable = list(in_suit)
        fallback = list(off_suit)
        player = (trick[-1].player + 1) % 4
        out = []
        for _ in range(need):
            src = takeable if takeable else fallback
            c = src.pop(rng.randrange(len(src)))
            out.append(PlayEvent(player, c))
            player = (player + 1) % 4
        return tuple(out)

    def _settle(self, view, trick):
        winner = resolve_trick(trick)
        pts = _trick_points(tuple(e.card for e in trick))
        sign = 1 if team_of(winner) == team_of(view.player) else -1
        bonus = self.win_bonus if winner == view.player else 0
        return sign * pts + bonus

    def _hold_value(self, view, card):
        v = CARD_VALUE_TABLE.get(card, 0)
        if v and _WATCHED[suit_of(card)] in view.unseen_cards:
            return v
        return 0


_REGISTRY = {
    "random": MrRandom,
    "if": MrIf,
    "greed": MrGreed,
}


def make_agent(name: str, **kwargs) -> Agent:
    """Agent factory: ``random``, ``if``, ``greed``, ``net:<path>``,
    ``mcts:<path>`` and ``scrofa:<path>`` (belief search)."""
    if name in _REGISTRY:
        return _REGISTRY[name]()
    if ":" in name:
        kind, _, arg = name.partition(":")
        if kind == "net":
            from .nn import PolicyValueNet
            from .nn.play import NetAgent
            return NetAgent(PolicyValueNet.load(arg), **kwargs)
        if kind == "mcts":
            from .nn import PolicyValueNet
            from .mcts import MctsAgent
            return MctsAgent(PolicyValueNet.load(arg), **kwargs)
        if kind == "scrofa":
            from .nn import PolicyValueNet
            from .belief import BeliefAgent
            return BeliefAgent(PolicyValueNet.load(arg), **kwargs)
    raise ValueError(f"unknown agent {name!r}")
