"""Card primitives for Gongzhu.

Cards are plain ints 0..51.  Suits are ordered S, H, D, C and ranks run
2..14 (11=J, 12=Q, 13=K, 14=A), so ``index = suit * 13 + rank - 2``.
Two-char text tokens put the suit letter first: ``SQ``, ``HT``, ``DA``.
"""

from __future__ import annotations

Card = int

SPADE, HEART, DIAMOND, CLUB = 0, 1, 2, 3
SUIT_CHARS = "SHDC"
RANK_CHARS = "23456789TJQKA"

DECK = tuple(range(52))


def make_card(suit: int, rank: int) -> Card:
    if not 0 <= suit <= 3:
        raise ValueError(f"bad suit {suit}")
    if not 2 <= rank <= 14:
        raise ValueError(f"bad rank {rank}")
    return suit * 13 + rank - 2


def suit_of(card: Card) -> int:
    return card // 13


def rank_of(card: Card) -> int:
    return card % 13 + 2


def card_name(card: Card) -> str:
    return SUIT_CHARS[card // 13] + RANK_CHARS[card % 13]


def parse_card(token: str) -> Card:
    if len(token) != 2:
        raise ValueError(f"bad card token {token!r}")
    try:
        suit = SUIT_CHARS.index(token[0])
        rank = RANK_CHARS.index(token[1])
    except ValueError:
        raise ValueError(f"bad card token {token!r}") from None
    return suit * 13 + rank


# Named point cards.
SQ = make_card(SPADE, 12)
DJ = make_card(DIAMOND, 11)
C10 = make_card(CLUB, 10)
HA = make_card(HEART, 14)
HK = make_card(HEART, 13)
HQ = make_card(HEART, 12)
HJ = make_card(HEART, 11)

HEARTS = tuple(make_card(HEART, r) for r in range(2, 15))

# Fixed per-card values; C10's doubling is handled by the scorer.
CARD_POINTS = {
    SQ: -100,
    DJ: +100,
    HA: -50,
    HK: -40,
    HQ: -30,
    HJ: -20,
}
for _r in range(5, 11):
    CARD_POINTS[make_card(HEART, _r)] = -10
for _r in range(2, 5):
    CARD_POINTS[make_card(HEART, _r)] = 0

POINT_CARDS = frozenset(list(HEARTS) + [SQ, DJ, C10])

# Canonical slot order for the 16 point cards (by card index).
POINT_CARD_ORDER = tuple(sorted(POINT_CARDS))
POINT_CARD_SLOT = {c: i for i, c in enumerate(POINT_CARD_ORDER)}


def cards_text(cards) -> str:
    """Space-separated tokens, in the iteration order given."""
    return " ".join(card_name(c) for c in cards)


def sorted_hand(cards) -> tuple:
    return tuple(sorted(cards))
