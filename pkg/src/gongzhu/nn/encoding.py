"""State encoding for the policy-value network.

The input is a 434-vector laid out as three blocks, everything ordered
relative to the mover (block j describes seat ``(mover + j) % 4``):

* hands, 52 x 4: block 0 is the mover's hand one-hot.  The other three
  blocks are either the true hands (perfect-information training) or an
  averaged placement where every card the mover cannot see contributes
  1/3 to all three blocks.
* current trick, 54 x 3: one 54-slot block per card already on the
  table this trick, in play order.  A card with index k lights slots
  k, k+1 and k+2, smearing each card over its neighbours; the two
  trailing pad slots absorb the spill from the highest indices.
* captured point cards, 16 x 4: one-hot over the 16 point cards for
  each seat's pile, mover-relative like the hands.
"""

from __future__ import annotations

import numpy as np

from .. import engine
from ..cards import POINT_CARD_SLOT

HANDS_SIZE = 52 * 4
TRICK_SIZE = 54 * 3
PILES_SIZE = 16 * 4
INPUT_SIZE = HANDS_SIZE + TRICK_SIZE + PILES_SIZE

_TRICK_BASE = HANDS_SIZE
_PILES_BASE = HANDS_SIZE + TRICK_SIZE


def _fill_common(vec, mover, current_trick, piles):
    for i, event in enumerate(current_trick):
        base = _TRICK_BASE + 54 * i
        vec[base + event.card: base + event.card + 3] = 1.0
    for j in range(4):
        base = _PILES_BASE + 16 * j
        for c in piles[(mover + j) % 4]:
            vec[base + POINT_CARD_SLOT[c]] = 1.0


def encode_exact(state: engine.GameState, mover: int = None) -> np.ndarray:
    """Encode with all four hands visible (double-dummy training)."""
    if mover is None:
        mover = state.to_play
    vec = np.zeros(INPUT_SIZE)
    for j in range(4):
        for c in state.hands[(mover + j) % 4]:
            vec[52 * j + c] = 1.0
    _fill_common(vec, mover, state.current_trick, state.piles)
    return vec


def encode_averaged(view: engine.PlayerView) -> np.ndarray:
    """Encode what ``view.player`` knows; hidden cards spread 1/3 each.

    Works for any mover seat, so belief code can also encode another
    player's past decision by handing in a reconstructed view.
    """
    mover = view.player
    vec = np.zeros(INPUT_SIZE)
    for c in view.hand:
        vec[c] = 1.0
    for c in view.unseen_cards:
        vec[52 + c] = vec[104 + c] = vec[156 + c] = 1.0 / 3.0
    _fill_common(vec, mover, view.current_trick, view.piles)
    return vec


def decode_hands(vec: np.ndarray, mover: int) -> tuple:
    """Inverse of the hands block of ``encode_exact``."""
    hands = [None] * 4
    for j in range(4):
        block = vec[52 * j: 52 * (j + 1)]
        hands[(mover + j) % 4] = frozenset(int(c) for c in np.nonzero(block)[0])
    return tuple(hands)


def legal_mask(legal) -> np.ndarray:
    mask = np.zeros(52)
    for c in legal:
        mask[c] = 1.0
    return mask
