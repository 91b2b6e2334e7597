"""Direct policy play: no search, just the masked policy head."""

from __future__ import annotations

import random

import numpy as np

from ..cards import Card
from ..engine import PlayerView
from .encoding import encode_averaged, legal_mask
from .network import PolicyValueNet, masked_policy


class NetAgent:
    """Plays the argmax of the masked policy on the averaged encoding.

    With ``temperature`` > 0 it samples from the masked policy raised
    to 1/temperature instead, which the trainer uses for variety.
    """

    name = "net"

    def __init__(self, net: PolicyValueNet, temperature: float = 0.0):
        self.net = net
        self.temperature = temperature

    def policy(self, view: PlayerView) -> np.ndarray:
        logits, _ = self.net.forward(encode_averaged(view))
        return masked_policy(logits, legal_mask(view.legal_moves()))

    def choose(self, view: PlayerView, rng: random.Random) -> Card:
        legal = sorted(view.legal_moves())
        if len(legal) == 1:
            return legal[0]
        probs = self.policy(view)
        if self.temperature > 0:
            p = probs[legal] ** (1.0 / self.temperature)
            p /= p.sum()
            return int(rng.choices(legal, weights=p)[0])
        best = max(legal, key=lambda c: (probs[c], -c))
        return best
