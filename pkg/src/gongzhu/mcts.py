"""UCB Monte-Carlo tree search over perfect-information states.

Node values are stored as team-0-minus-team-1 game points; whichever
seat is moving at a node maximizes or minimizes that scalar according
to its team, so one number serves both sides.  Leaves are scored by the
network value head (terminal leaves by the exact scorer), no rollouts.
"""

from __future__ import annotations

import math
import random
from typing import Callable, List, Optional

import numpy as np

from .cards import POINT_CARD_ORDER, POINT_CARD_SLOT
from .engine import GameState, TerminalStateError
from .nn.encoding import INPUT_SIZE
from .nn.network import PolicyValueNet

_SUIT_MASK = [0x1FFF << (13 * s) for s in range(4)]
_POINT_BIT = {c: 1 << i for i, c in enumerate(POINT_CARD_ORDER)}
_PILE_SCORE: Optional[List[int]] = None


def _pile_score_table() -> List[int]:
    """Score of every 16-bit pile mask, built once per process."""
    global _PILE_SCORE
    if _PILE_SCORE is None:
        from .engine import score_pile
        table = []
        for mask in range(1 << 16):
            pile = frozenset(POINT_CARD_ORDER[i] for i in range(16)
                             if mask >> i & 1)
            table.append(score_pile(pile))
        _PILE_SCORE = table
    return _PILE_SCORE


class FastState:
    """Mutable bitmask twin of GameState for tight search loops."""

    __slots__ = ("hands", "piles", "trick", "trick_leader", "to_play",
                 "remaining")

    def __init__(self, hands, piles, trick, trick_leader, to_play, remaining):
        self.hands = hands
        self.piles = piles
        self.trick = trick
        self.trick_leader = trick_leader
        self.to_play = to_play
        self.remaining = remaining

    @classmethod
    def from_state(cls, state: GameState) -> "FastState":
        hands = [0, 0, 0, 0]
        for i, h in enumerate(state.hands):
            for c in h:
                hands[i] |= 1 << c
        piles = [0, 0, 0, 0]
        for i, pile in enumerate(state.piles):
            for c in pile:
                piles[i] |= _POINT_BIT[c]
        trick = [e.card for e in state.current_trick]
        leader = (state.current_trick[0].player
                  if state.current_trick else state.to_play)
        return cls(hands, piles, trick, leader, state.to_play,
                   sum(len(h) for h in state.hands))

    def copy(self) -> "FastState":
        return FastState(list(self.hands), list(self.piles),
                         list(self.trick), self.trick_leader, self.to_play,
                         self.remaining)

    @property
    def finished(self) -> bool:
        return self.remaining == 0

    def legal_cards(self) -> List[int]:
        hand = self.hands[self.to_play]
        if self.trick:
            follow = hand & _SUIT_MASK[self.trick[0] // 13]
            if follow:
                hand = follow
        out = []
        while hand:
            low = hand & -hand
            out.append(low.bit_length() - 1)
            hand ^= low
        return out

    def play(self, card: int) -> None:
        self.hands[self.to_play] &= ~(1 << card)
        self.trick.append(card)
        self.remaining -= 1
        if len(self.trick) == 4:
            led = self.trick[0] // 13
            best_i, best_rank = 0, self.trick[0] % 13
            pts = 0
            for i, c in enumerate(self.trick):
                if i and c // 13 == led and c % 13 > best_rank:
                    best_i, best_rank = i, c % 13
                pts |= _POINT_BIT.get(c, 0)
            winner = (self.trick_leader + best_i) % 4
            self.piles[winner] |= pts
            self.trick = []
            self.trick_leader = winner
            self.to_play = winner
        else:
            self.to_play = (self.to_play + 1) % 4

    def child(self, card: int) -> "FastState":
        nxt = self.copy()
        nxt.play(card)
        return nxt

    def team_differential(self) -> int:
        t = _pile_score_table()
        return (t[self.piles[0]] + t[self.piles[2]]
                - t[self.piles[1]] - t[self.piles[3]])


def encode_fast(fs: FastState, mover: int = None) -> np.ndarray:
    """Same 434-vector as ``encode_exact`` but straight off bitmasks."""
    if mover is None:
        mover = fs.to_play
    vec = np.zeros(INPUT_SIZE)
    for j in range(4):
        hand = fs.hands[(mover + j) % 4]
        base = 52 * j
        while hand:
            low = hand & -hand
            vec[base + low.bit_length() - 1] = 1.0
            hand ^= low
    for i, card in enumerate(fs.trick):
        base = 208 + 54 * i
        vec[base + card: base + card + 3] = 1.0
    for j in range(4):
        pile = fs.piles[(mover + j) % 4]
        base = 370 + 16 * j
        while pile:
            low = pile & -pile
            vec[base + low.bit_length() - 1] = 1.0
            pile ^= low
    return vec


Evaluator = Callable[[FastState], float]


def net_evaluator(net: PolicyValueNet) -> Evaluator:
    """Value head as a team-differential estimate of a position."""

    def evaluate(fs: FastState) -> float:
        _, value = net.forward(encode_fast(fs))
        return value if fs.to_play % 2 == 0 else -value

    return evaluate


def zero_evaluator(fs: FastState) -> float:
    return 0.0


class SearchConfig:
    def __init__(self, c: float = 30.0, base: int = 0, per_legal: int = 2,
                 fixed: int = None):
        if c < 0:
            raise ValueError("exploration constant must be non-negative")
        self.c = c
        self.base = base
        self.per_legal = per_legal
        self.fixed = fixed

    def count_for(self, n_legal: int) -> int:
        if self.fixed is not None:
            return self.fixed
        return self.base + self.per_legal * n_legal

    @classmethod
    def training(cls, c: float = 30.0) -> "SearchConfig":
        return cls(c=c, base=0, per_legal=2)

    @classmethod
    def evaluation(cls, c: float = 30.0) -> "SearchConfig":
        return cls(c=c, base=10, per_legal=2)


class SearchNode:
    __slots__ = ("state", "children", "visits", "value", "proven")

    def __init__(self, state: FastState):
        self.state = state
        self.children = {}  # Card -> SearchNode, insertion in card order
        self.visits = 0
        self.value = 0.0  # running mean, team0 - team1
        # Exact game value once the subtree is exhausted; heuristic
        # leaf estimates can otherwise pin a mean far from the truth
        # and c=30 cannot claw back a few-hundred-point gap.
        self.proven = None

    def selection_value(self) -> float:
        return self.value if self.proven is None else self.proven

    def expand(self):
        for card in self.state.legal_cards():
            child = self.state.child(card)
            # Forced continuations carry no decisions; rolling them up
            # keeps the tree at decision points and lets short endgames
            # bottom out on exact terminal scores.
            while not child.finished:
                forced = child.legal_cards()
                if len(forced) != 1:
                    break
                child.play(forced[0])
            node = SearchNode(child)
            if child.finished:
                node.proven = float(child.team_differential())
            self.children[card] = node


def select_child(node: SearchNode, c: float) -> int:
    """UCB pick for the seat moving at ``node``; unvisited first.

    Children whose subtrees are already solved are passed over while
    the node is still open; revisiting them can teach nothing, and the
    visits they would soak up are what lets a mis-evaluated sibling
    recover.  Once every child is solved the node itself is solved and
    never reaches this function.
    """
    if not node.children:
        raise TerminalStateError("node has no children to select")
    sign = 1.0 if node.state.to_play % 2 == 0 else -1.0
    log_n = math.log(max(node.visits, 1))
    best_card, best_score = None, None
    for card, child in node.children.items():
        if child.proven is not None:
            continue
        if child.visits == 0:
            return card
        score = (sign * child.selection_value()
                 + c * math.sqrt(log_n / child.visits))
        if best_score is None or score > best_score:
            best_card, best_score = card, score
    if best_card is None:
        # All children proven; exploit the best of them.
        return _best_proven(node)
    return best_card


def _best_proven(node: SearchNode) -> int:
    sign = 1.0 if node.state.to_play % 2 == 0 else -1.0
    best_card, best_value = None, None
    for card, child in node.children.items():
        if child.proven is None:
            continue
        v = sign * child.proven
        if best_value is None or v > best_value:
            best_card, best_value = card, v
    return best_card


def _propagate_proven(path):
    """Mark ancestors solved once every child of theirs is solved."""
    for node in reversed(path):
        if node.proven is not None:
            continue
        if not node.children:
            return
        values = []
        for child in node.children.values():
            if child.proven is None:
                return
            values.append(child.proven)
        node.proven = (max(values) if node.state.to_play % 2 == 0
                       else min(values))


def search_tree(root_state, evaluator: Evaluator,
                config: SearchConfig = None,
                count: int = None) -> SearchNode:
    """Run the simulations and hand back the whole root node."""
    config = config or SearchConfig.training()
    if isinstance(root_state, GameState):
        fs = FastState.from_state(root_state)
    else:
        fs = root_state.copy()
    if fs.finished:
        raise TerminalStateError("cannot search a finished game")
    root = SearchNode(fs)
    root.expand()
    total = count if count is not None else config.count_for(
        len(root.children))
    for _ in range(total):
        node, path = root, [root]
        while node.children:
            if node.proven is not None:
                card = _best_proven(node)
            else:
                card = select_child(node, config.c)
            node = node.children[card]
            path.append(node)
        if node.proven is not None:
            value = node.proven
        elif node.state.finished:
            value = float(node.state.team_differential())
            node.proven = value
        else:
            value = float(evaluator(node.state))
            node.expand()
        for n in path:
            n.visits += 1
            n.value += (value - n.value) / n.visits
        _propagate_proven(path)
    return root


def search(root_state, evaluator: Evaluator, config: SearchConfig = None,
           count: int = None):
    """Run MCTS; returns (visit distribution over 52 cards, root value).

    The distribution is the normalized root visit counts.  The value is
    the mean of the most-visited child, in points from the root mover's
    perspective; the principal child's mean is a far less diluted
    estimate of the game value than the root's own all-branch mean.
    """
    root = search_tree(root_state, evaluator, config, count)
    probs = np.zeros(52)
    best = None
    for card, child in root.children.items():
        probs[card] = child.visits
        if best is None or child.visits > best.visits:
            best = child
    probs /= probs.sum()
    sign = 1.0 if root.state.to_play % 2 == 0 else -1.0
    if root.proven is not None:
        return probs, sign * root.proven
    return probs, sign * best.selection_value()


def sample_from_visits(probs: np.ndarray, temperature: float,
                       rng: random.Random) -> int:
    support = np.nonzero(probs)[0]
    if temperature <= 0:
        best = support[np.argmax(probs[support])]
        return int(best)
    w = probs[support] ** (1.0 / temperature)
    return int(rng.choices(list(support), weights=w)[0])


def mcts_play(state, evaluator: Evaluator, config: SearchConfig = None,
              temperature: float = 0.0, rng: random.Random = None) -> int:
    probs, _ = search(state, evaluator, config)
    return sample_from_visits(probs, temperature, rng or random.Random())


class MctsAgent:
    """Imperfect-information play: search a few sampled deals.

    Each decision samples ``scenarios`` consistent assignments of the
    unseen cards, searches each resulting perfect-information state and
    plays the move with the highest pooled visit count.
    """

    name = "mcts"

    def __init__(self, net: PolicyValueNet, config: SearchConfig = None,
                 scenarios: int = 3):
        self.net = net
        self.evaluator = net_evaluator(net)
        self.config = config or SearchConfig.evaluation()
        self.scenarios = scenarios

    def choose(self, view, rng: random.Random) -> int:
        legal = sorted(view.legal_moves())
        if len(legal) == 1:
            return legal[0]
        from .belief import sample_scenario, scenario_state
        pooled = np.zeros(52)
        for _ in range(self.scenarios):
            scenario = sample_scenario(view, rng)
            probs, _ = search(scenario_state(view, scenario),
                              self.evaluator, self.config)
            pooled += probs
        best = max(legal, key=lambda c: (pooled[c], -c))
        return best
