"""Hidden-hand inference.

Everything an imperfect-information player needs to reason about the
three hands it cannot see: uniform scenario sampling compatible with the
history, stratification over where the key point cards sit, a
plausibility weight per scenario derived from how the hidden players
actually played (would they really have made those moves holding these
cards?), and importance-weighted aggregation of per-action values across
scenarios.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import product
from math import comb
from random import Random
from typing import (Callable, Dict, Iterable, List, Mapping, Optional,
                    Sequence, Tuple)

import numpy as np

from .cards import C10, DJ, HA, HK, SQ, card_name, rank_of, suit_of
from .engine import GameState, GongzhuError, PlayerView, resolve_trick
from .cards import POINT_CARDS
from .mcts import FastState, SearchConfig, net_evaluator, search
from .nn.encoding import encode_averaged
from .nn.network import PolicyValueNet

__all__ = [
    "BeliefAgent",
    "BeliefConfig",
    "InfeasibleScenarioError",
    "Scenario",
    "ScenarioScore",
    "Stratum",
    "correction_factor",
    "iec_score",
    "make_strata",
    "sample_scenario",
    "scenario_state",
    "void_constraints",
    "weighted_value",
    "weighted_value_report",
]

DEFAULT_KEY_CARDS = (SQ, C10, HA, DJ, HK)


class InfeasibleScenarioError(GongzhuError):
    """No assignment of the unseen cards satisfies the constraints."""


@dataclass(frozen=True)
class BeliefConfig:
    beta: float = 0.015
    sample_budget: int = 9
    key_cards: Tuple[int, ...] = DEFAULT_KEY_CARDS
    important_rank_threshold: int = 7
    max_key_cards: int = 2  # keeps the stratum count within the budget

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.sample_budget < 1:
            raise ValueError("sample budget must be >= 1")


@dataclass(frozen=True)
class Scenario:
    """One hypothesis for all four hands; the observer's own is exact."""

    hands: tuple


@dataclass(frozen=True)
class Stratum:
    """A fixed placement of the tracked key cards."""

    assignment: Tuple[Tuple[int, int], ...]  # (card, player) pairs


@dataclass(frozen=True)
class ScenarioScore:
    scenario: Scenario
    score: float
    factors: Tuple[Tuple[int, float], ...]  # (history index, gamma)


def void_constraints(history, observer: int) -> Dict[int, frozenset]:
    """Suits each hidden player provably no longer holds.

    A discard off the led suit reveals a void; voids only grow, so the
    set applies to every card that player still held at that moment.
    """
    voids: Dict[int, set] = {p: set() for p in range(4) if p != observer}
    led = None
    for position, event in enumerate(history):
        if position % 4 == 0:
            led = suit_of(event.card)
        elif suit_of(event.card) != led and event.player in voids:
            voids[event.player].add(led)
    return {player: frozenset(suits) for player, suits in voids.items()}


def _hand_sizes(history) -> List[int]:
    played = [0, 0, 0, 0]
    for event in history:
        played[event.player] += 1
    return [13 - count for count in played]


class _AssignmentProblem:
    """Distribute the unseen cards over three hidden seats.

    Sampling is exactly uniform over all valid assignments: plain
    rejection (shuffle, split by capacity, check voids) is uniform and
    almost always accepts quickly, and the fallback for heavily
    constrained positions is a dynamic program over per-suit split counts
    that draws with exact integer weights.  Falling back only after a
    fixed number of independent rejected proposals does not bias the
    draw.
    """

    def __init__(self, pool: Iterable[int], seats: Sequence[int],
                 capacities: Sequence[int],
                 forbidden: Mapping[int, frozenset]):
        self.seats = list(seats)
        self.pool = sorted(pool)
        self.groups: List[List[int]] = [[] for _ in range(4)]
        for card in self.pool:
            self.groups[suit_of(card)].append(card)
        self.counts = [len(g) for g in self.groups]
        self.start = tuple(capacities)
        self.allowed = [tuple(suit not in forbidden.get(seat, frozenset())
                              for seat in self.seats) for suit in range(4)]
        self._memo: Dict[Tuple[int, Tuple[int, int, int]], int] = {}
        if sum(self.counts) != sum(capacities):
            raise InfeasibleScenarioError(
                "unseen cards do not fill the hidden hands")

    def feasible(self) -> bool:
        """Exact transportation feasibility without counting anything.

        For every subset T of seats, the suits that may only go to T must
        fit in T's combined capacity.
        """
        for t_mask in range(8):
            room = sum(self.start[j] for j in range(3) if t_mask >> j & 1)
            need = 0
            for suit in range(4):
                takers = [j for j in range(3) if self.allowed[suit][j]]
                if not takers and self.counts[suit]:
                    return False
                if all(t_mask >> j & 1 for j in takers):
                    need += self.counts[suit]
            if need > room:
                return False
        return True

    def _splits(self, suit: int, caps):
        m = self.counts[suit]
        a0, a1, a2 = self.allowed[suit]
        top0 = min(m, caps[0]) if a0 else 0
        for k0 in range(top0 + 1):
            rest = m - k0
            top1 = min(rest, caps[1]) if a1 else 0
            for k1 in range(top1 + 1):
                k2 = rest - k1
                if k2 > caps[2] or (k2 and not a2):
                    continue
                yield k0, k1, k2, comb(m, k0) * comb(rest, k1)

    def count(self, suit: int = 0, caps=None) -> int:
        caps = self.start if caps is None else caps
        if suit == 4:
            return 1 if caps == (0, 0, 0) else 0
        key = (suit, caps)
        if key not in self._memo:
            self._memo[key] = sum(
                ways * self.count(suit + 1,
                                  (caps[0] - k0, caps[1] - k1, caps[2] - k2))
                for k0, k1, k2, ways in self._splits(suit, caps))
        return self._memo[key]

    def _try_rejection(self, rng: Random, tries: int
                       ) -> Optional[Dict[int, List[int]]]:
        cards = self.pool[:]
        unconstrained = all(all(row) for row in self.allowed)
        for _ in range(tries):
            rng.shuffle(cards)
            hands: Dict[int, List[int]] = {}
            index = 0
            ok = True
            for position, seat in enumerate(self.seats):
                take = cards[index:index + self.start[position]]
                index += self.start[position]
                if not unconstrained:
                    ok = all(self.allowed[suit_of(c)][position] for c in take)
                    if not ok:
                        break
                hands[seat] = list(take)
            if ok:
                return hands
        return None

    def _dp_sample(self, rng: Random) -> Dict[int, List[int]]:
        if self.count() == 0:
            raise InfeasibleScenarioError(
                "no assignment satisfies the void constraints")
        hands: Dict[int, List[int]] = {seat: [] for seat in self.seats}
        caps = self.start
        for suit in range(4):
            draw = rng.randrange(self.count(suit, caps))
            acc = 0
            for k0, k1, k2, ways in self._splits(suit, caps):
                nxt = (caps[0] - k0, caps[1] - k1, caps[2] - k2)
                acc += ways * self.count(suit + 1, nxt)
                if draw < acc:
                    cards = self.groups[suit][:]
                    rng.shuffle(cards)
                    for seat, take in zip(self.seats, (k0, k1, k2)):
                        for _ in range(take):
                            hands[seat].append(cards.pop())
                    caps = nxt
                    break
        return hands

    def sample(self, rng: Random) -> Dict[int, List[int]]:
        if not self.feasible():
            raise InfeasibleScenarioError(
                "no assignment satisfies the void constraints")
        drawn = self._try_rejection(rng, tries=40)
        if drawn is None:
            drawn = self._dp_sample(rng)
        return drawn


def _problem_for(view: PlayerView,
                 constraints: Optional[Mapping[int, frozenset]],
                 forced: Optional[Mapping[int, int]]
                 ) -> Tuple[_AssignmentProblem, Dict[int, List[int]]]:
    observer = view.player
    if constraints is None:
        constraints = void_constraints(view.history, observer)
    seats = [p for p in range(4) if p != observer]
    sizes = _hand_sizes(view.history)
    capacities = {seat: sizes[seat] for seat in seats}
    pool = set(view.unseen_cards)
    pinned: Dict[int, List[int]] = {seat: [] for seat in seats}
    for card, seat in (forced or {}).items():
        if card not in pool:
            raise InfeasibleScenarioError(
                f"{card_name(card)} is not an unseen card")
        if seat not in capacities:
            raise InfeasibleScenarioError(
                f"cannot pin {card_name(card)} to the observer")
        if suit_of(card) in constraints.get(seat, frozenset()):
            raise InfeasibleScenarioError(
                f"seat {seat} is void in {card_name(card)}'s suit")
        if capacities[seat] == len(pinned[seat]):
            raise InfeasibleScenarioError(f"seat {seat} has no room left")
        pinned[seat].append(card)
        pool.discard(card)
    remaining = [capacities[seat] - len(pinned[seat]) for seat in seats]
    return (_AssignmentProblem(pool, seats, remaining, constraints), pinned)


def sample_scenario(view: PlayerView, rng: Random,
                    constraints: Optional[Mapping[int, frozenset]] = None,
                    forced: Optional[Mapping[int, int]] = None) -> Scenario:
    """Uniform draw over hidden-hand assignments compatible with history.

    ``forced`` pins chosen unseen cards to chosen seats (strata use it).
    Raises InfeasibleScenarioError when nothing satisfies the constraints,
    which for a real game history signals a bug upstream.
    """
    problem, pinned = _problem_for(view, constraints, forced)
    drawn = problem.sample(rng)
    hands = []
    for player in range(4):
        if player == view.player:
            hands.append(frozenset(view.hand))
        else:
            hands.append(frozenset(pinned[player] + drawn[player]))
    return Scenario(hands=tuple(hands))


def scenario_state(view: PlayerView, scenario: Scenario) -> GameState:
    """The full-information state this scenario claims the game is in."""
    leader = view.history[0].player if view.history else view.to_play
    return GameState(hands=scenario.hands, history=view.history,
                     piles=view.piles, to_play=view.to_play, leader=leader)


def make_strata(view: PlayerView,
                key_cards: Optional[Sequence[int]] = None,
                config: Optional[BeliefConfig] = None) -> List[Stratum]:
    """One stratum per feasible placement of the tracked key cards.

    Tracking defaults to the first two still-unseen cards of the key list,
    so there are at most nine strata; with every key card accounted for,
    the single empty stratum covers the whole scenario space.
    """
    config = config or BeliefConfig()
    unseen = view.unseen_cards
    if key_cards is None:
        tracked = [c for c in config.key_cards if c in unseen]
        tracked = tracked[:config.max_key_cards]
    else:
        tracked = [c for c in key_cards if c in unseen]
    seats = [p for p in range(4) if p != view.player]
    constraints = void_constraints(view.history, view.player)
    strata = []
    for placement in product(seats, repeat=len(tracked)):
        assignment = tuple(zip(tracked, placement))
        try:
            problem, _ = _problem_for(view, constraints, dict(assignment))
            feasible = problem.feasible()
        except InfeasibleScenarioError:
            feasible = False
        if feasible:
            strata.append(Stratum(assignment=assignment))
    return strata


def _piles_after(history) -> tuple:
    piles = [set(), set(), set(), set()]
    for start in range(0, len(history) - len(history) % 4, 4):
        trick = tuple(history[start:start + 4])
        if len(trick) < 4:
            break
        winner = resolve_trick(trick)
        for event in trick:
            if event.card in POINT_CARDS:
                piles[winner].add(event.card)
    return tuple(frozenset(p) for p in piles)


def _actor_view(history, index: int, actor: int,
                hand: Iterable[int]) -> PlayerView:
    prefix = tuple(history[:index])
    u = len(prefix)
    return PlayerView(player=actor, hand=frozenset(hand), history=prefix,
                      current_trick=prefix[u - u % 4:],
                      piles=_piles_after(prefix), to_play=actor)


def _gamma_from_logits(logits: np.ndarray, legal: Sequence[int],
                       action: int, beta: float) -> float:
    scores = {card: float(logits[card]) for card in legal}
    return math.exp(-beta * (max(scores.values()) - scores[action]))


def correction_factor(action: int, history_prefix, hypothesized_hand,
                      net: PolicyValueNet, beta: float,
                      actor: Optional[int] = None) -> float:
    """How plausible this play is for a player holding that hand.

    The hypothesized holder's position is rebuilt as they would have seen
    it and the policy head (averaged encoding) scores every legal choice;
    the factor is exp(-beta * (best score - played score)), 1 for the
    net's own top choice and falling toward 0 with growing regret.
    """
    prefix = tuple(history_prefix)
    if actor is None:
        if not prefix:
            raise ValueError("actor is required for an empty history")
        if len(prefix) % 4:
            actor = (prefix[-1].player + 1) % 4
        else:
            actor = resolve_trick(prefix[-4:])
    view = _actor_view(prefix, len(prefix), actor, hypothesized_hand)
    if action not in view.hand:
        raise ValueError(f"{card_name(action)} is not in the hypothesized hand")
    legal = sorted(view.legal_moves())
    if action not in legal:
        raise ValueError(f"{card_name(action)} is not legal for that hand")
    logits, _ = net.forward(encode_averaged(view))
    return _gamma_from_logits(logits, legal, action, beta)


def iec_score(view: PlayerView, scenario: Scenario, net: PolicyValueNet,
              config: Optional[BeliefConfig] = None) -> ScenarioScore:
    """Plausibility of a scenario given how the hidden players played.

    Walks the history and multiplies correction factors over the
    important slices: plays by hidden players of a card above the rank
    threshold, except plays that merely followed suit in a suit other
    than the one the observer is currently deciding about.  The product
    is unnormalized; only relative scores between scenarios matter.
    """
    config = config or BeliefConfig()
    history = view.history
    observer = view.player
    context_suit = (suit_of(view.current_trick[0].card)
                    if view.current_trick else None)
    remaining = {p: set(scenario.hands[p]) for p in range(4)}
    for event in history:
        remaining[event.player].add(event.card)
    pending: List[Tuple[int, np.ndarray, List[int], int]] = []
    led = None
    for index, event in enumerate(history):
        if index % 4 == 0:
            led = suit_of(event.card)
        actor = event.player
        followed_elsewhere = (context_suit is not None
                              and led != context_suit
                              and suit_of(event.card) == led)
        if (actor != observer
                and rank_of(event.card) > config.important_rank_threshold
                and not followed_elsewhere):
            actor_view = _actor_view(history, index, actor, remaining[actor])
            legal = sorted(actor_view.legal_moves())
            pending.append((index, encode_averaged(actor_view), legal,
                            event.card))
        remaining[actor].discard(event.card)
    if not pending:
        return ScenarioScore(scenario=scenario, score=1.0, factors=())
    inputs = np.stack([vec for _, vec, _, _ in pending])
    logits, _ = net.forward_batch(inputs)
    factors = []
    score = 1.0
    for (index, _, legal, action), row in zip(pending, logits):
        gamma = _gamma_from_logits(row, legal, action, config.beta)
        factors.append((index, gamma))
        score *= gamma
    return ScenarioScore(scenario=scenario, score=score,
                         factors=tuple(factors))


def _team_value_after(child: FastState, evaluator) -> float:
    if child.finished:
        return float(child.team_differential())
    _, value = search(child, evaluator, SearchConfig.evaluation())
    return value if child.to_play % 2 == 0 else -value


def _action_values(view: PlayerView, scenario: Scenario, legal,
                   net: PolicyValueNet, evaluator,
                   use_search: bool) -> Dict[int, float]:
    fast = FastState.from_state(scenario_state(view, scenario))
    observer_sign = 1.0 if view.player % 2 == 0 else -1.0
    values = {}
    for action in legal:
        child = fast.child(action)
        if use_search:
            team_value = _team_value_after(child, evaluator)
        elif child.finished:
            team_value = float(child.team_differential())
        else:
            team_value = evaluator(child)
        values[action] = observer_sign * team_value
    return values


def _gather(view: PlayerView, net: PolicyValueNet, config: BeliefConfig,
            rng: Random, stratified: bool, iec: bool, use_search: bool):
    legal = sorted(view.legal_moves())
    evaluator = net_evaluator(net)
    constraints = void_constraints(view.history, view.player)
    entries = []
    if stratified:
        # Spend the whole budget even when few strata are feasible:
        # round-robin over the strata, then divide each scenario's
        # weight by how often its stratum was drawn so the sampling
        # intensity does not tilt the posterior mass between strata.
        strata = make_strata(view, config=config)
        picks = [index % len(strata)
                 for index in range(max(config.sample_budget, len(strata)))]
        counts = Counter(picks)
        for index in picks:
            stratum = strata[index]
            scenario = sample_scenario(view, rng, constraints=constraints,
                                       forced=dict(stratum.assignment))
            entries.append((stratum, scenario, 1.0 / counts[index]))
    else:
        for _ in range(config.sample_budget):
            entries.append((None, sample_scenario(view, rng,
                                                  constraints=constraints),
                            1.0))
    scored = []
    for stratum, scenario, allowance in entries:
        raw = (iec_score(view, scenario, net, config).score
               if iec else 1.0)
        values = _action_values(view, scenario, legal, net, evaluator,
                                use_search)
        scored.append((stratum, scenario, raw, raw * allowance, values))
    return legal, scored


def weighted_value(view: PlayerView, net: PolicyValueNet,
                   config: Optional[BeliefConfig] = None,
                   rng: Optional[Random] = None, stratified: bool = True,
                   iec: bool = True, use_search: bool = True
                   ) -> Dict[int, float]:
    """Importance-weighted per-action value over sampled scenarios.

    The sample budget is spread over the feasible strata (uniform
    stratum prior), each scenario carrying its plausibility weight;
    per-action values come from a fixed-budget search of the
    post-action full-information state, or straight from the value
    head when ``use_search`` is off.  The result is
    sum(s_j * Q_j) / sum(s_j) per action, in points for the observer's
    team.
    """
    config = config or BeliefConfig()
    rng = rng or Random()
    legal, scored = _gather(view, net, config, rng, stratified, iec,
                            use_search)
    total = sum(weight for _, _, _, weight, _ in scored)
    return {action: sum(weight * values[action]
                        for _, _, _, weight, values in scored) / total
            for action in legal}


def weighted_value_report(view: PlayerView, net: PolicyValueNet,
                          config: Optional[BeliefConfig] = None,
                          rng: Optional[Random] = None,
                          stratified: bool = True, iec: bool = True,
                          use_search: bool = True
                          ) -> Tuple[Dict[int, float], dict]:
    """Same as weighted_value plus a JSON-ready per-decision record."""
    config = config or BeliefConfig()
    rng = rng or Random()
    legal, scored = _gather(view, net, config, rng, stratified, iec,
                            use_search)
    total = sum(weight for _, _, _, weight, _ in scored)
    q = {action: sum(weight * values[action]
                     for _, _, _, weight, values in scored) / total
         for action in legal}
    report = {
        "player": view.player,
        "legal": [card_name(c) for c in legal],
        "q": {card_name(c): q[c] for c in legal},
        "scenarios": [
            {
                "stratum": ({card_name(card): seat
                             for card, seat in stratum.assignment}
                            if stratum is not None else None),
                "hands": [sorted(card_name(c) for c in hand)
                          for hand in scenario.hands],
                "score": raw,
                "weight": weight / total,
                "values": {card_name(c): values[c] for c in legal},
            }
            for stratum, scenario, raw, weight, values in scored
        ],
    }
    return q, report


def choose(view: PlayerView, net: PolicyValueNet,
           config: Optional[BeliefConfig] = None,
           rng: Optional[Random] = None, **kwargs) -> int:
    """Highest weighted value wins; ties go to the lowest card index."""
    q = weighted_value(view, net, config, rng, **kwargs)
    return min(q, key=lambda card: (-q[card], card))


class BeliefAgent:
    """Imperfect-information player built on scenario inference.

    The flags expose the ablation arms: ``stratified`` switches between
    stratified and uniform scenario sampling, ``iec`` toggles the
    plausibility weighting, ``use_search`` picks per-action search versus
    raw value-head estimates.  ``diagnostics``, when set, receives one
    JSON-ready dict per decision.
    """

    name = "scrofa"

    def __init__(self, net: PolicyValueNet,
                 config: Optional[BeliefConfig] = None,
                 stratified: bool = True, iec: bool = True,
                 use_search: bool = True,
                 diagnostics: Optional[Callable[[dict], None]] = None):
        self.net = net
        self.config = config or BeliefConfig()
        self.stratified = stratified
        self.iec = iec
        self.use_search = use_search
        self.diagnostics = diagnostics

    def choose(self, view: PlayerView, rng: Random) -> int:
        legal = sorted(view.legal_moves())
        if len(legal) == 1:
            return legal[0]
        if self.diagnostics is None:
            q = weighted_value(view, self.net, self.config, rng,
                               stratified=self.stratified, iec=self.iec,
                               use_search=self.use_search)
        else:
            q, report = weighted_value_report(
                view, self.net, self.config, rng,
                stratified=self.stratified, iec=self.iec,
                use_search=self.use_search)
            self.diagnostics(report)
        return min(q, key=lambda card: (-q[card], card))
