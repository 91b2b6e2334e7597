import math
import random
from collections import Counter
from itertools import combinations, product
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gongzhu.belief import (
    BeliefAgent,
    BeliefConfig,
    InfeasibleScenarioError,
    Scenario,
    correction_factor,
    iec_score,
    make_strata,
    sample_scenario,
    scenario_state,
    void_constraints,
    weighted_value,
    weighted_value_report,
)
from gongzhu.belief import choose as belief_choose
from gongzhu.cards import (
    C10,
    DECK,
    DIAMOND,
    DJ,
    HA,
    HEART,
    HK,
    SPADE,
    SQ,
    parse_card,
    rank_of,
    suit_of,
)
from gongzhu.engine import (PlayerView, PlayEvent, deal, from_hands,
                            legal_moves, play)
from gongzhu.nn import NetConfig, PolicyValueNet

EMPTY_PILES = (frozenset(), frozenset(), frozenset(), frozenset())


def cards(*tokens):
    return [parse_card(t) for t in tokens]


def events(*pairs):
    return tuple(PlayEvent(p, parse_card(t)) for p, t in pairs)


class TableNet:
    """Policy stub with a fixed score per card and a zero value head."""

    def __init__(self, scores=None, default=0.0):
        self.q = np.full(52, float(default))
        for token, value in (scores or {}).items():
            self.q[parse_card(token)] = value

    def forward(self, vec):
        return self.q.copy(), 0.0

    def forward_batch(self, batch):
        return np.tile(self.q, (len(batch), 1)), np.zeros(len(batch))


def midgame_view(seed, plays, observer=None):
    state = deal(seed)
    rng = random.Random(seed * 17 + 5)
    for _ in range(plays):
        state = play(state, rng.choice(sorted(legal_moves(state))))
    return state, state.view(observer if observer is not None else state.to_play)


def rotation_view(hand, unseen):
    """A view whose history is pure bookkeeping: players rotate through
    every card that is neither held nor meant to stay unseen, so hand
    sizes and the unseen pool are exact while the plays themselves carry
    no suit information (callers pass explicit constraints instead)."""
    pool = [c for c in DECK if c not in hand and c not in unseen]
    assert len(pool) % 4 == 0
    history = tuple(PlayEvent(i % 4, card) for i, card in enumerate(pool))
    return PlayerView(player=0, hand=frozenset(hand), history=history,
                      current_trick=(), piles=EMPTY_PILES, to_play=0)


# ---------------------------------------------------------------------------
# Void constraints read off-suit discards from the history.


def test_void_constraints_empty_history():
    empty = frozenset()
    assert void_constraints((), 0) == {1: empty, 2: empty, 3: empty}


def test_void_constraints_record_offsuit_discards():
    history = events((0, "S5"), (1, "H3"), (2, "S9"), (3, "S2"),
                     (2, "HT"), (3, "D4"), (0, "H7"), (1, "H8"))
    constraints = void_constraints(history, 0)
    assert constraints == {1: frozenset({SPADE}), 2: frozenset(),
                           3: frozenset({HEART})}


def test_void_constraints_accumulate_per_player():
    history = events((0, "S5"), (1, "H3"), (2, "S9"), (3, "S2"),
                     (2, "D4"), (3, "D6"), (0, "D9"), (1, "C2"))
    assert void_constraints(history, 0)[1] == frozenset({SPADE, DIAMOND})


def test_void_constraints_skip_the_observer():
    history = events((0, "S5"), (1, "H3"))
    constraints = void_constraints(history, 1)
    assert set(constraints) == {0, 2, 3}
    assert not any(constraints.values())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(4, 44))
def test_recorded_voids_match_the_real_hands(seed, plays):
    state = deal(seed)
    rng = random.Random(seed ^ 0xBEEF)
    for _ in range(plays):
        state = play(state, rng.choice(sorted(legal_moves(state))))
    for observer in range(4):
        for player, suits in void_constraints(state.history, observer).items():
            for suit in suits:
                assert all(suit_of(c) != suit for c in state.hands[player])


# ---------------------------------------------------------------------------
# Scenario sampling: exact hands back, uniform over what is consistent.


def test_sampled_hands_partition_the_unseen_cards():
    state, view = midgame_view(9, 18)
    rng = random.Random(0)
    played = {e.card for e in view.history}
    for _ in range(25):
        scenario = sample_scenario(view, rng)
        assert scenario.hands[view.player] == view.hand
        union = set()
        for player, hand in enumerate(scenario.hands):
            assert len(hand) == len(state.hands[player])
            assert not (hand & played)
            assert not (hand & union)
            union |= hand
        assert union | played == set(DECK)


def test_sampling_respects_recorded_voids():
    for seed in (2, 11, 23):
        _, view = midgame_view(seed, 26)
        constraints = void_constraints(view.history, view.player)
        rng = random.Random(seed)
        for _ in range(200):
            scenario = sample_scenario(view, rng)
            for player, suits in constraints.items():
                assert all(suit_of(c) not in suits
                           for c in scenario.hands[player])


def test_fresh_deal_placement_is_uniform():
    view = deal(0).view(0)
    assert SQ not in view.hand
    rng = random.Random(123)
    seats = Counter()
    draws = 10_000
    for _ in range(draws):
        scenario = sample_scenario(view, rng)
        seats[next(p for p in range(4) if SQ in scenario.hands[p])] += 1
    assert set(seats) == {1, 2, 3}
    for seat in (1, 2, 3):
        assert seats[seat] / draws == pytest.approx(1 / 3, abs=0.02)


def test_tiny_endgame_permutations_are_equally_likely():
    # one hidden card per seat, three unseen cards: six assignments
    unseen = [49, 50, 51]
    view = rotation_view(hand=[48], unseen=unseen)
    rng = random.Random(7)
    tallies = Counter()
    draws = 6_000
    for _ in range(draws):
        scenario = sample_scenario(view, rng, constraints={})
        tallies[tuple(min(scenario.hands[p]) for p in (1, 2, 3))] += 1
    assert len(tallies) == 6
    for perm in tallies:
        assert tallies[perm] / draws == pytest.approx(1 / 6, abs=0.02)


def test_void_squeeze_forces_the_exact_split():
    # Nine unseen cards, three per seat, and seat 1 void in hearts with
    # exactly three non-hearts available: rejection almost always fails
    # (1/84 acceptance), so this drives the exact counting fallback.
    hearts = cards("H2", "H3", "H4", "H5", "H6", "H7")
    spades = cards("S2", "S3", "S4")
    view = rotation_view(hand=cards("D2", "D3", "D4"),
                         unseen=hearts + spades)
    constraints = {1: frozenset({HEART})}
    rng = random.Random(31)
    draws = 4_000
    heart_at_two = Counter()
    seen = set()
    for _ in range(draws):
        scenario = sample_scenario(view, rng, constraints=constraints)
        assert scenario.hands[1] == frozenset(spades)
        seen.add(scenario.hands[1:])
        for card in hearts:
            if card in scenario.hands[2]:
                heart_at_two[card] += 1
    assert len(seen) == math.comb(6, 3)
    for card in hearts:
        assert heart_at_two[card] / draws == pytest.approx(0.5, abs=0.03)


def test_sampling_is_deterministic_per_rng_seed():
    _, view = midgame_view(4, 14)

    def draws(seed):
        rng = random.Random(seed)
        return [sample_scenario(view, rng) for _ in range(5)]

    assert draws(99) == draws(99)


def test_forced_pins_land_where_asked():
    _, view = midgame_view(6, 8)
    target = sorted(view.unseen_cards)[0]
    rng = random.Random(1)
    for seat in (p for p in range(4) if p != view.player):
        scenario = sample_scenario(view, rng, forced={target: seat})
        assert target in scenario.hands[seat]


def test_impossible_pins_raise():
    hearts = cards("H2", "H3", "H4", "H5", "H6", "H7")
    spades = cards("S2", "S3", "S4")
    view = rotation_view(hand=cards("D2", "D3", "D4"),
                         unseen=hearts + spades)
    constraints = {1: frozenset({HEART})}
    rng = random.Random(0)
    with pytest.raises(InfeasibleScenarioError, match="void"):
        sample_scenario(view, rng, constraints=constraints,
                        forced={hearts[0]: 1})
    with pytest.raises(InfeasibleScenarioError, match="unseen"):
        sample_scenario(view, rng, constraints=constraints,
                        forced={view.history[0].card: 2})
    with pytest.raises(InfeasibleScenarioError, match="observer"):
        sample_scenario(view, rng, constraints=constraints,
                        forced={hearts[0]: 0})
    with pytest.raises(InfeasibleScenarioError, match="room"):
        sample_scenario(view, rng, constraints=constraints,
                        forced={c: 2 for c in hearts[:4]})


def test_unsatisfiable_constraints_raise():
    view = rotation_view(hand=[48], unseen=[49, 50, 51])
    everything = frozenset({0, 1, 2, 3})
    with pytest.raises(InfeasibleScenarioError):
        sample_scenario(view, random.Random(0),
                        constraints={1: everything, 2: everything,
                                     3: everything})


# ---------------------------------------------------------------------------
# A scenario plus the public record rebuilds a playable state.


def test_scenario_state_reproduces_the_view():
    _, view = midgame_view(15, 21)
    scenario = sample_scenario(view, random.Random(2))
    state = scenario_state(view, scenario)
    rebuilt = state.view(view.player)
    assert rebuilt == view
    assert state.leader == view.history[0].player
    assert state.hands == scenario.hands


def test_scenario_state_is_playable_to_completion():
    _, view = midgame_view(8, 30)
    scenario = sample_scenario(view, random.Random(5))
    state = scenario_state(view, scenario)
    rng = random.Random(6)
    while not state.finished:
        state = play(state, rng.choice(sorted(legal_moves(state))))
    assert len(state.history) == 52
    assert len(state.scores().per_player) == 4


def test_scenario_state_before_any_play_leads_from_to_play():
    view = PlayerView(player=2, hand=frozenset(range(13)), history=(),
                      current_trick=(), piles=EMPTY_PILES, to_play=2)
    scenario = Scenario(hands=(frozenset(range(13, 26)),
                               frozenset(range(26, 39)),
                               frozenset(range(13)),
                               frozenset(range(39, 52))))
    assert scenario_state(view, scenario).leader == 2


# ---------------------------------------------------------------------------
# Strata enumerate where the still-hidden key cards could sit.


def fresh_view(hand):
    return PlayerView(player=0, hand=frozenset(hand), history=(),
                      current_trick=(), piles=EMPTY_PILES, to_play=0)


def test_fresh_view_yields_nine_strata():
    view = fresh_view(cards("S2", "S3", "S4", "S5", "S6", "S7",
                            "D2", "D3", "D4", "D5", "D6", "D7", "H2"))
    strata = make_strata(view)
    assert len(strata) == 9
    assignments = {s.assignment for s in strata}
    assert assignments == {((SQ, a), (C10, b))
                           for a in (1, 2, 3) for b in (1, 2, 3)}


def test_one_key_card_left_yields_three_strata():
    hand = [SQ, C10, HA, DJ] + cards("S2", "S3", "S4", "S5", "S6",
                                     "S7", "S8", "D2", "D3")
    strata = make_strata(fresh_view(hand))
    assert {s.assignment for s in strata} == {((HK, p),) for p in (1, 2, 3)}


def test_every_key_card_seen_yields_the_empty_stratum():
    hand = [SQ, C10, HA, DJ, HK] + cards("S2", "S3", "S4", "S5", "S6",
                                         "S7", "S8", "S9")
    strata = make_strata(fresh_view(hand))
    assert [s.assignment for s in strata] == [()]


def test_void_seats_drop_infeasible_strata():
    history = events((0, "H5"), (1, "S3"), (2, "H6"), (3, "H7"))
    hand = cards("S2", "S4", "S5", "S6", "S7", "S8",
                 "D2", "D3", "D4", "D5", "D6", "D7")
    view = PlayerView(player=0, hand=frozenset(hand), history=history,
                      current_trick=(), piles=EMPTY_PILES, to_play=3)
    strata = make_strata(view, key_cards=(HA,))
    assert {s.assignment for s in strata} == {((HA, 2),), ((HA, 3),)}


def test_every_stratum_admits_a_sample():
    _, view = midgame_view(12, 12)
    rng = random.Random(3)
    strata = make_strata(view)
    assert strata
    for stratum in strata:
        scenario = sample_scenario(view, rng, forced=dict(stratum.assignment))
        for card, seat in stratum.assignment:
            assert card in scenario.hands[seat]


# ---------------------------------------------------------------------------
# Correction factors: exp(-beta * regret) under the actor's own view.


def test_top_choice_scores_one_exactly():
    net = TableNet({"CK": 50.0, "C9": -50.0})
    prefix = events((0, "C2"))
    hand = cards("CK", "C9", "S2")
    assert correction_factor(parse_card("CK"), prefix, hand, net,
                             beta=0.015) == 1.0


def test_regret_maps_through_the_exponential():
    net = TableNet({"CK": 50.0, "C9": -50.0})
    prefix = events((0, "C2"))
    hand = cards("CK", "C9", "S2")
    gamma = correction_factor(parse_card("C9"), prefix, hand, net, beta=0.015)
    assert gamma == pytest.approx(math.exp(-1.5))


def test_tiny_beta_forgives_any_regret():
    net = TableNet({"CK": 1000.0})
    prefix = events((0, "C2"))
    hand = cards("CK", "C9")
    gamma = correction_factor(parse_card("C9"), prefix, hand, net, beta=1e-9)
    assert gamma == pytest.approx(1.0, abs=1e-5)


def test_actor_is_derived_from_the_trick_winner():
    net = TableNet({"H9": 3.0, "H4": 7.0})
    prefix = events((0, "S5"), (1, "S9"), (2, "SK"), (3, "S2"))
    hand = cards("H9", "H4")  # seat 2 won with the king and leads anything
    derived = correction_factor(parse_card("H9"), prefix, hand, net,
                                beta=0.015)
    explicit = correction_factor(parse_card("H9"), prefix, hand, net,
                                 beta=0.015, actor=2)
    assert derived == explicit == pytest.approx(math.exp(-0.015 * 4.0))


def test_rejects_actions_the_hand_cannot_make():
    net = TableNet()
    prefix = events((0, "C2"))
    with pytest.raises(ValueError, match="not in the hypothesized hand"):
        correction_factor(parse_card("CK"), prefix, cards("S2", "S3"), net,
                          beta=0.015)
    with pytest.raises(ValueError, match="not legal"):
        correction_factor(parse_card("S2"), prefix, cards("CK", "S2"), net,
                          beta=0.015)
    with pytest.raises(ValueError, match="actor"):
        correction_factor(parse_card("S2"), (), cards("S2"), net, beta=0.015)


# ---------------------------------------------------------------------------
# IEC scoring: a product of correction factors over the important slices.


def test_quiet_history_scores_one():
    # nothing above the rank threshold was played by a hidden seat
    history = events((0, "C9"), (1, "C2"), (2, "C3"), (3, "C4"))
    view = PlayerView(player=0, hand=frozenset(cards("S2", "S3")),
                      history=history, current_trick=(), piles=EMPTY_PILES,
                      to_play=0)
    scenario = Scenario(hands=(view.hand, frozenset(cards("D2")),
                               frozenset(cards("D3")), frozenset(cards("D4"))))
    result = iec_score(view, scenario, TableNet())
    assert result.score == 1.0
    assert result.factors == ()


def test_score_multiplies_factors_over_important_slices_only():
    # Trick one in clubs: the observer leads and wins, seat 1 follows
    # high (later judged in a heart context, so skipped), seat 2 discards
    # high (counted), seat 3 follows low (skipped by rank).  Trick two in
    # hearts: seat 1 plays high in the context suit (counted).
    history = events((0, "CA"), (1, "CK"), (2, "S9"), (3, "C4"),
                     (0, "H5"), (1, "H9"))
    view = PlayerView(player=0,
                      hand=frozenset(cards("S2", "S3", "D5")),
                      history=history, current_trick=history[4:],
                      piles=EMPTY_PILES, to_play=2)
    scenario = Scenario(hands=(view.hand,
                               frozenset(cards("H2")),
                               frozenset(cards("D3", "S4")),
                               frozenset(cards("C9"))))
    net = TableNet({"D3": 180.0, "S9": 80.0, "H2": 110.0, "H9": 10.0})
    result = iec_score(view, scenario, net)
    assert [index for index, _ in result.factors] == [2, 5]
    for _, gamma in result.factors:
        assert gamma == pytest.approx(math.exp(-1.5))
    assert result.score == pytest.approx(math.exp(-3.0))


def test_scores_stay_inside_the_unit_interval():
    rng = random.Random(77)
    noise = np.random.default_rng(8).normal(0.0, 40.0, size=52)
    net = TableNet()
    net.q = noise
    for seed in (1, 5, 19):
        _, view = midgame_view(seed, 22)
        for _ in range(10):
            scenario = sample_scenario(view, rng)
            result = iec_score(view, scenario, net)
            assert 0.0 < result.score <= 1.0
            assert all(0.0 < g <= 1.0 for _, g in result.factors)


# ---------------------------------------------------------------------------
# Aggregation: per-action values averaged under scenario weights.


def patched_scoring(monkeypatch, scores, values):
    import gongzhu.belief as belief
    from gongzhu.belief import ScenarioScore

    score_iter = iter(scores)
    value_iter = iter(values)

    def fake_iec(view, scenario, net, config=None):
        return ScenarioScore(scenario=scenario, score=next(score_iter),
                             factors=())

    def fake_values(view, scenario, legal, net, evaluator, use_search):
        v = next(value_iter)
        return {action: v for action in legal}

    monkeypatch.setattr(belief, "iec_score", fake_iec)
    monkeypatch.setattr(belief, "_action_values", fake_values)


def test_weighted_value_is_the_score_weighted_mean(monkeypatch):
    view = rotation_view(hand=[48], unseen=[49, 50, 51])
    patched_scoring(monkeypatch, scores=[1.0, 1.0, 2.0], values=[0.0, 0.0, 30.0])
    q = weighted_value(view, TableNet(), BeliefConfig(sample_budget=3),
                       random.Random(0), stratified=False, use_search=False)
    assert q == {48: pytest.approx(15.0)}


def test_equal_scores_reduce_to_the_plain_average(monkeypatch):
    view = rotation_view(hand=[48], unseen=[49, 50, 51])
    patched_scoring(monkeypatch, scores=[5.0, 5.0, 5.0], values=[0.0, 0.0, 30.0])
    q = weighted_value(view, TableNet(), BeliefConfig(sample_budget=3),
                       random.Random(0), stratified=False, use_search=False)
    assert q[48] == pytest.approx(10.0)


def test_disabling_the_weighting_averages_uniformly(monkeypatch):
    import gongzhu.belief as belief
    view = rotation_view(hand=[48], unseen=[49, 50, 51])
    value_iter = iter([0.0, 0.0, 30.0])
    monkeypatch.setattr(
        belief, "_action_values",
        lambda view, scenario, legal, net, evaluator, use_search:
        {a: next(value_iter) for a in legal})

    def exploding_iec(*args, **kwargs):
        raise AssertionError("iec_score must not run when iec=False")

    monkeypatch.setattr(belief, "iec_score", exploding_iec)
    q = weighted_value(view, TableNet(), BeliefConfig(sample_budget=3),
                       random.Random(0), stratified=False, iec=False,
                       use_search=False)
    assert q[48] == pytest.approx(10.0)


def test_budget_filling_does_not_tilt_the_stratum_masses(monkeypatch):
    # budget 3 over 2 strata draws the first stratum twice; with flat
    # plausibility both strata must still carry the same mass
    import gongzhu.belief as belief
    from gongzhu.belief import Stratum

    view = rotation_view(hand=[48], unseen=[49, 50, 51])
    strata = [Stratum(assignment=((49, 1),)), Stratum(assignment=((49, 2),))]
    monkeypatch.setattr(belief, "make_strata",
                        lambda view, config=None, key_cards=None: strata)
    monkeypatch.setattr(belief, "sample_scenario",
                        lambda view, rng, constraints=None, forced=None: None)
    patched_scoring(monkeypatch, scores=[1.0, 1.0, 1.0],
                    values=[0.0, 30.0, 0.0])
    q = weighted_value(view, TableNet(), BeliefConfig(sample_budget=3),
                       random.Random(0), stratified=True, use_search=False)
    assert q == {48: pytest.approx(15.0)}


def test_choose_breaks_ties_toward_the_low_card(monkeypatch):
    import gongzhu.belief as belief
    view = rotation_view(hand=[44, 45], unseen=[46, 47, 48, 49, 50, 51])
    monkeypatch.setattr(
        belief, "_action_values",
        lambda view, scenario, legal, net, evaluator, use_search:
        {a: 7.0 for a in legal})
    picked = belief_choose(view, TableNet(), BeliefConfig(sample_budget=2),
                           random.Random(0), stratified=False, iec=False,
                           use_search=False)
    assert picked == 44


def test_choose_avoids_the_dominated_action(monkeypatch):
    import gongzhu.belief as belief
    view = rotation_view(hand=[44, 45], unseen=[46, 47, 48, 49, 50, 51])
    monkeypatch.setattr(
        belief, "_action_values",
        lambda view, scenario, legal, net, evaluator, use_search:
        {a: (-100.0 if a == 44 else 0.0) for a in legal})
    for seed in range(5):
        assert belief_choose(view, TableNet(), BeliefConfig(sample_budget=2),
                             random.Random(seed), stratified=False, iec=False,
                             use_search=False) == 45


@pytest.fixture(scope="module")
def tiny_net():
    return PolicyValueNet(NetConfig(depth=2, width=16), seed=5)


def test_weighted_value_runs_on_a_real_net(tiny_net):
    _, view = midgame_view(21, 36)
    legal = sorted(view.legal_moves())
    for use_search in (False, True):
        q = weighted_value(view, tiny_net, rng=random.Random(4),
                           use_search=use_search)
        assert sorted(q) == legal
        assert all(math.isfinite(v) for v in q.values())


def test_report_weights_are_normalized(tiny_net):
    _, view = midgame_view(33, 16)
    q, report = weighted_value_report(view, tiny_net, rng=random.Random(9),
                                      use_search=False)
    assert report["player"] == view.player
    assert len(report["legal"]) == len(q)
    assert sum(s["weight"] for s in report["scenarios"]) == pytest.approx(
        1.0, abs=1e-6)
    strata = make_strata(view)
    assert len(report["scenarios"]) == max(BeliefConfig().sample_budget,
                                           len(strata))
    sampled = {tuple(sorted((s["stratum"] or {}).items()))
               for s in report["scenarios"]}
    assert len(sampled) == len(strata)  # every stratum got at least one draw
    for entry in report["scenarios"]:
        assert entry["score"] >= 0.0
        assert set(entry["values"]) == set(report["legal"])
    assert set(report["q"]) == set(report["legal"])


def test_belief_agent_plays_a_full_game(tiny_net):
    from gongzhu.agents import MrRandom

    reports = []
    agent = BeliefAgent(tiny_net, use_search=False,
                        diagnostics=reports.append)
    assert agent.name == "scrofa"
    seats = [agent, MrRandom(), MrRandom(), MrRandom()]
    state = deal(101)
    rng = random.Random(101)
    while not state.finished:
        card = seats[state.to_play].choose(state.view(state.to_play), rng)
        state = play(state, card)  # raises on an illegal pick
    assert reports
    for report in reports:
        assert sum(s["weight"] for s in report["scenarios"]) == pytest.approx(
            1.0, abs=1e-6)


def test_config_validation():
    with pytest.raises(ValueError):
        BeliefConfig(beta=0.0)
    with pytest.raises(ValueError):
        BeliefConfig(sample_budget=0)


# ---------------------------------------------------------------------------
# The unnormalized product must rank scenarios like the explicit
# normalized one.  Everything here is pinned: one opening trick in clubs
# with two high plays by hidden seats, three tracked high clubs placed in
# all 27 ways, filler scored so low that its terms stay flat, and the
# tracked scores spread far enough apart that distinct products are
# separated by orders of magnitude.


ORACLE_BETA = 0.015
ORACLE_Q = {"CK": 60.0, "CQ": 60.0, "C5": 10.0, "C2": 5.0,
            "CA": 660.0, "CJ": 1460.0, "CT": 3060.0}
ORACLE_HISTORY = ((0, "C2"), (1, "CK"), (2, "C5"), (3, "CQ"))
ORACLE_HAND = ("S2", "S3", "S4", "S5", "S6", "S7",
               "H2", "H3", "H4", "D2", "D3", "D4")
ORACLE_TRACKED = ("CA", "CJ", "CT")


def oracle_fixture():
    history = events(*ORACLE_HISTORY)
    hand = cards(*ORACLE_HAND)
    tracked = cards(*ORACLE_TRACKED)
    view = PlayerView(player=0, hand=frozenset(hand), history=history,
                      current_trick=(), piles=EMPTY_PILES, to_play=0)
    filler = [c for c in sorted(view.unseen_cards) if c not in tracked]
    net = TableNet(ORACLE_Q, default=-400.0)
    return view, tracked, filler, net


def oracle_hands(tracked, filler, placement):
    hands = {1: set(), 2: set(), 3: set()}
    for card, seat in zip(tracked, placement):
        hands[seat].add(card)
    queue = list(filler)
    for seat in (1, 2, 3):
        while len(hands[seat]) < 12:
            hands[seat].add(queue.pop())
    assert not queue
    return hands


def normalized_product(view, net, hands, tracked, beta):
    """The full form: per important slice, gamma over (Y + J/3), where Y
    sums the actor's played-plus-tracked factors and J sums every hidden
    filler card's factor in its holder's own decision context."""
    full = {seat: set(held) for seat, held in hands.items()}
    for event in view.history:
        if event.player != 0:
            full[event.player].add(event.card)
    relevant = set(tracked) | {e.card for e in view.history}

    def gamma(seat, card):
        legal = [c for c in full[seat] if suit_of(c) == suit_of(view.history[0].card)]
        if not legal:
            legal = list(full[seat])
        top = max(net.q[c] for c in legal)
        return math.exp(-beta * (top - net.q[card]))

    j_total = sum(gamma(seat, card)
                  for seat in (1, 2, 3) for card in full[seat]
                  if card not in relevant)
    value = 1.0
    for seat, action in ((1, parse_card("CK")), (3, parse_card("CQ"))):
        y = sum(gamma(seat, card) for card in full[seat] if card in relevant)
        value *= gamma(seat, action) / (y + j_total / 3.0)
    return value


def test_iec_ranking_matches_the_normalized_product():
    view, tracked, filler, net = oracle_fixture()
    config = BeliefConfig(beta=ORACLE_BETA)
    rows = []
    for placement in product((1, 2, 3), repeat=3):
        hands = oracle_hands(tracked, filler, placement)
        scenario = Scenario(hands=(view.hand, frozenset(hands[1]),
                                   frozenset(hands[2]), frozenset(hands[3])))
        score = iec_score(view, scenario, net, config).score
        full = normalized_product(view, net, hands, tracked, ORACLE_BETA)
        assert 0.0 < score <= 1.0
        rows.append((score, full))
    assert len(rows) == 27
    assert len({score for score, _ in rows}) >= 5
    for (sa, fa), (sb, fb) in combinations(rows, 2):
        if sa == sb:
            continue
        low, high = ((fa, fb) if sa < sb else (fb, fa))
        assert low < high


def test_swapping_filler_cards_leaves_the_score_alone():
    view, tracked, filler, net = oracle_fixture()
    config = BeliefConfig(beta=ORACLE_BETA)
    hands = oracle_hands(tracked, filler, (1, 2, 3))
    swapped = {seat: set(held) for seat, held in hands.items()}
    a = next(iter(swapped[1] - set(tracked)))
    b = next(iter(swapped[2] - set(tracked)))
    swapped[1].symmetric_difference_update({a, b})
    swapped[2].symmetric_difference_update({a, b})

    def score_of(mapping):
        scenario = Scenario(hands=(view.hand, frozenset(mapping[1]),
                                   frozenset(mapping[2]),
                                   frozenset(mapping[3])))
        return iec_score(view, scenario, net, config).score

    assert score_of(swapped) == score_of(hands)


# ---------------------------------------------------------------------------
# directional checks against a trained evaluator

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def smoke_net():
    return PolicyValueNet.load(str(DATA / "smoke_net" / "model.gzpv"))


def duck_view():
    """One finished trick in which seat 2, had it held SQ, passed up the
    chance to throw it under a spade king that was already winning."""
    hands = (
        cards("SA", "H2", "H3", "H4", "H5", "H6", "H7", "H8", "H9", "HT",
              "HJ", "HQ", "HK"),
        cards("SK", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9", "DT",
              "DJ", "DQ", "DK"),
        cards("S9", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "CT",
              "CJ", "CQ", "CK"),
        cards("S2", "S3", "S4", "S5", "S6", "S7", "S8", "ST", "SJ", "SQ",
              "HA", "DA", "CA"),
    )
    state = from_hands(tuple(frozenset(h) for h in hands), leader=1)
    for token in ("SK", "S9", "S6", "SA"):
        state = play(state, parse_card(token))
    return state.view(0)


def duck_scenarios(view):
    """Two placements of the hidden cards differing only in whether the
    silent seat 2 holds SQ (making its observed S9 a duck) or a low
    diamond instead.  Every other spade sits with seat 1 so seat 2's
    reconstructed choice at the slice is exactly {S9, SQ} or forced."""
    swap = parse_card("D5")
    hidden = sorted(set(DECK) - set(view.hand)
                    - {e.card for e in view.history})
    spare_spades = [c for c in hidden if suit_of(c) == SPADE and c != SQ]
    others = [c for c in hidden if suit_of(c) != SPADE and c != swap]
    seat1 = frozenset(spare_spades + others[:4])
    shared2, tail3 = others[4:15], others[15:]

    def placement(sq_with_ducker):
        extra2, extra3 = (SQ, swap) if sq_with_ducker else (swap, SQ)
        return Scenario(hands=(view.hand, seat1,
                               frozenset(shared2 + [extra2]),
                               frozenset(tail3 + [extra3])))

    return placement(True), placement(False)


def test_holding_sq_through_a_free_dump_lowers_the_score(smoke_net):
    view = duck_view()
    ducked, innocent = duck_scenarios(view)
    a = iec_score(view, ducked, smoke_net)
    b = iec_score(view, innocent, smoke_net)
    assert a.score < b.score
    # the king's slice is identical in both placements and cancels; the
    # whole gap comes from seat 2's pass on the dump
    assert a.factors[0] == b.factors[0]
    assert b.factors[1][1] == 1.0  # without SQ the S9 was forced
    assert a.factors[1][1] < 1.0


def test_permuting_irrelevant_cards_barely_moves_the_score(smoke_net):
    view = duck_view()
    ducked, _ = duck_scenarios(view)
    base = iec_score(view, ducked, smoke_net).score
    rng = random.Random(3)

    def low_offsuit(hand):
        return sorted(c for c in hand
                      if suit_of(c) != SPADE and rank_of(c) <= 7)

    for _ in range(10):
        one, two, three = ducked.hands[1:]
        x1 = rng.choice(low_offsuit(one))
        x2 = rng.choice(low_offsuit(two))
        x3 = rng.choice(low_offsuit(three))
        rotated = Scenario(hands=(
            view.hand,
            frozenset(set(one) - {x1} | {x3}),
            frozenset(set(two) - {x2} | {x1}),
            frozenset(set(three) - {x3} | {x2}),
        ))
        moved = iec_score(view, rotated, smoke_net).score
        assert abs(moved - base) / base < 0.05
